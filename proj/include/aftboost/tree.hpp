#ifndef AFTBOOST_TREE_HPP_
#define AFTBOOST_TREE_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aftboost/data.hpp"
#include "aftboost/loss.hpp"

namespace aftboost {

struct BoostingParams {
  double learning_rate = 0.1;
  int max_depth = 6;
  double min_child_weight = 1.0;   // minimum hessian sum per child
  double reg_alpha = 0.001;        // L1 on leaf weights
  double reg_lambda = 1.0;         // L2 on leaf weights
  int num_rounds = 100;
  int max_bins = 256;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const;
};

// Structure score gain of splitting (G,H) into (G_L,H_L) and (G_R,H_R),
// with soft-thresholding by reg_alpha on the gradient sums.
double split_gain(double grad_left, double hess_left, double grad_right,
                  double hess_right, double reg_lambda, double reg_alpha);

// Newton-step leaf value, shrinkage included.
double leaf_weight(double grad_sum, double hess_sum, double reg_lambda,
                   double reg_alpha, double learning_rate);

struct TreeNode {
  std::int32_t feature_index = -1;  // -1 marks a leaf
  double split_threshold = 0.0;     // x < threshold goes left
  std::int32_t left_child = -1;
  std::int32_t right_child = -1;
  bool default_left = false;        // routing for missing values
  double weight = 0.0;              // leaf weight (learning-rate scaled)
};

struct Tree {
  std::vector<TreeNode> nodes;
  double predict(const double* features) const;
};

struct Model {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  double base_score = 0.0;
  std::size_t num_features = 0;
  std::vector<Tree> trees;
  AftParams aft;
  BoostingParams boost;

  double predict_margin(const double* features, std::size_t width) const;
  double predict_margin(const std::vector<double>& features) const;
  double predict_time(const std::vector<double>& features) const;
};

std::string serialize_model(const Model& model);
Model parse_model(const std::string& text);
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

// Per-round callback: round index (0-based) and the current margins on the
// training set and the optional validation set (empty when absent).
using EvalHook =
    std::function<void(int round, const std::vector<double>& train_margins,
                       const std::vector<double>& valid_margins)>;

// ln of the mean finite label anchor: y (uncensored), lower (right-censored),
// upper/2 (left-censored), midpoint (interval).
double initial_base_score(const Dataset& dataset);

Model train(const Dataset& dataset, const AftParams& aft,
            const BoostingParams& boost, const Dataset* valid = nullptr,
            const EvalHook& hook = nullptr);

}  // namespace aftboost

#endif  // AFTBOOST_TREE_HPP_
