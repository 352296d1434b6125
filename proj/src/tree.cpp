#include "aftboost/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace aftboost {

void BoostingParams::validate() const {
  if (!(learning_rate > 0.0) && learning_rate != 0.0) {
    throw std::invalid_argument("learning_rate must be non-negative");
  }
  if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  if (min_child_weight < 0.0) {
    throw std::invalid_argument("min_child_weight must be >= 0");
  }
  if (reg_alpha < 0.0) throw std::invalid_argument("reg_alpha must be >= 0");
  if (reg_lambda < 0.0) throw std::invalid_argument("reg_lambda must be >= 0");
  if (num_rounds < 1) throw std::invalid_argument("num_rounds must be >= 1");
  if (max_bins < 2) throw std::invalid_argument("max_bins must be >= 2");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

namespace {

inline double soft_threshold(double g, double alpha) {
  if (g > alpha) return g - alpha;
  if (g < -alpha) return g + alpha;
  return 0.0;
}

inline double structure_score(double g, double h, double reg_lambda,
                              double reg_alpha) {
  const double t = soft_threshold(g, reg_alpha);
  return t * t / (h + reg_lambda);
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (threads <= 1 || n < 2) {
    body(0, n);
    return;
  }
  const std::size_t nt = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + nt - 1) / nt;
  for (std::size_t t = 0; t < nt; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

double split_gain(double grad_left, double hess_left, double grad_right,
                  double hess_right, double reg_lambda, double reg_alpha) {
  return 0.5 * (structure_score(grad_left, hess_left, reg_lambda, reg_alpha) +
                structure_score(grad_right, hess_right, reg_lambda, reg_alpha) -
                structure_score(grad_left + grad_right, hess_left + hess_right,
                                reg_lambda, reg_alpha));
}

double leaf_weight(double grad_sum, double hess_sum, double reg_lambda,
                   double reg_alpha, double learning_rate) {
  return -learning_rate * soft_threshold(grad_sum, reg_alpha) /
         (hess_sum + reg_lambda);
}

double Tree::predict(const double* features) const {
  std::int32_t idx = 0;
  while (nodes[idx].feature_index >= 0) {
    const TreeNode& node = nodes[idx];
    const double v = features[node.feature_index];
    if (std::isnan(v)) {
      idx = node.default_left ? node.left_child : node.right_child;
    } else {
      idx = v < node.split_threshold ? node.left_child : node.right_child;
    }
  }
  return nodes[idx].weight;
}

double Model::predict_margin(const double* features, std::size_t width) const {
  if (width != num_features) {
    throw DataError("feature width mismatch: model expects " +
                    std::to_string(num_features) + ", got " +
                    std::to_string(width));
  }
  double margin = base_score;
  for (const Tree& tree : trees) margin += tree.predict(features);
  return margin;
}

double Model::predict_margin(const std::vector<double>& features) const {
  return predict_margin(features.data(), features.size());
}

double Model::predict_time(const std::vector<double>& features) const {
  return std::exp(predict_margin(features));
}

double initial_base_score(const Dataset& dataset) {
  if (dataset.num_rows() == 0) throw DataError("empty dataset");
  double acc = 0.0;
  for (const LabelRange& label : dataset.labels()) {
    switch (classify_censoring(label)) {
      case Censoring::kUncensored:
        acc += label.lower;
        break;
      case Censoring::kRight:
        acc += label.lower;
        break;
      case Censoring::kLeft:
        acc += 0.5 * label.upper;
        break;
      case Censoring::kInterval:
        acc += 0.5 * (label.lower + label.upper);
        break;
    }
  }
  const double mean = acc / static_cast<double>(dataset.num_rows());
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw DataError("degenerate labels: no positive finite anchor mean");
  }
  return std::log(mean);
}

namespace {

constexpr std::uint16_t kMissingBin = 0xFFFF;

// Per-feature quantile cut points; x < cuts[b] routes bins 0..b left.
struct BinCuts {
  std::vector<std::vector<double>> cuts;  // ascending per feature
  std::vector<std::uint32_t> offsets;     // flat histogram offsets
  std::uint32_t total_bins = 0;

  std::uint32_t num_bins(std::size_t f) const {
    return static_cast<std::uint32_t>(cuts[f].size()) + 1;
  }
};

BinCuts build_cuts(const Dataset& data, int max_bins) {
  const std::size_t p = data.num_features();
  BinCuts out;
  out.cuts.resize(p);
  std::vector<double> values;
  for (std::size_t f = 0; f < p; ++f) {
    values.clear();
    for (std::size_t i = 0; i < data.num_rows(); ++i) {
      const double v = data.feature(i, f);
      if (!std::isnan(v)) values.push_back(v);
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    const std::size_t m = values.size();
    std::vector<double>& cuts = out.cuts[f];
    if (m >= 2) {
      // Thresholds sit midway between adjacent distinct values so that unseen
      // points between two training values are grouped with the nearer one.
      const std::size_t max_cuts = static_cast<std::size_t>(max_bins) - 1;
      if (m - 1 <= max_cuts) {
        for (std::size_t k = 1; k < m; ++k) {
          cuts.push_back(0.5 * (values[k - 1] + values[k]));
        }
      } else {
        for (std::size_t k = 1; k < static_cast<std::size_t>(max_bins); ++k) {
          const std::size_t idx =
              std::max<std::size_t>(k * m / static_cast<std::size_t>(max_bins), 1);
          const double v = 0.5 * (values[idx - 1] + values[idx]);
          if (cuts.empty() || v > cuts.back()) cuts.push_back(v);
        }
      }
    }
  }
  out.offsets.resize(p);
  std::uint32_t offset = 0;
  for (std::size_t f = 0; f < p; ++f) {
    out.offsets[f] = offset;
    offset += out.num_bins(f);
  }
  out.total_bins = offset;
  return out;
}

std::vector<std::uint16_t> bin_rows(const Dataset& data, const BinCuts& cuts) {
  const std::size_t n = data.num_rows();
  const std::size_t p = data.num_features();
  std::vector<std::uint16_t> binned(n * p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t f = 0; f < p; ++f) {
      const double v = data.feature(i, f);
      if (std::isnan(v)) {
        binned[i * p + f] = kMissingBin;
      } else {
        const auto& c = cuts.cuts[f];
        binned[i * p + f] = static_cast<std::uint16_t>(
            std::upper_bound(c.begin(), c.end(), v) - c.begin());
      }
    }
  }
  return binned;
}

struct GradHessSum {
  double grad = 0.0;
  double hess = 0.0;
};

struct SplitCandidate {
  bool found = false;
  double gain = 0.0;
  std::size_t feature = 0;
  std::uint32_t bin = 0;  // split after this bin; threshold = cuts[bin]
  bool default_left = false;
  GradHessSum left;   // includes missing rows when default_left
  GradHessSum right;
};

struct GrowNode {
  std::int32_t id;
  int depth;
  std::vector<std::uint32_t> rows;
  GradHessSum sum;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const BinCuts& cuts,
              const std::vector<std::uint16_t>& binned,
              const BoostingParams& params)
      : data_(data), cuts_(cuts), binned_(binned), params_(params) {}

  Tree build(const std::vector<double>& grad, const std::vector<double>& hess,
             std::vector<double>& margins) {
    Tree tree;
    const std::size_t n = data_.num_rows();

    GrowNode root;
    root.id = 0;
    root.depth = 0;
    root.rows.resize(n);
    std::iota(root.rows.begin(), root.rows.end(), 0u);
    for (std::size_t i = 0; i < n; ++i) {
      root.sum.grad += grad[i];
      root.sum.hess += hess[i];
    }
    tree.nodes.emplace_back();

    std::vector<GrowNode> frontier;
    frontier.push_back(std::move(root));

    while (!frontier.empty()) {
      std::vector<GrowNode> next;
      for (GrowNode& node : frontier) {
        SplitCandidate best;
        if (node.depth < params_.max_depth && node.rows.size() >= 2) {
          best = find_best_split(node, grad, hess);
        }
        if (!best.found) {
          finalize_leaf(tree, node, margins);
          continue;
        }
        apply_split(tree, node, best, next);
      }
      frontier = std::move(next);
    }
    return tree;
  }

 private:
  SplitCandidate find_best_split(const GrowNode& node,
                                 const std::vector<double>& grad,
                                 const std::vector<double>& hess) {
    const std::size_t p = data_.num_features();
    // Per-node histogram plus a missing-value bucket per feature.
    std::vector<GradHessSum> hist(cuts_.total_bins);
    std::vector<GradHessSum> missing(p);

    parallel_for(p, params_.threads, [&](std::size_t f0, std::size_t f1) {
      for (std::uint32_t i : node.rows) {
        const std::uint16_t* row_bins = binned_.data() + std::size_t(i) * p;
        const double g = grad[i];
        const double h = hess[i];
        for (std::size_t f = f0; f < f1; ++f) {
          const std::uint16_t b = row_bins[f];
          if (b == kMissingBin) {
            missing[f].grad += g;
            missing[f].hess += h;
          } else {
            GradHessSum& cell = hist[cuts_.offsets[f] + b];
            cell.grad += g;
            cell.hess += h;
          }
        }
      }
    });

    SplitCandidate best;
    for (std::size_t f = 0; f < p; ++f) {
      const std::uint32_t nb = cuts_.num_bins(f);
      if (nb < 2) continue;
      const GradHessSum miss = missing[f];
      GradHessSum nonmiss;
      for (std::uint32_t b = 0; b < nb; ++b) {
        nonmiss.grad += hist[cuts_.offsets[f] + b].grad;
        nonmiss.hess += hist[cuts_.offsets[f] + b].hess;
      }
      GradHessSum left;
      for (std::uint32_t b = 0; b + 1 < nb; ++b) {
        left.grad += hist[cuts_.offsets[f] + b].grad;
        left.hess += hist[cuts_.offsets[f] + b].hess;
        const GradHessSum right{nonmiss.grad - left.grad,
                                nonmiss.hess - left.hess};
        // Missing rows routed right, then left; the higher gain wins and
        // the first candidate in scan order wins exact ties.
        for (int variant = 0; variant < 2; ++variant) {
          const bool default_left = variant == 1;
          const GradHessSum l{left.grad + (default_left ? miss.grad : 0.0),
                              left.hess + (default_left ? miss.hess : 0.0)};
          const GradHessSum r{right.grad + (default_left ? 0.0 : miss.grad),
                              right.hess + (default_left ? 0.0 : miss.hess)};
          if (l.hess < params_.min_child_weight ||
              r.hess < params_.min_child_weight) {
            continue;
          }
          const double gain = split_gain(l.grad, l.hess, r.grad, r.hess,
                                         params_.reg_lambda, params_.reg_alpha);
          if (gain > 0.0 && (!best.found || gain > best.gain)) {
            best.found = true;
            best.gain = gain;
            best.feature = f;
            best.bin = b;
            best.default_left = default_left;
            best.left = l;
            best.right = r;
          }
        }
      }
    }
    return best;
  }

  void apply_split(Tree& tree, GrowNode& node, const SplitCandidate& best,
                   std::vector<GrowNode>& next) {
    const std::size_t p = data_.num_features();
    TreeNode& parent = tree.nodes[node.id];
    parent.feature_index = static_cast<std::int32_t>(best.feature);
    parent.split_threshold = cuts_.cuts[best.feature][best.bin];
    parent.default_left = best.default_left;
    parent.left_child = static_cast<std::int32_t>(tree.nodes.size());
    parent.right_child = parent.left_child + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();

    GrowNode left, right;
    left.id = parent.left_child;
    right.id = parent.right_child;
    left.depth = right.depth = node.depth + 1;
    left.sum = best.left;
    right.sum = best.right;
    for (std::uint32_t i : node.rows) {
      const std::uint16_t b = binned_[std::size_t(i) * p + best.feature];
      const bool go_left =
          b == kMissingBin ? best.default_left : b <= best.bin;
      (go_left ? left.rows : right.rows).push_back(i);
    }
    next.push_back(std::move(left));
    next.push_back(std::move(right));
  }

  void finalize_leaf(Tree& tree, const GrowNode& node,
                     std::vector<double>& margins) {
    const double w =
        leaf_weight(node.sum.grad, node.sum.hess, params_.reg_lambda,
                    params_.reg_alpha, params_.learning_rate);
    tree.nodes[node.id].weight = w;
    for (std::uint32_t i : node.rows) margins[i] += w;
  }

  const Dataset& data_;
  const BinCuts& cuts_;
  const std::vector<std::uint16_t>& binned_;
  const BoostingParams& params_;
};

}  // namespace

Model train(const Dataset& dataset, const AftParams& aft,
            const BoostingParams& boost, const Dataset* valid,
            const EvalHook& hook) {
  boost.validate();
  if (dataset.num_rows() == 0) throw DataError("empty dataset");
  if (!(aft.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");

  Model model;
  model.aft = aft;
  model.boost = boost;
  model.num_features = dataset.num_features();
  model.base_score = initial_base_score(dataset);

  const std::size_t n = dataset.num_rows();
  const BinCuts cuts = build_cuts(dataset, boost.max_bins);
  const std::vector<std::uint16_t> binned = bin_rows(dataset, cuts);

  std::vector<double> margins(n, model.base_score);
  std::vector<double> valid_margins;
  if (valid) {
    if (valid->num_features() != dataset.num_features()) {
      throw DataError("validation feature width mismatch");
    }
    valid_margins.assign(valid->num_rows(), model.base_score);
  }

  std::vector<double> grad(n), hess(n);
  TreeBuilder builder(dataset, cuts, binned, boost);

  for (int round = 0; round < boost.num_rounds; ++round) {
    parallel_for(n, boost.threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const LossDerivatives d =
            aft_grad_hess(dataset.label(i), margins[i], aft);
        grad[i] = d.gradient;
        hess[i] = d.hessian;
      }
    });
    Tree tree = builder.build(grad, hess, margins);
    if (valid) {
      for (std::size_t i = 0; i < valid->num_rows(); ++i) {
        valid_margins[i] += tree.predict(valid->row(i));
      }
    }
    model.trees.push_back(std::move(tree));
    if (hook) hook(round, margins, valid_margins);
  }
  return model;
}

}  // namespace aftboost
