#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aftboost/tree.hpp"

namespace aftboost {

using nlohmann::json;

std::string serialize_model(const Model& model) {
  json doc;
  doc["format_version"] = model.format_version;
  doc["objective"] = "survival:aft";
  doc["num_features"] = model.num_features;
  doc["base_score"] = model.base_score;
  doc["aft_loss_distribution"] = distribution_name(model.aft.dist);
  doc["aft_loss_distribution_scale"] = model.aft.sigma;
  doc["epsilon"] = model.aft.epsilon;
  doc["grad_clip"] = model.aft.grad_clip;
  doc["hessian_floor"] = model.aft.hessian_floor;

  json params;
  params["learning_rate"] = model.boost.learning_rate;
  params["max_depth"] = model.boost.max_depth;
  params["min_child_weight"] = model.boost.min_child_weight;
  params["reg_alpha"] = model.boost.reg_alpha;
  params["reg_lambda"] = model.boost.reg_lambda;
  params["num_rounds"] = model.boost.num_rounds;
  params["max_bins"] = model.boost.max_bins;
  params["seed"] = model.boost.seed;
  params["threads"] = model.boost.threads;
  doc["params"] = params;

  json trees = json::array();
  for (const Tree& tree : model.trees) {
    json t;
    json feature = json::array(), threshold = json::array();
    json left = json::array(), right = json::array();
    json default_left = json::array(), weight = json::array();
    for (const TreeNode& node : tree.nodes) {
      feature.push_back(node.feature_index);
      threshold.push_back(node.split_threshold);
      left.push_back(node.left_child);
      right.push_back(node.right_child);
      default_left.push_back(node.default_left);
      weight.push_back(node.weight);
    }
    t["feature_index"] = std::move(feature);
    t["split_threshold"] = std::move(threshold);
    t["left_child"] = std::move(left);
    t["right_child"] = std::move(right);
    t["default_left"] = std::move(default_left);
    t["weight"] = std::move(weight);
    trees.push_back(std::move(t));
  }
  doc["trees"] = std::move(trees);
  return doc.dump(2) + "\n";
}

Model parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model parse error: ") + e.what());
  }
  try {
    Model model;
    model.format_version = doc.at("format_version").get<int>();
    if (model.format_version != Model::kFormatVersion) {
      throw DataError("unsupported model format_version " +
                      std::to_string(model.format_version));
    }
    model.num_features = doc.at("num_features").get<std::size_t>();
    model.base_score = doc.at("base_score").get<double>();
    model.aft.dist =
        distribution_from_name(doc.at("aft_loss_distribution").get<std::string>());
    model.aft.sigma = doc.at("aft_loss_distribution_scale").get<double>();
    model.aft.epsilon = doc.at("epsilon").get<double>();
    model.aft.grad_clip = doc.at("grad_clip").get<double>();
    model.aft.hessian_floor = doc.at("hessian_floor").get<double>();

    const json& params = doc.at("params");
    model.boost.learning_rate = params.at("learning_rate").get<double>();
    model.boost.max_depth = params.at("max_depth").get<int>();
    model.boost.min_child_weight = params.at("min_child_weight").get<double>();
    model.boost.reg_alpha = params.at("reg_alpha").get<double>();
    model.boost.reg_lambda = params.at("reg_lambda").get<double>();
    model.boost.num_rounds = params.at("num_rounds").get<int>();
    model.boost.max_bins = params.at("max_bins").get<int>();
    model.boost.seed = params.at("seed").get<std::uint64_t>();
    model.boost.threads = params.at("threads").get<int>();

    for (const json& t : doc.at("trees")) {
      Tree tree;
      const auto& feature = t.at("feature_index");
      const std::size_t count = feature.size();
      for (std::size_t k = 0; k < count; ++k) {
        TreeNode node;
        node.feature_index = feature.at(k).get<std::int32_t>();
        node.split_threshold = t.at("split_threshold").at(k).get<double>();
        node.left_child = t.at("left_child").at(k).get<std::int32_t>();
        node.right_child = t.at("right_child").at(k).get<std::int32_t>();
        node.default_left = t.at("default_left").at(k).get<bool>();
        node.weight = t.at("weight").at(k).get<double>();
        tree.nodes.push_back(node);
      }
      model.trees.push_back(std::move(tree));
    }
    return model;
  } catch (const json::exception& e) {
    throw DataError(std::string("model parse error: ") + e.what());
  }
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << serialize_model(model);
  if (!out) throw DataError("failed writing '" + path + "'");
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace aftboost
