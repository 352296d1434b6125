#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "aftboost/datagen.hpp"
#include "aftboost/tree.hpp"

using namespace aftboost;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Dataset uncensored_dataset(const std::vector<std::vector<double>>& x,
                           const std::vector<double>& y,
                           std::size_t width) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < width; ++j) names.push_back("x" + std::to_string(j));
  Dataset d(width, names);
  for (std::size_t i = 0; i < y.size(); ++i) d.add_row(x[i], {y[i], y[i]});
  return d;
}

bool same_model(const Model& a, const Model& b) {
  return serialize_model(a) == serialize_model(b);
}

}  // namespace

TEST_CASE("split gain and leaf weight formulas") {
  // alpha=0: gain = 0.5*(GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l))
  CHECK(split_gain(-2.0, 3.0, 1.0, 2.0, 1.0, 0.0) ==
        doctest::Approx(0.5 * (4.0 / 4.0 + 1.0 / 3.0 - 1.0 / 6.0)));
  // Soft threshold shrinks each gradient sum toward zero by alpha.
  CHECK(split_gain(-2.0, 3.0, 1.0, 2.0, 1.0, 0.5) ==
        doctest::Approx(0.5 * (1.5 * 1.5 / 4.0 + 0.5 * 0.5 / 3.0 -
                               0.5 * 0.5 / 6.0)));
  // Gradient sums inside the alpha band are treated as zero.
  CHECK(split_gain(0.3, 1.0, -0.2, 1.0, 1.0, 0.5) == doctest::Approx(0.0));

  CHECK(leaf_weight(-2.0, 3.0, 1.0, 0.0, 1.0) == doctest::Approx(0.5));
  CHECK(leaf_weight(-2.0, 3.0, 1.0, 0.5, 1.0) == doctest::Approx(0.375));
  CHECK(leaf_weight(-2.0, 3.0, 1.0, 0.0, 0.1) == doctest::Approx(0.05));
  CHECK(leaf_weight(0.3, 1.0, 1.0, 0.5, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("tree prediction routing") {
  Tree tree;
  tree.nodes.resize(3);
  tree.nodes[0].feature_index = 0;
  tree.nodes[0].split_threshold = 2.0;
  tree.nodes[0].left_child = 1;
  tree.nodes[0].right_child = 2;
  tree.nodes[0].default_left = true;
  tree.nodes[1].weight = -1.0;
  tree.nodes[2].weight = 4.0;

  double x = 1.5;
  CHECK(tree.predict(&x) == -1.0);
  x = 2.0;  // x < threshold goes left, so the boundary goes right
  CHECK(tree.predict(&x) == 4.0);
  x = 5.0;
  CHECK(tree.predict(&x) == 4.0);
  x = missing_value();
  CHECK(tree.predict(&x) == -1.0);
  tree.nodes[0].default_left = false;
  CHECK(tree.predict(&x) == 4.0);
}

TEST_CASE("initial base score uses finite label anchors") {
  Dataset d(1, {"x"});
  d.add_row({0.0}, {2.0, 2.0});          // uncensored: y = 2
  d.add_row({0.0}, {3.0, kInf});         // right: lower = 3
  d.add_row({0.0}, {0.0, 8.0});          // left: upper/2 = 4
  d.add_row({0.0}, {4.0, 6.0});          // interval: midpoint = 5
  CHECK(initial_base_score(d) == doctest::Approx(std::log(3.5)));
}

TEST_CASE("learning rate zero leaves the base score") {
  GeneratorSpec spec;
  spec.recipe = Recipe::kSin;
  spec.n_rows = 50;
  spec.seed = 1;
  const Dataset d = generate(spec);
  AftParams aft;
  BoostingParams boost;
  boost.learning_rate = 0.0;
  boost.num_rounds = 3;
  const Model model = train(d, aft, boost);
  CHECK(model.base_score == initial_base_score(d));
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    CHECK(model.predict_margin(d.row(i), d.num_features()) == model.base_score);
  }
}

TEST_CASE("constant feature converges to the pooled Newton optimum") {
  // All rows share one feature value, so every tree is a single leaf and
  // boosting reduces to 1-D Newton steps on the pooled objective.
  const std::size_t n = 16;
  Dataset d(1, {"x"});
  for (std::size_t i = 0; i < n; ++i) d.add_row({1.0}, {std::exp(2.0), std::exp(2.0)});

  AftParams aft;
  BoostingParams boost;
  boost.learning_rate = 0.3;
  boost.num_rounds = 100;
  boost.reg_alpha = 0.0;
  boost.reg_lambda = 0.0;
  const Model model = train(d, aft, boost);

  // Oracle: same Newton iteration on the scalar problem.
  double u = initial_base_score(d);
  for (int r = 0; r < boost.num_rounds; ++r) {
    double g = 0.0, h = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const LossDerivatives der = aft_grad_hess(d.label(i), u, aft);
      g += der.gradient;
      h += der.hessian;
    }
    u -= boost.learning_rate * g / h;
  }

  const double x = 1.0;
  const double margin = model.predict_margin(&x, 1);
  CHECK(margin == doctest::Approx(2.0).epsilon(0.01));
  CHECK(margin == doctest::Approx(u).epsilon(1e-9));
}

TEST_CASE("fits a monotone step function") {
  // y = e^1 for x<0.5, e^3 otherwise; the model should separate the groups.
  Dataset d(1, {"x"});
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform();
    const double y = std::exp(x < 0.5 ? 1.0 : 3.0);
    d.add_row({x}, {y, y});
  }
  AftParams aft;
  BoostingParams boost;
  boost.num_rounds = 60;
  boost.learning_rate = 0.3;
  const Model model = train(d, aft, boost);
  int correct = 0;
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    const double m = model.predict_margin(d.row(i), 1);
    const double want = d.feature(i, 0) < 0.5 ? 1.0 : 3.0;
    if (std::abs(m - want) < 0.5) ++correct;
  }
  CHECK(correct >= 190);
}

TEST_CASE("max_depth=1 yields stumps") {
  GeneratorSpec spec;
  spec.recipe = Recipe::kLinear;
  spec.n_rows = 80;
  spec.seed = 2;
  const Dataset d = generate(spec);
  AftParams aft;
  BoostingParams boost;
  boost.max_depth = 1;
  boost.num_rounds = 5;
  const Model model = train(d, aft, boost);
  for (const Tree& t : model.trees) {
    CHECK(t.nodes.size() <= 3);
    if (t.nodes.size() == 3) {
      CHECK(t.nodes[0].feature_index >= 0);
      CHECK(t.nodes[1].feature_index == -1);
      CHECK(t.nodes[2].feature_index == -1);
    }
  }
}

TEST_CASE("depth limit is respected") {
  GeneratorSpec spec;
  spec.recipe = Recipe::kModel2;
  spec.n_rows = 300;
  spec.seed = 5;
  const Dataset d = generate(spec);
  AftParams aft;
  BoostingParams boost;
  boost.max_depth = 2;
  boost.num_rounds = 10;
  const Model model = train(d, aft, boost);
  for (const Tree& t : model.trees) {
    // depth of every node <= 2
    std::vector<int> depth(t.nodes.size(), 0);
    for (std::size_t k = 0; k < t.nodes.size(); ++k) {
      const TreeNode& node = t.nodes[k];
      if (node.feature_index >= 0) {
        CHECK(depth[k] < 2);
        depth[node.left_child] = depth[k] + 1;
        depth[node.right_child] = depth[k] + 1;
      }
    }
  }
}

TEST_CASE("large min_child_weight forces a stump") {
  GeneratorSpec spec;
  spec.recipe = Recipe::kSin;
  spec.n_rows = 100;
  spec.seed = 6;
  const Dataset d = generate(spec);
  AftParams aft;
  BoostingParams boost;
  boost.num_rounds = 3;
  boost.min_child_weight = 1e9;  // no split can satisfy this
  const Model model = train(d, aft, boost);
  for (const Tree& t : model.trees) {
    CHECK(t.nodes.size() == 1);
  }
}

TEST_CASE("training is deterministic and thread-count invariant") {
  GeneratorSpec spec;
  spec.recipe = Recipe::kModel3;
  spec.n_rows = 200;
  spec.seed = 8;
  const Dataset d = generate(spec);
  AftParams aft;
  BoostingParams boost;
  boost.num_rounds = 15;
  const Model a = train(d, aft, boost);
  const Model b = train(d, aft, boost);
  CHECK(same_model(a, b));

  BoostingParams threaded = boost;
  threaded.threads = 4;
  Model c = train(d, aft, threaded);
  c.boost.threads = boost.threads;  // only the recorded setting may differ
  CHECK(same_model(a, c));
}

TEST_CASE("missing values route by the learned default direction") {
  // Feature informative where present; 30% missing.
  Dataset d(1, {"x"});
  Rng rng(10);
  for (int i = 0; i < 300; ++i) {
    const double u = rng.uniform();
    double x = rng.uniform();
    double y;
    if (u < 0.3) {
      x = missing_value();
      y = std::exp(3.0);  // missing rows behave like the high group
    } else {
      y = std::exp(x < 0.5 ? 1.0 : 3.0);
    }
    d.add_row({x}, {y, y});
  }
  AftParams aft;
  BoostingParams boost;
  boost.num_rounds = 40;
  boost.learning_rate = 0.3;
  const Model model = train(d, aft, boost);
  const double x_missing = missing_value();
  CHECK(model.predict_margin(&x_missing, 1) == doctest::Approx(3.0).epsilon(0.2));
  const double x_low = 0.25;
  CHECK(model.predict_margin(&x_low, 1) == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("model serialization round-trip") {
  GeneratorSpec spec;
  spec.recipe = Recipe::kAbs;
  spec.n_rows = 120;
  spec.seed = 12;
  const Dataset d = generate(spec);
  AftParams aft;
  aft.dist = Distribution::kLogistic;
  aft.sigma = 0.7;
  BoostingParams boost;
  boost.num_rounds = 8;
  boost.max_depth = 3;
  const Model model = train(d, aft, boost);

  const std::string text = serialize_model(model);
  const Model back = parse_model(text);
  CHECK(serialize_model(back) == text);
  CHECK(back.aft.dist == Distribution::kLogistic);
  CHECK(back.aft.sigma == 0.7);
  CHECK(back.base_score == model.base_score);
  REQUIRE(back.trees.size() == model.trees.size());
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    CHECK(back.predict_margin(d.row(i), d.num_features()) ==
          model.predict_margin(d.row(i), d.num_features()));
  }

  const std::string path = "tmp_test_model.json";
  save_model(model, path);
  const Model loaded = load_model(path);
  CHECK(serialize_model(loaded) == text);
  std::remove(path.c_str());
}

TEST_CASE("format version mismatch is rejected") {
  Model m;
  m.num_features = 1;
  std::string text = serialize_model(m);
  const std::string needle = "\"format_version\": 1";
  const auto pos = text.find(needle);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, needle.size(), "\"format_version\": 2");
  CHECK_THROWS_AS(parse_model(text), DataError);
}

TEST_CASE("prediction width mismatch is rejected") {
  Model m;
  m.num_features = 3;
  std::vector<double> narrow = {1.0, 2.0};
  CHECK_THROWS_AS(m.predict_margin(narrow), DataError);
}

TEST_CASE("predict_time exponentiates the margin") {
  Model m;
  m.num_features = 1;
  m.base_score = 1.5;
  CHECK(m.predict_time({0.0}) == doctest::Approx(std::exp(1.5)));
}

TEST_CASE("parameter validation") {
  BoostingParams p;
  CHECK_NOTHROW(p.validate());
  p.max_depth = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = BoostingParams{};
  p.learning_rate = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = BoostingParams{};
  p.max_bins = 1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = BoostingParams{};
  p.num_rounds = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("validation hook sees per-round margins") {
  GeneratorSpec spec;
  spec.recipe = Recipe::kSin;
  spec.n_rows = 80;
  spec.seed = 20;
  const Dataset d = generate(spec);
  spec.seed = 21;
  const Dataset v = generate(spec);
  AftParams aft;
  BoostingParams boost;
  boost.num_rounds = 7;
  int calls = 0;
  const Model model = train(d, aft, boost, &v,
                            [&](int round, const std::vector<double>& tm,
                                const std::vector<double>& vm) {
                              CHECK(round == calls);
                              CHECK(tm.size() == d.num_rows());
                              CHECK(vm.size() == v.num_rows());
                              ++calls;
                            });
  CHECK(calls == 7);
  // Margins reported at the final round match the finished model.
  std::vector<double> final_margins;
  train(d, aft, boost, nullptr,
        [&](int round, const std::vector<double>& tm,
            const std::vector<double>&) {
          if (round == boost.num_rounds - 1) final_margins = tm;
        });
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    CHECK(final_margins[i] ==
          doctest::Approx(model.predict_margin(d.row(i), d.num_features()))
              .epsilon(1e-12));
  }
}
