// Copyright 2026 The sgwd Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "sgwd/embedding.hpp"
#include "sgwd/error.hpp"

using namespace sgwd;

namespace {

// o <- a, h_o = [0,0], h_a = [1,0]
SceneGraph two_node() {
  return SceneGraph::checked({{"o", NodeKind::kObject, "thing", std::vector<double>{0, 0}},
                              {"a", NodeKind::kAttribute, "quality", std::vector<double>{1, 0}}},
                             {{"a", "o"}});
}

SceneGraph canonical() {
  return SceneGraph::checked({{"man", NodeKind::kObject, "man", {}},
                              {"bike", NodeKind::kObject, "bike", {}},
                              {"riding", NodeKind::kRelation, "riding", {}},
                              {"red", NodeKind::kAttribute, "red", {}}},
                             {{"man", "riding"}, {"riding", "bike"}, {"red", "bike"}});
}

EmbeddingMatrix abs_rows(EmbeddingMatrix x) {
  for (double& v : x.values.data()) v = std::abs(v);
  return x;
}

}  // namespace

TEST_CASE("featurize: determinism and pass-through") {
  SceneGraph g({{"d1", NodeKind::kObject, "dog", {}},
                {"d2", NodeKind::kObject, "dog", {}},
                {"d3", NodeKind::kAttribute, "dog", {}},
                {"e", NodeKind::kObject, "x", std::vector<double>{1, 0, 0}}},
               {});
  auto x = featurize(g, 3, 42);
  CHECK(x.rows() == 4);
  CHECK(x.layer == 0);
  for (std::size_t c = 0; c < 3; ++c) CHECK(x.values(0, c) == x.values(1, c));
  bool differs = false;
  for (std::size_t c = 0; c < 3; ++c) differs |= x.values(0, c) != x.values(2, c);
  CHECK(differs);
  CHECK(x.values(3, 0) == 1.0);
  CHECK(x.values(3, 1) == 0.0);
  for (double v : x.values.data()) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }

  auto other_seed = featurize(g, 3, 43);
  CHECK(other_seed.values(0, 0) != x.values(0, 0));
  CHECK(featurize(g, 3, 42).values == x.values);
}

TEST_CASE("featurize: wrong explicit dimension") {
  SceneGraph g({{"e", NodeKind::kObject, "x", std::vector<double>{1, 0}}}, {});
  CHECK_THROWS_AS(featurize(g, 3, 0), ShapeError);
  CHECK_THROWS_AS(featurize(g, 0, 0), ShapeError);
}

TEST_CASE("propagate_nonparametric: hand-traced two-node example") {
  const SceneGraph g = two_node();
  const EmbeddingMatrix x0 = featurize(g, 2, 0);
  auto x1 = propagate_nonparametric(g, x0, 1);
  // Single neighbor forces alpha = 1: both rows become [1, 0].
  CHECK(x1.values == Matrix{{1, 0}, {1, 0}});
  CHECK(x1.layer == 1);
  auto oracle = oracle::scalar_propagate(g, oracle::to_rows(x0.values), 1);
  CHECK(oracle::to_rows(x1.values) == oracle);
}

TEST_CASE("propagate_nonparametric: L = 0 and isolated nodes") {
  const SceneGraph g({{"o", NodeKind::kObject, "dog", {}},
                      {"r", NodeKind::kRelation, "near", {}},
                      {"lone", NodeKind::kObject, "cat", {}},
                      {"p", NodeKind::kObject, "tree", {}}},
                     {{"o", "r"}, {"r", "p"}});
  const auto x0 = featurize(g, 4, 9);
  CHECK(propagate_nonparametric(g, x0, 0).values == x0.values);
  auto x3 = propagate_nonparametric(g, x0, 3);
  for (std::size_t c = 0; c < 4; ++c) CHECK(x3.values(2, c) == x0.values(2, c));
}

TEST_CASE("propagate_nonparametric: all-zero distances use uniform weights") {
  // Object with two attribute neighbors identical to it.
  SceneGraph g({{"o", NodeKind::kObject, "o", std::vector<double>{0.5, -1}},
                {"a1", NodeKind::kAttribute, "a1", std::vector<double>{0.5, -1}},
                {"a2", NodeKind::kAttribute, "a2", std::vector<double>{0.5, -1}}},
               {{"a1", "o"}, {"a2", "o"}});
  auto x1 = propagate_nonparametric(g, featurize(g, 2, 0), 1);
  // 1/2 * h + 1/2 * h + h = 2h
  CHECK(x1.values(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(x1.values(0, 1) == doctest::Approx(-2.0).epsilon(1e-15));

  // Continuity: nudging one neighbor by t leaves the result within O(t) of
  // the uniform completion.
  for (double t : {1e-3, 1e-6, 1e-9}) {
    SceneGraph near({{"o", NodeKind::kObject, "o", std::vector<double>{0.5, -1}},
                     {"a1", NodeKind::kAttribute, "a1", std::vector<double>{0.5 + t, -1}},
                     {"a2", NodeKind::kAttribute, "a2", std::vector<double>{0.5 - t, -1}}},
                    {{"a1", "o"}, {"a2", "o"}});
    auto y = propagate_nonparametric(near, featurize(near, 2, 0), 1);
    CHECK(std::abs(y.values(0, 0) - 1.0) <= 2 * t);
    CHECK(std::abs(y.values(0, 1) + 2.0) <= 2 * t);
  }
}

TEST_CASE("propagate_nonparametric: matches scalar evaluator on random graphs") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    auto g = testing::random_scene_graph(rng, 2 + trial % 4, 1 + trial % 3, trial % 4);
    auto x0 = featurize(g, 1 + trial % 5, trial);
    for (std::size_t layers : {1u, 2u, 3u}) {
      auto got = propagate_nonparametric(g, x0, layers);
      auto want = oracle::scalar_propagate(g, oracle::to_rows(x0.values), layers);
      for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t c = 0; c < x0.dim(); ++c) {
          CHECK(got.values(i, c) == doctest::Approx(want[i][c]).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("propagate_nonparametric: inverse-distance weighting") {
  // Object at 0 with attribute neighbors at 1 and 2 (1-d).
  SceneGraph g({{"o", NodeKind::kObject, "o", std::vector<double>{0}},
                {"a1", NodeKind::kAttribute, "a1", std::vector<double>{1}},
                {"a2", NodeKind::kAttribute, "a2", std::vector<double>{2}}},
               {{"a1", "o"}, {"a2", "o"}});
  auto x0 = featurize(g, 1, 0);
  // distance weights 1/5, 4/5 -> 0.2*1 + 0.8*2 = 1.8
  CHECK(propagate_nonparametric(g, x0, 1).values(0, 0) == doctest::Approx(1.8));
  // inverse weights (1, 1/4) normalized -> 0.8*1 + 0.2*2 = 1.2
  CHECK(propagate_nonparametric(g, x0, 1, NeighborWeighting::kInverseDistance).values(0, 0) ==
        doctest::Approx(1.2));
}

TEST_CASE("propagate_parametric: closed-form cases") {
  const SceneGraph g = canonical();
  const auto x0 = abs_rows(featurize(g, 3, 5));

  SUBCASE("zero weights keep non-negative input") {
    auto w = ParametricWeights::filled(2, Matrix(3, 3));
    CHECK(propagate_parametric(g, x0, w).values == x0.values);
  }
  SUBCASE("identity weights add the single neighbor") {
    auto w = ParametricWeights::filled(1, Matrix::identity(3));
    auto x1 = propagate_parametric(g, x0, w);
    // red has exactly one typed neighbor, bike (row 1)
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(x1.values(3, c) == doctest::Approx(x0.values(3, c) + x0.values(1, c)));
    }
  }
  SUBCASE("negative identity clamps at zero") {
    SceneGraph pair({{"o", NodeKind::kObject, "o", std::vector<double>{1}},
                     {"a", NodeKind::kAttribute, "a", std::vector<double>{1}}},
                    {{"a", "o"}});
    Matrix neg{{-1}};
    auto x1 = propagate_parametric(pair, featurize(pair, 1, 0), ParametricWeights::filled(1, neg));
    CHECK(x1.values == Matrix{{0}, {0}});
  }
  SUBCASE("weight chosen by neighbor kind") {
    // Object "bike" sees relation "riding" and attribute "red"; zero the
    // relation weight and check only the attribute contributes.
    ParametricWeights w = ParametricWeights::filled(1, Matrix::identity(3));
    w.layers[0][static_cast<std::size_t>(NodeKind::kRelation)] = Matrix(3, 3);
    auto x1 = propagate_parametric(g, x0, w);
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(x1.values(1, c) == doctest::Approx(x0.values(1, c) + x0.values(3, c)));
    }
  }
}

TEST_CASE("propagate_parametric: shape and finiteness errors") {
  const SceneGraph g = canonical();
  const auto x0 = featurize(g, 3, 5);
  CHECK_THROWS_AS(propagate_parametric(g, x0, ParametricWeights::filled(1, Matrix(2, 2))),
                  ShapeError);
  Matrix bad = Matrix::identity(3);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(propagate_parametric(g, x0, ParametricWeights::filled(1, bad)), NumericError);
  PropagationConfig cfg;
  cfg.mode = PropagationMode::kParametric;
  cfg.layers = 2;
  cfg.weights = ParametricWeights::sample(1, 3, 0);
  CHECK_THROWS_AS(propagate(g, x0, cfg), ShapeError);
  EmbeddingMatrix short_x{Matrix(2, 3), 0};
  CHECK_THROWS_AS(propagate_nonparametric(g, short_x, 1), ShapeError);
}

TEST_CASE("propagate_parametric: ReLU range and sampled weights") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = testing::random_scene_graph(rng, 2 + trial % 3, trial % 4, trial % 3);
    auto w = ParametricWeights::sample(3, 4, trial);
    for (const auto& layer : w.layers) {
      for (const auto& m : layer) {
        for (double v : m.data()) {
          CHECK(v >= -0.1);
          CHECK(v <= 0.1);
        }
      }
    }
    auto x = propagate_parametric(g, featurize(g, 4, trial), w);
    for (double v : x.values.data()) CHECK(v >= 0.0);
  }
}

TEST_CASE("embedding equivariance under node reordering and relabeling") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = testing::random_scene_graph(rng, 2 + trial % 4, 1 + trial % 3, trial % 3);
    const auto perm = testing::random_permutation(rng, g.size());
    const auto h = testing::reorder_nodes(g, perm);

    // Rename every id; labels (and hence features) stay.
    std::vector<Node> renamed = g.nodes();
    std::vector<Edge> edges = g.edges();
    for (auto& n : renamed) n.id = "renamed-" + n.id;
    for (auto& e : edges) {
      e.source = "renamed-" + e.source;
      e.target = "renamed-" + e.target;
    }
    const SceneGraph r(renamed, edges);

    PropagationConfig np;
    PropagationConfig par;
    par.mode = PropagationMode::kParametric;
    par.weights = ParametricWeights::sample(par.layers, 3, trial);
    for (const auto* cfg : {&np, &par}) {
      auto xg = propagate(g, featurize(g, 3, trial), *cfg);
      auto xh = propagate(h, featurize(h, 3, trial), *cfg);
      auto xr = propagate(r, featurize(r, 3, trial), *cfg);
      CHECK(xr.values == xg.values);
      for (std::size_t i = 0; i < perm.size(); ++i) {
        for (std::size_t c = 0; c < 3; ++c) CHECK(xh.values(i, c) == xg.values(perm[i], c));
      }
    }
  }
}

TEST_CASE("locality: perturbing a non-neighbor leaves a row untouched for one layer") {
  // a1 - o1 - r - o2 - a2 ; a1's only typed neighbor is o1.
  auto build = [](double a2_value) {
    return SceneGraph::checked(
        {{"a1", NodeKind::kAttribute, "", std::vector<double>{0.3}},
         {"o1", NodeKind::kObject, "", std::vector<double>{-0.2}},
         {"r", NodeKind::kRelation, "", std::vector<double>{0.9}},
         {"o2", NodeKind::kObject, "", std::vector<double>{0.1}},
         {"a2", NodeKind::kAttribute, "", std::vector<double>{a2_value}}},
        {{"a1", "o1"}, {"o1", "r"}, {"r", "o2"}, {"a2", "o2"}});
  };
  auto g1 = build(0.4);
  auto g2 = build(-0.7);
  auto w = ParametricWeights::sample(1, 1, 4);
  auto n1 = propagate_nonparametric(g1, featurize(g1, 1, 0), 1);
  auto n2 = propagate_nonparametric(g2, featurize(g2, 1, 0), 1);
  auto p1 = propagate_parametric(g1, featurize(g1, 1, 0), w);
  auto p2 = propagate_parametric(g2, featurize(g2, 1, 0), w);
  for (std::size_t i : {0u, 1u, 2u}) {
    CHECK(n1.values(i, 0) == n2.values(i, 0));
    CHECK(p1.values(i, 0) == p2.values(i, 0));
  }
  CHECK(n1.values(3, 0) != n2.values(3, 0));
}
