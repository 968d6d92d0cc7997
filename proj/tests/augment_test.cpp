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
#include "sgwd/augment.hpp"
#include "sgwd/transport.hpp"

using namespace sgwd;

namespace {

std::vector<Node> structural(const SceneGraph& g) {
  std::vector<Node> out;
  for (Node n : g.nodes()) {
    if (n.kind == NodeKind::kAttribute) continue;
    n.embedding.reset();
    out.push_back(n);
  }
  return out;
}

std::vector<Edge> structural_edges(const SceneGraph& g) {
  std::vector<Edge> out;
  for (const Edge& e : g.edges()) {
    if (g.node(*g.index_of(e.source)).kind != NodeKind::kAttribute &&
        g.node(*g.index_of(e.target)).kind != NodeKind::kAttribute) {
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("perturb: identity augmentation") {
  std::mt19937_64 rng(1);
  auto g = testing::random_scene_graph(rng, 3, 2, 2);
  auto x = featurize(g, 4, 1);
  PerturbConfig cfg;
  cfg.variants = 3;
  cfg.noise = 0.0;
  cfg.attribute_drop = 0.0;
  auto vs = perturb(g, x, cfg);
  REQUIRE(vs.size() == 3);
  for (const auto& v : vs) {
    CHECK(v.embedding.values == x.values);
    CHECK(v.graph.edges() == g.edges());
    CHECK(v.graph.size() == g.size());
    CHECK(validate_graph(v.graph).empty());
  }
}

TEST_CASE("perturb: dropping every attribute") {
  std::mt19937_64 rng(2);
  auto g = testing::random_scene_graph(rng, 3, 2, 3);
  PerturbConfig cfg;
  cfg.attribute_drop = 1.0;
  for (const auto& v : perturb(g, featurize(g, 2, 0), cfg)) {
    for (const auto& n : v.graph.nodes()) CHECK(n.kind != NodeKind::kAttribute);
    CHECK(v.embedding.rows() == v.graph.size());
    CHECK(validate_graph(v.graph).empty());
  }
}

TEST_CASE("perturb: content preservation and determinism") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = testing::random_scene_graph(rng, 2 + trial % 3, trial % 4, 1 + trial % 3);
    auto x = featurize(g, 3, trial);
    PerturbConfig cfg{4, 0.05, 0.5, static_cast<std::uint64_t>(trial)};
    auto a = perturb(g, x, cfg);
    auto b = perturb(g, x, cfg);
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].graph == b[k].graph);
      CHECK(a[k].embedding.values == b[k].embedding.values);
      CHECK(structural(a[k].graph) == structural(g));
      CHECK(structural_edges(a[k].graph) == structural_edges(g));
      // Explicit embeddings on the variant mirror its matrix.
      for (std::size_t i = 0; i < a[k].graph.size(); ++i) {
        const auto& e = *a[k].graph.node(i).embedding;
        for (std::size_t c = 0; c < e.size(); ++c) CHECK(e[c] == a[k].embedding.values(i, c));
      }
    }
  }
}

TEST_CASE("perturb: distance to the original grows with noise") {
  std::mt19937_64 rng(4);
  auto g = testing::random_scene_graph(rng, 3, 2, 2);
  auto x = featurize(g, 4, 0);
  SinkhornConfig sk;
  sk.lambda = 1000;
  sk.max_iterations = 100000;
  int non_decreasing = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    double prev = -1.0;
    bool ok = true;
    for (double noise : {0.0, 0.01, 0.1}) {
      auto v = perturb(g, x, {1, noise, 0.0, seed});
      const double d = gwd(x, v[0].embedding, sk).distance;
      if (noise == 0.0) CHECK(d < 1e-9);
      ok = ok && d >= prev;
      prev = d;
    }
    non_decreasing += ok;
  }
  CHECK(non_decreasing >= 18);
}

TEST_CASE("perturb: config validation") {
  SceneGraph g({{"o", NodeKind::kObject, "o", {}}}, {});
  auto x = featurize(g, 2, 0);
  CHECK_THROWS_AS(perturb(g, x, {0, 0.0, 0.0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(perturb(g, x, {1, -1.0, 0.0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(perturb(g, x, {1, 0.0, 1.5, 0}), std::invalid_argument);
}
