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

#include "sgwd/augment.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "sgwd/error.hpp"

namespace sgwd {

void PerturbConfig::validate() const {
  if (variants == 0) throw std::invalid_argument("perturb: K must be positive");
  if (!std::isfinite(noise) || noise < 0.0) {
    throw std::invalid_argument("perturb: noise must be finite and non-negative");
  }
  if (!(attribute_drop >= 0.0 && attribute_drop <= 1.0)) {
    throw std::invalid_argument("perturb: attribute drop probability must be in [0, 1]");
  }
}

std::vector<GraphVariant> perturb(const SceneGraph& g, const EmbeddingMatrix& x,
                                  const PerturbConfig& cfg) {
  cfg.validate();
  if (x.rows() != g.size()) {
    throw ShapeError("perturb: embedding rows do not match graph size");
  }
  if (auto violations = validate_graph(g); !violations.empty()) {
    throw ValidationError(std::move(violations));
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<GraphVariant> out;
  out.reserve(cfg.variants);
  for (std::size_t k = 0; k < cfg.variants; ++k) {
    // Draw every coin even when the drop probability is 0 or 1 so the noise
    // stream does not depend on it.
    std::vector<bool> keep(g.size(), true);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double c = coin(rng);
      if (g.node(i).kind == NodeKind::kAttribute && c < cfg.attribute_drop) {
        keep[i] = false;
      }
    }

    std::vector<Node> nodes;
    std::vector<std::size_t> kept;
    std::unordered_set<std::string> kept_ids;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!keep[i]) continue;
      kept.push_back(i);
      kept_ids.insert(g.node(i).id);
    }

    Matrix values(kept.size(), x.dim());
    for (std::size_t r = 0; r < kept.size(); ++r) {
      auto src = x.values.row(kept[r]);
      auto dst = values.row(r);
      for (std::size_t c = 0; c < x.dim(); ++c) dst[c] = src[c] + cfg.noise * normal(rng);
      Node n = g.node(kept[r]);
      n.embedding = std::vector<double>(dst.begin(), dst.end());
      nodes.push_back(std::move(n));
    }

    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) {
      if (kept_ids.count(e.source) && kept_ids.count(e.target)) edges.push_back(e);
    }
    out.push_back({SceneGraph(std::move(nodes), std::move(edges)),
                   EmbeddingMatrix{std::move(values), x.layer}});
  }
  return out;
}

}  // namespace sgwd
