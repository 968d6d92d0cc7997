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

#include "sgwd/embedding.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "sgwd/error.hpp"

namespace sgwd {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable across platforms and runs, unlike std::hash.
std::uint64_t hash_node(const Node& n, std::uint64_t seed) {
  std::uint64_t h = kFnvOffset;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= kFnvPrime;
  };
  mix(static_cast<unsigned char>(n.kind));
  mix(0xff);
  for (char c : n.label) mix(static_cast<unsigned char>(c));
  std::uint64_t state = h ^ seed;
  return splitmix64(state);
}

void check_rows(const SceneGraph& g, const EmbeddingMatrix& x) {
  if (x.rows() != g.size()) {
    throw ShapeError("embedding has " + std::to_string(x.rows()) +
                     " rows but graph has " + std::to_string(g.size()) + " nodes");
  }
}

// Aggregation weights over `nbrs` for node m.
std::vector<double> neighbor_weights(const Matrix& h, std::size_t m,
                                     const std::vector<std::size_t>& nbrs,
                                     NeighborWeighting weighting) {
  const std::size_t n = nbrs.size();
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = squared_distance(h.row(nbrs[i]), h.row(m));
  }
  std::vector<double> alpha(n, 0.0);

  if (weighting == NeighborWeighting::kDistance) {
    double total = 0.0;
    for (double d : dist) total += d;
    if (total > 0.0) {
      for (std::size_t i = 0; i < n; ++i) alpha[i] = dist[i] / total;
    } else {
      std::fill(alpha.begin(), alpha.end(), 1.0 / static_cast<double>(n));
    }
    return alpha;
  }

  // Inverse distance: zero-distance neighbors take all the mass in the limit.
  const auto zeros = static_cast<std::size_t>(std::count(dist.begin(), dist.end(), 0.0));
  if (zeros > 0) {
    for (std::size_t i = 0; i < n; ++i) {
      alpha[i] = dist[i] == 0.0 ? 1.0 / static_cast<double>(zeros) : 0.0;
    }
    return alpha;
  }
  double total = 0.0;
  for (double d : dist) total += 1.0 / d;
  for (std::size_t i = 0; i < n; ++i) alpha[i] = (1.0 / dist[i]) / total;
  return alpha;
}

}  // namespace

ParametricWeights ParametricWeights::sample(std::size_t num_layers,
                                            std::size_t dim,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.1, 0.1);
  ParametricWeights w;
  w.layers.resize(num_layers);
  for (auto& per_kind : w.layers) {
    for (auto& m : per_kind) {
      m = Matrix(dim, dim);
      for (double& x : m.data()) x = unif(rng);
    }
  }
  return w;
}

ParametricWeights ParametricWeights::filled(std::size_t num_layers,
                                            const Matrix& w) {
  ParametricWeights out;
  out.layers.resize(num_layers);
  for (auto& per_kind : out.layers) per_kind.fill(w);
  return out;
}

EmbeddingMatrix featurize(const SceneGraph& g, std::size_t dim,
                          std::uint64_t seed) {
  if (dim == 0) throw ShapeError("embedding dimension must be positive");
  EmbeddingMatrix x{Matrix(g.size(), dim), 0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Node& n = g.node(i);
    auto row = x.values.row(i);
    if (n.embedding) {
      if (n.embedding->size() != dim) {
        throw ShapeError("node \"" + n.id + "\": explicit embedding has length " +
                         std::to_string(n.embedding->size()) + ", expected " +
                         std::to_string(dim));
      }
      std::copy(n.embedding->begin(), n.embedding->end(), row.begin());
      continue;
    }
    std::uint64_t state = hash_node(n, seed);
    for (double& v : row) {
      // 53 random mantissa bits -> [0, 1) -> [-1, 1)
      const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
      v = 2.0 * u - 1.0;
    }
  }
  return x;
}

EmbeddingMatrix propagate_nonparametric(const SceneGraph& g,
                                        const EmbeddingMatrix& x0,
                                        std::size_t layers,
                                        NeighborWeighting weighting) {
  check_rows(g, x0);
  const std::size_t dim = x0.dim();
  Matrix h = x0.values;
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix next = h;
    for (std::size_t m = 0; m < g.size(); ++m) {
      const auto nbrs = g.neighbor_indices(m, default_neighbor_kinds(g.node(m).kind));
      if (nbrs.empty()) continue;
      const auto alpha = neighbor_weights(h, m, nbrs, weighting);
      auto out = next.row(m);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        auto hk = h.row(nbrs[i]);
        for (std::size_t c = 0; c < dim; ++c) out[c] += alpha[i] * hk[c];
      }
    }
    h = std::move(next);
  }
  return {std::move(h), x0.layer + layers};
}

EmbeddingMatrix propagate_parametric(const SceneGraph& g,
                                     const EmbeddingMatrix& x0,
                                     const ParametricWeights& weights) {
  check_rows(g, x0);
  const std::size_t dim = x0.dim();
  for (std::size_t l = 0; l < weights.num_layers(); ++l) {
    for (std::size_t k = 0; k < kNodeKindCount; ++k) {
      const Matrix& w = weights.layers[l][k];
      if (w.rows() != dim || w.cols() != dim) {
        throw ShapeError("weight matrix for layer " + std::to_string(l) + ", " +
                         std::string(to_string(static_cast<NodeKind>(k))) +
                         " neighbors must be " + std::to_string(dim) + "x" +
                         std::to_string(dim));
      }
      if (!w.all_finite()) {
        throw NumericError("weight matrix for layer " + std::to_string(l) +
                           " has non-finite entries");
      }
    }
  }

  Matrix h = x0.values;
  for (std::size_t l = 0; l < weights.num_layers(); ++l) {
    Matrix next(h.rows(), dim);
    for (std::size_t m = 0; m < g.size(); ++m) {
      auto out = next.row(m);
      auto own = h.row(m);
      std::copy(own.begin(), own.end(), out.begin());
      for (std::size_t k : g.neighbor_indices(m, default_neighbor_kinds(g.node(m).kind))) {
        const Matrix& w = weights.at(l, g.node(k).kind);
        auto hk = h.row(k);
        for (std::size_t r = 0; r < dim; ++r) {
          double s = 0.0;
          for (std::size_t c = 0; c < dim; ++c) s += w(r, c) * hk[c];
          out[r] += s;
        }
      }
      for (double& v : out) v = std::max(0.0, v);
    }
    h = std::move(next);
  }
  return {std::move(h), x0.layer + weights.num_layers()};
}

EmbeddingMatrix propagate(const SceneGraph& g, const EmbeddingMatrix& x0,
                          const PropagationConfig& cfg) {
  if (cfg.mode == PropagationMode::kNonparametric) {
    return propagate_nonparametric(g, x0, cfg.layers, cfg.weighting);
  }
  if (cfg.weights.num_layers() != cfg.layers) {
    throw ShapeError("parametric mode needs " + std::to_string(cfg.layers) +
                     " layers of weights, got " +
                     std::to_string(cfg.weights.num_layers()));
  }
  return propagate_parametric(g, x0, cfg.weights);
}

}  // namespace sgwd
