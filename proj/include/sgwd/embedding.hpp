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

// Node embeddings for scene graphs. Both propagation schemes aggregate over
// typed neighbors (see default_neighbor_kinds) and add the node's own row.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "sgwd/graph.hpp"
#include "sgwd/matrix.hpp"

namespace sgwd {

// Row i is the embedding of the i-th node in graph order.
struct EmbeddingMatrix {
  Matrix values;
  std::size_t layer = 0;

  std::size_t rows() const { return values.rows(); }
  std::size_t dim() const { return values.cols(); }
};

enum class PropagationMode { kParametric, kNonparametric };

// How the non-parametric scheme weighs neighbors. kDistance puts more weight
// on farther neighbors (alpha proportional to squared distance);
// kInverseDistance is the attention-style alternative kept for comparison.
enum class NeighborWeighting { kDistance, kInverseDistance };

// One d x d matrix per layer per neighbor kind, indexed by NodeKind.
struct ParametricWeights {
  std::vector<std::array<Matrix, kNodeKindCount>> layers;

  std::size_t num_layers() const { return layers.size(); }
  const Matrix& at(std::size_t layer, NodeKind neighbor_kind) const {
    return layers[layer][static_cast<std::size_t>(neighbor_kind)];
  }

  // Entries drawn from uniform [-0.1, 0.1] with a seeded generator.
  static ParametricWeights sample(std::size_t num_layers, std::size_t dim,
                                  std::uint64_t seed);
  static ParametricWeights filled(std::size_t num_layers, const Matrix& w);
};

struct PropagationConfig {
  std::size_t layers = 2;
  PropagationMode mode = PropagationMode::kNonparametric;
  NeighborWeighting weighting = NeighborWeighting::kDistance;
  ParametricWeights weights;  // parametric mode only
};

// Deterministic initial features. A node with an explicit embedding uses it
// verbatim; otherwise (label, kind, seed) is hashed and expanded into a
// d-vector with entries in [-1, 1]. Throws ShapeError on an explicit
// embedding of the wrong length.
EmbeddingMatrix featurize(const SceneGraph& g, std::size_t dim,
                          std::uint64_t seed);

// Distance-weighted neighbor sum plus the node's own row, `layers` times.
// When every neighbor sits at distance zero the weights fall back to uniform.
EmbeddingMatrix propagate_nonparametric(
    const SceneGraph& g, const EmbeddingMatrix& x0, std::size_t layers,
    NeighborWeighting weighting = NeighborWeighting::kDistance);

// h' = relu(sum_k W[kind(k)] h_k + h) per layer. Layer count comes from
// `weights`.
EmbeddingMatrix propagate_parametric(const SceneGraph& g,
                                     const EmbeddingMatrix& x0,
                                     const ParametricWeights& weights);

EmbeddingMatrix propagate(const SceneGraph& g, const EmbeddingMatrix& x0,
                          const PropagationConfig& cfg);

}  // namespace sgwd
