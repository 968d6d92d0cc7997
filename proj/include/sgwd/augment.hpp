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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sgwd/embedding.hpp"
#include "sgwd/graph.hpp"

namespace sgwd {

// Weak, content-preserving graph augmentation: attribute dropout plus
// Gaussian jitter on the embeddings.
struct PerturbConfig {
  std::size_t variants = 2;       // K
  double noise = 0.01;            // standard deviation of the jitter
  double attribute_drop = 0.0;    // per-attribute drop probability
  std::uint64_t seed = 0;

  void validate() const;
};

struct GraphVariant {
  SceneGraph graph;           // nodes carry their perturbed embedding
  EmbeddingMatrix embedding;  // rows in the variant's node order
};

// Objects, relations and every edge between them survive unchanged. The
// noise draws are unit normals scaled by `noise`, so two configs differing
// only in `noise` perturb along the same directions.
std::vector<GraphVariant> perturb(const SceneGraph& g, const EmbeddingMatrix& x,
                                  const PerturbConfig& cfg);

}  // namespace sgwd
