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
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgwd/augment.hpp"
#include "sgwd/consistency.hpp"
#include "sgwd/embedding.hpp"
#include "sgwd/graph.hpp"
#include "sgwd/transport.hpp"

namespace sgwd::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kNumericError = 3,
};

// Every knob a command can take. Config-file keys are the json names used by
// to_json(); command-line flags override the file.
struct RunConfig {
  double lambda = 100.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  std::size_t dim = 8;
  std::size_t layers = 2;
  PropagationMode mode = PropagationMode::kNonparametric;
  NeighborWeighting weighting = NeighborWeighting::kDistance;
  double tolerance = 1e-9;
  std::size_t max_iterations = 1000;
  std::uint64_t seed = 0;
  std::size_t variants = 2;
  double noise = 0.01;
  double attribute_drop = 0.0;
  double supervised_loss = 0.0;
  IntraScope intra_scope = IntraScope::kSentences;
  InterPairing pairing = InterPairing::kRawOnly;
  Ablation ablation = Ablation::kNone;

  // Throws std::invalid_argument naming the first bad field.
  void validate() const;

  SinkhornConfig sinkhorn() const;
  PropagationConfig propagation() const;
  PerturbConfig perturbation() const;
  LossOptions loss_options() const;
};

nlohmann::ordered_json to_json(const RunConfig& cfg);

// Applies the keys present in `j` on top of `cfg`. Unknown keys and
// mistyped values throw std::invalid_argument.
void apply_json(RunConfig& cfg, const nlohmann::json& j);

// featurize + propagate with the configured scheme. Parametric weights are
// sampled from cfg.seed, so every graph in a run shares one transformation.
EmbeddingMatrix embed_graph(const SceneGraph& g, const RunConfig& cfg);

// Entry point behind the sgwd binary. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace sgwd::cli
