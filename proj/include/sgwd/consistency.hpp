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

// Semi-supervised consistency losses built from graph Wasserstein distances:
//
//   total = L_c + lambda1 * inter + lambda2 * intra
//
// inter sums image/sentence distances, intra sums distances between the
// sentences (and optionally the images) of one augmentation bag. Unordered
// pairs are counted once; lambda2 absorbs the factor of two a sum over
// ordered pairs would carry.

#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgwd/embedding.hpp"
#include "sgwd/transport.hpp"

namespace sgwd {

struct EmbeddingPair {
  EmbeddingMatrix image;
  EmbeddingMatrix sentence;
};

using EmbeddingBag = std::vector<EmbeddingMatrix>;

// Sum of gwd(image, sentence) over the pairs.
double inter_loss(std::span<const EmbeddingPair> pairs, const SinkhornConfig& cfg);

// Sum over bags of gwd between every unordered pair within the bag.
double intra_loss(std::span<const EmbeddingBag> sentence_bags,
                  const SinkhornConfig& cfg);

// intra_loss over image bags plus intra_loss over sentence bags; the two
// lists must be aligned bag for bag with equal sizes.
double intra_loss_plus(std::span<const EmbeddingBag> image_bags,
                       std::span<const EmbeddingBag> sentence_bags,
                       const SinkhornConfig& cfg);

struct LossWeights {
  double inter = 1.0;  // lambda1
  double intra = 1.0;  // lambda2

  void validate() const;
};

struct ExampleLoss {
  std::string id;
  double inter = 0.0;
  double intra = 0.0;
};

struct LossReport {
  double supervised = 0.0;  // L_c
  double inter = 0.0;
  double intra = 0.0;
  double total = 0.0;
  LossWeights weights;
  std::vector<ExampleLoss> examples;
  // Worst Sinkhorn outcome over every distance that went into the report.
  std::size_t transport_solves = 0;
  double max_marginal_violation = 0.0;
  bool all_converged = true;
};

// Throws NumericError on a non-finite input, std::invalid_argument on bad
// weights.
LossReport total_loss(double supervised, double inter, double intra,
                      const LossWeights& weights);

// Which image/sentence pairs of a bag feed the inter-modal term.
enum class InterPairing {
  kRawOnly,     // images[0] with sentences[0]
  kAllAligned,  // images[k] with sentences[k] for every k
};

// Which terms feed the intra-modal term.
enum class IntraScope {
  kSentences,           // generated sentences only
  kSentencesAndImages,  // plus the augmented images' graphs
};

enum class Ablation { kNone, kInterOnly, kIntraOnly };

struct LossOptions {
  SinkhornConfig sinkhorn;
  LossWeights weights;
  InterPairing pairing = InterPairing::kRawOnly;
  IntraScope intra_scope = IntraScope::kSentences;
  Ablation ablation = Ablation::kNone;
};

struct EmbeddedBag {
  std::string id;
  std::vector<EmbeddingMatrix> images;
  std::vector<EmbeddingMatrix> sentences;
};

// Per-bag breakdown and assembled total; ablations zero the matching weight.
// Bags are processed in order so totals are bit-stable.
LossReport evaluate_corpus(std::span<const EmbeddedBag> bags, double supervised,
                           const LossOptions& options);

nlohmann::ordered_json to_json(const LossReport& report);

}  // namespace sgwd
