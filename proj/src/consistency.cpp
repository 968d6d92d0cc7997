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

#include "sgwd/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgwd/error.hpp"

namespace sgwd {
namespace {

// Accumulates distances and tracks solver diagnostics.
struct Accumulator {
  std::size_t solves = 0;
  double worst_violation = 0.0;
  bool converged = true;

  double distance(const EmbeddingMatrix& a, const EmbeddingMatrix& b,
                  const SinkhornConfig& cfg) {
    GwdResult r = gwd(a, b, cfg);
    ++solves;
    worst_violation = std::max(worst_violation, r.plan.marginal_violation);
    converged = converged && r.plan.converged;
    return r.distance;
  }

  double bag_pairs(const EmbeddingBag& bag, const SinkhornConfig& cfg) {
    double s = 0.0;
    for (std::size_t m = 0; m < bag.size(); ++m) {
      for (std::size_t n = m + 1; n < bag.size(); ++n) s += distance(bag[m], bag[n], cfg);
    }
    return s;
  }
};

}  // namespace

double inter_loss(std::span<const EmbeddingPair> pairs, const SinkhornConfig& cfg) {
  Accumulator acc;
  double s = 0.0;
  for (const auto& p : pairs) s += acc.distance(p.image, p.sentence, cfg);
  return s;
}

double intra_loss(std::span<const EmbeddingBag> sentence_bags,
                  const SinkhornConfig& cfg) {
  Accumulator acc;
  double s = 0.0;
  for (const auto& bag : sentence_bags) {
    if (bag.empty()) throw std::invalid_argument("intra_loss: empty bag");
    s += acc.bag_pairs(bag, cfg);
  }
  return s;
}

double intra_loss_plus(std::span<const EmbeddingBag> image_bags,
                       std::span<const EmbeddingBag> sentence_bags,
                       const SinkhornConfig& cfg) {
  if (image_bags.size() != sentence_bags.size()) {
    throw ShapeError("intra_loss_plus: image and sentence bag counts differ");
  }
  for (std::size_t j = 0; j < image_bags.size(); ++j) {
    if (image_bags[j].size() != sentence_bags[j].size()) {
      throw ShapeError("intra_loss_plus: bag " + std::to_string(j) +
                       " has mismatched image and sentence counts");
    }
  }
  return intra_loss(image_bags, cfg) + intra_loss(sentence_bags, cfg);
}

void LossWeights::validate() const {
  for (double w : {inter, intra}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("loss weights must be finite and non-negative");
    }
  }
}

LossReport total_loss(double supervised, double inter, double intra,
                      const LossWeights& weights) {
  weights.validate();
  if (!std::isfinite(supervised) || !std::isfinite(inter) || !std::isfinite(intra)) {
    throw NumericError("total_loss: non-finite loss term");
  }
  LossReport r;
  r.supervised = supervised;
  r.inter = inter;
  r.intra = intra;
  r.weights = weights;
  r.total = supervised + weights.inter * inter + weights.intra * intra;
  return r;
}

LossReport evaluate_corpus(std::span<const EmbeddedBag> bags, double supervised,
                           const LossOptions& options) {
  LossWeights weights = options.weights;
  if (options.ablation == Ablation::kInterOnly) weights.intra = 0.0;
  if (options.ablation == Ablation::kIntraOnly) weights.inter = 0.0;
  weights.validate();
  options.sinkhorn.validate();

  Accumulator acc;
  std::vector<ExampleLoss> rows;
  double inter = 0.0;
  double intra = 0.0;
  for (const auto& bag : bags) {
    if (bag.images.empty() || bag.images.size() != bag.sentences.size()) {
      throw ShapeError("bag \"" + bag.id + "\": needs K+1 images and K+1 sentences");
    }
    ExampleLoss row{bag.id, 0.0, 0.0};
    const std::size_t pairs =
        options.pairing == InterPairing::kRawOnly ? 1 : bag.images.size();
    for (std::size_t k = 0; k < pairs; ++k) {
      row.inter += acc.distance(bag.images[k], bag.sentences[k], options.sinkhorn);
    }
    row.intra = acc.bag_pairs(bag.sentences, options.sinkhorn);
    if (options.intra_scope == IntraScope::kSentencesAndImages) {
      row.intra += acc.bag_pairs(bag.images, options.sinkhorn);
    }
    inter += row.inter;
    intra += row.intra;
    rows.push_back(std::move(row));
  }

  LossReport report = total_loss(supervised, inter, intra, weights);
  report.examples = std::move(rows);
  report.transport_solves = acc.solves;
  report.max_marginal_violation = acc.worst_violation;
  report.all_converged = acc.converged;
  return report;
}

nlohmann::ordered_json to_json(const LossReport& report) {
  nlohmann::ordered_json j;
  j["supervised"] = report.supervised;
  j["inter"] = report.inter;
  j["intra"] = report.intra;
  j["lambda1"] = report.weights.inter;
  j["lambda2"] = report.weights.intra;
  j["total"] = report.total;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& e : report.examples) {
    nlohmann::ordered_json row;
    row["id"] = e.id;
    row["inter"] = e.inter;
    row["intra"] = e.intra;
    rows.push_back(std::move(row));
  }
  j["examples"] = std::move(rows);
  j["diagnostics"] = {{"transport_solves", report.transport_solves},
                      {"max_marginal_violation", report.max_marginal_violation},
                      {"all_converged", report.all_converged}};
  return j;
}

}  // namespace sgwd
