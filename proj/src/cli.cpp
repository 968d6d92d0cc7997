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

#include "sgwd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "sgwd/corpus.hpp"
#include "sgwd/error.hpp"

namespace sgwd::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<PropagationMode> kModes[] = {
    {PropagationMode::kNonparametric, "nonparametric"},
    {PropagationMode::kParametric, "parametric"},
};
constexpr EnumName<NeighborWeighting> kWeightings[] = {
    {NeighborWeighting::kDistance, "distance"},
    {NeighborWeighting::kInverseDistance, "inverse-distance"},
};
constexpr EnumName<IntraScope> kIntraScopes[] = {
    {IntraScope::kSentences, "ssic"},
    {IntraScope::kSentencesAndImages, "ssic-plus"},
};
constexpr EnumName<InterPairing> kPairings[] = {
    {InterPairing::kRawOnly, "raw"},
    {InterPairing::kAllAligned, "all"},
};
constexpr EnumName<Ablation> kAblations[] = {
    {Ablation::kNone, "none"},
    {Ablation::kInterOnly, "inter-only"},
    {Ablation::kIntraOnly, "intra-only"},
};

template <typename E, std::size_t N>
const char* name_of(const EnumName<E> (&table)[N], E value) {
  for (const auto& e : table) {
    if (e.value == value) return e.name;
  }
  return "?";
}

template <typename E, std::size_t N>
E parse_enum(const EnumName<E> (&table)[N], const std::string& text,
             const char* field) {
  for (const auto& e : table) {
    if (text == e.name) return e.value;
  }
  std::string allowed;
  for (const auto& e : table) {
    if (!allowed.empty()) allowed += ", ";
    allowed += e.name;
  }
  throw std::invalid_argument(std::string(field) + ": \"" + text +
                              "\" is not one of " + allowed);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_bool(bool b) { return b ? "true" : "false"; }

std::vector<std::string> node_ids(const SceneGraph& g) {
  std::vector<std::string> ids;
  for (const auto& n : g.nodes()) ids.push_back(n.id);
  return ids;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  return out;
}

void finish_output(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError(path.string() + ": write failed");
}

}  // namespace

void RunConfig::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  };
  require(std::isfinite(lambda) && lambda > 0.0, "lambda must be positive and finite");
  require(std::isfinite(lambda1) && lambda1 >= 0.0, "lambda1 must be finite and >= 0");
  require(std::isfinite(lambda2) && lambda2 >= 0.0, "lambda2 must be finite and >= 0");
  require(dim >= 1, "dim must be >= 1");
  require(tolerance > 0.0, "tolerance must be positive");
  require(max_iterations >= 1, "max_iterations must be >= 1");
  require(variants >= 1, "variants must be >= 1");
  require(std::isfinite(noise) && noise >= 0.0, "noise must be finite and >= 0");
  require(attribute_drop >= 0.0 && attribute_drop <= 1.0,
          "attribute_drop must be in [0, 1]");
  require(std::isfinite(supervised_loss), "supervised_loss must be finite");
}

SinkhornConfig RunConfig::sinkhorn() const {
  SinkhornConfig s;
  s.lambda = lambda;
  s.tolerance = tolerance;
  s.max_iterations = max_iterations;
  return s;
}

PropagationConfig RunConfig::propagation() const {
  PropagationConfig p;
  p.layers = layers;
  p.mode = mode;
  p.weighting = weighting;
  if (mode == PropagationMode::kParametric) {
    p.weights = ParametricWeights::sample(layers, dim, seed);
  }
  return p;
}

PerturbConfig RunConfig::perturbation() const {
  PerturbConfig p;
  p.variants = variants;
  p.noise = noise;
  p.attribute_drop = attribute_drop;
  p.seed = seed;
  return p;
}

LossOptions RunConfig::loss_options() const {
  LossOptions o;
  o.sinkhorn = sinkhorn();
  o.weights = {lambda1, lambda2};
  o.pairing = pairing;
  o.intra_scope = intra_scope;
  o.ablation = ablation;
  return o;
}

ojson to_json(const RunConfig& cfg) {
  ojson j;
  j["lambda"] = cfg.lambda;
  j["lambda1"] = cfg.lambda1;
  j["lambda2"] = cfg.lambda2;
  j["dim"] = cfg.dim;
  j["layers"] = cfg.layers;
  j["mode"] = name_of(kModes, cfg.mode);
  j["weighting"] = name_of(kWeightings, cfg.weighting);
  j["tolerance"] = cfg.tolerance;
  j["max_iterations"] = cfg.max_iterations;
  j["seed"] = cfg.seed;
  j["variants"] = cfg.variants;
  j["noise"] = cfg.noise;
  j["attribute_drop"] = cfg.attribute_drop;
  j["supervised_loss"] = cfg.supervised_loss;
  j["loss"] = name_of(kIntraScopes, cfg.intra_scope);
  j["inter_pairing"] = name_of(kPairings, cfg.pairing);
  j["ablation"] = name_of(kAblations, cfg.ablation);
  return j;
}

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a json object");
  auto number = [](const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw std::invalid_argument("config key \"" + key + "\" must be a number");
    return v.get<double>();
  };
  auto count = [](const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_unsigned()) {
      throw std::invalid_argument("config key \"" + key + "\" must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  };
  auto text = [](const nlohmann::json& v, const std::string& key) {
    if (!v.is_string()) throw std::invalid_argument("config key \"" + key + "\" must be a string");
    return v.get<std::string>();
  };

  for (const auto& [key, v] : j.items()) {
    if (key == "lambda") cfg.lambda = number(v, key);
    else if (key == "lambda1") cfg.lambda1 = number(v, key);
    else if (key == "lambda2") cfg.lambda2 = number(v, key);
    else if (key == "dim") cfg.dim = count(v, key);
    else if (key == "layers") cfg.layers = count(v, key);
    else if (key == "mode") cfg.mode = parse_enum(kModes, text(v, key), "mode");
    else if (key == "weighting") cfg.weighting = parse_enum(kWeightings, text(v, key), "weighting");
    else if (key == "tolerance") cfg.tolerance = number(v, key);
    else if (key == "max_iterations") cfg.max_iterations = count(v, key);
    else if (key == "seed") cfg.seed = count(v, key);
    else if (key == "variants") cfg.variants = count(v, key);
    else if (key == "noise") cfg.noise = number(v, key);
    else if (key == "attribute_drop") cfg.attribute_drop = number(v, key);
    else if (key == "supervised_loss") cfg.supervised_loss = number(v, key);
    else if (key == "loss") cfg.intra_scope = parse_enum(kIntraScopes, text(v, key), "loss");
    else if (key == "inter_pairing") cfg.pairing = parse_enum(kPairings, text(v, key), "inter_pairing");
    else if (key == "ablation") cfg.ablation = parse_enum(kAblations, text(v, key), "ablation");
    else throw std::invalid_argument("unknown config key \"" + key + "\"");
  }
}

EmbeddingMatrix embed_graph(const SceneGraph& g, const RunConfig& cfg) {
  return propagate(g, featurize(g, cfg.dim, cfg.seed), cfg.propagation());
}

namespace {

// Flags bound to string/number storage; only flags actually given on the
// command line are folded into the config, after the config file.
class FlagSet {
 public:
  void attach(CLI::App& app) {
    app.add_option("--config", config_path_, "JSON config file (flags override it)");
    number(app, "--lambda", "lambda", "entropic regularization (inverse temperature)");
    number(app, "--lambda1", "lambda1", "weight of the inter-modal term");
    number(app, "--lambda2", "lambda2", "weight of the intra-modal term");
    integer(app, "--dim,-d", "dim", "embedding dimension");
    integer(app, "--layers,-L", "layers", "propagation layers");
    word(app, "--mode", "mode", "nonparametric | parametric");
    word(app, "--weighting", "weighting", "distance | inverse-distance (nonparametric mode)");
    number(app, "--tolerance", "tolerance", "max marginal violation");
    integer(app, "--max-iterations", "max_iterations", "Sinkhorn iteration cap");
    integer(app, "--seed", "seed", "seed for features, weights and perturbations");
    integer(app, "--variants,-K", "variants", "augmented variants per graph");
    number(app, "--noise", "noise", "embedding jitter standard deviation");
    number(app, "--attribute-drop", "attribute_drop", "attribute drop probability");
    number(app, "--supervised-loss", "supervised_loss", "externally supplied L_c");
    word(app, "--loss", "loss", "ssic | ssic-plus");
    word(app, "--inter-pairing", "inter_pairing", "raw | all");
    word(app, "--ablation", "ablation", "none | inter-only | intra-only");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path_.empty()) {
      std::ifstream in(config_path_);
      if (!in) throw std::invalid_argument(config_path_ + ": cannot open config file");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(config_path_ + ": malformed config: " + e.what());
      }
      apply_json(cfg, j);
    }
    nlohmann::json overrides = nlohmann::json::object();
    for (const auto& f : flags_) {
      if (f.option->count() == 0) continue;
      overrides[f.key] = f.to_json();
    }
    apply_json(cfg, overrides);
    cfg.validate();
    return cfg;
  }

 private:
  struct Flag {
    std::string key;
    CLI::Option* option;
    std::function<nlohmann::json()> to_json;
  };

  void number(CLI::App& app, const std::string& name, const std::string& key,
              const std::string& help) {
    auto& slot = *doubles_.emplace_back(std::make_unique<double>());
    flags_.push_back({key, app.add_option(name, slot, help), [&slot] { return nlohmann::json(slot); }});
  }
  void integer(CLI::App& app, const std::string& name, const std::string& key,
               const std::string& help) {
    auto& slot = *integers_.emplace_back(std::make_unique<std::uint64_t>());
    flags_.push_back({key, app.add_option(name, slot, help), [&slot] { return nlohmann::json(slot); }});
  }
  void word(CLI::App& app, const std::string& name, const std::string& key,
            const std::string& help) {
    auto& slot = *words_.emplace_back(std::make_unique<std::string>());
    flags_.push_back({key, app.add_option(name, slot, help), [&slot] { return nlohmann::json(slot); }});
  }

  std::string config_path_;
  std::vector<std::unique_ptr<double>> doubles_;
  std::vector<std::unique_ptr<std::uint64_t>> integers_;
  std::vector<std::unique_ptr<std::string>> words_;
  std::vector<Flag> flags_;
};

void echo_config(std::ostream& out, const RunConfig& cfg) {
  out << "config " << to_json(cfg).dump() << '\n';
}

void print_plan_summary(std::ostream& out, const GwdResult& r) {
  out << "distance " << format_double(r.distance) << '\n'
      << "iterations " << r.plan.iterations << '\n'
      << "marginal_violation " << format_double(r.plan.marginal_violation) << '\n'
      << "converged " << format_bool(r.plan.converged) << '\n';
}

GwdResult pair_distance(const SceneGraph& a, const SceneGraph& b,
                        const RunConfig& cfg) {
  const EmbeddingMatrix xa = embed_graph(a, cfg);
  const EmbeddingMatrix xb = embed_graph(b, cfg);
  if (!xa.values.all_finite() || !xb.values.all_finite()) {
    throw NumericError("embedding produced non-finite values");
  }
  GwdResult r = gwd(xa, xb, cfg.sinkhorn());
  if (!std::isfinite(r.distance)) throw NumericError("distance is not finite");
  return r;
}

int cmd_dist(const RunConfig& cfg, const fs::path& a, const fs::path& b,
             std::ostream& out) {
  echo_config(out, cfg);
  const GwdResult r = pair_distance(load_graph(a), load_graph(b), cfg);
  print_plan_summary(out, r);
  return kOk;
}

int cmd_plan(const RunConfig& cfg, const fs::path& a, const fs::path& b,
             const fs::path& out_path, std::ostream& out) {
  echo_config(out, cfg);
  const SceneGraph ga = load_graph(a);
  const SceneGraph gb = load_graph(b);
  const GwdResult r = pair_distance(ga, gb, cfg);
  auto file = open_output(out_path);
  write_plan_csv(file, r.plan.entries, node_ids(ga), node_ids(gb));
  finish_output(file, out_path);
  print_plan_summary(out, r);
  out << "plan " << out_path.string() << '\n';
  return kOk;
}

int cmd_embed(const RunConfig& cfg, const fs::path& graph_path,
              const fs::path& out_path, std::ostream& out) {
  echo_config(out, cfg);
  const SceneGraph g = load_graph(graph_path);
  const EmbeddingMatrix x = embed_graph(g, cfg);
  if (!x.values.all_finite()) throw NumericError("embedding produced non-finite values");
  auto file = open_output(out_path);
  file << "node";
  for (std::size_t c = 0; c < x.dim(); ++c) file << ",e" << c;
  file << '\n';
  for (std::size_t i = 0; i < g.size(); ++i) {
    file << g.node(i).id;
    for (double v : x.values.row(i)) file << ',' << format_double(v);
    file << '\n';
  }
  finish_output(file, out_path);
  out << "embedding " << out_path.string() << " rows " << x.rows() << " dim "
      << x.dim() << " layer " << x.layer << '\n';
  return kOk;
}

int cmd_batch_loss(const RunConfig& cfg, const fs::path& manifest_path,
                   const std::string& out_path, std::ostream& out) {
  echo_config(out, cfg);
  const Corpus corpus = load_corpus(load_manifest(manifest_path));

  std::vector<EmbeddedBag> bags;
  for (const auto& bag : corpus.bags) {
    try {
      EmbeddedBag eb{bag.id, {}, {}};
      for (const auto& g : bag.images) eb.images.push_back(embed_graph(g, cfg));
      for (const auto& g : bag.sentences) eb.sentences.push_back(embed_graph(g, cfg));
      bags.push_back(std::move(eb));
    } catch (const ShapeError& e) {
      throw ShapeError("example \"" + bag.id + "\": " + e.what());
    }
  }
  const LossReport report = evaluate_corpus(bags, cfg.supervised_loss, cfg.loss_options());
  if (!std::isfinite(report.total)) throw NumericError("total loss is not finite");

  const std::string text = to_json(report).dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    auto file = open_output(out_path);
    file << text;
    finish_output(file, out_path);
    out << "report " << out_path << '\n';
  }
  out << "total " << format_double(report.total) << '\n';
  return kOk;
}

int cmd_perturb(const RunConfig& cfg, const fs::path& graph_path,
                const std::string& prefix, std::ostream& out) {
  echo_config(out, cfg);
  const SceneGraph g = load_graph(graph_path);
  const EmbeddingMatrix x = featurize(g, cfg.dim, cfg.seed);
  const auto variants = perturb(g, x, cfg.perturbation());
  for (std::size_t k = 0; k < variants.size(); ++k) {
    const fs::path p = prefix + "_" + std::to_string(k + 1) + ".json";
    auto file = open_output(p);
    file << serialize_graph(variants[k].graph);
    finish_output(file, p);
    out << "variant " << p.string() << " nodes " << variants[k].graph.size() << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Wasserstein distances and consistency losses between scene graphs", "sgwd"};
  app.require_subcommand(1);

  FlagSet flags;
  std::string graph_a, graph_b, out_path, manifest, prefix;

  auto* dist = app.add_subcommand("dist", "distance between two scene graphs");
  dist->add_option("graph_a", graph_a)->required();
  dist->add_option("graph_b", graph_b)->required();
  flags.attach(*dist);

  FlagSet plan_flags;
  auto* plan = app.add_subcommand("plan", "write the transport plan as CSV");
  plan->add_option("graph_a", graph_a)->required();
  plan->add_option("graph_b", graph_b)->required();
  plan->add_option("--out,-o", out_path, "CSV output path")->required();
  plan_flags.attach(*plan);

  FlagSet loss_flags;
  auto* batch = app.add_subcommand("batch-loss", "assemble the consistency loss over a corpus");
  batch->add_option("manifest", manifest)->required();
  batch->add_option("--out,-o", out_path, "JSON report path (default: stdout)");
  loss_flags.attach(*batch);

  FlagSet embed_flags;
  auto* embed = app.add_subcommand("embed", "dump node embeddings as CSV");
  embed->add_option("graph", graph_a)->required();
  embed->add_option("--out,-o", out_path, "CSV output path")->required();
  embed_flags.attach(*embed);

  FlagSet perturb_flags;
  auto* pert = app.add_subcommand("perturb", "write weakly augmented variants of a graph");
  pert->add_option("graph", graph_a)->required();
  pert->add_option("--out-prefix,-o", prefix, "variants go to <prefix>_<k>.json")->required();
  perturb_flags.attach(*pert);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (dist->parsed()) return cmd_dist(flags.resolve(), graph_a, graph_b, out);
    if (plan->parsed()) return cmd_plan(plan_flags.resolve(), graph_a, graph_b, out_path, out);
    if (batch->parsed()) return cmd_batch_loss(loss_flags.resolve(), manifest, out_path, out);
    if (embed->parsed()) return cmd_embed(embed_flags.resolve(), graph_a, out_path, out);
    if (pert->parsed()) return cmd_perturb(perturb_flags.resolve(), graph_a, prefix, out);
  } catch (const std::invalid_argument& e) {
    // ShapeError derives from invalid_argument but is a data problem.
    if (dynamic_cast<const ShapeError*>(&e) != nullptr) {
      err << "error: " << e.what() << '\n';
      return kDataError;
    }
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kDataError;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumericError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}

}  // namespace sgwd::cli
