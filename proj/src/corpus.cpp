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

#include "sgwd/corpus.hpp"

#include <fstream>

#include <json.hpp>

#include "sgwd/error.hpp"

namespace sgwd {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string entry_id(const json& j, const std::string& fallback) {
  if (auto it = j.find("id"); it != j.end()) {
    if (!it->is_string()) throw ParseError(fallback + ": \"id\" must be a string");
    return it->get<std::string>();
  }
  return fallback;
}

fs::path resolve(const fs::path& base, const json& j, const std::string& where) {
  if (!j.is_string()) throw ParseError(where + ": path must be a string");
  fs::path p = j.get<std::string>();
  return p.is_absolute() ? p : base / p;
}

std::vector<fs::path> resolve_list(const fs::path& base, const json& obj,
                                   const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) {
    throw ParseError(where + ": missing \"" + key + "\" array");
  }
  std::vector<fs::path> out;
  for (std::size_t i = 0; i < it->size(); ++i) {
    out.push_back(resolve(base, (*it)[i],
                          where + "." + key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

template <typename Fn>
auto with_context(const std::string& id, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError("example \"" + id + "\": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError("example \"" + id + "\": " + e.what(), e.violations());
  } catch (const IoError& e) {
    throw IoError("example \"" + id + "\": " + e.what());
  }
}

}  // namespace

CorpusManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open manifest");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": malformed manifest: " + e.what());
  }
  if (!doc.is_object()) throw ParseError(path.string() + ": top level must be an object");

  const fs::path base = path.parent_path();
  CorpusManifest m;
  if (auto it = doc.find("described"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("\"described\" must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& e = (*it)[i];
      const std::string where = "described[" + std::to_string(i) + "]";
      if (!e.is_object()) throw ParseError(where + ": expected an object");
      if (!e.contains("image") || !e.contains("sentence")) {
        throw ParseError(where + ": needs \"image\" and \"sentence\"");
      }
      m.described.push_back({entry_id(e, "described-" + std::to_string(i)),
                             resolve(base, e["image"], where + ".image"),
                             resolve(base, e["sentence"], where + ".sentence")});
    }
  }

  std::vector<std::string> violations;
  if (auto it = doc.find("undescribed"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("\"undescribed\" must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& e = (*it)[i];
      const std::string where = "undescribed[" + std::to_string(i) + "]";
      if (!e.is_object()) throw ParseError(where + ": expected an object");
      UndescribedEntry bag{entry_id(e, "bag-" + std::to_string(i)),
                           resolve_list(base, e, "images", where),
                           resolve_list(base, e, "sentences", where)};
      if (bag.images.empty()) {
        violations.push_back("bag \"" + bag.id + "\": needs at least the raw image");
      } else if (bag.images.size() != bag.sentences.size()) {
        violations.push_back("bag \"" + bag.id + "\": " +
                             std::to_string(bag.images.size()) + " images but " +
                             std::to_string(bag.sentences.size()) + " sentences");
      }
      m.undescribed.push_back(std::move(bag));
    }
  }
  if (!violations.empty()) {
    throw ValidationError(path.string() + ": invalid manifest", std::move(violations));
  }
  return m;
}

Corpus load_corpus(const CorpusManifest& manifest) {
  Corpus c;
  for (const auto& e : manifest.described) {
    c.described.push_back(with_context(e.id, [&] {
      return DescribedPair{e.id, load_graph(e.image), load_graph(e.sentence)};
    }));
  }
  for (const auto& e : manifest.undescribed) {
    c.bags.push_back(with_context(e.id, [&] {
      GraphBag bag{e.id, {}, {}};
      for (const auto& p : e.images) bag.images.push_back(load_graph(p));
      for (const auto& p : e.sentences) bag.sentences.push_back(load_graph(p));
      return bag;
    }));
  }
  return c;
}

}  // namespace sgwd
