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

#include <filesystem>
#include <string>
#include <vector>

#include "sgwd/graph.hpp"

namespace sgwd {

// Manifest document, paths relative to the manifest's directory:
//   {"described":   [{"id": "...", "image": "a.json", "sentence": "b.json"}],
//    "undescribed": [{"id": "...", "images": [raw, aug1, ...],
//                     "sentences": [s0, s1, ...]}]}
// images[0] is the raw image; sentences[k] was generated from images[k].
struct DescribedEntry {
  std::string id;
  std::filesystem::path image;
  std::filesystem::path sentence;
};

struct UndescribedEntry {
  std::string id;
  std::vector<std::filesystem::path> images;
  std::vector<std::filesystem::path> sentences;
};

struct CorpusManifest {
  std::vector<DescribedEntry> described;
  std::vector<UndescribedEntry> undescribed;
};

// Parses the manifest and resolves paths; checks bag sizes but does not
// open the graph files.
CorpusManifest load_manifest(const std::filesystem::path& path);

struct DescribedPair {
  std::string id;
  SceneGraph image;
  SceneGraph sentence;
};

// One undescribed image: raw image plus K augmentations, and the K+1
// sentences generated from them, index-aligned.
struct GraphBag {
  std::string id;
  std::vector<SceneGraph> images;
  std::vector<SceneGraph> sentences;

  std::size_t augmentations() const { return images.empty() ? 0 : images.size() - 1; }
};

struct Corpus {
  std::vector<DescribedPair> described;
  std::vector<GraphBag> bags;
};

// Loads every referenced graph. Errors are rethrown with the example id
// prepended.
Corpus load_corpus(const CorpusManifest& manifest);

}  // namespace sgwd
