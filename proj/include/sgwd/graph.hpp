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

// Heterogeneous scene graphs: object, attribute and relation nodes joined by
// attribute->object and object->relation->object edges.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sgwd {

enum class NodeKind : std::uint8_t { kObject = 0, kAttribute = 1, kRelation = 2 };

inline constexpr std::size_t kNodeKindCount = 3;

std::string_view to_string(NodeKind kind);

// Accepts "object"/"attribute"/"relation" and the one-letter forms o/a/r.
std::optional<NodeKind> parse_node_kind(std::string_view text);

// Small set of node kinds, used as a neighbor filter.
class KindSet {
 public:
  constexpr KindSet() = default;
  constexpr KindSet(std::initializer_list<NodeKind> kinds) {
    for (NodeKind k : kinds) bits_ |= bit(k);
  }

  static constexpr KindSet all() {
    return {NodeKind::kObject, NodeKind::kAttribute, NodeKind::kRelation};
  }

  constexpr bool contains(NodeKind k) const { return (bits_ & bit(k)) != 0; }
  constexpr bool operator==(const KindSet&) const = default;

 private:
  static constexpr std::uint8_t bit(NodeKind k) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k));
  }
  std::uint8_t bits_ = 0;
};

// Kinds a node of `kind` aggregates from: relations and attributes look at
// objects, objects look at relations and attributes.
KindSet default_neighbor_kinds(NodeKind kind);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::kObject;
  std::string label;
  std::optional<std::vector<double>> embedding;

  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string source;
  std::string target;

  bool operator==(const Edge&) const = default;
};

// Immutable once constructed. The constructor does not enforce the typing
// rules so that validate_graph() can report on arbitrary input; use
// SceneGraph::checked() or load_graph() to get a graph that is known valid.
class SceneGraph {
 public:
  SceneGraph() = default;
  SceneGraph(std::vector<Node> nodes, std::vector<Edge> edges);

  // Throws ValidationError if any invariant is broken.
  static SceneGraph checked(std::vector<Node> nodes, std::vector<Edge> edges);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return nodes_.size(); }

  const Node& node(std::size_t index) const { return nodes_[index]; }
  std::optional<std::size_t> index_of(std::string_view id) const;

  // Node indices adjacent to `index` (either edge direction) whose kind is
  // in `filter`, without duplicates. Ordered by first appearance in the edge
  // list, so reordering nodes does not change aggregation order.
  std::vector<std::size_t> neighbor_indices(std::size_t index,
                                            KindSet filter) const;

  bool operator==(const SceneGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

// One human-readable entry per broken invariant; empty iff the graph is valid.
std::vector<std::string> validate_graph(const SceneGraph& g);

// Ids of the typed neighbors of `id`. Throws std::out_of_range for an
// unknown id.
std::vector<std::string> typed_neighbors(const SceneGraph& g,
                                         std::string_view id, KindSet filter);
std::vector<std::string> typed_neighbors(const SceneGraph& g,
                                         std::string_view id);

// JSON document:
//   {"nodes": [{"id": "...", "kind": "object", "label": "...",
//               "embedding": [..]}],
//    "edges": [["src", "dst"], ...]}
// `label` defaults to the id, `embedding` is optional.
SceneGraph load_graph(std::istream& in);
SceneGraph load_graph(const std::filesystem::path& path);
std::string serialize_graph(const SceneGraph& g);
void save_graph(const SceneGraph& g, const std::filesystem::path& path);

}  // namespace sgwd
