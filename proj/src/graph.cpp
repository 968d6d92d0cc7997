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

#include "sgwd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "sgwd/error.hpp"

namespace sgwd {

using json = nlohmann::ordered_json;

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kObject:
      return "object";
    case NodeKind::kAttribute:
      return "attribute";
    case NodeKind::kRelation:
      return "relation";
  }
  return "unknown";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  if (text == "object" || text == "o") return NodeKind::kObject;
  if (text == "attribute" || text == "a") return NodeKind::kAttribute;
  if (text == "relation" || text == "r") return NodeKind::kRelation;
  return std::nullopt;
}

KindSet default_neighbor_kinds(NodeKind kind) {
  switch (kind) {
    case NodeKind::kObject:
      return {NodeKind::kRelation, NodeKind::kAttribute};
    case NodeKind::kAttribute:
    case NodeKind::kRelation:
      return {NodeKind::kObject};
  }
  return {};
}

SceneGraph::SceneGraph(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    index_.emplace(nodes_[i].id, i);  // first occurrence wins on duplicates
  }
  adjacency_.resize(nodes_.size());
  for (const Edge& e : edges_) {
    auto s = index_.find(e.source);
    auto t = index_.find(e.target);
    if (s == index_.end() || t == index_.end() || s->second == t->second) {
      continue;
    }
    auto link = [this](std::size_t from, std::size_t to) {
      auto& adj = adjacency_[from];
      if (std::find(adj.begin(), adj.end(), to) == adj.end()) adj.push_back(to);
    };
    link(s->second, t->second);
    link(t->second, s->second);
  }
}

SceneGraph SceneGraph::checked(std::vector<Node> nodes,
                               std::vector<Edge> edges) {
  SceneGraph g(std::move(nodes), std::move(edges));
  if (auto violations = validate_graph(g); !violations.empty()) {
    throw ValidationError(std::move(violations));
  }
  return g;
}

std::optional<std::size_t> SceneGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> SceneGraph::neighbor_indices(std::size_t index,
                                                      KindSet filter) const {
  std::vector<std::size_t> out;
  for (std::size_t k : adjacency_.at(index)) {
    if (filter.contains(nodes_[k].kind)) out.push_back(k);
  }
  return out;
}

namespace {

bool edge_kinds_allowed(NodeKind from, NodeKind to) {
  using K = NodeKind;
  if (from == K::kAttribute) return to == K::kObject;
  if (to == K::kAttribute) return from == K::kObject;
  if (from == K::kRelation) return to == K::kObject;
  if (to == K::kRelation) return from == K::kObject;
  return false;  // object -> object
}

std::string describe_edge(const Edge& e) {
  return "\"" + e.source + "\"->\"" + e.target + "\"";
}

}  // namespace

std::vector<std::string> validate_graph(const SceneGraph& g) {
  std::vector<std::string> out;
  if (g.nodes().empty()) out.emplace_back("empty graph: at least one node required");

  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Node& n = g.node(i);
    if (!seen.insert(n.id).second) {
      out.push_back("duplicate id: \"" + n.id + "\" (node " + std::to_string(i) + ")");
    }
    if (n.embedding) {
      for (double x : *n.embedding) {
        if (!std::isfinite(x)) {
          out.push_back("non-finite embedding on node \"" + n.id + "\"");
          break;
        }
      }
    }
  }

  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const Edge& e = g.edges()[i];
    const std::string where = "edge " + std::to_string(i) + " " + describe_edge(e);
    auto s = g.index_of(e.source);
    auto t = g.index_of(e.target);
    if (!s) out.push_back("dangling " + where + ": unknown source \"" + e.source + "\"");
    if (!t) out.push_back("dangling " + where + ": unknown target \"" + e.target + "\"");
    if (!s || !t) continue;
    if (e.source == e.target) {
      out.push_back("self-loop " + where);
      continue;
    }
    const NodeKind from = g.node(*s).kind;
    const NodeKind to = g.node(*t).kind;
    if (!edge_kinds_allowed(from, to)) {
      out.push_back("forbidden " + where + ": " + std::string(to_string(from)) +
                    " -> " + std::string(to_string(to)));
    }
  }
  return out;
}

std::vector<std::string> typed_neighbors(const SceneGraph& g,
                                         std::string_view id, KindSet filter) {
  auto idx = g.index_of(id);
  if (!idx) throw std::out_of_range("unknown node id: \"" + std::string(id) + "\"");
  std::vector<std::string> out;
  for (std::size_t k : g.neighbor_indices(*idx, filter)) {
    out.push_back(g.node(k).id);
  }
  return out;
}

std::vector<std::string> typed_neighbors(const SceneGraph& g,
                                         std::string_view id) {
  auto idx = g.index_of(id);
  if (!idx) throw std::out_of_range("unknown node id: \"" + std::string(id) + "\"");
  return typed_neighbors(g, id, default_neighbor_kinds(g.node(*idx).kind));
}

namespace {

std::string require_string(const json& obj, const char* key,
                           const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing \"" + key + "\"");
  if (!it->is_string()) throw ParseError(where + ": \"" + key + "\" must be a string");
  return it->get<std::string>();
}

Node parse_node(const json& j, std::size_t i) {
  const std::string where = "nodes[" + std::to_string(i) + "]";
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  Node n;
  n.id = require_string(j, "id", where);
  const std::string kind = require_string(j, "kind", where);
  auto parsed = parse_node_kind(kind);
  if (!parsed) {
    throw ParseError(where + " (\"" + n.id + "\"): unknown kind \"" + kind + "\"");
  }
  n.kind = *parsed;
  n.label = j.contains("label") ? require_string(j, "label", where) : n.id;
  if (auto it = j.find("embedding"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) {
      throw ParseError(where + " (\"" + n.id + "\"): \"embedding\" must be an array");
    }
    std::vector<double> v;
    for (const auto& x : *it) {
      if (!x.is_number()) {
        throw ParseError(where + " (\"" + n.id + "\"): embedding entries must be numbers");
      }
      v.push_back(x.get<double>());
    }
    n.embedding = std::move(v);
  }
  return n;
}

Edge parse_edge(const json& j, std::size_t i) {
  const std::string where = "edges[" + std::to_string(i) + "]";
  if (j.is_array() && j.size() == 2 && j[0].is_string() && j[1].is_string()) {
    return {j[0].get<std::string>(), j[1].get<std::string>()};
  }
  if (j.is_object()) {
    return {require_string(j, "source", where), require_string(j, "target", where)};
  }
  throw ParseError(where + ": expected [source, target]");
}

}  // namespace

SceneGraph load_graph(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("top level must be an object");
  auto nodes_it = doc.find("nodes");
  if (nodes_it == doc.end() || !nodes_it->is_array()) {
    throw ParseError("missing \"nodes\" array");
  }
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < nodes_it->size(); ++i) {
    nodes.push_back(parse_node((*nodes_it)[i], i));
  }
  std::vector<Edge> edges;
  if (auto edges_it = doc.find("edges"); edges_it != doc.end()) {
    if (!edges_it->is_array()) throw ParseError("\"edges\" must be an array");
    for (std::size_t i = 0; i < edges_it->size(); ++i) {
      edges.push_back(parse_edge((*edges_it)[i], i));
    }
  }
  return SceneGraph::checked(std::move(nodes), std::move(edges));
}

SceneGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open file");
  try {
    return load_graph(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": invalid scene graph", e.violations());
  }
}

std::string serialize_graph(const SceneGraph& g) {
  json doc;
  json nodes = json::array();
  for (const Node& n : g.nodes()) {
    json jn;
    jn["id"] = n.id;
    jn["kind"] = to_string(n.kind);
    jn["label"] = n.label;
    if (n.embedding) jn["embedding"] = *n.embedding;
    nodes.push_back(std::move(jn));
  }
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.source, e.target});
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

void save_graph(const SceneGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << serialize_graph(g);
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace sgwd
