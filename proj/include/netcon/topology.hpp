// Copyright 2026 The netcon Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <variant>

#include "netcon/model.hpp"

namespace netcon {

using Edge = std::pair<NodeId, NodeId>;
using EdgeList = std::vector<Edge>;

// ---------------------------------------------------------------------------
// Graph views

/// Undirected simple graph with sorted adjacency lists.
class ActiveGraph {
 public:
  ActiveGraph() = default;
  explicit ActiveGraph(std::size_t n) : adj_(n) {}

  ActiveGraph(std::size_t n, const EdgeList& edges) : adj_(n) {
    for (auto [u, v] : edges) add_edge(u, v);
    for (auto& a : adj_) std::sort(a.begin(), a.end());
  }

  /// Active subgraph of an undirected configuration.
  static ActiveGraph from(const Configuration& config) {
    ActiveGraph g(config.size());
    const auto n = static_cast<NodeId>(config.size());
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = 0; v < n; ++v)
        if (u != v && (config.edge(u, v) == EdgeState::active || config.edge(v, u) == EdgeState::active))
          g.adj_[u].push_back(v);
    return g;
  }

  std::size_t size() const { return adj_.size(); }
  std::size_t degree(NodeId u) const { return adj_[u].size(); }
  const std::vector<NodeId>& neighbors(NodeId u) const { return adj_[u]; }

  bool has_edge(NodeId u, NodeId v) const {
    return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
  }

  std::size_t edge_count() const {
    std::size_t d = 0;
    for (const auto& a : adj_) d += a.size();
    return d / 2;
  }

  /// Edges as (u, v) with u < v, in lexicographic order.
  EdgeList edges() const {
    EdgeList out;
    for (NodeId u = 0; u < adj_.size(); ++u)
      for (NodeId v : adj_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  bool operator==(const ActiveGraph&) const = default;

 private:
  void add_edge(NodeId u, NodeId v) {
    if (u >= adj_.size() || v >= adj_.size()) throw ModelError("edge endpoint out of range");
    if (u == v) throw ModelError("self-loop in edge list");
    if (std::find(adj_[u].begin(), adj_[u].end(), v) != adj_[u].end()) return;
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }

  std::vector<std::vector<NodeId>> adj_;
};

/// Directed simple graph with sorted out-lists.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  DirectedGraph(std::size_t n, const EdgeList& arcs) : out_(n) {
    for (auto [u, v] : arcs) {
      if (u >= n || v >= n || u == v) throw ModelError("bad arc");
      out_[u].push_back(v);
    }
    for (auto& o : out_) {
      std::sort(o.begin(), o.end());
      o.erase(std::unique(o.begin(), o.end()), o.end());
    }
  }

  static DirectedGraph from(const Configuration& config) {
    EdgeList arcs;
    const auto n = static_cast<NodeId>(config.size());
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = 0; v < n; ++v)
        if (u != v && config.edge(u, v) == EdgeState::active) arcs.emplace_back(u, v);
    return DirectedGraph(n, arcs);
  }

  std::size_t size() const { return out_.size(); }
  const std::vector<NodeId>& out(NodeId u) const { return out_[u]; }
  bool has_arc(NodeId u, NodeId v) const { return std::binary_search(out_[u].begin(), out_[u].end(), v); }

  EdgeList arcs() const {
    EdgeList a;
    for (NodeId u = 0; u < out_.size(); ++u)
      for (NodeId v : out_[u]) a.emplace_back(u, v);
    return a;
  }

  /// Underlying undirected graph.
  ActiveGraph undirected() const { return ActiveGraph(size(), arcs()); }

 private:
  std::vector<std::vector<NodeId>> out_;
};

// ---------------------------------------------------------------------------
// Recognizers

/// Component label per node, labels dense from 0 in order of first node.
inline std::vector<std::size_t> component_labels(const ActiveGraph& g) {
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(g.size(), unset);
  std::vector<NodeId> stack;
  std::size_t next = 0;
  for (NodeId s = 0; s < g.size(); ++s) {
    if (label[s] != unset) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : g.neighbors(u))
        if (label[v] == unset) {
          label[v] = next;
          stack.push_back(v);
        }
    }
    ++next;
  }
  return label;
}

inline std::size_t count_components(const ActiveGraph& g) {
  const auto labels = component_labels(g);
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

inline bool is_connected(const ActiveGraph& g) { return g.size() >= 1 && count_components(g) == 1; }

inline bool is_acyclic(const ActiveGraph& g) { return g.edge_count() + count_components(g) == g.size(); }

inline bool is_spanning_line(const ActiveGraph& g) {
  const std::size_t n = g.size();
  if (n < 2 || g.edge_count() != n - 1) return false;
  std::size_t ends = 0;
  for (NodeId u = 0; u < n; ++u) {
    const auto d = g.degree(u);
    if (d == 1) ++ends;
    else if (d != 2) return false;
  }
  return ends == 2 && is_connected(g);
}

inline bool is_spanning_star(const ActiveGraph& g) {
  const std::size_t n = g.size();
  if (n < 2 || g.edge_count() != n - 1) return false;
  std::size_t leaves = 0;
  bool center = false;
  for (NodeId u = 0; u < n; ++u) {
    const auto d = g.degree(u);
    if (d == n - 1 && !center) center = true;
    else if (d == 1) ++leaves;
    else return false;
  }
  return center && leaves == n - 1;
}

inline bool has_directed_2cycle(const DirectedGraph& g) {
  for (NodeId u = 0; u < g.size(); ++u)
    for (NodeId v : g.out(u))
      if (v > u && g.has_arc(v, u)) return true;
  return false;
}

/// Short label used in reports: spanning_line, spanning_star, tree,
/// connected, or disconnected.
inline std::string topology_class(const ActiveGraph& g) {
  if (is_spanning_line(g)) return "spanning_line";
  if (is_spanning_star(g)) return "spanning_star";
  if (!is_connected(g)) return "disconnected";
  if (is_acyclic(g)) return "tree";
  return "connected";
}

/// Nodes in output states and the active edges among them, relabeled
/// densely; `nodes[k]` is the configuration node behind output node k.
struct OutputGraph {
  std::vector<NodeId> nodes;
  ActiveGraph graph;
};

inline OutputGraph output_graph(const Configuration& config, const ProtocolSpec& proto) {
  OutputGraph out;
  std::vector<NodeId> index(config.size(), static_cast<NodeId>(-1));
  for (NodeId u = 0; u < config.size(); ++u)
    if (proto.is_output(config.state(u))) {
      index[u] = static_cast<NodeId>(out.nodes.size());
      out.nodes.push_back(u);
    }
  EdgeList edges;
  for (NodeId a = 0; a < out.nodes.size(); ++a)
    for (NodeId b = a + 1; b < out.nodes.size(); ++b) {
      const NodeId u = out.nodes[a], v = out.nodes[b];
      if (config.edge(u, v) == EdgeState::active || config.edge(v, u) == EdgeState::active) edges.emplace_back(a, b);
    }
  out.graph = ActiveGraph(out.nodes.size(), edges);
  return out;
}

// ---------------------------------------------------------------------------
// Generators

inline EdgeList clique_edges(std::size_t n) {
  EdgeList e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return e;
}

inline EdgeList line_edges(std::size_t n) {
  EdgeList e;
  for (NodeId u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
  return e;
}

inline EdgeList ring_edges(std::size_t n) {
  if (n < 3) throw ModelError("ring needs n >= 3");
  EdgeList e = line_edges(n);
  e.emplace_back(0, static_cast<NodeId>(n - 1));
  return e;
}

inline EdgeList star_edges(std::size_t n) {
  EdgeList e;
  for (NodeId v = 1; v < n; ++v) e.emplace_back(0, v);
  return e;
}

/// Uniform random labeled spanning tree (Pruefer decoding).
inline EdgeList random_tree_edges(std::size_t n, Rng& rng) {
  if (n < 2) return {};
  if (n == 2) return {{0, 1}};
  std::vector<NodeId> code(n - 2);
  for (auto& c : code) c = static_cast<NodeId>(uniform_below(rng, n));
  std::vector<std::size_t> degree(n, 1);
  for (auto c : code) ++degree[c];
  EdgeList edges;
  // Simple O(n^2) decode; n is small everywhere this is used.
  for (auto c : code) {
    NodeId leaf = 0;
    while (degree[leaf] != 1) ++leaf;
    edges.emplace_back(std::min(leaf, c), std::max(leaf, c));
    --degree[leaf];
    --degree[c];
  }
  NodeId a = 0;
  while (degree[a] != 1) ++a;
  NodeId b = a + 1;
  while (degree[b] != 1) ++b;
  edges.emplace_back(a, b);
  return edges;
}

inline EdgeList random_connected_edges(std::size_t n, double p, Rng& rng) {
  EdgeList edges = random_tree_edges(n, rng);
  std::vector<bool> in_tree(n * n, false);
  for (auto [u, v] : edges) in_tree[u * n + v] = in_tree[v * n + u] = true;
  std::bernoulli_distribution extra(p);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (!in_tree[u * n + v] && extra(rng)) edges.emplace_back(u, v);
  std::sort(edges.begin(), edges.end());
  return edges;
}

/// Weakly connected random digraph: a random spanning tree with each edge
/// given one or both orientations, plus independent extra arcs.
inline EdgeList random_directed_connected_arcs(std::size_t n, double p, Rng& rng) {
  EdgeList arcs;
  for (auto [u, v] : random_tree_edges(n, rng)) {
    switch (uniform_below(rng, 3)) {
      case 0: arcs.emplace_back(u, v); break;
      case 1: arcs.emplace_back(v, u); break;
      default: arcs.emplace_back(u, v); arcs.emplace_back(v, u); break;
    }
  }
  std::bernoulli_distribution extra(p);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (u != v && extra(rng)) arcs.emplace_back(u, v);
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
  return arcs;
}

// ---------------------------------------------------------------------------
// Impossibility family graphs

/// k copies of a base graph, each missing one cycle edge (u_i, u_j), chained
/// cyclically by the edges {copy h's u_i, copy h+1's u_j}.
struct FamilyGraph {
  ActiveGraph base;
  Edge removed_edge{};
  std::size_t k = 0;
  ActiveGraph graph;
  /// copy_map[h][m] is the node of copy h standing for base node m.
  std::vector<std::vector<NodeId>> copy_map;

  NodeId node(std::size_t copy, NodeId base_node) const { return copy_map[copy][base_node]; }
  std::size_t copy_of(NodeId v) const { return v / base.size(); }
  NodeId base_of(NodeId v) const { return static_cast<NodeId>(v % base.size()); }
};

inline bool edge_on_cycle(const ActiveGraph& g, Edge e) {
  if (!g.has_edge(e.first, e.second)) return false;
  EdgeList rest;
  for (auto [u, v] : g.edges())
    if (!((u == e.first && v == e.second) || (u == e.second && v == e.first))) rest.emplace_back(u, v);
  const auto labels = component_labels(ActiveGraph(g.size(), rest));
  return labels[e.first] == labels[e.second];
}

inline FamilyGraph build_family_graph(const ActiveGraph& base, Edge cycle_edge, std::size_t k) {
  if (k < 2) throw ModelError("family graph needs k >= 2 copies");
  if (!is_connected(base)) throw ModelError("family graph base must be connected");
  if (!edge_on_cycle(base, cycle_edge))
    throw ModelError("edge (" + std::to_string(cycle_edge.first) + "," + std::to_string(cycle_edge.second) +
                     ") is not on a cycle of the base graph");
  FamilyGraph fam;
  fam.base = base;
  fam.removed_edge = cycle_edge;
  fam.k = k;
  const std::size_t n = base.size();
  fam.copy_map.assign(k, std::vector<NodeId>(n));
  for (std::size_t h = 0; h < k; ++h)
    for (NodeId m = 0; m < n; ++m) fam.copy_map[h][m] = static_cast<NodeId>(h * n + m);
  const auto [ui, uj] = cycle_edge;
  EdgeList edges;
  for (std::size_t h = 0; h < k; ++h)
    for (auto [u, v] : base.edges())
      if (!((u == ui && v == uj) || (u == uj && v == ui))) edges.emplace_back(fam.node(h, u), fam.node(h, v));
  for (std::size_t h = 0; h < k; ++h) edges.emplace_back(fam.node(h, ui), fam.node((h + 1) % k, uj));
  fam.graph = ActiveGraph(k * n, edges);
  return fam;
}

// ---------------------------------------------------------------------------
// Initial families

enum class FamilyKind { clique, line, ring, star, random_connected };

struct Family {
  FamilyKind kind = FamilyKind::clique;
  double p = 0.3;

  static Family parse(std::string_view text) {
    if (text == "clique") return {FamilyKind::clique};
    if (text == "line") return {FamilyKind::line};
    if (text == "ring") return {FamilyKind::ring};
    if (text == "star") return {FamilyKind::star};
    const std::string_view prefix = "random_connected";
    if (text.substr(0, prefix.size()) == prefix) {
      auto rest = text.substr(prefix.size());
      if (rest.empty()) return {FamilyKind::random_connected, 0.3};
      if (rest.front() == '(' && rest.back() == ')') rest = rest.substr(1, rest.size() - 2);
      else if (rest.front() == ':') rest.remove_prefix(1);
      try {
        std::size_t used = 0;
        double p = std::stod(std::string(rest), &used);
        if (used == rest.size() && p >= 0.0 && p <= 1.0) return {FamilyKind::random_connected, p};
      } catch (const std::exception&) {
      }
    }
    throw ModelError("unknown family '" + std::string(text) + "'");
  }

  std::string name() const {
    switch (kind) {
      case FamilyKind::clique: return "clique";
      case FamilyKind::line: return "line";
      case FamilyKind::ring: return "ring";
      case FamilyKind::star: return "star";
      case FamilyKind::random_connected: {
        std::ostringstream s;
        s << "random_connected(" << p << ")";
        return s.str();
      }
    }
    return "?";
  }
};

inline EdgeList generate_edges(std::size_t n, const Family& family, Rng& rng) {
  if (n < 2) throw ModelError("initial topology needs n >= 2");
  switch (family.kind) {
    case FamilyKind::clique: return clique_edges(n);
    case FamilyKind::line: return line_edges(n);
    case FamilyKind::ring: return ring_edges(n);
    case FamilyKind::star: return star_edges(n);
    case FamilyKind::random_connected: return random_connected_edges(n, family.p, rng);
  }
  return {};
}

/// Initial configuration for `proto` on a freshly generated connected
/// topology. Directed protocols get each edge in both orientations unless a
/// random family is requested, which yields a random weakly connected digraph.
inline Configuration generate_initial(const ProtocolSpec& proto, std::size_t n, const Family& family, Rng& rng) {
  EdgeList edges;
  if (proto.directed()) {
    if (family.kind == FamilyKind::random_connected) {
      edges = random_directed_connected_arcs(n, family.p, rng);
    } else {
      for (auto [u, v] : generate_edges(n, family, rng)) {
        edges.emplace_back(u, v);
        edges.emplace_back(v, u);
      }
    }
  } else {
    edges = generate_edges(n, family, rng);
  }
  return make_configuration(proto, n, edges);
}

inline Configuration generate_initial(const ProtocolSpec& proto, const FamilyGraph& fam) {
  return make_configuration(proto, fam.graph.size(), fam.graph.edges());
}

// ---------------------------------------------------------------------------
// Edge-list serialization: first line n, then one "u v" per line.

inline void write_edge_list(std::ostream& out, std::size_t n, const EdgeList& edges) {
  out << n << '\n';
  for (auto [u, v] : edges) out << u << ' ' << v << '\n';
}

inline std::pair<std::size_t, EdgeList> read_edge_list(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  bool have_n = false;
  EdgeList edges;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    try {
      if (!have_n) {
        if (toks.size() != 1) throw ParseError("expected node count");
        n = std::stoul(toks[0]);
        have_n = true;
        continue;
      }
      if (toks.size() != 2) throw ParseError("expected 'u v'");
      const auto u = static_cast<NodeId>(std::stoul(toks[0]));
      const auto v = static_cast<NodeId>(std::stoul(toks[1]));
      if (u >= n || v >= n || u == v) throw ParseError("bad edge endpoints");
      edges.emplace_back(u, v);
    } catch (const std::logic_error&) {
      throw ParseError("edge list line " + std::to_string(lineno) + ": not a number");
    } catch (const ParseError& e) {
      throw ParseError("edge list line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_n) throw ParseError("edge list is empty");
  return {n, edges};
}

}  // namespace netcon
