// Copyright 2026 The netcon Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Turing-machine simulation on edge memory. A halted spanning line is split
// into a control line U (the floor(n/2) leftmost nodes) and a matched set M
// whose pairwise edges act as binary tape cells. Every step of the layout
// construction and of the simulation is a scripted pairwise interaction that
// reads and writes only the two interacting nodes and the edge between them.
//
// Tape seen by the machine: first the n input slots held by the U nodes
// (sorted, writable), then the |M|(|M|-1)/2 edge cells in head-walk order.

#include <map>

#include "netcon/analysis.hpp"

namespace netcon::tm {

using Symbol = std::uint8_t;
using TmState = std::uint16_t;

enum class Move : std::uint8_t { left, right };

struct Transition {
  TmState next = 0;
  Symbol write = 0;
  Move move = Move::right;
};

/// Deterministic single-tape TM. Missing transitions reject.
class TMDescription {
 public:
  /// Header lines `states:`, `input:`, `tape:`, `blank:`, `start:`,
  /// `accept:`, `reject:`, then `state symbol -> state' symbol' L|R`.
  static TMDescription parse(std::string_view text);

  std::size_t state_count() const { return states_.size(); }
  std::size_t symbol_count() const { return symbols_.size(); }
  const std::string& state_name(TmState s) const { return states_.at(s); }
  const std::string& symbol_name(Symbol s) const { return symbols_.at(s); }
  std::optional<Symbol> find_symbol(std::string_view name) const {
    for (std::size_t i = 0; i < symbols_.size(); ++i)
      if (symbols_[i] == name) return static_cast<Symbol>(i);
    return std::nullopt;
  }
  Symbol symbol(std::string_view name) const {
    auto s = find_symbol(name);
    if (!s) throw ModelError("symbol '" + std::string(name) + "' not in tape alphabet");
    return *s;
  }
  bool is_input(Symbol s) const { return std::find(input_.begin(), input_.end(), s) != input_.end(); }
  const std::vector<Symbol>& input_alphabet() const { return input_; }
  Symbol blank() const { return blank_; }
  Symbol zero() const { return zero_; }
  Symbol one() const { return one_; }
  TmState start() const { return start_; }
  TmState accept() const { return accept_; }
  TmState reject() const { return reject_; }

  std::optional<Transition> delta(TmState q, Symbol s) const { return delta_[q * symbols_.size() + s]; }

 private:
  std::vector<std::string> states_;
  std::vector<std::string> symbols_;
  std::vector<Symbol> input_;
  Symbol blank_ = 0, zero_ = 0, one_ = 0;
  TmState start_ = 0, accept_ = 0, reject_ = 0;
  std::vector<std::optional<Transition>> delta_;
};

inline TMDescription TMDescription::parse(std::string_view text) {
  TMDescription tm;
  std::map<std::string, std::vector<std::string>> header;
  struct Line {
    std::vector<std::string> lhs, rhs;
    int no;
  };
  std::vector<Line> rules;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++lineno;
    if (auto h = raw.find('#'); h != std::string_view::npos) raw = raw.substr(0, h);
    auto line = netcon::detail::trim(raw);
    if (line.empty()) continue;
    if (auto arrow = line.find("->"); arrow != std::string_view::npos) {
      rules.push_back({netcon::detail::split_ws(line.substr(0, arrow)), netcon::detail::split_ws(line.substr(arrow + 2)),
                       lineno});
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError("tm line " + std::to_string(lineno) + ": unrecognized");
    std::string key(netcon::detail::trim(line.substr(0, colon)));
    if (header.count(key)) throw ParseError("tm line " + std::to_string(lineno) + ": duplicate header " + key);
    header[key] = netcon::detail::split_ws(line.substr(colon + 1));
  }
  for (const char* k : {"states", "input", "tape", "blank", "start", "accept", "reject"})
    if (!header.count(k)) throw ParseError(std::string("tm: missing header '") + k + "'");

  tm.states_ = header["states"];
  tm.symbols_ = header["tape"];
  if (tm.symbols_.size() > 255) throw ParseError("tm: tape alphabet too large");
  auto state_of = [&](const std::string& s, int no) {
    auto it = std::find(tm.states_.begin(), tm.states_.end(), s);
    if (it == tm.states_.end()) throw ParseError("tm line " + std::to_string(no) + ": unknown state '" + s + "'");
    return static_cast<TmState>(it - tm.states_.begin());
  };
  auto symbol_of = [&](const std::string& s, int no) {
    auto it = std::find(tm.symbols_.begin(), tm.symbols_.end(), s);
    if (it == tm.symbols_.end()) throw ParseError("tm line " + std::to_string(no) + ": unknown symbol '" + s + "'");
    return static_cast<Symbol>(it - tm.symbols_.begin());
  };
  auto single = [&](const char* k) {
    if (header[k].size() != 1) throw ParseError(std::string("tm: header '") + k + "' takes one value");
    return header[k][0];
  };
  for (const auto& s : header["input"]) tm.input_.push_back(symbol_of(s, 0));
  tm.blank_ = symbol_of(single("blank"), 0);
  tm.zero_ = symbol_of("0", 0);
  tm.one_ = symbol_of("1", 0);
  if (tm.blank_ != tm.zero_) throw ParseError("tm: blank must be the cell symbol 0");
  for (auto s : tm.input_)
    if (s == tm.zero_ || s == tm.one_) throw ParseError("tm: input symbols must differ from cell symbols 0 and 1");
  tm.start_ = state_of(single("start"), 0);
  tm.accept_ = state_of(single("accept"), 0);
  tm.reject_ = state_of(single("reject"), 0);
  if (tm.accept_ == tm.reject_) throw ParseError("tm: accept and reject must differ");

  tm.delta_.assign(tm.states_.size() * tm.symbols_.size(), std::nullopt);
  for (const auto& r : rules) {
    if (r.lhs.size() != 2 || r.rhs.size() != 3)
      throw ParseError("tm line " + std::to_string(r.no) + ": expected 'state symbol -> state symbol L|R'");
    const auto q = state_of(r.lhs[0], r.no);
    const auto s = symbol_of(r.lhs[1], r.no);
    if (q == tm.accept_ || q == tm.reject_)
      throw ParseError("tm line " + std::to_string(r.no) + ": transition out of a terminal state");
    Transition t{state_of(r.rhs[0], r.no), symbol_of(r.rhs[1], r.no), Move::right};
    if (r.rhs[2] == "L") t.move = Move::left;
    else if (r.rhs[2] != "R") throw ParseError("tm line " + std::to_string(r.no) + ": move must be L or R");
    auto& slot = tm.delta_[q * tm.symbols_.size() + s];
    if (slot) throw ParseError("tm line " + std::to_string(r.no) + ": nondeterministic transition");
    slot = t;
  }
  return tm;
}

// ---------------------------------------------------------------------------
// Edge cells and head tokens

/// Token positions on the U line, 1-based, i < j.
struct TokenPair {
  std::size_t i = 1;
  std::size_t j = 2;
  bool operator==(const TokenPair&) const = default;
};

inline std::size_t cell_count(std::size_t m) { return m < 2 ? 0 : m * (m - 1) / 2; }

/// Canonical cell index (j-1)(j-2)/2 + i - 1.
inline std::size_t cell_address(TokenPair t) {
  if (t.i == t.j) throw ModelError("cell tokens must differ");
  if (t.i < 1 || t.i > t.j) throw ModelError("cell tokens out of order");
  return (t.j - 1) * (t.j - 2) / 2 + t.i - 1;
}

inline TokenPair cell_tokens(std::size_t cell) {
  std::size_t j = 2;
  while (j * (j - 1) / 2 <= cell) ++j;
  return {cell - (j - 1) * (j - 2) / 2 + 1, j};
}

/// Lexicographic successor / predecessor of the token pair over an M of
/// size m; nullopt when the move would leave the cell range.
inline std::optional<TokenPair> move_head(TokenPair t, std::size_t m, Move dir) {
  if (t.i < 1 || t.i >= t.j || t.j > m) throw ModelError("invalid token pair");
  if (dir == Move::right) {
    if (t.j < m) return TokenPair{t.i, t.j + 1};
    if (t.i + 2 <= m) return TokenPair{t.i + 1, t.i + 2};
    return std::nullopt;
  }
  if (t.j - 1 > t.i) return TokenPair{t.i, t.j - 1};
  if (t.i > 1) return TokenPair{t.i - 1, m};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Simulator network

enum class Role : std::uint8_t { line, u, m, redundant };
enum class CellMark : std::uint8_t { none, read, write0, write1, done0, done1 };

/// The single control token: the leader during layout, the machine's control
/// during simulation.
struct Controller {
  TmState tm_state = 0;
  /// Offset of the head within the holding node's slots.
  std::size_t offset = 0;
  std::optional<Symbol> carry;
  /// Last cell value read, or the value to write.
  int reg = -1;
  std::optional<Move> pending_move;
};

struct SimNode {
  Role role = Role::line;
  Symbol input = 0;
  /// U nodes: recorded inputs (own first), rewritten by the machine.
  std::vector<Symbol> slots;
  bool mark_left = false;
  bool mark_right = false;
  bool matched = false;
  bool token1 = false;
  bool token2 = false;
  CellMark mark = CellMark::none;
  std::optional<Controller> ctrl;
};

struct LineLayout {
  std::vector<NodeId> u_line;
  /// Non-U, non-redundant nodes in line order.
  std::vector<NodeId> m_nodes;
  /// matching[i] is the M node matched to u_line[i].
  std::vector<NodeId> matching;
  std::optional<NodeId> redundant_node;
  /// Per U node, the inputs it recorded (own first), before sorting.
  std::vector<std::vector<Symbol>> input_record;

  std::size_t cells() const { return cell_count(m_nodes.size()); }
};

/// Nodes, edges and interaction log of the simulation phase.
class SimulatorNetwork {
 public:
  SimulatorNetwork() = default;
  SimulatorNetwork(Configuration edges, std::vector<SimNode> nodes)
      : edges_(std::move(edges)), nodes_(std::move(nodes)) {}

  /// One pairwise interaction: `f(node_u, node_v, edge_uv)` rewrites the two
  /// nodes and their edge and sees nothing else.
  template <class F>
  void interact(NodeId u, NodeId v, F&& f) {
    if (u == v || u >= nodes_.size() || v >= nodes_.size()) throw ModelError("illegal scripted interaction");
    EdgeState e = edges_.edge(u, v);
    f(nodes_[u], nodes_[v], e);
    edges_.set_edge(u, v, e);
    ++interactions_;
    if (record_) script_.pairs.push_back({u, v, std::nullopt});
  }

  std::size_t size() const { return nodes_.size(); }
  const SimNode& node(NodeId u) const { return nodes_[u]; }
  const Configuration& edges() const { return edges_; }
  std::uint64_t interactions() const { return interactions_; }
  const Schedule& script() const { return script_; }
  void record_script(bool on) { record_ = on; }

  NodeId controller_node() const {
    for (NodeId u = 0; u < nodes_.size(); ++u)
      if (nodes_[u].ctrl) return u;
    throw ModelError("no control token present");
  }

 private:
  Configuration edges_{1, false, 0};
  std::vector<SimNode> nodes_;
  std::uint64_t interactions_ = 0;
  Schedule script_;
  bool record_ = true;
};

namespace detail {

inline void pass_control(SimNode& from, SimNode& to) {
  if (!from.ctrl || to.ctrl) throw ModelError("control token handoff from a node without it");
  to.ctrl = std::move(from.ctrl);
  from.ctrl.reset();
}

/// Moves the control token over active edges from path[from] to path[to];
/// `arrive` updates the destination within the final interaction.
template <class F>
void walk(SimulatorNetwork& net, const std::vector<NodeId>& path, std::size_t from, std::size_t to, F&& arrive) {
  if (from == to) throw ModelError("empty control walk");
  while (from != to) {
    const std::size_t next = to > from ? from + 1 : from - 1;
    const bool last = next == to;
    net.interact(path[from], path[next], [&](SimNode& a, SimNode& b, EdgeState& e) {
      if (e != EdgeState::active) throw ModelError("control walk over an inactive edge");
      pass_control(a, b);
      if (last) arrive(b);
    });
    from = next;
  }
}

inline void walk(SimulatorNetwork& net, const std::vector<NodeId>& path, std::size_t from, std::size_t to) {
  if (from != to) walk(net, path, from, to, [](SimNode&) {});
}

inline std::vector<NodeId> line_order(const Configuration& config, NodeId leader) {
  const auto g = ActiveGraph::from(config);
  if (!is_spanning_line(g)) throw ModelError("partition_line needs a spanning line");
  if (g.degree(leader) != 1) throw ModelError("leader must be a line endpoint");
  std::vector<NodeId> order{leader};
  while (order.size() < g.size()) {
    for (NodeId nb : g.neighbors(order.back())) {
      if (order.size() >= 2 && nb == order[order.size() - 2]) continue;
      order.push_back(nb);
      break;
    }
  }
  return order;
}

inline std::size_t position_of(const std::vector<NodeId>& path, NodeId u) {
  auto it = std::find(path.begin(), path.end(), u);
  if (it == path.end()) throw ModelError("control token is off the U line");
  return static_cast<std::size_t>(it - path.begin());
}

}  // namespace detail

/// Builds the U/M layout from a halted spanning line whose endpoint `leader`
/// holds the unique leader; `inputs[v]` is node v's input. `rng` only picks
/// which isolated node each U node is matched to. The control token ends on
/// the first U node.
inline std::pair<SimulatorNetwork, LineLayout> partition_line(const Configuration& config,
                                                             const std::vector<Symbol>& inputs, NodeId leader,
                                                             Rng& rng) {
  const std::size_t n = config.size();
  if (n < 2) throw ModelError("partition_line needs n >= 2");
  if (inputs.size() != n) throw ModelError("one input symbol per node required");
  if (config.directed()) throw ModelError("partition_line needs an undirected configuration");
  const auto line = detail::line_order(config, leader);

  Configuration edges(n, false, 0);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) edges.set_edge(u, v, config.edge(u, v));
  std::vector<SimNode> nodes(n);
  for (NodeId v = 0; v < n; ++v) {
    nodes[v].input = inputs[v];
    nodes[v].slots = {inputs[v]};
  }
  nodes[leader].ctrl = Controller{};
  SimulatorNetwork net(std::move(edges), std::move(nodes));
  const std::size_t k = n / 2;

  // Zig-zag marking of the rightmost and leftmost unmarked nodes. For odd n
  // the final right mark lands on the middle node, which becomes redundant.
  std::size_t pos = 0, lo = 0, hi = n;
  std::optional<std::size_t> middle;
  bool from_right = true;
  while (lo < hi) {
    const bool right = from_right;
    const std::size_t target = right ? hi - 1 : lo;
    const bool is_middle = right && lo == hi - 1;
    detail::walk(net, line, pos, target, [&](SimNode& x) {
      if (right) x.mark_right = true;
      else x.mark_left = true;
      if (is_middle) x.role = Role::redundant;
    });
    pos = target;
    if (right) --hi;
    else ++lo;
    if (is_middle) middle = pos;
    from_right = !right;
  }

  LineLayout layout;
  layout.u_line.assign(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(k));
  const std::size_t m_start = middle ? k + 1 : k;
  layout.m_nodes.assign(line.begin() + static_cast<std::ptrdiff_t>(m_start), line.end());
  if (middle) layout.redundant_node = line[*middle];

  // Input transfer along the line.
  auto fetch = [&](std::size_t from_pos, std::size_t to_pos) {
    detail::walk(net, line, pos, from_pos, [](SimNode& x) { x.ctrl->carry = x.input; });
    detail::walk(net, line, from_pos, to_pos, [](SimNode& x) {
      x.slots.push_back(*x.ctrl->carry);
      x.ctrl->carry.reset();
    });
    pos = to_pos;
  };
  for (std::size_t i = 0; i < k; ++i) fetch(m_start + i, i);
  if (middle) fetch(*middle, k - 1);

  // Detach everything right of U, walking back from the far end.
  detail::walk(net, line, pos, n - 1);
  for (std::size_t p = n - 1; p >= k; --p) {
    net.interact(line[p], line[p - 1], [](SimNode& a, SimNode& b, EdgeState& e) {
      e = EdgeState::inactive;
      if (a.role != Role::redundant) a.role = Role::m;
      a.slots.clear();
      detail::pass_control(a, b);
    });
  }
  pos = k - 1;

  // Match each U node, right to left, with a distinct isolated M node.
  std::vector<NodeId> free_m = layout.m_nodes;
  std::shuffle(free_m.begin(), free_m.end(), rng);
  layout.matching.assign(k, 0);
  for (std::size_t step = 0; step < k; ++step) {
    const std::size_t i = k - 1 - step;
    const NodeId partner = free_m[step];
    net.interact(line[i], partner, [](SimNode& a, SimNode& b, EdgeState& e) {
      if (b.role != Role::m || b.matched || e != EdgeState::inactive) throw ModelError("matching a non-isolated node");
      e = EdgeState::active;
      a.role = Role::u;
      a.matched = b.matched = true;
    });
    layout.matching[i] = partner;
    if (i > 0) detail::walk(net, line, i, i - 1);
  }
  for (std::size_t i = 0; i < k; ++i) layout.input_record.push_back(net.node(line[i]).slots);
  return {std::move(net), std::move(layout)};
}

/// Sorts the input region into tape-alphabet order by merge-split exchanges
/// between neighboring U nodes, so the machine sees the input multiset in a
/// canonical order.
inline void sort_input_region(SimulatorNetwork& net, const LineLayout& layout) {
  const auto& u = layout.u_line;
  for (std::size_t i = 0; i < u.size(); ++i)
    net.interact(u[i], layout.matching[i], [](SimNode& a, SimNode&, EdgeState&) {
      std::sort(a.slots.begin(), a.slots.end());
    });
  if (u.size() < 2) return;
  for (std::size_t round = 0, quiet = 0; quiet < 2; ++round) {
    bool changed = false;
    for (std::size_t i = round % 2; i + 1 < u.size(); i += 2)
      net.interact(u[i], u[i + 1], [&](SimNode& a, SimNode& b, EdgeState&) {
        std::vector<Symbol> all = a.slots;
        all.insert(all.end(), b.slots.begin(), b.slots.end());
        std::sort(all.begin(), all.end());
        const auto split = all.begin() + static_cast<std::ptrdiff_t>(a.slots.size());
        std::vector<Symbol> left(all.begin(), split), right(split, all.end());
        changed = changed || left != a.slots;
        a.slots = std::move(left);
        b.slots = std::move(right);
      });
    quiet = changed ? 0 : quiet + 1;
  }
}

/// Tape contents of the input region in head order.
inline std::vector<Symbol> input_region(const SimulatorNetwork& net, const LineLayout& layout) {
  std::vector<Symbol> out;
  for (NodeId u : layout.u_line) out.insert(out.end(), net.node(u).slots.begin(), net.node(u).slots.end());
  return out;
}

inline int cell_value(const SimulatorNetwork& net, const LineLayout& layout, TokenPair t) {
  return edge_bit(net.edges().edge(layout.matching.at(t.i - 1), layout.matching.at(t.j - 1)));
}

namespace detail {

inline void check_tokens(const LineLayout& layout, TokenPair t) {
  if (t.i < 1 || t.i >= t.j || t.j > layout.matching.size()) throw ModelError("cell outside the edge memory");
}

/// Marks the M partners of U nodes a and b, lets them interact, and clears
/// the marks; `bit` < 0 reads into the controller's register.
inline void cell_access(SimulatorNetwork& net, const LineLayout& layout, TokenPair t, int bit) {
  check_tokens(layout, t);
  const auto& u = layout.u_line;
  const std::size_t a = t.i - 1, b = t.j - 1;
  const NodeId ma = layout.matching[a], mb = layout.matching[b];
  const CellMark request = bit < 0 ? CellMark::read : (bit ? CellMark::write1 : CellMark::write0);
  auto mark = [&](NodeId un, NodeId mn) {
    net.interact(un, mn, [&](SimNode& x, SimNode& y, EdgeState&) {
      if (!x.ctrl || y.mark != CellMark::none) throw ModelError("cell marking out of protocol");
      y.mark = request;
    });
  };
  walk(net, u, position_of(u, net.controller_node()), a);
  mark(u[a], ma);
  walk(net, u, a, b);
  mark(u[b], mb);
  net.interact(ma, mb, [](SimNode& x, SimNode& y, EdgeState& e) {
    if (x.mark != y.mark) throw ModelError("cell endpoints disagree");
    if (x.mark == CellMark::write0) e = EdgeState::inactive;
    if (x.mark == CellMark::write1) e = EdgeState::active;
    x.mark = y.mark = e == EdgeState::active ? CellMark::done1 : CellMark::done0;
  });
  auto collect = [&](NodeId un, NodeId mn) {
    net.interact(un, mn, [](SimNode& x, SimNode& y, EdgeState&) {
      x.ctrl->reg = y.mark == CellMark::done1 ? 1 : 0;
      y.mark = CellMark::none;
    });
  };
  collect(u[b], mb);
  walk(net, u, b, a);
  collect(u[a], ma);
}

}  // namespace detail

/// Reads the cell under tokens t through node interactions.
inline int read_cell(SimulatorNetwork& net, const LineLayout& layout, TokenPair t) {
  detail::cell_access(net, layout, t, -1);
  return net.node(net.controller_node()).ctrl->reg;
}

inline int read_cell(SimulatorNetwork& net, const LineLayout& layout, std::size_t cell) {
  return read_cell(net, layout, cell_tokens(cell));
}

inline void write_cell(SimulatorNetwork& net, const LineLayout& layout, TokenPair t, int bit) {
  if (bit != 0 && bit != 1) throw ModelError("edge cells hold 0 or 1");
  detail::cell_access(net, layout, t, bit);
}

inline void write_cell(SimulatorNetwork& net, const LineLayout& layout, std::size_t cell, int bit) {
  write_cell(net, layout, cell_tokens(cell), bit);
}

// ---------------------------------------------------------------------------
// Machine execution

enum class TmOutcome { accept, reject, tape_exhausted, step_limit };

inline const char* to_string(TmOutcome o) {
  switch (o) {
    case TmOutcome::accept: return "accept";
    case TmOutcome::reject: return "reject";
    case TmOutcome::tape_exhausted: return "tape_exhausted";
    case TmOutcome::step_limit: return "step_limit";
  }
  return "?";
}

struct TmResult {
  TmOutcome outcome = TmOutcome::reject;
  std::uint64_t tm_steps = 0;
  std::uint64_t interactions = 0;
  /// Highest tape index visited; input slots come first.
  std::size_t max_tape_index = 0;
};

inline constexpr std::uint64_t default_tm_step_limit = 10'000'000;

namespace detail {

inline void move_token(SimulatorNetwork& net, const std::vector<NodeId>& u, std::size_t from, std::size_t to,
                       bool first) {
  if (from == to) return;
  walk(net, u, position_of(u, net.controller_node()), from);
  while (from != to) {
    const std::size_t next = to > from ? from + 1 : from - 1;
    net.interact(u[from], u[next], [&](SimNode& a, SimNode& b, EdgeState&) {
      pass_control(a, b);
      if (first) std::swap(a.token1, b.token1);
      else std::swap(a.token2, b.token2);
    });
    from = next;
  }
}

inline void set_token(SimulatorNetwork& net, const std::vector<NodeId>& u, std::size_t at, bool first, bool value,
                      NodeId partner) {
  walk(net, u, position_of(u, net.controller_node()), at);
  net.interact(u[at], partner, [&](SimNode& a, SimNode&, EdgeState&) { (first ? a.token1 : a.token2) = value; });
}

}  // namespace detail

/// Runs `tm` on the layout: the input region (the sorted slots of the U
/// nodes) followed by the edge cells. Entering accept or reject halts before
/// the move. Moving past either end of the tape exhausts it.
inline TmResult run_tm(SimulatorNetwork& net, const LineLayout& layout, const TMDescription& tm,
                       std::uint64_t step_limit = default_tm_step_limit) {
  const auto& u = layout.u_line;
  const std::size_t k = u.size(), m = layout.matching.size();
  if (k == 0) throw ModelError("empty layout");
  for (NodeId x : u)
    for (Symbol s : net.node(x).slots)
      if (s >= tm.symbol_count() || !tm.is_input(s)) throw ModelError("input region holds a non-input symbol");
  const auto start_ops = net.interactions();
  detail::walk(net, u, detail::position_of(u, net.controller_node()), 0);
  net.interact(u[0], layout.matching[0], [&](SimNode& a, SimNode&, EdgeState&) {
    a.ctrl->tm_state = tm.start();
    a.ctrl->offset = 0;
  });

  TmResult res;
  std::size_t p = 0;                  // U node holding the head, slot region
  std::optional<TokenPair> tokens;    // set while the head is on a cell
  std::vector<std::size_t> slot_base(k + 1, 0);
  for (std::size_t i = 0; i < k; ++i) slot_base[i + 1] = slot_base[i] + net.node(u[i]).slots.size();
  auto finish = [&](TmOutcome o) {
    res.outcome = o;
    res.interactions = net.interactions() - start_ops;
    return res;
  };

  while (true) {
    const auto& holder = net.node(net.controller_node());
    const TmState q = holder.ctrl->tm_state;
    if (q == tm.accept()) return finish(TmOutcome::accept);
    if (q == tm.reject()) return finish(TmOutcome::reject);
    if (res.tm_steps >= step_limit) return finish(TmOutcome::step_limit);
    ++res.tm_steps;
    const std::size_t tape_index =
        tokens ? slot_base[k] + cell_address(*tokens) : slot_base[p] + holder.ctrl->offset;
    res.max_tape_index = std::max(res.max_tape_index, tape_index);

    // Read, decide and (for slots) write in one interaction at the head.
    int read_bit = -1;
    if (tokens) read_bit = read_cell(net, layout, *tokens);
    const std::size_t here = detail::position_of(u, net.controller_node());
    int write_bit = -1;
    bool changed = false;
    net.interact(u[here], layout.matching[here], [&](SimNode& a, SimNode&, EdgeState&) {
      auto& c = *a.ctrl;
      const Symbol sym = tokens ? (c.reg ? tm.one() : tm.zero()) : a.slots[c.offset];
      const auto t = tm.delta(c.tm_state, sym);
      if (!t) {
        c.tm_state = tm.reject();
        c.pending_move.reset();
        return;
      }
      c.tm_state = t->next;
      c.pending_move = t->next == tm.accept() || t->next == tm.reject() ? std::nullopt : std::optional<Move>(t->move);
      if (tokens) {
        if (t->write != tm.zero() && t->write != tm.one()) throw ModelError("machine wrote a non-binary symbol to an edge cell");
        write_bit = t->write == tm.one() ? 1 : 0;
        changed = write_bit != read_bit;
      } else {
        a.slots[c.offset] = t->write;
      }
    });
    if (changed) write_cell(net, layout, *tokens, write_bit);
    const auto mv = net.node(net.controller_node()).ctrl->pending_move;
    if (!mv) continue;

    if (!tokens) {
      const std::size_t off = net.node(u[p]).ctrl->offset;
      const std::size_t len = net.node(u[p]).slots.size();
      if (*mv == Move::right && off + 1 < len) {
        net.interact(u[p], layout.matching[p], [](SimNode& a, SimNode&, EdgeState&) { ++a.ctrl->offset; });
      } else if (*mv == Move::left && off > 0) {
        net.interact(u[p], layout.matching[p], [](SimNode& a, SimNode&, EdgeState&) { --a.ctrl->offset; });
      } else if (*mv == Move::right && p + 1 < k) {
        detail::walk(net, u, p, p + 1, [](SimNode& x) { x.ctrl->offset = 0; });
        ++p;
      } else if (*mv == Move::left && p > 0) {
        detail::walk(net, u, p, p - 1, [](SimNode& x) { x.ctrl->offset = x.slots.size() - 1; });
        --p;
      } else if (*mv == Move::right && m >= 2) {
        detail::set_token(net, u, 0, true, true, layout.matching[0]);
        detail::set_token(net, u, 1, false, true, layout.matching[1]);
        tokens = TokenPair{1, 2};
      } else {
        return finish(TmOutcome::tape_exhausted);
      }
      continue;
    }

    const auto next = move_head(*tokens, m, *mv);
    if (!next) {
      if (*mv == Move::right) return finish(TmOutcome::tape_exhausted);
      // Left of the first cell is the last input slot.
      detail::set_token(net, u, 1, false, false, layout.matching[1]);
      detail::set_token(net, u, 0, true, false, layout.matching[0]);
      p = k - 1;
      if (p == 0) {
        net.interact(u[0], layout.matching[0], [](SimNode& a, SimNode&, EdgeState&) {
          a.ctrl->offset = a.slots.size() - 1;
        });
      } else {
        detail::walk(net, u, 0, p, [](SimNode& x) { x.ctrl->offset = x.slots.size() - 1; });
      }
      tokens.reset();
      continue;
    }
    // Right-hand token first when advancing leftwards, so tokens never cross.
    if (*mv == Move::right) {
      detail::move_token(net, u, tokens->i - 1, next->i - 1, true);
      detail::move_token(net, u, tokens->j - 1, next->j - 1, false);
    } else {
      detail::move_token(net, u, tokens->j - 1, next->j - 1, false);
      detail::move_token(net, u, tokens->i - 1, next->i - 1, true);
    }
    tokens = next;
  }
}

// ---------------------------------------------------------------------------
// End-to-end predicate computation

struct PipelineResult {
  bool decision = false;
  TmOutcome outcome = TmOutcome::reject;
  std::uint64_t construction_steps = 0;
  std::uint64_t layout_interactions = 0;
  std::uint64_t tm_steps = 0;
  std::uint64_t tm_interactions = 0;
  NodeId leader = 0;
  LineLayout layout;
  std::vector<Symbol> input_region;
};

/// Builds a spanning line with the line-transformer protocol from a random
/// initial topology of `family`, lays out U/M on it and runs `tm` on the
/// input multiset. Inputs ride along with the nodes during construction.
inline PipelineResult compute_predicate_end_to_end(const TMDescription& tm, const std::vector<Symbol>& inputs,
                                                   const Family& family, std::uint64_t seed,
                                                   std::uint64_t construction_budget = 0,
                                                   std::uint64_t step_limit = default_tm_step_limit) {
  const std::size_t n = inputs.size();
  if (n < 2) throw ModelError("end-to-end computation needs n >= 2");
  for (Symbol s : inputs)
    if (s >= tm.symbol_count() || !tm.is_input(s)) throw ModelError("input symbol outside the input alphabet");
  const auto entry = line_transformer();
  Rng topo(seed ^ 0x5bd1e995ULL);
  const auto initial = generate_initial(entry.spec, n, family, topo);
  RunOptions opts;
  opts.stop = default_stop(entry, n);
  if (construction_budget) opts.stop.budget = construction_budget;
  opts.connectivity_monitor = false;
  const auto built = run(entry.spec, initial, seed, opts);
  if (built.report.reason != StopReason::halted) throw ModelError("line construction did not halt within its budget");
  if (!built.report.spanning_line) throw ModelError("line construction halted without a spanning line");
  const auto left_end = entry.spec.state_id("hl");
  std::optional<NodeId> leader;
  for (NodeId v = 0; v < n; ++v)
    if (built.final_config.state(v) == left_end) {
      if (leader) throw ModelError("more than one line leader");
      leader = v;
    }
  if (!leader) throw ModelError("halted line has no leader endpoint");

  PipelineResult out;
  out.construction_steps = built.report.steps;
  out.leader = *leader;
  Rng match_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  auto [net, layout] = partition_line(built.final_config, inputs, *leader, match_rng);
  net.record_script(false);
  sort_input_region(net, layout);
  out.layout_interactions = net.interactions();
  out.input_region = input_region(net, layout);
  const auto r = run_tm(net, layout, tm, step_limit);
  out.outcome = r.outcome;
  out.decision = r.outcome == TmOutcome::accept;
  out.tm_steps = r.tm_steps;
  out.tm_interactions = r.interactions;
  out.layout = std::move(layout);
  return out;
}

}  // namespace netcon::tm
