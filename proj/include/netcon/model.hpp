// Copyright 2026 The netcon Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

// Execution semantics of network constructors: node states, binary edge
// states, rule tables with sensor guards, configurations and the single
// interaction step.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace netcon {

using NodeId = std::uint32_t;
using StateId = std::uint16_t;
using Rng = std::mt19937_64;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EdgeState : std::uint8_t { inactive = 0, active = 1 };

inline EdgeState edge_from_bit(bool b) { return b ? EdgeState::active : EdgeState::inactive; }
inline int edge_bit(EdgeState e) { return e == EdgeState::active ? 1 : 0; }

enum class DegreeClass : std::uint8_t { d0 = 0, d1 = 1, d2 = 2, d3plus = 3 };

inline DegreeClass degree_class(std::size_t degree) {
  return degree >= 3 ? DegreeClass::d3plus : static_cast<DegreeClass>(degree);
}

inline const char* to_string(DegreeClass d) {
  static constexpr std::array<const char*, 4> names{"0", "1", "2", "3+"};
  return names[static_cast<int>(d)];
}

// Unbiased draw in [0, bound). Kept local (instead of
// std::uniform_int_distribution) so seeded streams are identical across
// standard library implementations.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = bound * (Rng::max() / bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

inline bool coin(Rng& rng) { return (rng() >> 63) != 0; }

struct InteractionContext {
  DegreeClass deg_u = DegreeClass::d0;
  DegreeClass deg_v = DegreeClass::d0;
  bool common_neighbor = false;

  InteractionContext swapped() const { return {deg_v, deg_u, common_neighbor}; }
  bool operator==(const InteractionContext&) const = default;
};

// ---------------------------------------------------------------------------
// Configuration

/// Node states plus the edge-state matrix over the complete interaction
/// graph. Undirected configurations keep the matrix symmetric; directed ones
/// store the edge u->v in row u.
class Configuration {
 public:
  Configuration() = default;
  Configuration(std::size_t n, bool directed, StateId initial)
      : n_(n),
        words_((n + 63) / 64),
        directed_(directed),
        states_(n, initial),
        adj_(n * words_, 0),
        degree_(n, 0) {}

  std::size_t size() const { return n_; }
  bool directed() const { return directed_; }

  StateId state(NodeId u) const { return states_[u]; }
  void set_state(NodeId u, StateId s) { states_[u] = s; }
  std::span<const StateId> states() const { return states_; }

  EdgeState edge(NodeId u, NodeId v) const {
    return edge_from_bit((adj_[u * words_ + v / 64] >> (v % 64)) & 1U);
  }

  void set_edge(NodeId u, NodeId v, EdgeState e) {
    if (u == v) throw ModelError("self-loop edge requested");
    if (edge(u, v) == e) return;
    flip(u, v);
    if (!directed_) {
      flip(v, u);
      const int delta = e == EdgeState::active ? 1 : -1;
      degree_[u] = static_cast<std::uint32_t>(static_cast<int>(degree_[u]) + delta);
      degree_[v] = static_cast<std::uint32_t>(static_cast<int>(degree_[v]) + delta);
    }
  }

  /// Active degree. For directed configurations: number of distinct nodes
  /// joined by an active edge in either direction.
  std::size_t degree(NodeId u) const {
    if (!directed_) return degree_[u];
    std::size_t d = 0;
    for (NodeId v = 0; v < n_; ++v)
      if (v != u && (edge(u, v) == EdgeState::active || edge(v, u) == EdgeState::active)) ++d;
    return d;
  }

  bool common_neighbor(NodeId u, NodeId v) const {
    if (directed_) {
      for (NodeId w = 0; w < n_; ++w) {
        if (w == u || w == v) continue;
        const bool uw = edge(u, w) == EdgeState::active || edge(w, u) == EdgeState::active;
        const bool vw = edge(v, w) == EdgeState::active || edge(w, v) == EdgeState::active;
        if (uw && vw) return true;
      }
      return false;
    }
    const std::uint64_t* ru = &adj_[u * words_];
    const std::uint64_t* rv = &adj_[v * words_];
    for (std::size_t w = 0; w < words_; ++w)
      if (ru[w] & rv[w]) return true;
    return false;
  }

  std::span<const std::uint64_t> row(NodeId u) const {
    return {adj_.data() + u * words_, words_};
  }

  std::size_t active_edge_count() const {
    std::size_t bits = 0;
    for (auto w : adj_) bits += static_cast<std::size_t>(std::popcount(w));
    return directed_ ? bits : bits / 2;
  }

  /// Compact byte key (states then packed edge rows) for hashing.
  std::string key() const {
    std::string k;
    k.reserve(states_.size() * 2 + adj_.size() * 8);
    for (auto s : states_) {
      k.push_back(static_cast<char>(s & 0xff));
      k.push_back(static_cast<char>(s >> 8));
    }
    for (auto w : adj_)
      for (int b = 0; b < 8; ++b) k.push_back(static_cast<char>((w >> (8 * b)) & 0xff));
    return k;
  }

  bool operator==(const Configuration& o) const {
    return n_ == o.n_ && directed_ == o.directed_ && states_ == o.states_ && adj_ == o.adj_;
  }

 private:
  void flip(NodeId u, NodeId v) { adj_[u * words_ + v / 64] ^= (std::uint64_t{1} << (v % 64)); }

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  bool directed_ = false;
  std::vector<StateId> states_;
  std::vector<std::uint64_t> adj_;
  std::vector<std::uint32_t> degree_;
};

// ---------------------------------------------------------------------------
// Rules and protocol specs

struct DegreeGuard {
  DegreeClass cls = DegreeClass::d0;
  bool negated = false;

  bool matches(DegreeClass d) const { return (d == cls) != negated; }
  bool operator==(const DegreeGuard&) const = default;
};

/// Sensor guard on a rule's left-hand side. Absent fields match anything.
struct Guard {
  std::optional<DegreeGuard> deg_u;
  std::optional<DegreeGuard> deg_v;
  std::optional<bool> common_neighbor;

  bool empty() const { return !deg_u && !deg_v && !common_neighbor; }
  bool matches(const InteractionContext& ctx) const {
    if (deg_u && !deg_u->matches(ctx.deg_u)) return false;
    if (deg_v && !deg_v->matches(ctx.deg_v)) return false;
    if (common_neighbor && *common_neighbor != ctx.common_neighbor) return false;
    return true;
  }
  bool operator==(const Guard&) const = default;
};

/// (a, b, c) [guard] -> (a', b', c'). A missing lhs edge matches either
/// value; a missing rhs edge leaves the edge unchanged.
struct Rule {
  StateId a = 0;
  StateId b = 0;
  std::optional<EdgeState> c;
  Guard guard;
  StateId a2 = 0;
  StateId b2 = 0;
  std::optional<EdgeState> c2;
  bool derived = false;

  bool matches(StateId sa, StateId sb, EdgeState e, const InteractionContext& ctx) const {
    return a == sa && b == sb && (!c || *c == e) && guard.matches(ctx);
  }
  EdgeState result_edge(EdgeState e) const { return c2 ? *c2 : e; }
  bool effective_on(EdgeState e) const { return a != a2 || b != b2 || result_edge(e) != e; }
};

enum class Directedness { undirected, directed };

class ProtocolSpec {
 public:
  ProtocolSpec() = default;

  /// Parses the plain-text rule format:
  ///   %name <name>            %states <s1> <s2> ...
  ///   %initial <q0>           %leader <l0>
  ///   %output * | <s> ...     %halt <s> ...
  ///   %directed
  ///   a b c [guard,...] -> a' b' c'    # comment ("# derived" flags the rule)
  /// c is 0, 1 or * (either / unchanged). Guards: degU=K, degV=K, degU!=K,
  /// degV!=K with K in {0,1,2,3+}, and cnd=0|1.
  static ProtocolSpec parse(std::string_view text);

  std::string to_text() const;

  const std::string& name() const { return name_; }
  std::size_t state_count() const { return names_.size(); }
  const std::string& state_name(StateId s) const { return names_.at(s); }
  std::optional<StateId> find_state(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  StateId state_id(std::string_view name) const {
    auto s = find_state(name);
    if (!s) throw ModelError("unknown state '" + std::string(name) + "' in protocol " + name_);
    return *s;
  }

  StateId initial() const { return initial_; }
  std::optional<StateId> leader() const { return leader_; }
  bool is_output(StateId s) const { return output_[s]; }
  bool is_halting(StateId s) const { return halting_[s]; }
  bool has_halting_states() const { return std::find(halting_.begin(), halting_.end(), true) != halting_.end(); }
  bool directed() const { return directed_; }
  const std::vector<Rule>& rules() const { return rules_; }

  bool uses_degree_detection() const { return uses_degree_; }
  bool uses_common_neighbor() const { return uses_cnd_; }
  /// Degree classes referenced by any guard (the degree sensors required).
  std::vector<DegreeClass> degree_classes_used() const;

  /// Rule indices whose lhs is (a, b, c) as written.
  std::span<const std::uint16_t> candidates(StateId a, StateId b, EdgeState c) const {
    const auto& v = lookup_[(static_cast<std::size_t>(a) * names_.size() + b) * 2 + edge_bit(c)];
    return v;
  }

  std::optional<std::uint16_t> match(StateId a, StateId b, EdgeState c,
                                     const InteractionContext& ctx) const {
    for (auto r : candidates(a, b, c))
      if (rules_[r].guard.matches(ctx)) return r;
    return std::nullopt;
  }

 private:
  void finalize();
  void validate() const;

  std::string name_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, StateId> index_;
  StateId initial_ = 0;
  std::optional<StateId> leader_;
  std::vector<bool> output_;
  std::vector<bool> halting_;
  bool directed_ = false;
  bool uses_degree_ = false;
  bool uses_cnd_ = false;
  std::vector<Rule> rules_;
  std::vector<std::vector<std::uint16_t>> lookup_;
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<EdgeState> parse_edge_token(const std::string& t, int line) {
  if (t == "0") return EdgeState::inactive;
  if (t == "1") return EdgeState::active;
  if (t == "*" || t == ".") return std::nullopt;
  throw ParseError("line " + std::to_string(line) + ": bad edge state '" + t + "'");
}

inline DegreeClass parse_degree_token(std::string_view t, int line) {
  if (t == "0") return DegreeClass::d0;
  if (t == "1") return DegreeClass::d1;
  if (t == "2") return DegreeClass::d2;
  if (t == "3+") return DegreeClass::d3plus;
  throw ParseError("line " + std::to_string(line) + ": bad degree class '" + std::string(t) + "'");
}

inline Guard parse_guard(std::string_view body, int line) {
  Guard g;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    auto comma = body.find(',', pos);
    auto item = trim(body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    pos = comma == std::string_view::npos ? body.size() + 1 : comma + 1;
    if (item.empty()) continue;
    bool neg = false;
    auto op = item.find("!=");
    std::size_t vpos;
    if (op != std::string_view::npos) {
      neg = true;
      vpos = op + 2;
    } else {
      op = item.find('=');
      if (op == std::string_view::npos)
        throw ParseError("line " + std::to_string(line) + ": bad guard '" + std::string(item) + "'");
      vpos = op + 1;
    }
    auto key = trim(item.substr(0, op));
    auto val = trim(item.substr(vpos));
    if (key == "degU" || key == "degV") {
      DegreeGuard dg{parse_degree_token(val, line), neg};
      (key == "degU" ? g.deg_u : g.deg_v) = dg;
    } else if (key == "cnd") {
      if (val != "0" && val != "1")
        throw ParseError("line " + std::to_string(line) + ": cnd must be 0 or 1");
      bool bit = val == "1";
      g.common_neighbor = neg ? !bit : bit;
    } else {
      throw ParseError("line " + std::to_string(line) + ": unknown guard '" + std::string(key) + "'");
    }
  }
  return g;
}

inline std::string guard_text(const Guard& g) {
  std::vector<std::string> parts;
  auto deg = [](const char* k, const DegreeGuard& d) {
    return std::string(k) + (d.negated ? "!=" : "=") + to_string(d.cls);
  };
  if (g.deg_u) parts.push_back(deg("degU", *g.deg_u));
  if (g.deg_v) parts.push_back(deg("degV", *g.deg_v));
  if (g.common_neighbor) parts.push_back(std::string("cnd=") + (*g.common_neighbor ? "1" : "0"));
  std::string out = "[";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "," : "") + parts[i];
  return out + "]";
}

}  // namespace detail

inline ProtocolSpec ProtocolSpec::parse(std::string_view text) {
  ProtocolSpec p;
  struct PendingRule {
    std::vector<std::string> lhs, rhs;
    Guard guard;
    bool derived;
    int line;
  };
  std::vector<PendingRule> pending;
  std::vector<std::string> outputs, halts;
  std::optional<std::string> initial, leader;
  bool all_output = false;

  int lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++lineno;
    std::string_view comment;
    if (auto h = raw.find('#'); h != std::string_view::npos) {
      comment = raw.substr(h + 1);
      raw = raw.substr(0, h);
    }
    auto line = detail::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '%') {
      auto toks = detail::split_ws(line.substr(1));
      if (toks.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty directive");
      const auto& key = toks[0];
      std::vector<std::string> args(toks.begin() + 1, toks.end());
      if (key == "name") {
        if (args.size() != 1) throw ParseError("line " + std::to_string(lineno) + ": %name takes one argument");
        p.name_ = args[0];
      } else if (key == "states") {
        for (auto& s : args) {
          if (p.index_.count(s)) throw ParseError("line " + std::to_string(lineno) + ": duplicate state " + s);
          p.index_[s] = static_cast<StateId>(p.names_.size());
          p.names_.push_back(s);
        }
      } else if (key == "initial" && args.size() == 1) {
        initial = args[0];
      } else if (key == "leader" && args.size() == 1) {
        leader = args[0];
      } else if (key == "output") {
        if (args.size() == 1 && args[0] == "*") all_output = true;
        else outputs.insert(outputs.end(), args.begin(), args.end());
      } else if (key == "halt") {
        halts.insert(halts.end(), args.begin(), args.end());
      } else if (key == "directed" && args.empty()) {
        p.directed_ = true;
      } else {
        throw ParseError("line " + std::to_string(lineno) + ": bad directive %" + key);
      }
      continue;
    }
    auto arrow = line.find("->");
    if (arrow == std::string_view::npos) throw ParseError("line " + std::to_string(lineno) + ": missing '->'");
    auto left = line.substr(0, arrow);
    auto right = line.substr(arrow + 2);
    Guard guard;
    if (auto lb = left.find('['); lb != std::string_view::npos) {
      auto rb = left.find(']', lb);
      if (rb == std::string_view::npos) throw ParseError("line " + std::to_string(lineno) + ": unclosed guard");
      guard = detail::parse_guard(left.substr(lb + 1, rb - lb - 1), lineno);
      if (!detail::trim(left.substr(rb + 1)).empty())
        throw ParseError("line " + std::to_string(lineno) + ": text after guard");
      left = left.substr(0, lb);
    }
    PendingRule r{detail::split_ws(left), detail::split_ws(right), guard,
                  comment.find("derived") != std::string_view::npos, lineno};
    if (r.lhs.size() != 3 || r.rhs.size() != 3)
      throw ParseError("line " + std::to_string(lineno) + ": rule needs 3 lhs and 3 rhs fields");
    pending.push_back(std::move(r));
  }

  if (p.names_.empty()) throw ParseError("no %states declared");
  auto sid = [&](const std::string& s, int line) {
    auto it = p.index_.find(s);
    if (it == p.index_.end()) throw ParseError("line " + std::to_string(line) + ": undeclared state '" + s + "'");
    return it->second;
  };
  p.initial_ = initial ? sid(*initial, 0) : StateId{0};
  if (leader) p.leader_ = sid(*leader, 0);
  p.output_.assign(p.names_.size(), all_output || outputs.empty());
  if (!all_output && !outputs.empty()) {
    p.output_.assign(p.names_.size(), false);
    for (auto& s : outputs) p.output_[sid(s, 0)] = true;
  }
  p.halting_.assign(p.names_.size(), false);
  for (auto& s : halts) p.halting_[sid(s, 0)] = true;

  for (auto& r : pending) {
    Rule rule;
    rule.a = sid(r.lhs[0], r.line);
    rule.b = sid(r.lhs[1], r.line);
    rule.c = detail::parse_edge_token(r.lhs[2], r.line);
    rule.a2 = sid(r.rhs[0], r.line);
    rule.b2 = sid(r.rhs[1], r.line);
    rule.c2 = detail::parse_edge_token(r.rhs[2], r.line);
    rule.guard = r.guard;
    rule.derived = r.derived;
    p.rules_.push_back(rule);
  }
  if (p.name_.empty()) p.name_ = "unnamed";
  p.finalize();
  p.validate();
  return p;
}

inline void ProtocolSpec::finalize() {
  const std::size_t q = names_.size();
  lookup_.assign(q * q * 2, {});
  uses_degree_ = uses_cnd_ = false;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const auto& r = rules_[i];
    for (int c = 0; c < 2; ++c) {
      if (r.c && edge_bit(*r.c) != c) continue;
      lookup_[(static_cast<std::size_t>(r.a) * q + r.b) * 2 + c].push_back(static_cast<std::uint16_t>(i));
    }
    uses_degree_ |= r.guard.deg_u.has_value() || r.guard.deg_v.has_value();
    uses_cnd_ |= r.guard.common_neighbor.has_value();
  }
}

inline std::vector<DegreeClass> ProtocolSpec::degree_classes_used() const {
  std::vector<DegreeClass> out;
  for (const auto& r : rules_)
    for (const auto* g : {&r.guard.deg_u, &r.guard.deg_v})
      if (*g && std::find(out.begin(), out.end(), (*g)->cls) == out.end()) out.push_back((*g)->cls);
  std::sort(out.begin(), out.end());
  return out;
}

// Well-formedness: every (a,b,c,context) selects at most one rule per
// orientation, distinct-state pairs are specified in one orientation only,
// and halting states are closed under every interaction.
inline void ProtocolSpec::validate() const {
  const auto q = static_cast<StateId>(names_.size());
  std::vector<InteractionContext> contexts;
  for (int du = 0; du < 4; ++du)
    for (int dv = 0; dv < 4; ++dv)
      for (int cn = 0; cn < 2; ++cn)
        contexts.push_back({static_cast<DegreeClass>(du), static_cast<DegreeClass>(dv), cn == 1});

  for (StateId a = 0; a < q; ++a) {
    for (StateId b = 0; b < q; ++b) {
      for (int c = 0; c < 2; ++c) {
        const auto e = edge_from_bit(c == 1);
        for (const auto& ctx : contexts) {
          int written = 0;
          for (auto r : candidates(a, b, e)) written += rules_[r].guard.matches(ctx) ? 1 : 0;
          if (written > 1)
            throw ModelError(name_ + ": ambiguous rules for (" + names_[a] + "," + names_[b] + "," +
                             std::to_string(c) + ")");
          if (!directed_ && a != b && written == 1) {
            for (auto r : candidates(b, a, e)) {
              if (rules_[r].guard.matches(ctx.swapped()))
                throw ModelError(name_ + ": rules specified in both orientations for (" + names_[a] + "," +
                                 names_[b] + "," + std::to_string(c) + ")");
            }
          }
        }
      }
    }
  }
  for (const auto& r : rules_) {
    for (auto e : {EdgeState::inactive, EdgeState::active}) {
      if (r.c && *r.c != e) continue;
      if ((halting_[r.a] || halting_[r.b]) && r.effective_on(e))
        throw ModelError(name_ + ": effective rule involves halting state (" + names_[r.a] + "," + names_[r.b] + ")");
    }
  }
}

inline std::string ProtocolSpec::to_text() const {
  std::ostringstream out;
  out << "%name " << name_ << "\n%states";
  for (const auto& s : names_) out << ' ' << s;
  out << "\n%initial " << names_[initial_] << "\n";
  if (leader_) out << "%leader " << names_[*leader_] << "\n";
  if (std::all_of(output_.begin(), output_.end(), [](bool b) { return b; })) {
    out << "%output *\n";
  } else {
    out << "%output";
    for (std::size_t s = 0; s < names_.size(); ++s)
      if (output_[s]) out << ' ' << names_[s];
    out << "\n";
  }
  if (has_halting_states()) {
    out << "%halt";
    for (std::size_t s = 0; s < names_.size(); ++s)
      if (halting_[s]) out << ' ' << names_[s];
    out << "\n";
  }
  if (directed_) out << "%directed\n";
  auto edge_tok = [](const std::optional<EdgeState>& e) { return e ? std::to_string(edge_bit(*e)) : std::string("*"); };
  for (const auto& r : rules_) {
    out << names_[r.a] << ' ' << names_[r.b] << ' ' << edge_tok(r.c);
    if (!r.guard.empty()) out << ' ' << detail::guard_text(r.guard);
    out << " -> " << names_[r.a2] << ' ' << names_[r.b2] << ' ' << edge_tok(r.c2);
    if (r.derived) out << "  # derived";
    out << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Interaction semantics

inline InteractionContext observe_context(const Configuration& config, NodeId u, NodeId v) {
  if (u >= config.size() || v >= config.size()) throw ModelError("node id out of range");
  if (u == v) throw ModelError("interaction requires two distinct nodes");
  return {degree_class(config.degree(u)), degree_class(config.degree(v)), config.common_neighbor(u, v)};
}

/// One possible result of an interaction. `swapped` records that the rule
/// matched with v in the role of the lhs's first state.
struct Outcome {
  std::uint16_t rule = 0;
  bool swapped = false;
  StateId new_u = 0;
  StateId new_v = 0;
  EdgeState new_edge = EdgeState::inactive;
};

/// All distinct results the model allows for the ordered encounter (u, v):
/// empty when no rule matches, two entries when equal states may receive
/// different rhs states (equiprobable role assignment).
struct Resolution {
  InteractionContext context;
  std::array<Outcome, 2> outcomes{};
  std::uint8_t count = 0;
};

inline Resolution resolve_interaction(const Configuration& config, NodeId u, NodeId v, const ProtocolSpec& proto) {
  Resolution res;
  res.context = observe_context(config, u, v);
  const StateId su = config.state(u), sv = config.state(v);
  const EdgeState uv = config.edge(u, v);
  if (auto r = proto.match(su, sv, uv, res.context)) {
    const auto& rule = proto.rules()[*r];
    res.outcomes[res.count++] = {*r, false, rule.a2, rule.b2, rule.result_edge(uv)};
  }
  if (proto.directed()) return res;
  if (auto r = proto.match(sv, su, uv, res.context.swapped())) {
    const auto& rule = proto.rules()[*r];
    Outcome o{*r, true, rule.b2, rule.a2, rule.result_edge(uv)};
    if (res.count == 0 || o.new_u != res.outcomes[0].new_u || o.new_v != res.outcomes[0].new_v ||
        o.new_edge != res.outcomes[0].new_edge)
      res.outcomes[res.count++] = o;
  }
  return res;
}

struct InteractionEvent {
  std::uint64_t step = 0;
  NodeId u = 0;
  NodeId v = 0;
  InteractionContext context;
  /// Set iff an effective rule was applied.
  std::optional<std::uint16_t> rule_applied;
  std::optional<std::pair<EdgeState, EdgeState>> edge_changed;
  /// Role assignment: true when the rule was applied with v as its first node.
  bool swapped = false;
  /// True when two outcomes were possible and the choice came from the rng.
  bool role_drawn = false;
};

namespace detail {

inline InteractionEvent commit(Configuration& config, NodeId u, NodeId v, const ProtocolSpec& proto,
                               const Resolution& res, int pick) {
  InteractionEvent ev;
  ev.u = u;
  ev.v = v;
  ev.context = res.context;
  if (res.count == 0) return ev;
  const Outcome& o = res.outcomes[pick];
  ev.swapped = o.swapped;
  ev.role_drawn = res.count == 2;
  const EdgeState old = config.edge(u, v);
  const bool effective = o.new_u != config.state(u) || o.new_v != config.state(v) || o.new_edge != old;
  if (!effective) return ev;
  ev.rule_applied = o.rule;
  config.set_state(u, o.new_u);
  config.set_state(v, o.new_v);
  if (o.new_edge != old) {
    config.set_edge(u, v, o.new_edge);
    ev.edge_changed = std::make_pair(old, o.new_edge);
  }
  (void)proto;
  return ev;
}

}  // namespace detail

/// Applies the encounter (u, v) in place. The rng is consulted only when
/// equal states can be assigned different rhs states.
inline InteractionEvent step_interaction(Configuration& config, NodeId u, NodeId v, const ProtocolSpec& proto,
                                         Rng& rng) {
  const auto res = resolve_interaction(config, u, v, proto);
  int pick = 0;
  if (res.count == 2) pick = coin(rng) ? 1 : 0;
  return detail::commit(config, u, v, proto, res, pick);
}

/// Replays an encounter with a recorded role assignment instead of the rng.
inline InteractionEvent replay_interaction(Configuration& config, NodeId u, NodeId v, const ProtocolSpec& proto,
                                           bool swapped) {
  const auto res = resolve_interaction(config, u, v, proto);
  int pick = 0;
  if (res.count == 2) pick = res.outcomes[1].swapped == swapped ? 1 : 0;
  return detail::commit(config, u, v, proto, res, pick);
}

inline std::pair<Configuration, InteractionEvent> apply_interaction(const Configuration& config, NodeId u, NodeId v,
                                                                    const ProtocolSpec& proto, Rng& rng) {
  Configuration next = config;
  auto ev = step_interaction(next, u, v, proto, rng);
  return {std::move(next), ev};
}

inline bool is_halted(const Configuration& config, const ProtocolSpec& proto) {
  if (!proto.has_halting_states()) return false;
  for (auto s : config.states())
    if (!proto.is_halting(s)) return false;
  return true;
}

/// True iff no encounter (in any orientation) has an effective outcome.
inline bool is_fixed_point(const Configuration& config, const ProtocolSpec& proto) {
  const auto n = static_cast<NodeId>(config.size());
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = proto.directed() ? 0 : u + 1; v < n; ++v) {
      if (u == v) continue;
      const auto res = resolve_interaction(config, u, v, proto);
      for (int i = 0; i < res.count; ++i) {
        const auto& o = res.outcomes[i];
        if (o.new_u != config.state(u) || o.new_v != config.state(v) || o.new_edge != config.edge(u, v))
          return false;
      }
    }
  }
  return true;
}

/// Initial configuration: every node in q0, the leader (if any) at
/// `leader_node`, and the given active edges.
inline Configuration make_configuration(const ProtocolSpec& proto, std::size_t n,
                                        std::span<const std::pair<NodeId, NodeId>> edges, NodeId leader_node = 0) {
  Configuration c(n, proto.directed(), proto.initial());
  if (proto.leader() && n > 0) c.set_state(leader_node, *proto.leader());
  for (auto [u, v] : edges) c.set_edge(u, v, EdgeState::active);
  return c;
}

}  // namespace netcon
