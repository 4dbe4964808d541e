// Copyright 2026 The netcon Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include "netcon/topology.hpp"

namespace netcon {

/// One scheduled encounter. `swapped` carries a recorded role assignment
/// for replays; absent means draw it when needed.
struct ScheduledPair {
  NodeId u = 0;
  NodeId v = 0;
  std::optional<bool> swapped;

  bool operator==(const ScheduledPair&) const = default;
};

struct Schedule {
  std::vector<ScheduledPair> pairs;
  /// "random(seed=...)", "scripted" or "mimic(...)".
  std::string provenance = "scripted";

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

/// Uniform draw over the n(n-1) ordered pairs. For undirected protocols this
/// is the uniform unordered pair with a random orientation.
inline std::pair<NodeId, NodeId> uniform_next(std::size_t n, Rng& rng) {
  if (n < 2) throw ModelError("scheduler needs n >= 2");
  const auto r = uniform_below(rng, static_cast<std::uint64_t>(n) * (n - 1));
  auto u = static_cast<NodeId>(r / (n - 1));
  auto v = static_cast<NodeId>(r % (n - 1));
  if (v >= u) ++v;
  return {u, v};
}

class UniformScheduler {
 public:
  UniformScheduler(std::size_t n, std::uint64_t seed) : n_(n), seed_(seed), rng_(seed) {}

  std::pair<NodeId, NodeId> next() { return uniform_next(n_, rng_); }
  /// The rng also drives role assignment so that a run is a function of the
  /// seed alone.
  Rng& rng() { return rng_; }
  std::string provenance() const { return "random(seed=" + std::to_string(seed_) + ")"; }

 private:
  std::size_t n_;
  std::uint64_t seed_;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// Mimic schedules

/// Expands one base-graph encounter into its copies on the family graph:
/// intra-copy edges map to the k counterparts in copy order, the removed
/// edge maps to the k chain edges in chain order. Orientation is preserved.
inline std::vector<ScheduledPair> mimic_block(const ScheduledPair& step, const FamilyGraph& fam) {
  std::vector<ScheduledPair> out;
  out.reserve(fam.k);
  const auto [ui, uj] = fam.removed_edge;
  for (std::size_t h = 0; h < fam.k; ++h) {
    const std::size_t next = (h + 1) % fam.k;
    if (step.u == ui && step.v == uj) out.push_back({fam.node(h, ui), fam.node(next, uj), step.swapped});
    else if (step.u == uj && step.v == ui) out.push_back({fam.node(next, uj), fam.node(h, ui), step.swapped});
    else out.push_back({fam.node(h, step.u), fam.node(h, step.v), step.swapped});
  }
  return out;
}

inline Schedule mimic_to_family(const Schedule& trace, const FamilyGraph& fam, const std::string& source_id = "trace") {
  Schedule out;
  out.provenance = "mimic(" + source_id + ",k=" + std::to_string(fam.k) + ")";
  for (const auto& step : trace.pairs) {
    if (step.u >= fam.base.size() || step.v >= fam.base.size() || step.u == step.v)
      throw ModelError("trace pair outside the base graph");
    for (auto& p : mimic_block(step, fam)) out.pairs.push_back(p);
  }
  return out;
}

/// Triangle nodes u1,u2,u3 are 0,1,2; hexagon nodes v1,v2,v3,v1',v2',v3' are
/// 0..5 in cycle order. This is the two-copy family of the triangle with the
/// edge (u3,u1) removed.
inline const FamilyGraph& triangle_hexagon_family() {
  static const FamilyGraph fam = build_family_graph(ActiveGraph(3, {{0, 1}, {1, 2}, {0, 2}}), {2, 0}, 2);
  return fam;
}

inline Schedule mimic_triangle_to_hexagon(const Schedule& trace_on_triangle) {
  return mimic_to_family(trace_on_triangle, triangle_hexagon_family(), "triangle");
}

// ---------------------------------------------------------------------------
// Serialization: one event per line, "step u v" with optional annotations
// "rule=K" (applied rule index) and "o=0|1" (recorded role assignment).

struct TraceLine {
  std::uint64_t step = 0;
  ScheduledPair pair;
  std::optional<std::uint16_t> rule;
};

inline void write_schedule(std::ostream& out, const Schedule& s) {
  out << "# provenance=" << s.provenance << '\n';
  std::uint64_t step = 0;
  for (const auto& p : s.pairs) {
    out << step++ << ' ' << p.u << ' ' << p.v;
    if (p.swapped) out << " o=" << (*p.swapped ? 1 : 0);
    out << '\n';
  }
}

inline Schedule read_schedule(std::istream& in) {
  Schedule s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.rfind("# provenance=", 0) == 0) {
      s.provenance = std::string(detail::trim(line.substr(13)));
      continue;
    }
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() < 3) throw ParseError("schedule line " + std::to_string(lineno) + ": expected 'step u v'");
    ScheduledPair p;
    try {
      p.u = static_cast<NodeId>(std::stoul(toks[1]));
      p.v = static_cast<NodeId>(std::stoul(toks[2]));
    } catch (const std::logic_error&) {
      throw ParseError("schedule line " + std::to_string(lineno) + ": bad node id");
    }
    if (p.u == p.v) throw ParseError("schedule line " + std::to_string(lineno) + ": self-pair");
    for (std::size_t t = 3; t < toks.size(); ++t) {
      if (toks[t] == "o=0") p.swapped = false;
      else if (toks[t] == "o=1") p.swapped = true;
      else if (toks[t].rfind("rule=", 0) == 0) continue;
      else throw ParseError("schedule line " + std::to_string(lineno) + ": unknown annotation " + toks[t]);
    }
    s.pairs.push_back(p);
  }
  return s;
}

}  // namespace netcon
