// Copyright 2026 The netcon Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <limits>

#include "netcon/protocols.hpp"
#include "netcon/schedulers.hpp"

namespace netcon {

inline constexpr std::uint64_t infinite_steps = std::numeric_limits<std::uint64_t>::max();

// ---------------------------------------------------------------------------
// Monitors

struct MonitorViolation {
  std::uint64_t step = 0;
  NodeId u = 0;
  NodeId v = 0;
  std::string what;
};

namespace detail {

/// Whether u and v are joined by an active path (undirected view).
inline bool reachable(const Configuration& c, NodeId from, NodeId to) {
  const std::size_t n = c.size();
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const NodeId x = stack.back();
    stack.pop_back();
    if (x == to) return true;
    const auto row = c.row(x);
    for (std::size_t w = 0; w < row.size(); ++w) {
      std::uint64_t bits = row[w];
      while (bits) {
        const auto y = static_cast<NodeId>(w * 64 + std::countr_zero(bits));
        bits &= bits - 1;
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
      }
    }
    if (c.directed()) {
      for (NodeId y = 0; y < n; ++y)
        if (!seen[y] && c.edge(y, x) == EdgeState::active) {
          seen[y] = 1;
          stack.push_back(y);
        }
    }
  }
  return false;
}

}  // namespace detail

/// Fires iff the event deactivated an edge whose removal split a component.
/// `after` is the configuration right after the event; the edge's endpoints
/// were joined before it, so the split happened iff they are no longer joined.
inline std::optional<MonitorViolation> connectivity_monitor(const InteractionEvent& event, const Configuration& before,
                                                            const Configuration& after) {
  (void)before;
  if (!event.edge_changed || event.edge_changed->second != EdgeState::inactive) return std::nullopt;
  if (after.directed() && after.edge(event.v, event.u) == EdgeState::active) return std::nullopt;
  if (detail::reachable(after, event.u, event.v)) return std::nullopt;
  return MonitorViolation{event.step, event.u, event.v, "bridge deactivated"};
}

// ---------------------------------------------------------------------------
// Run engine

enum class StopReason { halted, fixed_point, budget };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::halted: return "halted";
    case StopReason::fixed_point: return "fixed_point";
    case StopReason::budget: return "budget";
  }
  return "?";
}

struct StopCondition {
  bool on_halt = true;
  bool on_fixed_point = true;
  std::uint64_t budget = 0;
};

struct RunOptions {
  StopCondition stop;
  bool connectivity_monitor = true;
  bool keep_trace = false;
  /// Called after every step with the post-step configuration.
  std::function<void(const InteractionEvent&, const Configuration&)> observer;
};

struct RunReport {
  std::string protocol;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string family;
  /// Steps to the stop condition; infinite_steps if the budget ran out.
  std::uint64_t steps = infinite_steps;
  std::uint64_t steps_executed = 0;
  std::uint64_t effective_steps = 0;
  StopReason reason = StopReason::budget;
  std::vector<MonitorViolation> monitor_violations;
  std::string topology_class;
  bool spanning_line = false;
  bool spanning_star = false;
  bool connected = false;

  bool budget_exhausted() const { return steps == infinite_steps; }
};

/// Retained execution: the initial configuration plus every event.
struct Trace {
  Configuration initial;
  std::vector<InteractionEvent> events;
  std::string provenance;

  /// The replayable schedule; role assignments are recorded on every step
  /// where they were drawn.
  Schedule schedule() const {
    Schedule s;
    s.provenance = provenance;
    s.pairs.reserve(events.size());
    for (const auto& e : events) {
      ScheduledPair p{e.u, e.v, std::nullopt};
      if (e.role_drawn) p.swapped = e.swapped;
      s.pairs.push_back(p);
    }
    return s;
  }
};

struct RunResult {
  RunReport report;
  Trace trace;
  Configuration final_config;
};

namespace detail {

inline void classify(RunReport& r, const Configuration& c) {
  if (c.directed()) {
    const auto g = DirectedGraph::from(c).undirected();
    r.connected = is_connected(g);
    r.topology_class = r.connected ? "weakly_connected" : "disconnected";
    return;
  }
  const auto g = ActiveGraph::from(c);
  r.connected = is_connected(g);
  r.spanning_line = is_spanning_line(g);
  r.spanning_star = is_spanning_star(g);
  r.topology_class = topology_class(g);
}

}  // namespace detail

/// Runs `proto` from `initial` under the uniform random scheduler seeded by
/// `seed` (pair choice and role assignment share the stream).
inline RunResult run(const ProtocolSpec& proto, const Configuration& initial, std::uint64_t seed,
                     const RunOptions& opts) {
  RunResult out;
  auto& rep = out.report;
  rep.protocol = proto.name();
  rep.n = initial.size();
  rep.seed = seed;
  UniformScheduler sched(initial.size(), seed);
  Configuration config = initial;
  if (opts.keep_trace) {
    out.trace.initial = initial;
    out.trace.provenance = sched.provenance();
  }

  std::size_t halted_nodes = 0;
  for (auto s : config.states()) halted_nodes += proto.is_halting(s) ? 1 : 0;
  const bool can_halt = proto.has_halting_states();
  auto stop_now = [&](bool after_effective) -> std::optional<StopReason> {
    if (opts.stop.on_halt && can_halt && halted_nodes == config.size()) return StopReason::halted;
    if (opts.stop.on_fixed_point && after_effective && is_fixed_point(config, proto)) return StopReason::fixed_point;
    return std::nullopt;
  };

  std::optional<StopReason> reason = stop_now(true);
  std::uint64_t step = 0;
  while (!reason && step < opts.stop.budget) {
    const auto [u, v] = sched.next();
    const StateId old_u = config.state(u), old_v = config.state(v);
    auto ev = step_interaction(config, u, v, proto, sched.rng());
    ev.step = step++;
    if (ev.rule_applied) {
      ++rep.effective_steps;
      if (can_halt) {
        halted_nodes -= (proto.is_halting(old_u) ? 1 : 0) + (proto.is_halting(old_v) ? 1 : 0);
        halted_nodes += (proto.is_halting(config.state(u)) ? 1 : 0) + (proto.is_halting(config.state(v)) ? 1 : 0);
      }
      if (opts.connectivity_monitor && ev.edge_changed) {
        if (auto viol = connectivity_monitor(ev, config, config)) rep.monitor_violations.push_back(*viol);
      }
    }
    if (opts.observer) opts.observer(ev, config);
    if (opts.keep_trace) out.trace.events.push_back(ev);
    if (ev.rule_applied) reason = stop_now(true);
  }
  rep.steps_executed = step;
  if (reason) {
    rep.reason = *reason;
    rep.steps = step;
  } else {
    rep.reason = StopReason::budget;
    rep.steps = infinite_steps;
  }
  detail::classify(rep, config);
  out.final_config = std::move(config);
  return out;
}

/// Re-executes a schedule with its recorded role assignments. Throws if a
/// step needs a role draw the schedule did not record.
inline Configuration replay(const ProtocolSpec& proto, const Configuration& initial, const Schedule& schedule) {
  Configuration config = initial;
  for (const auto& p : schedule.pairs) {
    const auto res = resolve_interaction(config, p.u, p.v, proto);
    if (res.count == 2 && !p.swapped) throw ModelError("schedule lacks a role assignment the replay needs");
    replay_interaction(config, p.u, p.v, proto, p.swapped.value_or(false));
  }
  return config;
}

/// Saved trace: a header with the protocol, the initial node states and
/// active edges, followed by the schedule lines.
inline void write_trace(std::ostream& out, const ProtocolSpec& proto, const Configuration& initial,
                        const Schedule& schedule) {
  const std::size_t n = initial.size();
  out << "# protocol=" << proto.name() << '\n' << "# n=" << n << '\n' << "# states=";
  for (NodeId u = 0; u < n; ++u) out << (u ? " " : "") << proto.state_name(initial.state(u));
  out << '\n' << "# edges=";
  bool first = true;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = initial.directed() ? 0 : u + 1; v < n; ++v)
      if (u != v && initial.edge(u, v) == EdgeState::active) {
        out << (first ? "" : " ") << u << '-' << v;
        first = false;
      }
  out << '\n';
  write_schedule(out, schedule);
}

inline std::pair<Configuration, Schedule> read_trace(std::istream& in, const ProtocolSpec& proto) {
  std::stringstream body;
  body << in.rdbuf();
  const std::string text = body.str();
  std::map<std::string, std::string> header;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("# ", 0) != 0) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    header[line.substr(2, eq - 2)] = line.substr(eq + 1);
  }
  for (const char* k : {"protocol", "n", "states", "edges"})
    if (!header.count(k)) throw ParseError(std::string("trace: missing header '") + k + "'");
  if (header["protocol"] != proto.name())
    throw ParseError("trace was recorded for protocol '" + header["protocol"] + "'");
  std::size_t n = 0;
  try {
    n = std::stoul(header["n"]);
  } catch (const std::logic_error&) {
    throw ParseError("trace: bad node count");
  }
  const auto names = detail::split_ws(header["states"]);
  if (names.size() != n) throw ParseError("trace: state list does not match n");
  Configuration config(n, proto.directed(), proto.initial());
  for (NodeId u = 0; u < n; ++u) {
    const auto s = proto.find_state(names[u]);
    if (!s) throw ParseError("trace: unknown state '" + names[u] + "'");
    config.set_state(u, *s);
  }
  for (const auto& tok : detail::split_ws(header["edges"])) {
    const auto dash = tok.find('-');
    if (dash == std::string::npos) throw ParseError("trace: bad edge '" + tok + "'");
    NodeId u = 0, v = 0;
    try {
      u = static_cast<NodeId>(std::stoul(tok.substr(0, dash)));
      v = static_cast<NodeId>(std::stoul(tok.substr(dash + 1)));
    } catch (const std::logic_error&) {
      throw ParseError("trace: bad edge '" + tok + "'");
    }
    if (u >= n || v >= n || u == v) throw ParseError("trace: edge out of range '" + tok + "'");
    config.set_edge(u, v, EdgeState::active);
  }
  std::istringstream sched(text);
  auto schedule = read_schedule(sched);
  for (const auto& p : schedule.pairs)
    if (p.u >= n || p.v >= n) throw ParseError("trace: scheduled node out of range");
  return {std::move(config), std::move(schedule)};
}

// ---------------------------------------------------------------------------
// Baselines

enum class BaselineKind { edge_cover, meet_everybody };

inline std::uint64_t baseline_process(BaselineKind kind, std::size_t n, Rng& rng) {
  if (n < 2) throw ModelError("baseline needs n >= 2");
  std::vector<char> seen(kind == BaselineKind::edge_cover ? n * n : n, 0);
  std::size_t remaining = kind == BaselineKind::edge_cover ? n * (n - 1) / 2 : n - 1;
  std::uint64_t steps = 0;
  while (remaining > 0) {
    auto [u, v] = uniform_next(n, rng);
    ++steps;
    if (kind == BaselineKind::edge_cover) {
      auto& s = seen[std::min(u, v) * n + std::max(u, v)];
      if (!s) {
        s = 1;
        --remaining;
      }
    } else if (u == 0 || v == 0) {
      auto& s = seen[u == 0 ? v : u];
      if (!s) {
        s = 1;
        --remaining;
      }
    }
  }
  return steps;
}

inline double harmonic(std::size_t m) {
  double h = 0;
  for (std::size_t i = 1; i <= m; ++i) h += 1.0 / static_cast<double>(i);
  return h;
}

/// Closed-form expectations: m H_m with m = n(n-1)/2, and m H_{n-1}.
inline double baseline_expectation(BaselineKind kind, std::size_t n) {
  const double m = static_cast<double>(n * (n - 1) / 2);
  return kind == BaselineKind::edge_cover ? m * harmonic(n * (n - 1) / 2) : m * harmonic(n - 1);
}

// ---------------------------------------------------------------------------
// Monte Carlo runtime estimation

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0;
  double stddev = 0;
  double ci_low = 0;
  double ci_high = 0;
};

inline SampleSummary summarize(const std::vector<double>& xs) {
  SampleSummary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double sq = 0;
  for (double x : xs) sq += (x - s.mean) * (x - s.mean);
  s.stddev = xs.size() > 1 ? std::sqrt(sq / static_cast<double>(xs.size() - 1)) : 0.0;
  const double half = 1.96 * s.stddev / std::sqrt(static_cast<double>(xs.size()));
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

/// Seed for trial `t` at size `n` derived from a base seed (splitmix64).
inline std::uint64_t trial_seed(std::uint64_t base, std::size_t n, std::size_t t) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(n) * 1000003ULL + t + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct ScalingRow {
  std::size_t n = 0;
  SampleSummary steps;
  double normalized = 0;  // mean / f(n)
  std::size_t budget_exhausted = 0;
  std::size_t violations = 0;
  std::size_t target_failures = 0;
};

struct ScalingReport {
  std::string protocol;
  std::string family;
  std::string normalizer;
  std::size_t trials = 0;
  std::uint64_t base_seed = 0;
  std::vector<ScalingRow> rows;

  bool tainted() const {
    for (const auto& r : rows)
      if (r.budget_exhausted) return true;
    return false;
  }
  double ratio() const {
    if (rows.empty()) return 0;
    double lo = rows[0].normalized, hi = rows[0].normalized;
    for (const auto& r : rows) {
      lo = std::min(lo, r.normalized);
      hi = std::max(hi, r.normalized);
    }
    return lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
  }
};

inline bool meets_target(const ProtocolCatalogEntry& entry, const RunReport& r) {
  switch (entry.target) {
    case Target::spanning_line: return r.reason == StopReason::halted && r.spanning_line;
    case Target::spanning_star: return r.reason == StopReason::fixed_point && r.spanning_star;
    default: return true;
  }
}

inline StopCondition default_stop(const ProtocolCatalogEntry& entry, std::size_t n) {
  return {entry.terminating, true, entry.default_budget(n)};
}

inline ScalingReport estimate_runtime(const ProtocolCatalogEntry& entry, const Family& family,
                                      const std::vector<std::size_t>& sizes, std::size_t trials,
                                      std::uint64_t base_seed,
                                      std::function<double(std::size_t)> normalizer = nullptr) {
  if (trials < 30) throw ModelError("estimate_runtime needs at least 30 trials per size");
  ScalingReport rep;
  rep.protocol = entry.name();
  rep.family = family.name();
  rep.normalizer = normalizer ? "custom" : to_string(entry.claimed_time);
  rep.trials = trials;
  rep.base_seed = base_seed;
  for (std::size_t n : sizes) {
    ScalingRow row;
    row.n = n;
    std::vector<double> samples;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto seed = trial_seed(base_seed, n, t);
      Rng topo(seed ^ 0x5bd1e995ULL);
      const auto initial = generate_initial(entry.spec, n, family, topo);
      RunOptions opts;
      opts.stop = default_stop(entry, n);
      const auto res = run(entry.spec, initial, seed, opts);
      if (res.report.budget_exhausted()) {
        ++row.budget_exhausted;
        continue;
      }
      row.violations += res.report.monitor_violations.size();
      if (!meets_target(entry, res.report)) ++row.target_failures;
      samples.push_back(static_cast<double>(res.report.steps));
    }
    row.steps = summarize(samples);
    const double f = normalizer ? normalizer(n) : claimed_time_value(entry.claimed_time, n);
    row.normalized = row.steps.mean / f;
    rep.rows.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Impossibility replay

enum class ReplayVerdict { disconnected, connected, no_deactivation, mimic_inapplicable };

inline const char* to_string(ReplayVerdict v) {
  switch (v) {
    case ReplayVerdict::disconnected: return "disconnected";
    case ReplayVerdict::connected: return "connected";
    case ReplayVerdict::no_deactivation: return "no_deactivation";
    case ReplayVerdict::mimic_inapplicable: return "mimic_inapplicable";
  }
  return "?";
}

struct ImpossibilityReport {
  std::string protocol;
  std::size_t k = 0;
  /// Index of the base step that first deactivated an edge.
  std::optional<std::uint64_t> deactivation_step;
  std::optional<Edge> deactivated_edge;
  Schedule source;
  Schedule mimic;
  /// Blocks checked for cross-copy equality (all blocks before the
  /// deactivation step) and whether every check held.
  std::size_t blocks_checked = 0;
  bool copies_equal = true;
  std::optional<std::size_t> first_mismatch_block;
  bool guard_divergence = false;
  std::size_t base_components = 1;
  std::size_t family_components = 1;
  ReplayVerdict verdict = ReplayVerdict::no_deactivation;
};

namespace detail {

/// Whether two encounters select the same rules; sensor readings that no
/// rule distinguishes do not matter.
inline bool same_rules(const Resolution& a, const Resolution& b) {
  if (a.count != b.count) return false;
  for (std::size_t i = 0; i < a.count; ++i)
    if (a.outcomes[i].rule != b.outcomes[i].rule || a.outcomes[i].swapped != b.outcomes[i].swapped) return false;
  return true;
}

inline bool copies_match(const Configuration& base, const Configuration& lifted, const FamilyGraph& fam) {
  const auto n = static_cast<NodeId>(fam.base.size());
  const auto [ui, uj] = fam.removed_edge;
  for (std::size_t h = 0; h < fam.k; ++h) {
    for (NodeId m = 0; m < n; ++m)
      if (lifted.state(fam.node(h, m)) != base.state(m)) return false;
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = a + 1; b < n; ++b) {
        const bool removed = (a == ui && b == uj) || (a == uj && b == ui);
        const EdgeState want = base.edge(a, b);
        const EdgeState got = removed ? lifted.edge(fam.node(h, ui), fam.node((h + 1) % fam.k, uj))
                                      : lifted.edge(fam.node(h, a), fam.node(h, b));
        if (got != want) return false;
      }
  }
  return true;
}

}  // namespace detail

/// Replays a base-graph schedule on `fam.base` and its mimic on the family
/// graph block by block. Steps after the first deactivation are still
/// replayed but no longer checked for cross-copy equality.
inline ImpossibilityReport replay_impossibility(const ProtocolSpec& proto, const FamilyGraph& fam,
                                                const Schedule& source) {
  ImpossibilityReport rep;
  rep.protocol = proto.name();
  rep.k = fam.k;
  Configuration ref = make_configuration(proto, fam.base.size(), fam.base.edges());
  Configuration lifted = generate_initial(proto, fam);
  for (std::size_t b = 0; b < source.pairs.size(); ++b) {
    ScheduledPair step = source.pairs[b];
    const auto res = resolve_interaction(ref, step.u, step.v, proto);
    if (!step.swapped) {
      if (res.count == 2) throw ModelError("source schedule lacks a role assignment");
      step.swapped = false;
    }
    rep.source.pairs.push_back(step);
    for (const auto& p : mimic_block(step, fam)) {
      if (!detail::same_rules(resolve_interaction(lifted, p.u, p.v, proto), res)) rep.guard_divergence = true;
      replay_interaction(lifted, p.u, p.v, proto, *p.swapped);
    }
    const auto ev = replay_interaction(ref, step.u, step.v, proto, *step.swapped);
    if (ev.edge_changed && ev.edge_changed->second == EdgeState::inactive && !rep.deactivation_step) {
      rep.deactivation_step = b;
      rep.deactivated_edge = Edge{std::min(step.u, step.v), std::max(step.u, step.v)};
    }
    if (!rep.deactivation_step) {
      ++rep.blocks_checked;
      if (!detail::copies_match(ref, lifted, fam) && rep.copies_equal) {
        rep.copies_equal = false;
        rep.first_mismatch_block = b;
      }
    }
  }
  rep.source.provenance = source.provenance;
  rep.mimic = mimic_to_family(rep.source, fam, source.provenance);
  rep.base_components = count_components(ActiveGraph::from(ref));
  rep.family_components = count_components(ActiveGraph::from(lifted));
  if (rep.guard_divergence) rep.verdict = ReplayVerdict::mimic_inapplicable;
  else if (!rep.deactivation_step) rep.verdict = ReplayVerdict::no_deactivation;
  else rep.verdict = rep.family_components >= 2 ? ReplayVerdict::disconnected : ReplayVerdict::connected;
  return rep;
}

/// Seeded random source trace on the base graph, cut right after its first
/// edge deactivation (or after `budget` steps).
inline Schedule random_source_trace(const ProtocolSpec& proto, const ActiveGraph& base, std::uint64_t seed,
                                    std::uint64_t budget = 10000) {
  Configuration c = make_configuration(proto, base.size(), base.edges());
  UniformScheduler sched(base.size(), seed);
  Schedule s;
  s.provenance = sched.provenance();
  for (std::uint64_t step = 0; step < budget; ++step) {
    auto [u, v] = sched.next();
    const auto ev = step_interaction(c, u, v, proto, sched.rng());
    s.pairs.push_back({u, v, ev.role_drawn ? std::optional<bool>(ev.swapped) : std::nullopt});
    if (ev.edge_changed && ev.edge_changed->second == EdgeState::inactive) break;
  }
  return s;
}

inline ImpossibilityReport replay_impossibility(const ProtocolSpec& proto, const FamilyGraph& fam, std::uint64_t seed,
                                                std::uint64_t budget = 10000) {
  return replay_impossibility(proto, fam, random_source_trace(proto, fam.base, seed, budget));
}

// ---------------------------------------------------------------------------
// Exhaustive small-n verification

enum class Property {
  connectivity_always,
  halting_implies_spanning_line,
  fixedpoint_implies_spanning_star,
  halting_reachable,
  fixedpoint_reachable,
};

inline const char* to_string(Property p) {
  switch (p) {
    case Property::connectivity_always: return "connectivity-always";
    case Property::halting_implies_spanning_line: return "halting-implies-spanning-line";
    case Property::fixedpoint_implies_spanning_star: return "fixedpoint-implies-spanning-star";
    case Property::halting_reachable: return "halting-reachable";
    case Property::fixedpoint_reachable: return "fixedpoint-reachable";
  }
  return "?";
}

inline Property parse_property(std::string_view s) {
  for (auto p : {Property::connectivity_always, Property::halting_implies_spanning_line,
                 Property::fixedpoint_implies_spanning_star, Property::halting_reachable,
                 Property::fixedpoint_reachable})
    if (s == to_string(p)) return p;
  if (s == "halting-implies-line") return Property::halting_implies_spanning_line;
  if (s == "fixedpoint-implies-star") return Property::fixedpoint_implies_spanning_star;
  throw ModelError("unknown property '" + std::string(s) + "'");
}

struct PropertyResult {
  Property property{};
  bool holds = true;
  std::optional<std::string> counterexample;
};

struct VerificationReport {
  std::string protocol;
  std::size_t n = 0;
  double state_space_estimate = 0;
  bool refused = false;
  std::string message;
  std::size_t initial_configurations = 0;
  std::size_t reachable_configurations = 0;
  std::size_t terminal_configurations = 0;
  std::vector<PropertyResult> results;

  bool all_hold() const {
    if (refused) return false;
    for (const auto& r : results)
      if (!r.holds) return false;
    return true;
  }
};

/// Upper bound |Q|^n * 2^(pairs) on the configuration space.
inline double state_space_estimate(const ProtocolSpec& proto, std::size_t n) {
  const double pairs = proto.directed() ? static_cast<double>(n * (n - 1)) : static_cast<double>(n * (n - 1) / 2);
  return std::pow(static_cast<double>(proto.state_count()), static_cast<double>(n)) * std::pow(2.0, pairs);
}

inline constexpr double default_state_space_limit = 5e7;

/// All connected labeled graphs on n nodes (undirected).
inline std::vector<EdgeList> connected_labeled_graphs(std::size_t n) {
  const EdgeList all = clique_edges(n);
  std::vector<EdgeList> out;
  if (n == 1) return {EdgeList{}};
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << all.size()); ++mask) {
    EdgeList e;
    for (std::size_t b = 0; b < all.size(); ++b)
      if (mask >> b & 1U) e.push_back(all[b]);
    if (is_connected(ActiveGraph(n, e))) out.push_back(std::move(e));
  }
  return out;
}

/// All weakly connected labeled digraphs on n nodes.
inline std::vector<EdgeList> connected_labeled_digraphs(std::size_t n) {
  EdgeList all;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (u != v) all.emplace_back(u, v);
  std::vector<EdgeList> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << all.size()); ++mask) {
    EdgeList e;
    for (std::size_t b = 0; b < all.size(); ++b)
      if (mask >> b & 1U) e.push_back(all[b]);
    if (is_connected(DirectedGraph(n, e).undirected())) out.push_back(std::move(e));
  }
  return out;
}

namespace detail {

struct PackedKey {
  std::uint64_t states = 0;
  std::uint64_t edges = 0;
  bool operator==(const PackedKey&) const = default;
};

struct PackedKeyHash {
  std::size_t operator()(const PackedKey& k) const {
    std::uint64_t z = k.states * 0x9e3779b97f4a7c15ULL ^ (k.edges + 0x632be59bd9b4e019ULL);
    z = (z ^ (z >> 31)) * 0xbf58476d1ce4e5b9ULL;
    return static_cast<std::size_t>(z ^ (z >> 29));
  }
};

class ConfigCodec {
 public:
  ConfigCodec(std::size_t n, bool directed) : n_(n), directed_(directed) {
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = directed ? 0 : u + 1; v < n; ++v)
        if (u != v) pairs_.emplace_back(u, v);
    if (n > 8 || pairs_.size() > 64) throw ModelError("configuration too large to pack");
  }

  PackedKey encode(const Configuration& c) const {
    PackedKey k;
    for (NodeId u = 0; u < n_; ++u) k.states |= static_cast<std::uint64_t>(c.state(u)) << (8 * u);
    for (std::size_t b = 0; b < pairs_.size(); ++b)
      if (c.edge(pairs_[b].first, pairs_[b].second) == EdgeState::active) k.edges |= std::uint64_t{1} << b;
    return k;
  }

  Configuration decode(const PackedKey& k) const {
    Configuration c(n_, directed_, 0);
    for (NodeId u = 0; u < n_; ++u) c.set_state(u, static_cast<StateId>((k.states >> (8 * u)) & 0xff));
    for (std::size_t b = 0; b < pairs_.size(); ++b)
      if (k.edges >> b & 1U) c.set_edge(pairs_[b].first, pairs_[b].second, EdgeState::active);
    return c;
  }

 private:
  std::size_t n_;
  bool directed_;
  EdgeList pairs_;
};

inline std::string describe(const Configuration& c, const ProtocolSpec& proto) {
  std::ostringstream s;
  s << "states=[";
  for (NodeId u = 0; u < c.size(); ++u) s << (u ? " " : "") << proto.state_name(c.state(u));
  s << "] edges=[";
  bool first = true;
  for (NodeId u = 0; u < c.size(); ++u)
    for (NodeId v = c.directed() ? 0 : u + 1; v < c.size(); ++v)
      if (u != v && c.edge(u, v) == EdgeState::active) {
        s << (first ? "" : " ") << u << (c.directed() ? ">" : "-") << v;
        first = false;
      }
  s << "]";
  return s.str();
}

}  // namespace detail

/// Explicit-state BFS from every initial configuration (every connected
/// labeled topology; leader, if any, at node 0) through both outcomes of
/// every role draw. Terminal = no effective successor.
inline VerificationReport exhaustive_verify(const ProtocolSpec& proto, std::size_t n,
                                            const std::vector<Property>& properties,
                                            double limit = default_state_space_limit) {
  VerificationReport rep;
  rep.protocol = proto.name();
  rep.n = n;
  rep.state_space_estimate = state_space_estimate(proto, n);
  if (n < 2 || rep.state_space_estimate > limit || proto.state_count() > 256 || n > 8) {
    rep.refused = true;
    std::ostringstream msg;
    msg << "refused: state-space estimate " << rep.state_space_estimate << " exceeds limit " << limit;
    if (n < 2) msg.str("refused: n must be at least 2");
    rep.message = msg.str();
    return rep;
  }

  const detail::ConfigCodec codec(n, proto.directed());
  std::unordered_map<detail::PackedKey, std::uint32_t, detail::PackedKeyHash> index;
  std::vector<detail::PackedKey> keys;
  std::vector<std::uint32_t> succ_begin{0};
  std::vector<std::uint32_t> succ;
  auto intern = [&](const Configuration& c) -> std::pair<std::uint32_t, bool> {
    auto key = codec.encode(c);
    auto [it, fresh] = index.try_emplace(key, static_cast<std::uint32_t>(keys.size()));
    if (fresh) keys.push_back(key);
    return {it->second, fresh};
  };

  const auto topologies = proto.directed() ? connected_labeled_digraphs(n) : connected_labeled_graphs(n);
  for (const auto& edges : topologies) intern(make_configuration(proto, n, edges));
  rep.initial_configurations = keys.size();

  std::vector<PropertyResult> results;
  for (auto p : properties) results.push_back({p, true, std::nullopt});
  auto fail = [&](Property p, const Configuration& c, const char* why) {
    for (auto& r : results)
      if (r.property == p && r.holds) {
        r.holds = false;
        r.counterexample = std::string(why) + ": " + detail::describe(c, proto);
      }
  };
  auto wants = [&](Property p) { return std::find(properties.begin(), properties.end(), p) != properties.end(); };

  std::vector<char> is_goal_halt, is_goal_fixed;
  for (std::size_t id = 0; id < keys.size(); ++id) {
    if (keys.size() > static_cast<std::size_t>(limit)) {
      rep.refused = true;
      rep.message = "aborted: frontier exceeded limit at " + std::to_string(keys.size()) + " configurations";
      return rep;
    }
    const Configuration c = codec.decode(keys[id]);
    const bool halted = is_halted(c, proto);
    bool terminal = true;
    std::vector<std::uint32_t> out;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = proto.directed() ? 0 : u + 1; v < n; ++v) {
        if (u == v) continue;
        const auto res = resolve_interaction(c, u, v, proto);
        for (int o = 0; o < res.count; ++o) {
          const auto& oc = res.outcomes[o];
          if (oc.new_u == c.state(u) && oc.new_v == c.state(v) && oc.new_edge == c.edge(u, v)) continue;
          terminal = false;
          Configuration next = c;
          next.set_state(u, oc.new_u);
          next.set_state(v, oc.new_v);
          next.set_edge(u, v, oc.new_edge);
          out.push_back(intern(next).first);
        }
      }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    succ.insert(succ.end(), out.begin(), out.end());
    succ_begin.push_back(static_cast<std::uint32_t>(succ.size()));
    is_goal_halt.push_back(halted);
    is_goal_fixed.push_back(terminal);
    if (terminal) ++rep.terminal_configurations;

    const bool check_graph = wants(Property::connectivity_always) ||
                             (halted && wants(Property::halting_implies_spanning_line)) ||
                             (terminal && wants(Property::fixedpoint_implies_spanning_star));
    if (check_graph) {
      const ActiveGraph g = c.directed() ? DirectedGraph::from(c).undirected() : ActiveGraph::from(c);
      if (wants(Property::connectivity_always) && !is_connected(g)) fail(Property::connectivity_always, c, "disconnected");
      if (halted && !is_spanning_line(g)) fail(Property::halting_implies_spanning_line, c, "halted off-target");
      if (terminal && !is_spanning_star(g)) fail(Property::fixedpoint_implies_spanning_star, c, "fixed point off-target");
    }
  }
  rep.reachable_configurations = keys.size();

  // Backward reachability over the recorded transition graph.
  auto goal_reachable_everywhere = [&](const std::vector<char>& goal, Property p) {
    const std::size_t count = keys.size();
    std::vector<std::uint32_t> pred_begin(count + 1, 0), pred;
    for (std::size_t id = 0; id < count; ++id)
      for (auto k = succ_begin[id]; k < succ_begin[id + 1]; ++k) ++pred_begin[succ[k] + 1];
    for (std::size_t i = 0; i < count; ++i) pred_begin[i + 1] += pred_begin[i];
    pred.resize(succ.size());
    std::vector<std::uint32_t> fill(pred_begin.begin(), pred_begin.end() - 1);
    for (std::size_t id = 0; id < count; ++id)
      for (auto k = succ_begin[id]; k < succ_begin[id + 1]; ++k) pred[fill[succ[k]]++] = static_cast<std::uint32_t>(id);
    std::vector<char> ok(goal.begin(), goal.end());
    std::deque<std::uint32_t> queue;
    for (std::size_t id = 0; id < count; ++id)
      if (ok[id]) queue.push_back(static_cast<std::uint32_t>(id));
    while (!queue.empty()) {
      const auto id = queue.front();
      queue.pop_front();
      for (auto k = pred_begin[id]; k < pred_begin[id + 1]; ++k)
        if (!ok[pred[k]]) {
          ok[pred[k]] = 1;
          queue.push_back(pred[k]);
        }
    }
    for (std::size_t id = 0; id < count; ++id)
      if (!ok[id]) {
        fail(p, codec.decode(keys[id]), "goal unreachable");
        break;
      }
  };
  if (wants(Property::halting_reachable)) goal_reachable_everywhere(is_goal_halt, Property::halting_reachable);
  if (wants(Property::fixedpoint_reachable)) goal_reachable_everywhere(is_goal_fixed, Property::fixedpoint_reachable);

  rep.results = std::move(results);
  return rep;
}

}  // namespace netcon
