// Copyright 2026 The netcon Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

// netcon: run, benchmark, replay, verify and compute with network
// constructors. Every randomized command requires --seed; identical
// command lines produce identical output.

#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "netcon/netcon.hpp"

namespace {

using namespace netcon;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;
constexpr int kExitViolation = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Output sink: stdout or a file, opened lazily.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw UsageError("cannot open output file '" + path + "'");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void header(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) out << "# " << k << '=' << v << '\n';
}

std::string steps_text(std::uint64_t steps) { return steps == infinite_steps ? "inf" : std::to_string(steps); }

std::string fixed(double x, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << std::fixed << x;
  return s.str();
}

std::string join(const std::vector<std::size_t>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ProtocolCatalogEntry protocol_or_usage(const std::string& name) {
  try {
    return catalog_entry(name);
  } catch (const ModelError& e) {
    throw UsageError(e.what());
  }
}

Family family_or_usage(const std::string& name) {
  try {
    return Family::parse(name);
  } catch (const ModelError& e) {
    throw UsageError(e.what());
  }
}

// ---------------------------------------------------------------------------
// run

struct RunArgs {
  std::string protocol;
  std::size_t n = 0;
  std::string family = "clique";
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  bool no_monitors = false;
  std::string trace_out;
  std::string out;
};

int cmd_run(const RunArgs& a) {
  const auto entry = protocol_or_usage(a.protocol);
  const auto family = family_or_usage(a.family);
  if (a.n < 2) throw UsageError("--n must be at least 2");
  Rng topo(a.seed ^ 0x5bd1e995ULL);
  const auto initial = generate_initial(entry.spec, a.n, family, topo);
  RunOptions opts;
  opts.stop = default_stop(entry, a.n);
  if (a.budget) opts.stop.budget = a.budget;
  opts.connectivity_monitor = !a.no_monitors;
  opts.keep_trace = !a.trace_out.empty();
  const auto res = run(entry.spec, initial, a.seed, opts);
  const auto& r = res.report;

  Output out(a.out);
  auto& os = out.stream();
  header(os, {{"command", "run"},
              {"protocol", entry.name()},
              {"n", std::to_string(a.n)},
              {"family", family.name()},
              {"seed", std::to_string(a.seed)},
              {"budget", std::to_string(opts.stop.budget)},
              {"monitors", opts.connectivity_monitor ? "on" : "off"},
              {"stop_reason", to_string(r.reason)}});
  os << "protocol,n,seed,family,steps,violations,topology_class\n";
  os << entry.name() << ',' << a.n << ',' << a.seed << ',' << family.name() << ',' << steps_text(r.steps) << ','
     << r.monitor_violations.size() << ',' << r.topology_class << '\n';

  if (!a.trace_out.empty()) {
    std::ofstream trace(a.trace_out);
    if (!trace) throw UsageError("cannot open trace file '" + a.trace_out + "'");
    write_trace(trace, entry.spec, initial, res.trace.schedule());
  }
  if (!r.monitor_violations.empty()) return kExitViolation;
  if (r.budget_exhausted()) return kExitBudget;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// rerun: re-execute a saved trace

struct RerunArgs {
  std::string protocol;
  std::string trace;
};

int cmd_rerun(const RerunArgs& a) {
  const auto entry = protocol_or_usage(a.protocol);
  std::ifstream in(a.trace);
  if (!in) throw UsageError("cannot read trace '" + a.trace + "'");
  const auto [initial, schedule] = read_trace(in, entry.spec);
  const auto final_config = replay(entry.spec, initial, schedule);
  header(std::cout, {{"command", "rerun"}, {"protocol", entry.name()}, {"trace", a.trace},
                     {"provenance", schedule.provenance}});
  std::cout << "protocol,n,steps,topology_class,final\n";
  const std::string cls =
      final_config.directed() ? (is_connected(DirectedGraph::from(final_config).undirected()) ? "weakly_connected"
                                                                                              : "disconnected")
                              : topology_class(ActiveGraph::from(final_config));
  std::cout << entry.name() << ',' << final_config.size() << ',' << schedule.size() << ',' << cls << ','
            << detail::describe(final_config, entry.spec) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string protocol;
  std::string baseline;
  std::vector<std::size_t> sizes;
  std::string family = "clique";
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_bench(const BenchArgs& a) {
  if (a.sizes.empty()) throw UsageError("--n needs at least one size");
  if (a.protocol.empty() == a.baseline.empty()) throw UsageError("give exactly one of --protocol or --baseline");
  Output out(a.out);
  auto& os = out.stream();

  if (!a.baseline.empty()) {
    BaselineKind kind{};
    if (a.baseline == "edge-cover") kind = BaselineKind::edge_cover;
    else if (a.baseline == "meet-everybody") kind = BaselineKind::meet_everybody;
    else throw UsageError("unknown baseline '" + a.baseline + "'");
    const std::size_t trials = a.trials ? a.trials : 100000;
    header(os, {{"command", "bench"},
                {"baseline", a.baseline},
                {"n", join(a.sizes)},
                {"trials", std::to_string(trials)},
                {"seed", std::to_string(a.seed)}});
    os << "baseline,n,trials,mean,stddev,expected,relative_error\n";
    for (std::size_t n : a.sizes) {
      if (n < 2) throw UsageError("baseline sizes must be at least 2");
      std::vector<double> xs;
      xs.reserve(trials);
      for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(trial_seed(a.seed, n, t));
        xs.push_back(static_cast<double>(baseline_process(kind, n, rng)));
      }
      const auto s = summarize(xs);
      const double expected = baseline_expectation(kind, n);
      os << a.baseline << ',' << n << ',' << trials << ',' << fixed(s.mean, 4) << ',' << fixed(s.stddev, 4) << ','
         << fixed(expected, 4) << ',' << fixed((s.mean - expected) / expected, 6) << '\n';
    }
    return kExitOk;
  }

  const auto entry = protocol_or_usage(a.protocol);
  const auto family = family_or_usage(a.family);
  for (std::size_t n : a.sizes)
    if (n < 2) throw UsageError("protocol sizes must be at least 2");
  const std::size_t trials = a.trials ? a.trials : 200;
  ScalingReport rep;
  try {
    rep = estimate_runtime(entry, family, a.sizes, trials, a.seed);
  } catch (const ModelError& e) {
    throw UsageError(e.what());
  }
  header(os, {{"command", "bench"},
              {"protocol", entry.name()},
              {"family", family.name()},
              {"n", join(a.sizes)},
              {"trials", std::to_string(trials)},
              {"seed", std::to_string(a.seed)},
              {"normalizer", rep.normalizer}});
  os << "protocol,family,n,trials,mean,stddev,ci_low,ci_high,normalized,budget_exhausted,violations,"
        "target_failures\n";
  std::size_t violations = 0;
  for (const auto& row : rep.rows) {
    violations += row.violations;
    os << entry.name() << ',' << family.name() << ',' << row.n << ',' << trials << ',' << fixed(row.steps.mean, 2)
       << ',' << fixed(row.steps.stddev, 2) << ',' << fixed(row.steps.ci_low, 2) << ',' << fixed(row.steps.ci_high, 2)
       << ',' << fixed(row.normalized, 6) << ',' << row.budget_exhausted << ',' << row.violations << ','
       << row.target_failures << '\n';
  }
  os << "# ratio=" << fixed(rep.ratio(), 4) << '\n';
  if (violations) return kExitViolation;
  if (rep.tainted()) return kExitBudget;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// replay: impossibility construction

struct ReplayArgs {
  std::string protocol = "cycle-breaker-strawman";
  std::string base = "triangle";
  std::string cycle_edge;
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::uint64_t budget = 10000;
  std::string trace_out;
};

ActiveGraph base_graph(const std::string& spec) {
  auto sized = [&](const std::string& prefix) -> std::optional<std::size_t> {
    if (spec.rfind(prefix, 0) != 0) return std::nullopt;
    try {
      return std::stoul(spec.substr(prefix.size()));
    } catch (const std::logic_error&) {
      throw UsageError("bad base graph '" + spec + "'");
    }
  };
  if (spec == "triangle") return ActiveGraph(3, ring_edges(3));
  if (spec == "square") return ActiveGraph(4, ring_edges(4));
  if (auto n = sized("ring:")) {
    if (*n < 3) throw UsageError("ring base needs at least 3 nodes");
    return ActiveGraph(*n, ring_edges(*n));
  }
  if (auto n = sized("clique:")) {
    if (*n < 3) throw UsageError("clique base needs at least 3 nodes");
    return ActiveGraph(*n, clique_edges(*n));
  }
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw UsageError("cannot read base graph '" + spec.substr(5) + "'");
    auto [n, edges] = read_edge_list(in);
    return ActiveGraph(n, edges);
  }
  throw UsageError("unknown base graph '" + spec + "'");
}

Edge parse_edge(const std::string& text) {
  const auto dash = text.find('-');
  if (dash == std::string::npos) throw UsageError("edge must be written u-v");
  try {
    return {static_cast<NodeId>(std::stoul(text.substr(0, dash))),
            static_cast<NodeId>(std::stoul(text.substr(dash + 1)))};
  } catch (const std::logic_error&) {
    throw UsageError("edge must be written u-v");
  }
}

int cmd_replay(const ReplayArgs& a) {
  if (a.k < 2) throw UsageError("--k must be at least 2");
  const auto entry = protocol_or_usage(a.protocol);
  if (entry.spec.directed()) throw UsageError("replay needs an undirected protocol");
  const auto base = base_graph(a.base);
  std::optional<Edge> cycle;
  if (!a.cycle_edge.empty()) {
    cycle = parse_edge(a.cycle_edge);
  } else if (a.base == "triangle" || a.base == "square" || a.base.rfind("ring:", 0) == 0) {
    cycle = Edge{static_cast<NodeId>(base.size() - 1), 0};
  } else {
    for (auto e : base.edges())
      if (edge_on_cycle(base, e)) {
        cycle = e;
        break;
      }
    if (!cycle) throw UsageError("base graph has no cycle edge");
  }
  FamilyGraph fam;
  try {
    fam = build_family_graph(base, *cycle, a.k);
  } catch (const ModelError& e) {
    throw UsageError(e.what());
  }
  const auto rep = replay_impossibility(entry.spec, fam, a.seed, a.budget);
  header(std::cout, {{"command", "replay"},
                     {"protocol", entry.name()},
                     {"base", a.base},
                     {"cycle_edge", std::to_string(cycle->first) + "-" + std::to_string(cycle->second)},
                     {"k", std::to_string(a.k)},
                     {"seed", std::to_string(a.seed)},
                     {"budget", std::to_string(a.budget)}});
  std::cout << "protocol,k,source_steps,deactivation_step,deactivated_edge,blocks_checked,copies_equal,"
               "base_components,family_components,verdict\n";
  std::cout << entry.name() << ',' << a.k << ',' << rep.source.size() << ','
            << (rep.deactivation_step ? std::to_string(*rep.deactivation_step) : "none") << ','
            << (rep.deactivated_edge ? std::to_string(rep.deactivated_edge->first) + "-" +
                                           std::to_string(rep.deactivated_edge->second)
                                     : "none")
            << ',' << rep.blocks_checked << ',' << (rep.copies_equal ? "true" : "false") << ','
            << rep.base_components << ',' << rep.family_components << ',' << to_string(rep.verdict) << '\n';
  if (!a.trace_out.empty()) {
    std::ofstream trace(a.trace_out);
    if (!trace) throw UsageError("cannot open trace file '" + a.trace_out + "'");
    write_schedule(trace, rep.mimic);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string protocol;
  std::size_t n = 0;
  std::vector<std::string> properties;
  double limit = default_state_space_limit;
};

int cmd_verify(const VerifyArgs& a) {
  const auto entry = protocol_or_usage(a.protocol);
  std::vector<Property> props;
  try {
    for (const auto& p : a.properties) props.push_back(parse_property(p));
  } catch (const ModelError& e) {
    throw UsageError(e.what());
  }
  if (props.empty()) {
    props.push_back(Property::connectivity_always);
    if (entry.target == Target::spanning_line) props.push_back(Property::halting_implies_spanning_line);
    if (entry.target == Target::spanning_star) props.push_back(Property::fixedpoint_implies_spanning_star);
  }
  const auto rep = exhaustive_verify(entry.spec, a.n, props, a.limit);
  header(std::cout, {{"command", "verify"},
                     {"protocol", entry.name()},
                     {"n", std::to_string(a.n)},
                     {"state_space_estimate", fixed(rep.state_space_estimate, 0)},
                     {"limit", fixed(a.limit, 0)}});
  if (rep.refused) {
    std::cerr << rep.message << '\n';
    return kExitUsage;
  }
  std::cout << "# initial_configurations=" << rep.initial_configurations << '\n'
            << "# reachable_configurations=" << rep.reachable_configurations << '\n'
            << "# terminal_configurations=" << rep.terminal_configurations << '\n';
  std::cout << "property,result,counterexample\n";
  for (const auto& r : rep.results)
    std::cout << to_string(r.property) << ',' << (r.holds ? "PASS" : "FAIL") << ','
              << (r.counterexample ? *r.counterexample : "") << '\n';
  return rep.all_hold() ? kExitOk : kExitViolation;
}

// ---------------------------------------------------------------------------
// tm

struct TmArgs {
  std::string tm_file;
  std::size_t n = 0;
  std::string inputs;
  std::string family = "clique";
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
};

/// "a:3,b:2" -> symbol counts.
std::vector<std::pair<std::string, std::size_t>> parse_multiset(const std::string& text) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? text.size() + 1 : comma + 1;
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw UsageError("inputs are written symbol:count,...");
    try {
      out.emplace_back(item.substr(0, colon), std::stoul(item.substr(colon + 1)));
    } catch (const std::logic_error&) {
      throw UsageError("bad count in '" + item + "'");
    }
  }
  return out;
}

int cmd_tm(const TmArgs& a) {
  const auto machine = tm::TMDescription::parse(read_file(a.tm_file));
  const auto family = family_or_usage(a.family);
  std::vector<tm::Symbol> inputs;
  for (const auto& [name, count] : parse_multiset(a.inputs)) {
    const auto s = machine.find_symbol(name);
    if (!s || !machine.is_input(*s)) throw UsageError("'" + name + "' is not an input symbol of the machine");
    inputs.insert(inputs.end(), count, *s);
  }
  if (a.n && inputs.size() != a.n) throw UsageError("input counts sum to " + std::to_string(inputs.size()) +
                                                    " but --n is " + std::to_string(a.n));
  if (inputs.size() < 2) throw UsageError("need at least 2 inputs");
  Rng perm(a.seed ^ 0x2545f4914f6cdd1dULL);
  std::shuffle(inputs.begin(), inputs.end(), perm);
  const auto res = tm::compute_predicate_end_to_end(machine, inputs, family, a.seed, a.budget);
  header(std::cout, {{"command", "tm"},
                     {"tm", a.tm_file},
                     {"n", std::to_string(inputs.size())},
                     {"inputs", a.inputs},
                     {"family", family.name()},
                     {"seed", std::to_string(a.seed)},
                     {"cells", std::to_string(res.layout.cells())}});
  std::cout << "n,seed,family,decision,outcome,construction_steps,layout_interactions,tm_steps,tm_interactions\n";
  std::cout << inputs.size() << ',' << a.seed << ',' << family.name() << ',' << (res.decision ? "accept" : "reject")
            << ',' << tm::to_string(res.outcome) << ',' << res.construction_steps << ',' << res.layout_interactions
            << ',' << res.tm_steps << ',' << res.tm_interactions << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network constructor simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Execute one seeded run and print a CSV row");
  run_cmd->add_option("--protocol", run_args.protocol, "Protocol name")->required();
  run_cmd->add_option("--n", run_args.n, "Population size")->required();
  run_cmd->add_option("--family", run_args.family, "clique|line|ring|star|random_connected(p)");
  run_cmd->add_option("--seed", run_args.seed, "Scheduler and topology seed")->required();
  run_cmd->add_option("--budget", run_args.budget, "Step budget (default per protocol)");
  run_cmd->add_flag("--no-monitors", run_args.no_monitors, "Disable the connectivity monitor");
  run_cmd->add_option("--trace-out", run_args.trace_out, "Write the replayable trace here");
  run_cmd->add_option("--out", run_args.out, "CSV output path (default stdout)");

  RerunArgs rerun_args;
  auto* rerun_cmd = app.add_subcommand("rerun", "Re-execute a saved trace");
  rerun_cmd->add_option("--protocol", rerun_args.protocol, "Protocol name")->required();
  rerun_cmd->add_option("--trace", rerun_args.trace, "Trace file")->required();

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Scaling estimate or baseline calibration");
  bench_cmd->add_option("--protocol", bench_args.protocol, "Protocol name");
  bench_cmd->add_option("--baseline", bench_args.baseline, "edge-cover|meet-everybody");
  bench_cmd->add_option("--n", bench_args.sizes, "Sizes, comma separated")->delimiter(',')->required();
  bench_cmd->add_option("--family", bench_args.family, "Initial family");
  bench_cmd->add_option("--trials", bench_args.trials, "Trials per size");
  bench_cmd->add_option("--seed", bench_args.seed, "Base seed")->required();
  bench_cmd->add_option("--out", bench_args.out, "CSV output path (default stdout)");

  ReplayArgs replay_args;
  auto* replay_cmd = app.add_subcommand("replay", "Mimic a base-graph trace on its family graph");
  replay_cmd->add_option("--protocol", replay_args.protocol, "Protocol name");
  replay_cmd->add_option("--base", replay_args.base, "triangle|square|ring:N|clique:N|file:PATH");
  replay_cmd->add_option("--cycle-edge", replay_args.cycle_edge, "Removed cycle edge u-v");
  replay_cmd->add_option("--k", replay_args.k, "Number of copies (>= 2)");
  replay_cmd->add_option("--seed", replay_args.seed, "Source trace seed")->required();
  replay_cmd->add_option("--budget", replay_args.budget, "Source trace step budget");
  replay_cmd->add_option("--trace-out", replay_args.trace_out, "Write the mimic schedule here");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Exhaustive reachability check on small n");
  verify_cmd->add_option("--protocol", verify_args.protocol, "Protocol name")->required();
  verify_cmd->add_option("--n", verify_args.n, "Population size")->required();
  verify_cmd->add_option("--property", verify_args.properties, "Property to check (repeatable)");
  verify_cmd->add_option("--limit", verify_args.limit, "State-space estimate limit");

  TmArgs tm_args;
  auto* tm_cmd = app.add_subcommand("tm", "Decide a predicate with a Turing machine on edge memory");
  tm_cmd->add_option("--tm", tm_args.tm_file, "Machine description file")->required();
  tm_cmd->add_option("--n", tm_args.n, "Population size (checked against the inputs)");
  tm_cmd->add_option("--inputs", tm_args.inputs, "Input multiset, e.g. a:3,b:2")->required();
  tm_cmd->add_option("--family", tm_args.family, "Initial family");
  tm_cmd->add_option("--seed", tm_args.seed, "Seed")->required();
  tm_cmd->add_option("--budget", tm_args.budget, "Line construction step budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_args);
    if (*rerun_cmd) return cmd_rerun(rerun_args);
    if (*bench_cmd) return cmd_bench(bench_args);
    if (*replay_cmd) return cmd_replay(replay_args);
    if (*verify_cmd) return cmd_verify(verify_args);
    if (*tm_cmd) return cmd_tm(tm_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}
