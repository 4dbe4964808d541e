// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "netcon/netcon.hpp"

namespace {

using namespace netcon;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const std::vector<std::string> construction_protocols{"online-cycle-elimination", "line-around-a-star",
                                                      "star-transformer", "line-transformer"};

Verdict baseline_calibration() {
  const auto t0 = Clock::now();
  Verdict v;
  double worst = 0;
  for (auto kind : {BaselineKind::edge_cover, BaselineKind::meet_everybody})
    for (std::size_t n = 3; n <= 6; ++n) {
      Rng rng(trial_seed(kind == BaselineKind::edge_cover ? 1 : 2, n, 0));
      const int trials = 100000;
      double sum = 0;
      for (int t = 0; t < trials; ++t) sum += static_cast<double>(baseline_process(kind, n, rng));
      const double expected = baseline_expectation(kind, n);
      const double rel = std::abs(sum / trials - expected) / expected;
      worst = std::max(worst, rel);
      if (rel > 0.02) {
        v.pass = false;
        v.detail += fmt("%s n=%zu mean=%.3f expected=%.3f; ", kind == BaselineKind::edge_cover ? "edge-cover"
                                                                                                : "meet-everybody",
                        n, sum / trials, expected);
      }
    }
  const double secs = seconds_since(t0);
  if (secs >= 60) v.pass = false;
  v.detail += fmt("max relative error %.4f (limit 0.02), %.1fs (limit 60s)", worst, secs);
  return v;
}

Verdict exhaustive_correctness() {
  const auto t0 = Clock::now();
  Verdict v;
  std::size_t reachable = 0;
  for (const auto& name : construction_protocols) {
    const auto entry = catalog_entry(name);
    const std::vector<Property> props =
        entry.target == Target::spanning_star
            ? std::vector<Property>{Property::fixedpoint_implies_spanning_star, Property::connectivity_always}
            : std::vector<Property>{Property::halting_implies_spanning_line, Property::connectivity_always};
    for (std::size_t n = 2; n <= 4; ++n) {
      const auto rep = exhaustive_verify(entry.spec, n, props);
      reachable += rep.reachable_configurations;
      if (!rep.all_hold()) {
        v.pass = false;
        v.detail += fmt("%s n=%zu fails; ", name.c_str(), n);
      }
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= 600) v.pass = false;
  v.detail += fmt("%zu reachable configurations, %.1fs (limit 600s)", reachable, secs);
  return v;
}

Verdict statistical_correctness() {
  const auto t0 = Clock::now();
  Verdict v;
  const std::vector<Family> families{Family::parse("clique"), Family::parse("ring"),
                                     Family::parse("random_connected(0.3)")};
  std::size_t runs = 0, violations = 0, unfinished = 0, wrong = 0;
  for (const auto& name : construction_protocols) {
    const auto entry = catalog_entry(name);
    for (std::size_t n = 5; n <= 16; ++n)
      for (std::size_t t = 0; t < 1000; ++t) {
        const auto seed = trial_seed(3, n, t);
        Rng rng(seed);
        const auto& fam = families[t % families.size()];
        const auto initial = generate_initial(entry.spec, n, fam, rng);
        RunOptions opts;
        opts.stop = default_stop(entry, n);
        const auto r = run(entry.spec, initial, seed, opts).report;
        ++runs;
        violations += r.monitor_violations.size();
        if (r.budget_exhausted()) ++unfinished;
        else if (!meets_target(entry, r)) ++wrong;
      }
  }
  v.pass = violations == 0 && unfinished == 0 && wrong == 0;
  v.detail = fmt("%zu runs, %zu violations, %zu over budget, %zu recognizer failures, %.1fs", runs, violations,
                 unfinished, wrong, seconds_since(t0));
  return v;
}

Verdict scaling() {
  const auto t0 = Clock::now();
  Verdict v;
  const auto clique = Family::parse("clique");
  struct Point {
    std::string name;
    std::vector<std::size_t> sizes;
  };
  const std::vector<Point> points{{"line-around-a-star", {8, 16, 32, 64}},
                                  {"line-transformer", {8, 12, 16, 24}},
                                  {"online-cycle-elimination", {6, 10, 14}}};
  for (const auto& p : points) {
    const auto rep = estimate_runtime(catalog_entry(p.name), clique, p.sizes, 200, 4);
    std::size_t bad = 0;
    for (const auto& row : rep.rows) bad += row.violations + row.target_failures;
    const bool ok = !rep.tainted() && bad == 0 && rep.ratio() <= 2.0;
    v.pass = v.pass && ok;
    v.detail += fmt("%s ratio=%.3f; ", p.name.c_str(), rep.ratio());
    if (p.name == "line-around-a-star")
      for (const auto& row : rep.rows) {
        const double factor = row.steps.mean / baseline_expectation(BaselineKind::edge_cover, row.n);
        if (factor > 4.0 || factor < 0.25) v.pass = false;
        v.detail += fmt("n=%zu vs edge-cover x%.2f; ", row.n, factor);
      }
  }
  v.detail += fmt("limit 2, factor 4, %.1fs", seconds_since(t0));
  return v;
}

Verdict two_cycle_detection() {
  const auto t0 = Clock::now();
  Verdict v;
  const auto entry = stable_2cycle_detection();
  const auto& proto = entry.spec;
  const std::uint64_t steps = 1'000'000, window = 100'000;
  std::size_t instances = 0, failures = 0;
  const auto check = [&](const Configuration& initial, std::uint64_t seed) {
    const bool expected = has_directed_2cycle(DirectedGraph::from(initial));
    std::uint64_t step = 0;
    bool changed_late = false;
    std::vector<int> bits(initial.size());
    for (NodeId u = 0; u < initial.size(); ++u) bits[u] = decision_bit(proto, initial.state(u));
    RunOptions opts;
    opts.stop = {false, false, steps};
    opts.connectivity_monitor = false;
    opts.observer = [&](const InteractionEvent& ev, const Configuration& c) {
      ++step;
      for (NodeId w : {ev.u, ev.v}) {
        const int b = decision_bit(proto, c.state(w));
        if (b != bits[w] && step > steps - window) changed_late = true;
        bits[w] = b;
      }
    };
    run(proto, initial, seed, opts);
    bool agree = !changed_late;
    for (int b : bits) agree = agree && b == static_cast<int>(expected);
    ++instances;
    if (!agree) ++failures;
  };
  for (std::size_t n = 2; n <= 3; ++n)
    for (const auto& arcs : connected_labeled_digraphs(n)) check(make_configuration(proto, n, arcs), 17 + instances);
  const auto fam = Family::parse("random_connected(0.3)");
  for (std::size_t n = 4; n <= 6; ++n)
    for (std::size_t t = 0; t < 100; ++t) {
      Rng rng(trial_seed(5, n, t));
      check(generate_initial(proto, n, fam, rng), trial_seed(6, n, t));
    }
  v.pass = failures == 0;
  v.detail = fmt("%zu instances, %zu failures, %.1fs", instances, failures, seconds_since(t0));
  return v;
}

Verdict impossibility_replay() {
  const auto t0 = Clock::now();
  Verdict v;
  const auto proto = cycle_breaker_strawman().spec;
  const ActiveGraph triangle(3, ring_edges(3));
  for (std::size_t k : {2U, 3U}) {
    const auto fam = build_family_graph(triangle, {2, 0}, k);
    std::size_t counterexamples = 0, min_components = std::numeric_limits<std::size_t>::max();
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto rep = replay_impossibility(proto, fam, seed);
      min_components = std::min(min_components, rep.family_components);
      const bool ok = rep.deactivation_step.has_value() && rep.copies_equal && !rep.guard_divergence &&
                      rep.family_components >= k && rep.verdict == ReplayVerdict::disconnected;
      if (!ok) ++counterexamples;
    }
    v.pass = v.pass && counterexamples == 0;
    v.detail += fmt("k=%zu: 100 traces, %zu counterexamples, min components %zu; ", k, counterexamples, min_components);
  }
  v.detail += fmt("%.1fs", seconds_since(t0));
  return v;
}

tm::TMDescription load_tm(const std::string& name) {
  std::ifstream in(std::string(NETCON_FIXTURE_DIR) + "/" + name);
  std::stringstream buf;
  buf << in.rdbuf();
  return tm::TMDescription::parse(buf.str());
}

Verdict tm_pipeline() {
  const auto t0 = Clock::now();
  Verdict v;
  struct Machine {
    std::string file;
    std::function<bool(std::size_t, std::size_t, std::size_t)> oracle;
  };
  const std::vector<Machine> machines{
      {"parity.tm", [](std::size_t a, std::size_t, std::size_t) { return a % 2 == 0; }},
      {"product.tm", [](std::size_t a, std::size_t b, std::size_t c) { return a * b == c; }}};
  const auto fam = Family::parse("random_connected(0.3)");
  std::size_t runs = 0, wrong = 0, exhausted = 0;
  for (const auto& m : machines) {
    const auto machine = load_tm(m.file);
    const auto a = machine.symbol("a"), b = machine.symbol("b"), c = machine.symbol("c");
    for (std::size_t n = 4; n <= 10; ++n)
      for (std::size_t na = 0; na <= n; ++na)
        for (std::size_t nb = 0; na + nb <= n; ++nb) {
          const std::size_t nc = n - na - nb;
          std::vector<tm::Symbol> inputs(na, a);
          inputs.insert(inputs.end(), nb, b);
          inputs.insert(inputs.end(), nc, c);
          const bool expected = m.oracle(na, nb, nc);
          Rng perm(trial_seed(7, n, na * 16 + nb));
          for (std::size_t t = 0; t < 10; ++t) {
            std::shuffle(inputs.begin(), inputs.end(), perm);
            const auto r = tm::compute_predicate_end_to_end(machine, inputs, fam, trial_seed(8, n, runs));
            ++runs;
            if (r.outcome == tm::TmOutcome::tape_exhausted) ++exhausted;
            if (r.decision != expected || r.outcome == tm::TmOutcome::step_limit) ++wrong;
          }
        }
  }
  v.pass = wrong == 0 && exhausted == 0;
  v.detail = fmt("%zu runs, %zu wrong decisions, %zu tape exhaustions, %.1fs", runs, wrong, exhausted,
                 seconds_since(t0));
  return v;
}

Verdict replay_determinism() {
  const auto t0 = Clock::now();
  Verdict v;
  const std::vector<std::string> families{"clique", "ring", "line", "star", "random_connected(0.3)"};
  std::size_t traces = 0, mismatches = 0;
  for (const auto& name : catalog_names()) {
    const auto entry = catalog_entry(name);
    for (std::size_t t = 0; t < 50; ++t) {
      const std::size_t n = 3 + t % 8;
      const auto seed = trial_seed(9, n, t);
      Rng rng(seed);
      const auto initial = generate_initial(entry.spec, n, Family::parse(families[t % families.size()]), rng);
      RunOptions opts;
      opts.stop = default_stop(entry, n);
      opts.stop.budget = std::min<std::uint64_t>(opts.stop.budget, 20000);
      opts.keep_trace = true;
      const auto r = run(entry.spec, initial, seed, opts);
      std::stringstream saved;
      write_trace(saved, entry.spec, r.trace.initial, r.trace.schedule());
      const auto [back_initial, back_schedule] = read_trace(saved, entry.spec);
      ++traces;
      if (!(replay(entry.spec, back_initial, back_schedule) == r.final_config)) ++mismatches;
    }
  }
  v.pass = mismatches == 0;
  v.detail = fmt("%zu traces, %zu mismatches, %.1fs", traces, mismatches, seconds_since(t0));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, Verdict (*)()>> criteria{
      {"baseline calibration", baseline_calibration},
      {"exhaustive correctness n<=4", exhaustive_correctness},
      {"statistical correctness n in [5,16]", statistical_correctness},
      {"scaling ratio stability", scaling},
      {"stable 2-cycle detection", two_cycle_detection},
      {"impossibility replay", impossibility_replay},
      {"tm pipeline", tm_pipeline},
      {"replay determinism", replay_determinism}};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d %s: %s (%s)\n", id, criteria[i].first, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  return failed;
}
