#include <gtest/gtest.h>

#include "netcon/netcon.hpp"

namespace netcon {
namespace {

Configuration undirected(std::size_t n, const EdgeList& edges, StateId s = 0) {
  Configuration c(n, false, s);
  for (auto [u, v] : edges) c.set_edge(u, v, EdgeState::active);
  return c;
}

// Brute-force oracle: enumerate neighbors directly from the edge predicate.
InteractionContext brute_context(const Configuration& c, NodeId u, NodeId v) {
  std::size_t du = 0, dv = 0;
  bool common = false;
  for (NodeId w = 0; w < c.size(); ++w) {
    const bool nu = w != u && c.edge(u, w) == EdgeState::active;
    const bool nv = w != v && c.edge(v, w) == EdgeState::active;
    du += nu;
    dv += nv;
    if (w != u && w != v && nu && nv) common = true;
  }
  return {degree_class(du), degree_class(dv), common};
}

TEST(ObserveContext, Triangle) {
  const auto c = undirected(3, {{0, 1}, {1, 2}, {0, 2}});
  const auto ctx = observe_context(c, 0, 1);
  EXPECT_EQ(ctx.deg_u, DegreeClass::d2);
  EXPECT_EQ(ctx.deg_v, DegreeClass::d2);
  EXPECT_TRUE(ctx.common_neighbor);
}

TEST(ObserveContext, SingleEdge) {
  const auto c = undirected(3, {{0, 1}});
  const auto ctx = observe_context(c, 0, 1);
  EXPECT_EQ(ctx.deg_u, DegreeClass::d1);
  EXPECT_EQ(ctx.deg_v, DegreeClass::d1);
  EXPECT_FALSE(ctx.common_neighbor);
}

TEST(ObserveContext, PathMiddlePair) {
  const auto c = undirected(4, line_edges(4));
  const auto ctx = observe_context(c, 1, 2);
  EXPECT_EQ(ctx.deg_u, DegreeClass::d2);
  EXPECT_EQ(ctx.deg_v, DegreeClass::d2);
  EXPECT_FALSE(ctx.common_neighbor);
}

TEST(ObserveContext, MatchesBruteForceOnAllGraphsUpToSix) {
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto all = clique_edges(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << all.size()); ++mask) {
      Configuration c(n, false, 0);
      for (std::size_t b = 0; b < all.size(); ++b)
        if (mask >> b & 1U) c.set_edge(all[b].first, all[b].second, EdgeState::active);
      for (NodeId u = 0; u < n; ++u)
        for (NodeId v = 0; v < n; ++v) {
          if (u == v) continue;
          ASSERT_EQ(observe_context(c, u, v), brute_context(c, u, v)) << "n=" << n << " mask=" << mask;
        }
    }
  }
}

TEST(DegreeClass, Boundaries) {
  EXPECT_EQ(degree_class(0), DegreeClass::d0);
  EXPECT_EQ(degree_class(1), DegreeClass::d1);
  EXPECT_EQ(degree_class(2), DegreeClass::d2);
  EXPECT_EQ(degree_class(3), DegreeClass::d3plus);
  EXPECT_EQ(degree_class(40), DegreeClass::d3plus);
}

TEST(Configuration, SymmetricStorageAndDegrees) {
  Configuration c(5, false, 0);
  c.set_edge(3, 1, EdgeState::active);
  EXPECT_EQ(c.edge(1, 3), EdgeState::active);
  EXPECT_EQ(c.degree(1), 1U);
  EXPECT_EQ(c.degree(3), 1U);
  c.set_edge(1, 3, EdgeState::active);
  EXPECT_EQ(c.degree(1), 1U);
  c.set_edge(1, 3, EdgeState::inactive);
  EXPECT_EQ(c.degree(3), 0U);
  EXPECT_THROW(c.set_edge(2, 2, EdgeState::active), ModelError);
}

TEST(Configuration, DirectedStorage) {
  Configuration c(3, true, 0);
  c.set_edge(0, 1, EdgeState::active);
  EXPECT_EQ(c.edge(0, 1), EdgeState::active);
  EXPECT_EQ(c.edge(1, 0), EdgeState::inactive);
  EXPECT_EQ(c.degree(1), 1U);
}

TEST(ApplyInteraction, OnlineCycleEliminationFirstRule) {
  const auto proto = online_cycle_elimination().spec;
  Configuration c = make_configuration(proto, 2, EdgeList{{0, 1}});
  ASSERT_EQ(proto.state_name(c.state(0)), "l0");
  ASSERT_EQ(proto.state_name(c.state(1)), "q0");
  Rng rng(1);
  auto [next, ev] = apply_interaction(c, 0, 1, proto, rng);
  EXPECT_EQ(proto.state_name(next.state(0)), "e");
  EXPECT_EQ(proto.state_name(next.state(1)), "l1");
  EXPECT_EQ(next.edge(0, 1), EdgeState::active);
  EXPECT_TRUE(ev.rule_applied.has_value());
  // The reverse orientation reaches the same rule.
  auto [rev, ev2] = apply_interaction(c, 1, 0, proto, rng);
  EXPECT_EQ(proto.state_name(rev.state(0)), "e");
  EXPECT_EQ(proto.state_name(rev.state(1)), "l1");
  EXPECT_TRUE(ev2.swapped);
}

TEST(ApplyInteraction, StarTransformerCommonNeighborGuard) {
  const auto proto = star_transformer().spec;
  const auto p = proto.state_id("p");
  const auto l = proto.state_id("l");
  Rng rng(1);
  {
    auto c = undirected(3, {{0, 1}, {1, 2}, {0, 2}}, p);
    c.set_state(2, l);
    auto [next, ev] = apply_interaction(c, 0, 1, proto, rng);
    EXPECT_EQ(next.edge(0, 1), EdgeState::inactive);
    EXPECT_EQ(next.state(0), p);
    EXPECT_EQ(next.state(1), p);
    ASSERT_TRUE(ev.edge_changed.has_value());
    EXPECT_EQ(ev.edge_changed->second, EdgeState::inactive);
  }
  {
    auto c = undirected(3, {{0, 1}}, p);
    c.set_state(2, l);
    auto [next, ev] = apply_interaction(c, 0, 1, proto, rng);
    EXPECT_TRUE(next == c);
    EXPECT_FALSE(ev.rule_applied.has_value());
  }
}

TEST(ApplyInteraction, EqualStatesAsymmetricOutcomeUsesCoin) {
  const auto proto = star_transformer().spec;
  const auto l = proto.state_id("l");
  const auto p = proto.state_id("p");
  int swapped = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    auto c = undirected(2, {}, l);
    auto [next, ev] = apply_interaction(c, 0, 1, proto, rng);
    EXPECT_TRUE(ev.role_drawn);
    EXPECT_EQ(next.edge(0, 1), EdgeState::active);
    EXPECT_NE(next.state(0), next.state(1));
    EXPECT_EQ(next.state(ev.swapped ? 1 : 0), l);
    EXPECT_EQ(next.state(ev.swapped ? 0 : 1), p);
    swapped += ev.swapped;
    // Replaying with the recorded assignment reproduces the outcome.
    auto again = c;
    replay_interaction(again, 0, 1, proto, ev.swapped);
    EXPECT_TRUE(again == next);
  }
  EXPECT_GT(swapped, 60);
  EXPECT_LT(swapped, 140);
}

TEST(ApplyInteraction, DirectedMatchesWrittenOrientationOnly) {
  const auto proto = ProtocolSpec::parse(R"(%name d
%states a b c
%initial a
%directed
a b 1 -> c c 1
)");
  Configuration cfg(2, true, proto.state_id("a"));
  cfg.set_state(1, proto.state_id("b"));
  cfg.set_edge(0, 1, EdgeState::active);
  cfg.set_edge(1, 0, EdgeState::active);
  Rng rng(0);
  auto [rev, ev] = apply_interaction(cfg, 1, 0, proto, rng);
  EXPECT_FALSE(ev.rule_applied.has_value());
  auto [fwd, ev2] = apply_interaction(cfg, 0, 1, proto, rng);
  EXPECT_TRUE(ev2.rule_applied.has_value());
  EXPECT_EQ(fwd.state(0), proto.state_id("c"));
}

TEST(IsHalted, Examples) {
  const auto proto = line_transformer().spec;
  Configuration c(3, false, proto.state_id("h"));
  EXPECT_TRUE(is_halted(c, proto));
  c.set_state(1, proto.state_id("hl"));
  EXPECT_TRUE(is_halted(c, proto));
  c.set_state(2, proto.state_id("l"));
  EXPECT_FALSE(is_halted(c, proto));
  const auto star = star_transformer().spec;
  EXPECT_FALSE(is_halted(Configuration(3, false, star.state_id("p")), star));
}

TEST(IsFixedPoint, Examples) {
  const auto proto = star_transformer().spec;
  auto c = undirected(4, star_edges(4), proto.state_id("p"));
  c.set_state(0, proto.state_id("l"));
  EXPECT_TRUE(is_fixed_point(c, proto));
  c.set_state(1, proto.state_id("l"));
  EXPECT_FALSE(is_fixed_point(c, proto));
  EXPECT_TRUE(is_fixed_point(Configuration(1, false, proto.state_id("l")), proto));
}

TEST(OutputGraph, Restriction) {
  const auto proto = ProtocolSpec::parse(R"(%name o
%states l p
%initial p
%output p
l p 0 -> l p 1
)");
  auto c = undirected(3, {{0, 1}, {1, 2}}, proto.state_id("p"));
  c.set_state(2, proto.state_id("l"));
  const auto g = output_graph(c, proto);
  EXPECT_EQ(g.graph.size(), 2U);
  EXPECT_EQ(g.graph.edge_count(), 1U);

  const auto all = star_transformer().spec;
  const auto full = undirected(3, {{0, 1}, {1, 2}}, all.state_id("p"));
  EXPECT_EQ(output_graph(full, all).graph.edge_count(), 2U);

  const auto none = ProtocolSpec::parse("%name z\n%states a b\n%initial a\n%output b\n");
  const auto empty = output_graph(undirected(3, {{0, 1}}, none.state_id("a")), none);
  EXPECT_EQ(empty.graph.size(), 0U);
}

TEST(ProtocolSpec, ParseErrors) {
  EXPECT_THROW(ProtocolSpec::parse("%states a\n%initial b\n"), ParseError);
  EXPECT_THROW(ProtocolSpec::parse("%states a b\n%initial a\na b 1 -> a\n"), ParseError);
  EXPECT_THROW(ProtocolSpec::parse("%states a b\n%initial a\na x 1 -> a b 1\n"), ParseError);
  EXPECT_THROW(ProtocolSpec::parse("%states a b\n%initial a\na b 1 [degU=7] -> a a 1\n"), ParseError);
  // Both orientations of a != b on the same edge state are ambiguous.
  EXPECT_THROW(ProtocolSpec::parse("%states a b\n%initial a\na b 1 -> a a 1\nb a 1 -> b b 1\n"), ModelError);
  // Halting states must not change under an effective rule.
  EXPECT_THROW(ProtocolSpec::parse("%states a h\n%initial a\n%halt h\nh a 1 -> a a 1\n"), ModelError);
}

TEST(ProtocolSpec, GuardsAndSensors) {
  const auto proto = ProtocolSpec::parse(R"(%name g
%states a b
%initial a
a a 1 [degU=1,degV!=3+] -> b b 1
b b 1 [cnd=1] -> a a 0
)");
  EXPECT_TRUE(proto.uses_degree_detection());
  EXPECT_TRUE(proto.uses_common_neighbor());
  const auto& r = proto.rules()[0];
  EXPECT_TRUE(r.guard.matches({DegreeClass::d1, DegreeClass::d2, false}));
  EXPECT_FALSE(r.guard.matches({DegreeClass::d1, DegreeClass::d3plus, false}));
  EXPECT_FALSE(r.guard.matches({DegreeClass::d2, DegreeClass::d2, false}));
}

TEST(ProtocolSpec, RoundTripsThroughText) {
  for (const auto& name : catalog_names()) {
    const auto proto = catalog_entry(name).spec;
    const auto again = ProtocolSpec::parse(proto.to_text());
    EXPECT_EQ(again.to_text(), proto.to_text()) << name;
    EXPECT_EQ(again.rules().size(), proto.rules().size()) << name;
  }
}

// Every shipped table is well formed: each (a, b, c, context) matches at most
// one oriented rule, and halting states are closed under every encounter.
TEST(ProtocolSpec, ShippedTablesWellFormed) {
  const DegreeClass classes[] = {DegreeClass::d0, DegreeClass::d1, DegreeClass::d2, DegreeClass::d3plus};
  for (const auto& name : catalog_names()) {
    const auto proto = catalog_entry(name).spec;
    const auto q = static_cast<StateId>(proto.state_count());
    for (StateId a = 0; a < q; ++a)
      for (StateId b = 0; b < q; ++b)
        for (EdgeState e : {EdgeState::inactive, EdgeState::active})
          for (auto du : classes)
            for (auto dv : classes)
              for (bool cn : {false, true}) {
                const InteractionContext ctx{du, dv, cn};
                std::size_t hits = 0;
                for (const auto& r : proto.rules()) {
                  hits += r.matches(a, b, e, ctx);
                  if (!proto.directed() && a != b) hits += r.matches(b, a, e, ctx.swapped());
                }
                ASSERT_LE(hits, 1U) << name << " " << proto.state_name(a) << " " << proto.state_name(b);
                for (const auto& r : proto.rules()) {
                  if (!r.matches(a, b, e, ctx) || !r.effective_on(e)) continue;
                  EXPECT_FALSE(proto.is_halting(a) || proto.is_halting(b)) << name;
                }
              }
  }
}

}  // namespace
}  // namespace netcon
