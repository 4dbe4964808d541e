#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "netcon/netcon.hpp"

namespace netcon {
namespace {

TEST(UniformNext, NTwoAlwaysTheSamePair) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    auto [u, v] = uniform_next(2, rng);
    EXPECT_EQ(std::min(u, v), 0U);
    EXPECT_EQ(std::max(u, v), 1U);
  }
}

TEST(UniformNext, UnorderedPairFrequenciesNFour) {
  Rng rng(11);
  std::map<std::pair<NodeId, NodeId>, std::size_t> count;
  const std::size_t draws = 1'000'000;
  for (std::size_t i = 0; i < draws; ++i) {
    auto [u, v] = uniform_next(4, rng);
    ASSERT_NE(u, v);
    ++count[{std::min(u, v), std::max(u, v)}];
  }
  ASSERT_EQ(count.size(), 6U);
  for (const auto& [pair, c] : count) EXPECT_NEAR(static_cast<double>(c) / draws, 1.0 / 6.0, 0.005);
}

TEST(UniformNext, OrderedPairFrequenciesNThree) {
  Rng rng(12);
  std::map<std::pair<NodeId, NodeId>, std::size_t> count;
  const std::size_t draws = 1'000'000;
  for (std::size_t i = 0; i < draws; ++i) ++count[uniform_next(3, rng)];
  ASSERT_EQ(count.size(), 6U);
  for (const auto& [pair, c] : count) EXPECT_NEAR(static_cast<double>(c) / draws, 1.0 / 6.0, 0.005);
}

TEST(UniformScheduler, SeedDeterminesSequence) {
  UniformScheduler a(7, 99), b(7, 99), c(7, 100);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs = differs || x != c.next();
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(a.provenance(), "random(seed=99)");
}

// Triangle u1,u2,u3 = 0,1,2; hexagon v1,v2,v3,v1',v2',v3' = 0..5.
TEST(Mimic, TriangleToHexagonExamples) {
  const auto one = mimic_triangle_to_hexagon(Schedule{{{0, 1, std::nullopt}}, "t"});
  ASSERT_EQ(one.size(), 2U);
  EXPECT_EQ(one.pairs[0], (ScheduledPair{0, 1, std::nullopt}));
  EXPECT_EQ(one.pairs[1], (ScheduledPair{3, 4, std::nullopt}));

  const auto closing = mimic_triangle_to_hexagon(Schedule{{{2, 0, std::nullopt}}, "t"});
  ASSERT_EQ(closing.size(), 2U);
  EXPECT_EQ(closing.pairs[0], (ScheduledPair{2, 3, std::nullopt}));
  EXPECT_EQ(closing.pairs[1], (ScheduledPair{5, 0, std::nullopt}));

  EXPECT_TRUE(mimic_triangle_to_hexagon(Schedule{}).empty());
}

TEST(Mimic, HexagonIsTheTriangleFamily) {
  const auto& fam = triangle_hexagon_family();
  EXPECT_EQ(fam.graph.size(), 6U);
  for (NodeId v = 0; v < 6; ++v) EXPECT_TRUE(fam.graph.has_edge(v, (v + 1) % 6));
}

TEST(Mimic, GeneralFamily) {
  const ActiveGraph tri(3, ring_edges(3));
  const auto fam2 = build_family_graph(tri, {0, 1}, 2);
  const auto intra = mimic_to_family(Schedule{{{0, 2, std::nullopt}}, "t"}, fam2);
  ASSERT_EQ(intra.size(), 2U);
  EXPECT_EQ(intra.pairs[0], (ScheduledPair{fam2.node(0, 0), fam2.node(0, 2), std::nullopt}));
  EXPECT_EQ(intra.pairs[1], (ScheduledPair{fam2.node(1, 0), fam2.node(1, 2), std::nullopt}));

  const auto chain = mimic_to_family(Schedule{{{0, 1, true}}, "t"}, fam2);
  ASSERT_EQ(chain.size(), 2U);
  for (const auto& p : chain.pairs) {
    EXPECT_TRUE(fam2.graph.has_edge(p.u, p.v));
    EXPECT_NE(fam2.copy_of(p.u), fam2.copy_of(p.v));
    EXPECT_EQ(p.swapped, std::optional<bool>(true));
  }

  const auto fam3 = build_family_graph(tri, {0, 1}, 3);
  EXPECT_EQ(mimic_to_family(Schedule{{{1, 2, std::nullopt}}, "t"}, fam3).size(), 3U);
  EXPECT_THROW(mimic_to_family(Schedule{{{0, 5, std::nullopt}}, "t"}, fam3), ModelError);
}

TEST(ScheduleIo, RoundTrip) {
  Schedule s{{{0, 1, std::nullopt}, {2, 1, true}, {1, 0, false}}, "random(seed=5)"};
  std::stringstream buf;
  write_schedule(buf, s);
  const auto back = read_schedule(buf);
  EXPECT_EQ(back.provenance, s.provenance);
  EXPECT_EQ(back.pairs, s.pairs);
  std::stringstream bad("0 1 1\n");
  EXPECT_THROW(read_schedule(bad), ParseError);
}

}  // namespace
}  // namespace netcon
