#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "netcon/netcon.hpp"

namespace netcon::tm {
namespace {

TMDescription load(const std::string& name) {
  std::ifstream in(std::string(NETCON_FIXTURE_DIR) + "/" + name);
  std::stringstream buf;
  buf << in.rdbuf();
  return TMDescription::parse(buf.str());
}

std::vector<Symbol> symbols(const TMDescription& tm, const std::string& word) {
  std::vector<Symbol> out;
  for (char c : word) out.push_back(tm.symbol(std::string(1, c)));
  return out;
}

Configuration line_config(std::size_t n) {
  Configuration c(n, false, 0);
  for (auto [u, v] : line_edges(n)) c.set_edge(u, v, EdgeState::active);
  return c;
}

std::pair<SimulatorNetwork, LineLayout> layout_on_line(const std::vector<Symbol>& inputs, std::uint64_t seed = 1) {
  Rng rng(seed);
  auto out = partition_line(line_config(inputs.size()), inputs, 0, rng);
  sort_input_region(out.first, out.second);
  return out;
}

TEST(TMDescription, ParseErrors) {
  const std::string head = "states: q qa qr\ninput: a\ntape: 0 1 a\nblank: 0\nstart: q\naccept: qa\nreject: qr\n";
  EXPECT_NO_THROW(TMDescription::parse(head + "q a -> qa a R\n"));
  EXPECT_THROW(TMDescription::parse(head + "q a -> qa a R\nq a -> qr a L\n"), ParseError);
  EXPECT_THROW(TMDescription::parse(head + "q z -> qa a R\n"), ParseError);
  EXPECT_THROW(TMDescription::parse(head + "q a -> qa a X\n"), ParseError);
  EXPECT_THROW(TMDescription::parse(head + "qa a -> q a R\n"), ParseError);
  EXPECT_THROW(TMDescription::parse("states: q\n"), ParseError);
  EXPECT_THROW(TMDescription::parse("states: q qa qr\ninput: 0\ntape: 0 1\nblank: 0\nstart: q\naccept: qa\nreject: qr\n"),
               ParseError);
}

TEST(TMDescription, Fixtures) {
  for (const char* f : {"parity.tm", "product.tm", "accept_all.tm"}) EXPECT_NO_THROW(load(f)) << f;
  const auto tm = load("parity.tm");
  EXPECT_TRUE(tm.is_input(tm.symbol("a")));
  EXPECT_FALSE(tm.is_input(tm.symbol("X")));
  EXPECT_EQ(tm.blank(), tm.zero());
  EXPECT_FALSE(tm.delta(tm.accept(), tm.zero()).has_value());
}

TEST(CellAddress, ExamplesAndBijection) {
  EXPECT_EQ(cell_address({1, 2}), 0U);
  EXPECT_EQ(cell_address({1, 3}), 1U);
  EXPECT_EQ(cell_address({2, 3}), 2U);
  EXPECT_EQ(cell_address({1, 4}), 3U);
  EXPECT_THROW(cell_address({2, 2}), ModelError);
  EXPECT_THROW(cell_address({3, 2}), ModelError);
  for (std::size_t m = 2; m <= 12; ++m) {
    std::set<std::size_t> seen;
    for (std::size_t j = 2; j <= m; ++j)
      for (std::size_t i = 1; i < j; ++i) {
        const auto c = cell_address({i, j});
        ASSERT_LT(c, cell_count(m));
        ASSERT_TRUE(seen.insert(c).second);
        ASSERT_EQ(cell_tokens(c), (TokenPair{i, j}));
      }
    EXPECT_EQ(seen.size(), cell_count(m));
  }
}

TEST(MoveHead, Examples) {
  EXPECT_EQ(move_head({1, 2}, 4, Move::right), (TokenPair{1, 3}));
  EXPECT_EQ(move_head({1, 4}, 4, Move::right), (TokenPair{2, 3}));
  EXPECT_EQ(move_head({2, 3}, 4, Move::left), (TokenPair{1, 4}));
  EXPECT_FALSE(move_head({3, 4}, 4, Move::right).has_value());
  EXPECT_FALSE(move_head({1, 2}, 4, Move::left).has_value());
  EXPECT_THROW(move_head({1, 5}, 4, Move::right), ModelError);
}

TEST(MoveHead, WalkVisitsEveryCellAndInverts) {
  for (std::size_t m = 2; m <= 12; ++m) {
    std::set<std::size_t> visited;
    std::optional<TokenPair> t = TokenPair{1, 2};
    while (t) {
      ASSERT_TRUE(visited.insert(cell_address(*t)).second);
      const auto next = move_head(*t, m, Move::right);
      if (next) {
        ASSERT_EQ(move_head(*next, m, Move::left), t);
      }
      t = next;
    }
    EXPECT_EQ(visited.size(), cell_count(m));
  }
}

TEST(PartitionLine, EvenLine) {
  const auto tm = load("parity.tm");
  Rng rng(3);
  auto [net, layout] = partition_line(line_config(4), symbols(tm, "abab"), 0, rng);
  EXPECT_EQ(layout.u_line, (std::vector<NodeId>{0, 1}));
  EXPECT_EQ(layout.m_nodes.size(), 2U);
  EXPECT_FALSE(layout.redundant_node.has_value());
  EXPECT_EQ(layout.cells(), 1U);
  EXPECT_TRUE(net.edges().edge(0, 1) == EdgeState::active);
  EXPECT_TRUE(net.edges().edge(layout.m_nodes[0], layout.m_nodes[1]) == EdgeState::inactive);
  for (std::size_t i = 0; i < 2; ++i)
    EXPECT_TRUE(net.edges().edge(layout.u_line[i], layout.matching[i]) == EdgeState::active);
  EXPECT_TRUE(net.node(0).ctrl.has_value());
  std::vector<Symbol> all;
  for (const auto& rec : layout.input_record) all.insert(all.end(), rec.begin(), rec.end());
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, symbols(tm, "aabb"));
}

TEST(PartitionLine, OddLineHasRedundantNode) {
  const auto tm = load("parity.tm");
  Rng rng(3);
  auto [net, layout] = partition_line(line_config(5), symbols(tm, "abcab"), 0, rng);
  EXPECT_EQ(layout.u_line.size(), 2U);
  EXPECT_EQ(layout.m_nodes.size(), 2U);
  ASSERT_TRUE(layout.redundant_node.has_value());
  EXPECT_EQ(net.node(*layout.redundant_node).role, Role::redundant);
  std::size_t total = 0;
  for (const auto& rec : layout.input_record) total += rec.size();
  EXPECT_EQ(total, 5U);
  sort_input_region(net, layout);
  EXPECT_EQ(input_region(net, layout), symbols(tm, "aabbc"));
}

TEST(PartitionLine, TwoNodesHaveNoCells) {
  const auto tm = load("parity.tm");
  Rng rng(1);
  auto [net, layout] = partition_line(line_config(2), symbols(tm, "ab"), 0, rng);
  EXPECT_EQ(layout.u_line.size(), 1U);
  EXPECT_EQ(layout.cells(), 0U);
}

TEST(PartitionLine, LegalOnAllLinesUpToTwelve) {
  const auto tm = load("parity.tm");
  for (std::size_t n = 2; n <= 12; ++n) {
    std::vector<Symbol> in(n, tm.symbol("a"));
    Rng rng(n);
    auto [net, layout] = partition_line(line_config(n), in, n - 1, rng);
    ASSERT_EQ(layout.u_line.size(), n / 2);
    ASSERT_EQ(layout.matching.size(), n / 2);
    for (std::size_t a = 0; a < layout.m_nodes.size(); ++a)
      for (std::size_t b = a + 1; b < layout.m_nodes.size(); ++b)
        ASSERT_TRUE(net.edges().edge(layout.m_nodes[a], layout.m_nodes[b]) == EdgeState::inactive);
    for (std::size_t i = 0; i + 1 < layout.u_line.size(); ++i)
      ASSERT_TRUE(net.edges().edge(layout.u_line[i], layout.u_line[i + 1]) == EdgeState::active);
    ASSERT_TRUE(net.node(layout.u_line[0]).ctrl.has_value());
  }
}

TEST(Cells, ReadWrite) {
  const auto tm = load("parity.tm");
  auto [net, layout] = layout_on_line(std::vector<Symbol>(10, tm.symbol("a")));
  ASSERT_EQ(layout.cells(), 10U);
  for (std::size_t c = 0; c < layout.cells(); ++c) EXPECT_EQ(read_cell(net, layout, c), 0);
  write_cell(net, layout, 4, 1);
  EXPECT_EQ(read_cell(net, layout, 4), 1);
  for (std::size_t c = 0; c < layout.cells(); ++c) {
    if (c != 4) {
      EXPECT_EQ(cell_value(net, layout, cell_tokens(c)), 0);
    }
  }
  write_cell(net, layout, TokenPair{1, 5}, 1);
  write_cell(net, layout, 4, 0);
  EXPECT_EQ(read_cell(net, layout, 4), 0);
  EXPECT_EQ(read_cell(net, layout, TokenPair{1, 5}), 1);
  EXPECT_THROW(read_cell(net, layout, 10), ModelError);
}

TEST(RunTm, Parity) {
  const auto tm = load("parity.tm");
  auto [net, layout] = layout_on_line(symbols(tm, "ababcaca"));
  const auto r = run_tm(net, layout, tm);
  EXPECT_EQ(r.outcome, TmOutcome::accept);
  auto [net2, layout2] = layout_on_line(symbols(tm, "abbbcaca"));
  EXPECT_EQ(run_tm(net2, layout2, tm).outcome, TmOutcome::reject);
}

TEST(RunTm, Product) {
  const auto tm = load("product.tm");
  auto [yes, lay_yes] = layout_on_line(symbols(tm, "aabbcccc"));
  EXPECT_EQ(run_tm(yes, lay_yes, tm).outcome, TmOutcome::accept);
  auto [no, lay_no] = layout_on_line(symbols(tm, "aabbccc"));
  EXPECT_EQ(run_tm(no, lay_no, tm).outcome, TmOutcome::reject);
}

TEST(RunTm, AcceptAllAndStepLimit) {
  const auto all = load("accept_all.tm");
  auto [net, layout] = layout_on_line(std::vector<Symbol>(4, all.input_alphabet().front()));
  EXPECT_EQ(run_tm(net, layout, all).outcome, TmOutcome::accept);
  const auto parity = load("parity.tm");
  auto [net2, layout2] = layout_on_line(symbols(parity, "aaaaaaaa"));
  EXPECT_EQ(run_tm(net2, layout2, parity, 3).outcome, TmOutcome::step_limit);
}

TEST(EndToEnd, Examples) {
  const auto tm = load("parity.tm");
  const auto ring = compute_predicate_end_to_end(tm, symbols(tm, "aaabbb"), Family::parse("ring"), 4);
  EXPECT_EQ(ring.outcome, TmOutcome::reject);
  EXPECT_FALSE(ring.decision);
  const auto clique = compute_predicate_end_to_end(tm, symbols(tm, "aabcb"), Family::parse("clique"), 4);
  EXPECT_EQ(clique.outcome, TmOutcome::accept);
  EXPECT_EQ(clique.input_region, symbols(tm, "aabbc"));
  EXPECT_EQ(clique.layout.u_line.size(), 2U);
}

TEST(EndToEnd, InvariantUnderPermutationAndTopology) {
  const auto tm = load("product.tm");
  std::vector<Symbol> in = symbols(tm, "abcaaabcc");
  // Four a's, two b's, three c's: 4 * 2 != 3.
  const bool expected = false;
  Rng rng(8);
  for (const char* fam : {"clique", "ring", "line", "random_connected(0.3)"})
    for (int t = 0; t < 3; ++t) {
      std::shuffle(in.begin(), in.end(), rng);
      const auto r = compute_predicate_end_to_end(tm, in, Family::parse(fam), 100 + t);
      EXPECT_EQ(r.decision, expected) << fam;
      EXPECT_NE(r.outcome, TmOutcome::tape_exhausted) << fam;
    }
}

}  // namespace
}  // namespace netcon::tm
