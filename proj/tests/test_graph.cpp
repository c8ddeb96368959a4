#include <gtest/gtest.h>

#include <algorithm>
#include <memory>
#include <queue>

#include "nbwalk/errors.hpp"
#include "nbwalk/multigraph.hpp"
#include "nbwalk/oracle.hpp"

using namespace nbwalk;

namespace {

std::size_t bfs_reached(const Multigraph& g) {
  std::vector<bool> seen(g.vertex_count());
  std::queue<VertexId> q;
  q.push(0);
  seen[0] = true;
  std::size_t n = 1;
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    for (auto e : g.darts_at(v))
      if (!seen[g.head(e)]) seen[g.head(e)] = true, ++n, q.push(g.head(e));
  }
  return n;
}

}  // namespace

TEST(Multigraph, SingleEdgeHasTwoReversedDarts) {
  const auto g = build_graph(std::vector<std::pair<std::string, std::string>>{{"a", "b"}}, {});
  ASSERT_EQ(g.dart_count(), 2u);
  EXPECT_EQ(g.reversal(0), 1u);
  EXPECT_EQ(g.reversal(1), 0u);
  EXPECT_EQ(g.degree(g.require("a")), 1u);
  EXPECT_EQ(g.degree(g.require("b")), 1u);
}

TEST(Multigraph, LoopIsSelfReversed) {
  const auto g = build_graph({}, {"a"});
  ASSERT_EQ(g.dart_count(), 1u);
  EXPECT_EQ(g.reversal(0), 0u);
  EXPECT_TRUE(g.dart(0).is_loop());
  EXPECT_EQ(g.degree(0), 1u);
}

TEST(Multigraph, CompleteFourHasTwelveDartsAndIsCubic) {
  const auto g = make_complete(4);
  EXPECT_EQ(g.dart_count(), 12u);
  for (VertexId v = 0; v < 4; ++v) EXPECT_EQ(g.degree(v), 3u);
  EXPECT_TRUE(g.is_regular(3));
  // every dart appears once in its tail's incidence list
  std::vector<int> seen(12, 0);
  for (VertexId v = 0; v < 4; ++v)
    for (auto e : g.darts_at(v)) {
      EXPECT_EQ(g.tail(e), v);
      ++seen[e];
    }
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

TEST(Multigraph, RejectsNonLoopEdgeOnOneVertex) { EXPECT_THROW(Multigraph().add_edge(0, 0), std::exception); }

TEST(Validate, CompleteFourIsConnectedAndCubic) {
  const auto g = make_complete(4);
  const auto r = validate(g);
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.connected);
  EXPECT_EQ(r.regular_degree, 3u);
  EXPECT_EQ(r.min_degree, 3u);
  EXPECT_EQ(bfs_reached(g), 4u);
}

TEST(Validate, TwoDisjointEdgesAreDisconnected) {
  const auto g = build_graph(std::vector<std::pair<std::string, std::string>>{{"a", "b"}, {"c", "d"}}, {});
  EXPECT_FALSE(validate(g).connected);
  EXPECT_FALSE(validate(g).ok());
}

TEST(Validate, SingleLoopIsConnectedAndOneRegular) {
  const auto r = validate(make_bouquet(1));
  EXPECT_TRUE(r.connected);
  EXPECT_EQ(r.regular_degree, 1u);
}

TEST(Validate, PetersenIsCubicWithFifteenEdges) {
  const auto g = make_petersen();
  EXPECT_EQ(g.dart_count(), 30u);
  EXPECT_TRUE(g.is_regular(3));
  EXPECT_TRUE(validate(g).ok());
}

TEST(GraphJson, RoundTripKeepsNamesEdgesAndLoops) {
  const auto j = nlohmann::json::parse(R"({"vertices":["x","y"],"edges":[["x","y"],["x","y"]],"loops":["y"]})");
  const auto g = graph_from_json(j);
  EXPECT_EQ(g.dart_count(), 5u);
  EXPECT_EQ(g.degree(g.require("y")), 3u);
  const auto back = graph_to_json(g);
  EXPECT_EQ(back["edges"].size(), 2u);
  EXPECT_EQ(back["loops"].size(), 1u);
  EXPECT_EQ(graph_from_json(back).dart_count(), 5u);
}

TEST(GraphJson, MalformedEdgeIsConfigError) {
  EXPECT_THROW(graph_from_json(nlohmann::json::parse(R"({"edges":[["a"]]})")), ConfigError);
  EXPECT_THROW(graph_from_json(nlohmann::json::parse(R"({"edges":[["a",1.5]]})")), ConfigError);
  EXPECT_THROW(graph_from_json(nlohmann::json::parse("[]")), ConfigError);
}

TEST(Oracle, RegularTreeRootHasThreeOrdinaryDarts) {
  const RegularTreeOracle t(3);
  const auto ds = darts_at(t, t.root());
  ASSERT_EQ(ds.size(), 3u);
  for (const auto& e : ds) EXPECT_FALSE(self_reversed(e));
}

TEST(Oracle, StepsAreInvolutions) {
  const RegularTreeOracle t(3);
  const LoopedTreeOracle lt(3);
  const TreePlusCycleOracle tc(3, 4);
  auto check = [](const auto& g) {
    std::vector<typename std::decay_t<decltype(g)>::vertex_type> frontier{g.root()};
    for (int depth = 0; depth < 3; ++depth) {
      decltype(frontier) next;
      for (const auto& v : frontier)
        for (Port p = 0; p < g.degree(v); ++p) {
          const auto s = g.step(v, p);
          const auto back = g.step(s.head, s.reverse_port);
          EXPECT_TRUE(back.head == v);
          EXPECT_EQ(back.reverse_port, p);
          EXPECT_TRUE(g.parse_key(g.canonical_key(s.head)) == s.head);
          next.push_back(s.head);
        }
      frontier = std::move(next);
    }
  };
  check(t);
  check(lt);
  check(tc);
}

TEST(Oracle, LoopedTreeHasOneLoopEverywhere) {
  const LoopedTreeOracle g(3);
  for (const auto& key : {"", "a", "ab", "ba", "aba"}) {
    const auto v = g.parse_key(key);
    const auto ds = darts_at(g, v);
    ASSERT_EQ(ds.size(), 3u);
    EXPECT_EQ(std::count_if(ds.begin(), ds.end(), [](const auto& e) { return self_reversed(e); }), 1);
  }
}

TEST(Oracle, FiniteAdapterMatchesIncidence) {
  const auto g = std::make_shared<const Multigraph>(make_complete(4));
  const FiniteOracle o(g);
  for (VertexId v = 0; v < 4; ++v) {
    ASSERT_EQ(o.degree(v), g->degree(v));
    for (Port p = 0; p < o.degree(v); ++p) {
      const auto e = g->darts_at(v)[p];
      const auto s = o.step(v, p);
      EXPECT_EQ(s.head, g->head(e));
      EXPECT_EQ(g->darts_at(s.head)[s.reverse_port], g->reversal(e));
    }
  }
}

TEST(Oracle, TreePlusCycleHasOneCycleOfLengthL) {
  const TreePlusCycleOracle g(3, 4);
  const auto b = ball(g, g.root(), 4);
  // edges minus vertices plus one is the cycle rank
  const auto loops = std::count_if(b.graph.darts().begin(), b.graph.darts().end(), [](const Dart& e) { return e.is_loop(); });
  EXPECT_EQ(loops, 0);
  EXPECT_EQ(b.graph.dart_count() / 2 + 1, b.graph.vertex_count() + 1);
}

TEST(Oracle, FamilyErrors) {
  EXPECT_THROW(make_oracle(FamilySpec::regular_tree(1)), ConfigError);
  EXPECT_THROW(make_oracle(FamilySpec::cycle(2)), ConfigError);
  EXPECT_THROW(make_oracle(FamilySpec::complete(1)), ConfigError);
  EXPECT_THROW(make_oracle(FamilySpec::bouquet(0)), ConfigError);
  EXPECT_THROW(make_oracle(FamilySpec::from_json(nlohmann::json{{"family", "nope"}})), ConfigError);
}

TEST(Ball, TreeRadiusOne) {
  const RegularTreeOracle t(3);
  const auto b = ball(t, t.root(), 1);
  EXPECT_EQ(b.graph.vertex_count(), 4u);
  EXPECT_EQ(b.graph.dart_count(), 6u);
  EXPECT_EQ(b.boundary_size(), 3u);
}

TEST(Ball, TreeRadiusTwo) {
  const RegularTreeOracle t(3);
  const auto b = ball(t, t.root(), 2);
  EXPECT_EQ(b.graph.vertex_count(), 10u);
  EXPECT_EQ(b.graph.dart_count(), 18u);
}

TEST(Ball, FiniteBallIsWholeGraph) {
  const FiniteOracle k4(std::make_shared<const Multigraph>(make_complete(4)));
  const auto b = ball(k4, k4.root(), 10);
  EXPECT_EQ(b.graph.vertex_count(), 4u);
  EXPECT_EQ(b.graph.dart_count(), 12u);
  EXPECT_EQ(b.boundary_size(), 0u);
}

TEST(Ball, SizeGuardNamesItself) {
  const RegularTreeOracle t(3);
  try {
    ball(t, t.root(), 20, 1000);
    FAIL() << "expected a guard";
  } catch (const ResourceGuardError& e) {
    EXPECT_EQ(e.guard(), "ball-size");
  }
}
