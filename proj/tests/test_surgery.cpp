#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "brute.hpp"
#include "nbwalk/intervals.hpp"
#include "nbwalk/surgery.hpp"

using namespace nbwalk;

TEST(Vitali, LongIntervalSwallowsShortOnes) {
  const std::vector<Interval> in{{0, 10}, {2, 3}, {4, 5}};
  const auto out = vitali_select(in);
  EXPECT_EQ(out, (std::vector<Interval>{{0, 10}}));
  EXPECT_GE(3 * total_length(out), total_length(in));
}

TEST(Vitali, EqualLengthsBoundaryCase) {
  const std::vector<Interval> in{{0, 2}, {1, 3}, {2, 4}};
  const auto out = vitali_select(in);
  EXPECT_EQ(out, (std::vector<Interval>{{0, 2}}));
  EXPECT_EQ(3 * total_length(out), total_length(in));
}

TEST(Vitali, DisjointInputUnchanged) {
  const std::vector<Interval> in{{5, 6}, {0, 3}, {8, 12}};
  EXPECT_EQ(vitali_select(in), in);
}

TEST(Vitali, OutputIsDisjointAndTripledCoversUnion) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Interval> in;
    const auto k = 1 + rng() % 12;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t lo = rng() % 50, len = rng() % 15;
      in.push_back({lo, lo + len});
    }
    const auto out = vitali_select(in);
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = i + 1; j < out.size(); ++j) EXPECT_FALSE(out[i].intersects(out[j]));
    // every input interval meets a chosen one at least as long
    for (const auto& iv : in) {
      bool hit = false;
      for (const auto& c : out) hit |= c.intersects(iv) && c.length() >= iv.length();
      EXPECT_TRUE(hit);
    }
  }
}

TEST(CoveredPoints, CountsUnion) {
  EXPECT_EQ(covered_points({{1, 3}, {2, 5}, {8, 8}}), 6u);
  EXPECT_EQ(covered_points({}), 0u);
}

TEST(ReduceExcise, CycleFreePathUnchanged) {
  const auto g = brute::share(build_graph(4, {{0, 1}, {1, 2}, {2, 3}}));
  const Path p{g, 0, {0, 2, 4}};
  EXPECT_EQ(reduce_excise(p).path, p);
}

TEST(ReduceExcise, FullTriangleVanishes) {
  const Path p{brute::share(make_cycle(3)), 0, {0, 2, 4}};
  EXPECT_TRUE(reduce_excise(p).path.empty());
}

TEST(ReduceExcise, TriangleThenFreshEdge) {
  const auto g = brute::share(build_graph(4, {{0, 1}, {1, 2}, {2, 0}, {0, 3}}));
  const Path p{g, 0, {0, 2, 4, 6}};
  ASSERT_TRUE(p.valid() && p.backtrack_free());
  const auto r = reduce_excise(p).path;
  EXPECT_LE(r.size() + 1, p.size());
  EXPECT_LE(r.size(), 1u);
  EXPECT_EQ(r.finish(), 3u);
  EXPECT_FALSE(has_cycle(r));
}

TEST(ReduceExcise, ResultIsCycleFreeAndKeepsEndpoints) {
  const auto g = brute::share(make_complete(4));
  for (std::size_t n = 1; n <= 7; ++n)
    brute::for_each_nb_walk(g, 0, n, [&](const Path& p) {
      const auto r = reduce_excise(p);
      EXPECT_FALSE(has_cycle(r.path));
      EXPECT_TRUE(r.path.backtrack_free());
      EXPECT_EQ(r.path.start, p.start);
      EXPECT_EQ(r.path.finish(), p.finish());
    });
}

TEST(CloseToCycle, Triangle) {
  const Path p{brute::share(make_cycle(3)), 0, {0, 2, 4}};
  const auto c = close_to_cycle(p).cycle;
  EXPECT_EQ(c.start, c.finish());
  EXPECT_TRUE(c.backtrack_free());
  EXPECT_LE(c.size(), 6u);
}

TEST(CloseToCycle, StemThenTriangle) {
  // 0 - 1 - 2 - 3 with a triangle 3, 4, 5
  const auto g = brute::share(build_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 3}}));
  const Path p{g, 0, {0, 2, 4, 6, 8, 10}};
  ASSERT_TRUE(p.valid() && ends_in_cycle(p));
  const auto c = close_to_cycle(p).cycle;
  EXPECT_EQ(c.start, c.finish());
  ASSERT_GE(c.size(), p.size());
  EXPECT_EQ(c.prefix(p.size()), p);
}

TEST(CloseToCycle, RejectsOpenEnding) {
  const Path p{brute::share(build_graph(3, {{0, 1}, {1, 2}})), 0, {0, 2}};
  EXPECT_THROW(close_to_cycle(p), std::invalid_argument);
}

namespace {

// Two vertices joined by three parallel edges: darts 0/1, 2/3, 4/5 (even = a -> b).
std::shared_ptr<const Multigraph> theta() { return brute::share(build_graph(2, {{0, 1}, {0, 1}, {0, 1}})); }

}  // namespace

TEST(FnbInjection, ThetaGraphMinimalCase) {
  const auto g = theta();
  const Path c{g, 0, {0, 3, 4, 1}};
  const Path base{g, 0, {0, 3}};
  ASSERT_FALSE(*classify_cycle(c).fnb);
  const auto out = fnb_injection(c, base);
  EXPECT_EQ(out.start, out.finish());
  EXPECT_TRUE(out.backtrack_free());
  EXPECT_EQ(classify_cycle(out).fnb, true);
  EXPECT_GE(out.size(), 1u);
  EXPECT_LE(out.size(), c.size() + base.size() - 2);
}

TEST(FnbInjection, FinalLoopIsStripped) {
  const auto g = brute::share(build_graph(2, {{0, 1}, {0, 1}}, {0}));
  const Path c{g, 0, {4, 0, 3, 4}};
  ASSERT_TRUE(c.valid() && c.backtrack_free());
  const Path base{g, 0, {0, 3}};
  const auto out = fnb_injection(c, base);
  EXPECT_EQ(out.size(), c.size() - 1);
  EXPECT_EQ(classify_cycle(out).fnb, true);
}

TEST(FnbInjection, InjectiveAndCyclicallyReducedOnTheta) {
  const auto g = theta();
  for (const Path base : {Path{g, 0, {0, 3}}, Path{g, 0, {2, 5}}, Path{g, 0, {4, 1}}}) {
    std::map<std::vector<DartId>, std::vector<DartId>> seen;
    for (std::size_t n = 2; n <= 8; ++n)
      brute::for_each_nb_walk(g, 0, n, [&](const Path& c) {
        if (c.finish() != 0 || *classify_cycle(c).fnb) return;
        const auto out = fnb_injection(c, base);
        EXPECT_EQ(out.start, out.finish());
        EXPECT_EQ(classify_cycle(out).fnb, true);
        EXPECT_TRUE(seen.emplace(out.darts, c.darts).second) << "collision";
      });
    EXPECT_FALSE(seen.empty());
  }
}
