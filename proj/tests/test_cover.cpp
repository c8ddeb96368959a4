#include <gtest/gtest.h>

#include <random>
#include <set>

#include "brute.hpp"
#include "nbwalk/cover.hpp"
#include "nbwalk/montecarlo.hpp"

using namespace nbwalk;

namespace {

// Path graph a - b - c with extra edge c - d; darts: e = a->b (0), f = b->c (2), g = c->d (4).
std::shared_ptr<const Multigraph> line4() { return brute::share(build_graph(4, {{0, 1}, {1, 2}, {2, 3}})); }

std::shared_ptr<const Multigraph> triangle() { return brute::share(make_cycle(3)); }

Path efFg() {
  const auto g = line4();
  return Path{g, 0, {0, 2, 3, 4}};
}

}  // namespace

TEST(Reduce, DartThenReversalIsEmpty) {
  const auto g = line4();
  EXPECT_TRUE(reduce(Path{g, 0, {0, 1}}).empty());
}

TEST(Reduce, LoopTwiceIsEmpty) {
  const auto g = brute::share(make_bouquet(1));
  EXPECT_TRUE(reduce(Path{g, 0, {0, 0}}).empty());
}

TEST(Reduce, InnerPairCancels) {
  const auto p = efFg();
  EXPECT_EQ(reduce(p).darts, (std::vector<DartId>{0, 4}));
}

TEST(Reduce, IdempotentAndMatchesReference) {
  const auto g = brute::share(make_complete(4));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto p = simulate_srw(FiniteOracle(g), 0, 12, rng());
    const auto r = reduce(p);
    EXPECT_EQ(r.darts, brute::erase(p));
    EXPECT_EQ(reduce(r), r);
    EXPECT_TRUE(r.backtrack_free());
  }
}

TEST(LiftTrace, BacktrackFreePathKeepsEveryDart) {
  const auto g = line4();
  const Path p{g, 0, {0, 2, 4, 5, 3}};
  // not backtrack-free; use a cycle instead
  const auto c = triangle();
  const Path q{c, 0, {0, 2, 4, 0, 2}};
  ASSERT_TRUE(q.backtrack_free());
  const auto tr = lift_trace(q);
  EXPECT_EQ(tr.phi, (std::vector<std::size_t>{1, 2, 3, 4, 5}));
  for (auto m : tr.excursions) EXPECT_EQ(m, 0u);
  EXPECT_EQ(tr.pending_excursion, 0u);
  (void)p;
}

TEST(LiftTrace, InnerExcursion) {
  const auto tr = lift_trace(efFg());
  EXPECT_EQ(tr.survivors, (std::vector<DartId>{0, 4}));
  EXPECT_EQ(tr.phi, (std::vector<std::size_t>{1, 4}));
  EXPECT_EQ(tr.excursions, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(tr.pending_excursion, 0u);
}

TEST(LiftTrace, FullCancellationLeavesPendingExcursion) {
  const auto tr = lift_trace(Path{line4(), 0, {0, 1}});
  EXPECT_TRUE(tr.phi.empty());
  EXPECT_TRUE(tr.survivors.empty());
  EXPECT_EQ(tr.pending_excursion, 2u);
}

TEST(LiftTrace, DecompositionIsConsistent) {
  std::mt19937_64 rng(11);
  for (const auto& spec : {FamilySpec::regular_tree(3), FamilySpec::looped_tree(3), FamilySpec::complete(4),
                           FamilySpec::tree_plus_cycle(3, 4)}) {
    const auto oracle = make_oracle(spec);
    for (int i = 0; i < 50; ++i) {
      const auto p = std::visit([&](const auto& g) { return simulate_srw(g, g.root(), 60, rng()); }, oracle);
      const auto tr = lift_trace(p);
      EXPECT_EQ(tr.survivors, brute::erase(p));
      std::size_t total = tr.pending_excursion + tr.phi.size();
      for (std::size_t k = 0; k < tr.phi.size(); ++k) {
        EXPECT_EQ(p.darts[tr.phi[k] - 1], tr.survivors[k]);
        EXPECT_EQ(tr.excursions[k], tr.phi[k] - (k ? tr.phi[k - 1] : 0) - 1);
        EXPECT_EQ(tr.excursions[k] % 2, 0u);
        total += tr.excursions[k];
      }
      EXPECT_EQ(total, p.size());
      EXPECT_EQ(tr.pending_excursion % 2, 0u);
      for (std::size_t t = 0; t <= p.size(); ++t) EXPECT_EQ(tr.depth[t], brute::erase(p.prefix(t)).size());
    }
  }
}

TEST(LiftTrace, EqualStacksShareNodes) {
  const auto g = brute::share(make_complete(4));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto p = simulate_srw(FiniteOracle(g), 0, 16, rng());
    const auto tr = lift_trace(p);
    for (std::size_t a = 0; a <= p.size(); ++a)
      for (std::size_t b = a; b <= p.size(); ++b)
        EXPECT_EQ(tr.node[a] == tr.node[b], brute::erase(p.prefix(a)) == brute::erase(p.prefix(b)));
  }
}

TEST(EscapeTimes, BacktrackFreeTreePathEscapesEverywhere) {
  const RegularTreeOracle t(3);
  const auto p = simulate_nbw(t, t.root(), 20, 5);
  const auto es = escape_times(p);
  ASSERT_EQ(es.size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(es[i], i);
}

TEST(EscapeTimes, FullCancellationHasNone) { EXPECT_TRUE(escape_times(Path{line4(), 0, {0, 1}}).empty()); }

TEST(EscapeTimes, InnerExcursion) { EXPECT_EQ(escape_times(efFg()), (std::vector<std::size_t>{0, 3})); }

TEST(EscapeTimes, MatchBaseGraphDefinitionOnTrees) {
  std::mt19937_64 rng(21);
  for (const auto d : {3u, 4u}) {
    const RegularTreeOracle g(d);
    for (int i = 0; i < 200; ++i) {
      const auto p = simulate_srw(g, g.root(), 30, rng());
      EXPECT_EQ(escape_times(p), brute::escapes(p));
    }
  }
}

TEST(EscapeTimes, MatchCoverDefinitionEverywhere) {
  std::mt19937_64 rng(22);
  for (const auto& spec : {FamilySpec::regular_tree(3), FamilySpec::complete(4), FamilySpec::looped_tree(3),
                           FamilySpec::tree_plus_cycle(3, 4), FamilySpec::bouquet(2)}) {
    const auto oracle = make_oracle(spec);
    for (int i = 0; i < 100; ++i) {
      const auto p = std::visit([&](const auto& g) { return simulate_srw(g, g.root(), 30, rng()); }, oracle);
      EXPECT_EQ(escape_times(p), brute::cover_escapes(p));
    }
  }
}

TEST(Classify, SingleLoop) {
  const auto c = classify_cycle(Path{brute::share(make_bouquet(1)), 0, {0}});
  EXPECT_EQ(c.kind, CycleKind::Nontrivial);
  EXPECT_TRUE(c.fnt);
  EXPECT_EQ(c.fnb, true);
}

TEST(Classify, DartAndReversalIsTrivial) {
  EXPECT_EQ(classify_cycle(Path{line4(), 0, {0, 1}}).kind, CycleKind::Trivial);
}

TEST(Classify, Triangle) {
  const auto c = classify_cycle(Path{triangle(), 0, {0, 2, 4}});
  EXPECT_EQ(c.kind, CycleKind::Nontrivial);
  EXPECT_TRUE(c.fnt);
  EXPECT_EQ(c.fnb, true);
}

TEST(Classify, OpenPathIsNotACycle) { EXPECT_EQ(classify_cycle(efFg()).kind, CycleKind::NotCycle); }

TEST(Classify, LollipopIsNontrivialButNotFnb) {
  // 3 -> 0 -> 1 -> 2 -> 0 -> 3 on a triangle with a pendant vertex
  const auto g = brute::share(build_graph(4, {{0, 1}, {1, 2}, {2, 0}, {0, 3}}));
  const Path p{g, 3, {7, 0, 2, 4, 6}};
  ASSERT_TRUE(p.valid());
  const auto c = classify_cycle(p);
  EXPECT_EQ(c.kind, CycleKind::Nontrivial);
  EXPECT_FALSE(c.fnt);
  EXPECT_EQ(c.fnb, false);
}

TEST(NtCycleTimes, TreePathHasNone) {
  const RegularTreeOracle t(3);
  for (std::uint64_t s = 0; s < 20; ++s) EXPECT_TRUE(nt_cycle_times(simulate_srw(t, t.root(), 200, s)).empty());
}

TEST(NtCycleTimes, SingleLoop) {
  EXPECT_EQ(nt_cycle_times(Path{brute::share(make_bouquet(1)), 0, {0}}), (std::vector<std::size_t>{1}));
}

TEST(NtCycleTimes, TriangleThereAndBack) {
  const Path p{triangle(), 0, {0, 2, 4, 5, 3, 1}};
  ASSERT_TRUE(p.valid());
  EXPECT_EQ(nt_cycle_times(p), (std::vector<std::size_t>{1, 2, 3, 4, 5, 6}));
}

TEST(NtCycleTimes, MatchAllWindowsOnRandomWalks) {
  std::mt19937_64 rng(99);
  for (const auto& spec : {FamilySpec::complete(4), FamilySpec::looped_tree(3), FamilySpec::tree_plus_cycle(3, 4),
                           FamilySpec::cycle(5), FamilySpec::bouquet(2)}) {
    const auto oracle = make_oracle(spec);
    for (int i = 0; i < 60; ++i) {
      const auto p = std::visit([&](const auto& g) { return simulate_srw(g, g.root(), 25, rng()); }, oracle);
      const auto ref = brute::nt_times(p);
      EXPECT_EQ(nt_cycle_times(p), std::vector<std::size_t>(ref.begin(), ref.end()));
    }
  }
}

TEST(NtCycleTimes, HorizonCountsMatchPrefixes) {
  const auto g = brute::share(make_complete(4));
  const auto p = simulate_srw(FiniteOracle(g), 0, 100, 4);
  const std::vector<std::size_t> hs{1, 10, 50, 100};
  const auto counts = nt_cycle_time_counts(p, lift_trace(p), hs);
  for (std::size_t i = 0; i < hs.size(); ++i) EXPECT_EQ(counts[i], brute::nt_times(p.prefix(hs[i])).size());
}

TEST(CycleStats, TreePathIsAllZero) {
  const RegularTreeOracle t(3);
  const auto s = cycle_stats(simulate_srw(t, t.root(), 100, 1), lift_trace(simulate_srw(t, t.root(), 100, 1)), 0.5, 4);
  EXPECT_TRUE(s.nt_times.empty());
  EXPECT_FALSE(s.c_indicator);
  EXPECT_TRUE(s.long_times.empty());
  EXPECT_TRUE(s.loop_times.empty());
  EXPECT_EQ(s.disjoint_fnt, 0u);
  EXPECT_EQ(s.short_times, 0u);
}

TEST(CycleStats, DoubleTriangle) {
  const Path p{triangle(), 0, {0, 2, 4, 0, 2, 4}};
  const auto s = cycle_stats(p, lift_trace(p), 0.5, 10);
  EXPECT_TRUE(s.long_times.empty());
  EXPECT_EQ(s.disjoint_fnt, 2u);
  EXPECT_EQ(s.nt_times.size(), 6u);
}

TEST(CycleStats, SingleLoopExceedsHalf) {
  const Path p{brute::share(make_bouquet(1)), 0, {0}};
  const auto s = cycle_stats(p, lift_trace(p), 0.5, 3);
  EXPECT_TRUE(s.c_indicator);
  EXPECT_EQ(s.loop_times, (std::vector<std::size_t>{1}));
}

TEST(CycleStats, RejectsAlphaOutsideUnitInterval) {
  const Path p{triangle(), 0, {0, 2, 4}};
  EXPECT_THROW(cycle_stats(p, lift_trace(p), 0.0, 3), std::invalid_argument);
  EXPECT_THROW(cycle_stats(p, lift_trace(p), 1.0, 3), std::invalid_argument);
}

TEST(CycleStats, DisjointFntMatchesExhaustiveSearch) {
  std::mt19937_64 rng(5);
  for (const auto& spec : {FamilySpec::complete(4), FamilySpec::bouquet(2), FamilySpec::cycle(3),
                           FamilySpec::tree_plus_cycle(3, 3)}) {
    const auto oracle = make_oracle(spec);
    for (int i = 0; i < 80; ++i) {
      const auto p = std::visit([&](const auto& g) { return simulate_srw(g, g.root(), 12, rng()); }, oracle);
      const auto s = cycle_stats(p, lift_trace(p), 0.5, 4);
      EXPECT_EQ(s.disjoint_fnt, brute::max_disjoint(brute::fnt_windows(p)));
    }
  }
}

TEST(CycleStats, LongAndShortTimesMatchWindows) {
  std::mt19937_64 rng(8);
  const auto oracle = make_oracle(FamilySpec::complete(4));
  for (int i = 0; i < 60; ++i) {
    const auto p = std::visit([&](const auto& g) { return simulate_srw(g, g.root(), 18, rng()); }, oracle);
    const std::size_t L = 3;
    std::set<std::size_t> longer, shorter;
    for (std::size_t s = 1; s <= p.size(); ++s)
      for (std::size_t u = s; u <= p.size(); ++u) {
        const auto w = p.window(s, u);
        if (w.start != w.finish() || brute::erase(w).empty()) continue;
        for (auto t = s; t <= u; ++t) (w.size() > L ? longer : shorter).insert(t);
      }
    const auto st = cycle_stats(p, lift_trace(p), 0.5, L);
    EXPECT_EQ(st.long_times, std::vector<std::size_t>(longer.begin(), longer.end()));
    EXPECT_EQ(st.short_times, shorter.size());
  }
}
