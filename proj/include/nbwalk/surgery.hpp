#pragma once

// Injective path transforms used to compare counts of path families:
// cycle excision, closing a path into a cycle, and turning NB-cycles into
// cyclically reduced ones.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nbwalk/cover.hpp"
#include "nbwalk/intervals.hpp"

namespace nbwalk {

/// Every window [s, u] (1-based, inclusive) along which the path is closed.
inline std::vector<Interval> cycle_windows(const Path& p) {
  std::vector<Interval> out;
  for (std::size_t s = 1; s <= p.size(); ++s) {
    const auto v = p.vertex_at(s - 1);
    for (std::size_t u = s; u <= p.size(); ++u)
      if (p.vertex_at(u) == v) out.push_back({s, u});
  }
  return out;
}

/// Number of times covered by some cycle window.
inline std::size_t cycle_time_count(const Path& p) { return covered_points(cycle_windows(p)); }

inline bool has_cycle(const Path& p) {
  std::vector<bool> seen(p.graph->vertex_count(), false);
  for (std::size_t t = 0; t <= p.size(); ++t) {
    const auto v = p.vertex_at(t);
    if (seen[v]) return true;
    seen[v] = true;
  }
  return false;
}

struct ExciseResult {
  Path path;
  std::vector<Interval> removed;  // windows cut out of the input
  std::size_t rounds = 0;
};

/// Cuts a largest-first disjoint family of cycle windows out of p, joins the
/// remaining darts and erases backtracks. Joining can create a cycle that
/// the input did not have as a window, so the step repeats until no cycle
/// is left; the first round is the classical one.
inline ExciseResult reduce_excise(const Path& p) {
  if (!p.backtrack_free()) throw std::invalid_argument("reduce_excise: path has a backtrack");
  ExciseResult r{p, {}, 0};
  while (has_cycle(r.path)) {
    const auto chosen = vitali_select(cycle_windows(r.path));
    std::vector<bool> cut(r.path.size() + 1, false);
    for (const auto& iv : chosen)
      for (auto t = iv.lo; t <= iv.hi; ++t) cut[t] = true;
    Path joined{r.path.graph, r.path.start, {}};
    for (std::size_t t = 1; t <= r.path.size(); ++t)
      if (!cut[t]) joined.darts.push_back(r.path.darts[t - 1]);
    if (r.rounds == 0) r.removed = chosen;
    r.path = reduce(joined);
    ++r.rounds;
  }
  return r;
}

/// True when the last dart of p ends at a vertex visited before (the start
/// included), i.e. the final dart completes a cycle.
inline bool ends_in_cycle(const Path& p) {
  if (p.empty()) return false;
  const auto v = p.finish();
  for (std::size_t t = 0; t < p.size(); ++t)
    if (p.vertex_at(t) == v) return true;
  return false;
}

struct ClosedCycle {
  Path cycle;
  std::size_t m = 0;           // first prefix ending where p ends
  std::size_t s = 0;           // the excised path ends with darts s+1..n of p
  std::size_t final_cycle = 0; // n - m
  std::size_t cycle_times = 0;
};

/// Extends a backtrack-free path whose last dart closes a cycle into a
/// backtrack-free closed path that starts with the whole input.
///
/// With P' the excised path, s is minimal such that P' ends in the darts
/// s+1..n of p (s = n when it does not end in the last dart). The result is
/// p . reverse(P') when s = n, else p . (darts m+1..s of p) . reverse(head of
/// P' before that suffix).
inline ClosedCycle close_to_cycle(const Path& p) {
  if (!p.backtrack_free()) throw std::invalid_argument("close_to_cycle: path has a backtrack");
  if (!ends_in_cycle(p)) throw std::invalid_argument("close_to_cycle: last dart does not complete a cycle");
  const auto n = p.size();
  ClosedCycle out;
  const auto v = p.finish();
  while (p.vertex_at(out.m) != v) ++out.m;
  out.final_cycle = n - out.m;
  out.cycle_times = cycle_time_count(p);

  const auto excised = reduce_excise(p).path;
  std::size_t common = 0;
  while (common < excised.size() && common < n &&
         excised.darts[excised.size() - 1 - common] == p.darts[n - 1 - common])
    ++common;
  out.s = n - common;

  Path hat{p.graph, p.start,
           std::vector<DartId>(excised.darts.begin(), excised.darts.end() - static_cast<std::ptrdiff_t>(common))};
  Path c = p;
  if (common > 0)
    for (std::size_t t = out.m + 1; t <= out.s; ++t) c.darts.push_back(p.darts[t - 1]);
  const auto back = reversed(hat);
  c.darts.insert(c.darts.end(), back.darts.begin(), back.darts.end());
  out.cycle = std::move(c);
  return out;
}

/// Maps an NB-cycle at x whose last dart is the reversal of its first onto a
/// cyclically reduced NB-cycle at x, using a simple cycle `base` through x.
/// A final loop is dropped. Otherwise the maximal tail of c running along
/// the base cycle (in whichever direction it runs) is rerouted: with the
/// tail entering the base at its k-th dart, the partial lap is replaced by
/// the reversed darts k-1..1 and the remaining full laps are reversed. If
/// the last dart is not on the base at all, one lap of the base is appended.
inline Path fnb_injection(const Path& c, const Path& base) {
  const auto& g = *c.graph;
  if (c.empty() || c.start != c.finish() || !c.backtrack_free())
    throw std::invalid_argument("fnb_injection: input is not an NB-cycle");
  if (base.empty() || base.start != c.start || base.finish() != c.start || !base.backtrack_free())
    throw std::invalid_argument("fnb_injection: base is not a cycle at the same vertex");
  const auto cls = classify_cycle(c);
  if (cls.fnb.value_or(false)) throw std::invalid_argument("fnb_injection: cycle is already cyclically reduced");

  const auto last = c.darts.back();
  if (g.dart(last).is_loop()) {
    Path out = c;
    out.darts.pop_back();
    return out;
  }

  const auto L = base.size();
  std::vector<std::optional<std::size_t>> fwd(g.dart_count()), bwd(g.dart_count());
  for (std::size_t i = 0; i < L; ++i) fwd[base.darts[i]] = i;
  const auto rbase = reversed(base);
  for (std::size_t i = 0; i < L; ++i) bwd[rbase.darts[i]] = i;

  const bool forward = fwd[last].has_value();
  if (!forward && !bwd[last]) {
    Path out = c;
    out.darts.insert(out.darts.end(), base.darts.begin(), base.darts.end());
    return out;
  }
  const Path& cyc = forward ? base : rbase;
  const auto& index = forward ? fwd : bwd;

  // Maximal suffix of c made of darts of the oriented base cycle.
  std::size_t begin = c.size();
  while (begin > 0 && index[c.darts[begin - 1]]) --begin;
  const auto k = *index[c.darts[begin]];  // 0-based position of the entry dart on the base
  const auto partial = L - k;               // darts k..L-1 finish the first lap
  const auto laps_len = c.size() - begin - partial;

  Path out{c.graph, c.start, std::vector<DartId>(c.darts.begin(), c.darts.begin() + static_cast<std::ptrdiff_t>(begin))};
  for (std::size_t i = k; i-- > 0;) out.darts.push_back(g.reversal(cyc.darts[i]));
  for (std::size_t j = 0; j < laps_len; ++j) {
    const auto& d = c.darts[c.size() - 1 - j];
    out.darts.push_back(g.reversal(d));
  }
  return out;
}

}  // namespace nbwalk
