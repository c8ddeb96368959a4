#pragma once

// Closed integer intervals and greedy disjoint selection.

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <map>
#include <numeric>
#include <vector>

namespace nbwalk {

struct Interval {
  std::size_t lo = 0;
  std::size_t hi = 0;

  std::size_t length() const noexcept { return hi - lo; }
  std::size_t points() const noexcept { return hi - lo + 1; }
  bool intersects(const Interval& o) const noexcept { return lo <= o.hi && o.lo <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Largest-first greedy: intervals are taken by decreasing length, ties by
/// smaller lo then smaller hi, whenever they share no integer with an
/// interval already taken. The result keeps the input order.
inline std::vector<Interval> vitali_select(const std::vector<Interval>& in) {
  std::vector<std::size_t> order(in.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&in](std::size_t a, std::size_t b) {
    const auto& x = in[a];
    const auto& y = in[b];
    if (x.length() != y.length()) return x.length() > y.length();
    if (x.lo != y.lo) return x.lo < y.lo;
    return x.hi < y.hi;
  });
  std::map<std::size_t, std::size_t> taken;  // lo -> hi of chosen intervals
  std::vector<bool> keep(in.size(), false);
  for (auto i : order) {
    const auto& iv = in[i];
    auto it = taken.upper_bound(iv.hi);  // first chosen interval starting right of iv
    if (it != taken.begin() && std::prev(it)->second >= iv.lo) continue;
    taken.emplace(iv.lo, iv.hi);
    keep[i] = true;
  }
  std::vector<Interval> out;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (keep[i]) out.push_back(in[i]);
  return out;
}

inline std::size_t total_length(const std::vector<Interval>& v) {
  std::size_t s = 0;
  for (const auto& iv : v) s += iv.length();
  return s;
}

/// Number of integers covered by the union.
inline std::size_t covered_points(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::size_t total = 0;
  bool open = false;
  Interval cur;
  for (const auto& iv : v) {
    if (open && iv.lo <= cur.hi + 1) {
      cur.hi = std::max(cur.hi, iv.hi);
      continue;
    }
    if (open) total += cur.points();
    cur = iv;
    open = true;
  }
  if (open) total += cur.points();
  return total;
}

/// Lebesgue measure of the union of the real intervals [lo, hi].
inline std::size_t covered_length(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::size_t total = 0;
  bool open = false;
  Interval cur;
  for (const auto& iv : v) {
    if (open && iv.lo <= cur.hi) {
      cur.hi = std::max(cur.hi, iv.hi);
      continue;
    }
    if (open) total += cur.length();
    cur = iv;
    open = true;
  }
  if (open) total += cur.length();
  return total;
}

}  // namespace nbwalk
