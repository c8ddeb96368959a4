#pragma once

// Paths in a multigraph and their lifts to the universal cover.
//
// Times are 1-based: darts[0] is X_1, and prefix t means (X_1, ..., X_t).
// The lift of a prefix is recorded as a cover-tree node: two prefixes end at
// the same node iff their backtrack erasures are equal.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nbwalk/multigraph.hpp"

namespace nbwalk {

struct Path {
  std::shared_ptr<const Multigraph> graph;
  VertexId start = 0;
  std::vector<DartId> darts;

  std::size_t size() const noexcept { return darts.size(); }
  bool empty() const noexcept { return darts.empty(); }
  VertexId finish() const { return darts.empty() ? start : graph->head(darts.back()); }

  /// Vertex after t darts (t = 0 is the start).
  VertexId vertex_at(std::size_t t) const { return t == 0 ? start : graph->head(darts[t - 1]); }

  bool valid() const {
    if (!graph || start >= graph->vertex_count()) return false;
    VertexId at = start;
    for (auto e : darts) {
      if (e >= graph->dart_count() || graph->tail(e) != at) return false;
      at = graph->head(e);
    }
    return true;
  }

  bool backtrack_free() const {
    for (std::size_t i = 1; i < darts.size(); ++i)
      if (darts[i] == graph->reversal(darts[i - 1])) return false;
    return true;
  }

  Path prefix(std::size_t t) const {
    return {graph, start, std::vector<DartId>(darts.begin(), darts.begin() + static_cast<std::ptrdiff_t>(t))};
  }

  /// Darts s..u inclusive, 1-based.
  Path window(std::size_t s, std::size_t u) const {
    return {graph, vertex_at(s - 1),
            std::vector<DartId>(darts.begin() + static_cast<std::ptrdiff_t>(s - 1),
                                darts.begin() + static_cast<std::ptrdiff_t>(u))};
  }

  friend bool operator==(const Path& a, const Path& b) {
    return a.graph == b.graph && a.start == b.start && a.darts == b.darts;
  }
};

inline Path reversed(const Path& p) {
  Path r{p.graph, p.finish(), {}};
  r.darts.reserve(p.size());
  for (auto it = p.darts.rbegin(); it != p.darts.rend(); ++it) r.darts.push_back(p.graph->reversal(*it));
  return r;
}

inline Path concat(const Path& a, const Path& b) {
  if (a.finish() != b.start) throw std::invalid_argument("concat: paths do not meet");
  Path r = a;
  r.darts.insert(r.darts.end(), b.darts.begin(), b.darts.end());
  return r;
}

/// Backtrack erasure: a dart equal to the reversal of the stack top pops it.
inline Path reduce(const Path& p) {
  Path r{p.graph, p.start, {}};
  for (auto e : p.darts) {
    if (!r.darts.empty() && e == p.graph->reversal(r.darts.back()))
      r.darts.pop_back();
    else
      r.darts.push_back(e);
  }
  return r;
}

struct LiftTrace {
  std::vector<std::size_t> depth;        // per prefix 0..n
  std::vector<std::uint32_t> node;       // cover-tree node per prefix 0..n; 0 is the start
  std::vector<std::size_t> phi;          // 1-based positions of the survivors
  std::vector<std::size_t> excursions;   // M_k: erased darts just before the k-th survivor
  std::size_t pending_excursion = 0;     // erased darts after the last survivor
  std::vector<DartId> survivors;

  std::size_t horizon() const noexcept { return depth.empty() ? 0 : depth.size() - 1; }
};

/// Interns cover-tree nodes by (parent node, dart) so that equal stacks get
/// equal ids. Shared across prefixes of one path.
class CoverTree {
 public:
  CoverTree() : parent_{0}, dart_{0} {}

  std::uint32_t child(std::uint32_t node, DartId e) {
    const auto key = (static_cast<std::uint64_t>(node) << 32) | e;
    auto [it, fresh] = ids_.try_emplace(key, static_cast<std::uint32_t>(parent_.size()));
    if (fresh) {
      parent_.push_back(node);
      dart_.push_back(e);
    }
    return it->second;
  }
  std::uint32_t parent(std::uint32_t node) const { return parent_[node]; }
  DartId dart(std::uint32_t node) const { return dart_[node]; }
  std::size_t size() const noexcept { return parent_.size(); }

 private:
  std::unordered_map<std::uint64_t, std::uint32_t> ids_;
  std::vector<std::uint32_t> parent_;
  std::vector<DartId> dart_;
};

inline LiftTrace lift_trace(const Path& p) {
  const auto n = p.size();
  LiftTrace tr;
  tr.depth.reserve(n + 1);
  tr.node.reserve(n + 1);
  tr.depth.push_back(0);
  tr.node.push_back(0);
  CoverTree tree;
  std::vector<std::size_t> pushed_at;  // time each stack entry was pushed
  std::uint32_t node = 0;
  for (std::size_t t = 1; t <= n; ++t) {
    const auto e = p.darts[t - 1];
    if (!tr.survivors.empty() && e == p.graph->reversal(tr.survivors.back())) {
      tr.survivors.pop_back();
      pushed_at.pop_back();
      node = tree.parent(node);
    } else {
      tr.survivors.push_back(e);
      pushed_at.push_back(t);
      node = tree.child(node, e);
    }
    tr.depth.push_back(tr.survivors.size());
    tr.node.push_back(node);
  }
  tr.phi = std::move(pushed_at);
  std::size_t prev = 0;
  for (auto f : tr.phi) {
    tr.excursions.push_back(f - prev - 1);
    prev = f;
  }
  tr.pending_excursion = n - prev;
  return tr;
}

/// Horizon-relative escape times {Phi(k) - 1}, as 0-based times.
inline std::vector<std::size_t> escape_times(const LiftTrace& tr) {
  std::vector<std::size_t> out;
  out.reserve(tr.phi.size());
  for (auto f : tr.phi) out.push_back(f - 1);
  return out;
}

inline std::vector<std::size_t> escape_times(const Path& p) { return escape_times(lift_trace(p)); }

enum class CycleKind { NotCycle, Trivial, Nontrivial };

struct CycleClass {
  CycleKind kind = CycleKind::NotCycle;
  bool fnt = false;
  std::optional<bool> fnb;  // only decided for backtrack-free paths
};

inline const char* to_string(CycleKind k) {
  switch (k) {
    case CycleKind::NotCycle: return "not_cycle";
    case CycleKind::Trivial: return "trivial_cycle";
    case CycleKind::Nontrivial: return "nt_cycle";
  }
  return "?";
}

inline CycleClass classify_cycle(const Path& p) {
  CycleClass c;
  if (p.empty() || p.start != p.finish()) return c;
  const auto& g = *p.graph;
  const bool single_loop = p.size() == 1 && g.dart(p.darts[0]).is_loop();
  c.kind = reduce(p).empty() ? CycleKind::Trivial : CycleKind::Nontrivial;
  c.fnt = c.kind == CycleKind::Nontrivial && (single_loop || p.darts.front() != g.reversal(p.darts.back()));
  if (p.backtrack_free()) c.fnb = single_loop || p.darts.back() != g.reversal(p.darts.front());
  return c;
}

/// Union of integer intervals arriving with non-decreasing right ends.
class RightGrowingUnion {
 public:
  void add(std::size_t lo, std::size_t hi) {
    while (!runs_.empty() && runs_.back().second + 1 >= lo) {
      lo = std::min(lo, runs_.back().first);
      measure_ -= runs_.back().second - runs_.back().first + 1;
      runs_.pop_back();
    }
    runs_.emplace_back(lo, hi);
    measure_ += hi - lo + 1;
  }
  std::size_t measure() const noexcept { return measure_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& runs() const noexcept { return runs_; }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    out.reserve(measure_);
    for (auto [lo, hi] : runs_)
      for (auto t = lo; t <= hi; ++t) out.push_back(t);
    return out;
  }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> runs_;
  std::size_t measure_ = 0;
};

/// For each prefix u, the smallest i < u whose prefix ends at the same base
/// vertex but a different cover node, i.e. the widest NT-cycle window
/// (i+1 .. u) closing at time u. Windows (i+1 .. u) with i >= that minimum
/// need not be NT themselves, but every NT window ending at u lies inside.
class WidestCycleScanner {
 public:
  explicit WidestCycleScanner(std::size_t vertex_count) : first_(vertex_count) {}

  std::optional<std::size_t> push(std::size_t u, VertexId v, std::uint32_t node) {
    auto& f = first_[v];
    if (!f.seen) {
      f = {true, u, node, std::nullopt};
      return std::nullopt;
    }
    if (node != f.node) {
      if (!f.other) f.other = u;
      return f.index;
    }
    return f.other;
  }

 private:
  struct First {
    bool seen = false;
    std::size_t index = 0;
    std::uint32_t node = 0;
    std::optional<std::size_t> other;
  };
  std::vector<First> first_;
};

/// Number of NT-cycle times of the prefix of each requested length.
inline std::vector<std::size_t> nt_cycle_time_counts(const Path& p, const LiftTrace& tr,
                                                     std::vector<std::size_t> horizons) {
  std::sort(horizons.begin(), horizons.end());
  std::vector<std::size_t> out;
  WidestCycleScanner scan(p.graph->vertex_count());
  RightGrowingUnion times;
  scan.push(0, p.start, tr.node[0]);
  std::size_t h = 0;
  while (h < horizons.size() && horizons[h] == 0) out.push_back(0), ++h;
  for (std::size_t u = 1; u <= p.size() && h < horizons.size(); ++u) {
    if (auto i = scan.push(u, p.vertex_at(u), tr.node[u])) times.add(*i + 1, u);
    while (h < horizons.size() && horizons[h] == u) out.push_back(times.measure()), ++h;
  }
  while (h < horizons.size()) out.push_back(times.measure()), ++h;
  return out;
}

inline std::vector<std::size_t> nt_cycle_times(const Path& p, const LiftTrace& tr) {
  WidestCycleScanner scan(p.graph->vertex_count());
  RightGrowingUnion times;
  scan.push(0, p.start, tr.node[0]);
  for (std::size_t u = 1; u <= p.size(); ++u)
    if (auto i = scan.push(u, p.vertex_at(u), tr.node[u])) times.add(*i + 1, u);
  return times.members();
}

inline std::vector<std::size_t> nt_cycle_times(const Path& p) { return nt_cycle_times(p, lift_trace(p)); }

struct CycleStats {
  std::size_t n = 0;
  double alpha = 0;
  std::size_t L = 0;
  std::vector<std::size_t> nt_times;
  bool c_indicator = false;              // |nt_times| > alpha n
  std::vector<std::size_t> long_times;   // I(n, L): times inside NT cycles of more than L darts
  std::vector<std::size_t> loop_times;   // loop times outside I(n, L)
  std::size_t disjoint_fnt = 0;          // D(n): disjoint non-loop FNT-cycle windows
  std::vector<std::pair<std::size_t, std::size_t>> fnt_selection;
  std::size_t short_times = 0;           // times inside NT cycles of at most L darts
};

/// Maximum number of pairwise disjoint FNT-cycle windows of two or more
/// darts, by earliest-end-first selection. Returns the chosen windows.
inline std::vector<std::pair<std::size_t, std::size_t>> disjoint_fnt_windows(const Path& p, const LiftTrace& tr) {
  const auto& g = *p.graph;
  std::vector<std::vector<std::size_t>> at(g.vertex_count());  // prefixes per base vertex
  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  std::size_t free_from = 0;  // windows must start after this time
  at[p.start].push_back(0);
  for (std::size_t u = 1; u <= p.size(); ++u) {
    const auto v = p.vertex_at(u);
    auto& group = at[v];
    const auto last = p.darts[u - 1];
    // Windows (i+1 .. u) with i >= free_from, at least two darts.
    for (auto it = group.rbegin(); it != group.rend() && *it >= free_from; ++it) {
      const auto i = *it;
      if (i + 2 > u) continue;
      if (tr.node[i] == tr.node[u]) continue;
      if (p.darts[i] == g.reversal(last)) continue;
      chosen.emplace_back(i + 1, u);
      free_from = u;
      break;
    }
    group.push_back(u);
  }
  return chosen;
}

inline CycleStats cycle_stats(const Path& p, const LiftTrace& tr, double alpha, std::size_t L) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("cycle_stats: alpha must lie in (0, 1)");
  if (L < 1) throw std::invalid_argument("cycle_stats: L must be at least 1");
  const auto n = p.size();
  CycleStats s;
  s.n = n;
  s.alpha = alpha;
  s.L = L;

  WidestCycleScanner scan(p.graph->vertex_count());
  RightGrowingUnion all, longer, shorter;
  std::vector<std::vector<std::size_t>> at(p.graph->vertex_count());
  scan.push(0, p.start, tr.node[0]);
  at[p.start].push_back(0);
  for (std::size_t u = 1; u <= n; ++u) {
    const auto v = p.vertex_at(u);
    if (auto i = scan.push(u, v, tr.node[u])) {
      all.add(*i + 1, u);
      if (u - *i > L) longer.add(*i + 1, u);
    }
    // Widest NT window of at most L darts closing at u.
    auto& group = at[v];
    std::optional<std::size_t> widest;
    for (auto it = group.rbegin(); it != group.rend() && u - *it <= L; ++it)
      if (tr.node[*it] != tr.node[u]) widest = *it;
    if (widest) shorter.add(*widest + 1, u);
    group.push_back(u);
  }
  s.nt_times = all.members();
  s.c_indicator = static_cast<double>(s.nt_times.size()) > alpha * static_cast<double>(n);
  s.long_times = longer.members();
  std::vector<bool> in_long(n + 1, false);
  for (auto t : s.long_times) in_long[t] = true;
  for (std::size_t t = 1; t <= n; ++t)
    if (!in_long[t] && p.graph->dart(p.darts[t - 1]).is_loop()) s.loop_times.push_back(t);
  s.fnt_selection = disjoint_fnt_windows(p, tr);
  s.disjoint_fnt = s.fnt_selection.size();
  s.short_times = shorter.measure();
  return s;
}

inline CycleStats cycle_stats(const Path& p, double alpha, std::size_t L) {
  return cycle_stats(p, lift_trace(p), alpha, L);
}

inline nlohmann::json to_json(const Path& p) {
  return {{"start", p.graph->name(p.start)}, {"darts", p.darts}};
}

inline nlohmann::json to_json(const LiftTrace& tr) {
  return {{"horizon", tr.horizon()},
          {"depth", tr.depth},
          {"phi", tr.phi},
          {"excursions", tr.excursions},
          {"pending_excursion", tr.pending_excursion},
          {"survivors", tr.survivors}};
}

inline nlohmann::json to_json(const CycleStats& s) {
  nlohmann::json sel = nlohmann::json::array();
  for (auto [a, b] : s.fnt_selection) sel.push_back({a, b});
  return {{"n", s.n},
          {"alpha", s.alpha},
          {"L", s.L},
          {"nt_time_count", s.nt_times.size()},
          {"c_indicator", s.c_indicator},
          {"long_time_count", s.long_times.size()},
          {"loop_time_count", s.loop_times.size()},
          {"disjoint_fnt", s.disjoint_fnt},
          {"disjoint_fnt_windows", sel},
          {"short_time_count", s.short_times}};
}

}  // namespace nbwalk
