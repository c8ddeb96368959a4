#pragma once

// Exact counts of non-backtracking paths and cycles, the non-backtracking
// dart operator, cogrowth estimates and the Ramanujan cycle-count check.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "nbwalk/errors.hpp"
#include "nbwalk/multigraph.hpp"
#include "nbwalk/oracle.hpp"
#include "nbwalk/parallel.hpp"

namespace nbwalk {

using BigInt = boost::multiprecision::cpp_int;

/// Sparse dart-to-dart operator: B[e][f] = 1 iff head(e) = tail(f) and
/// f != reversal(e). Rows are stored in dart order, columns ascending.
class NbOperator {
 public:
  explicit NbOperator(const Multigraph& g) : offsets_{0} {
    offsets_.reserve(g.dart_count() + 1);
    for (DartId e = 0; e < g.dart_count(); ++e) {
      const auto back = g.reversal(e);
      for (auto f : g.darts_at(g.head(e)))
        if (f != back) cols_.push_back(f);
      offsets_.push_back(cols_.size());
    }
  }

  std::size_t dimension() const noexcept { return offsets_.size() - 1; }
  std::size_t nonzeros() const noexcept { return cols_.size(); }
  std::span<const DartId> row(DartId e) const {
    return {cols_.data() + offsets_[e], offsets_[e + 1] - offsets_[e]};
  }
  std::size_t row_sum(DartId e) const { return offsets_[e + 1] - offsets_[e]; }

  /// y = B x
  template <class T>
  void apply(const std::vector<T>& x, std::vector<T>& y) const {
    y.assign(dimension(), T{});
    for (DartId e = 0; e < dimension(); ++e) {
      T acc{};
      for (auto f : row(e)) acc += x[f];
      y[e] = acc;
    }
  }

  /// y = x B, i.e. push mass from each dart to its continuations.
  template <class T>
  void push(const std::vector<T>& x, std::vector<T>& y) const {
    y.assign(dimension(), T{});
    for (DartId e = 0; e < dimension(); ++e) {
      if (x[e] == T{}) continue;
      for (auto f : row(e)) y[f] += x[e];
    }
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<DartId> cols_;
};

/// Number of backtrack-free dart sequences of length n starting at x.
inline BigInt nb_path_count(const Multigraph& g, VertexId x, std::size_t n) {
  if (n == 0) return 1;
  const NbOperator B(g);
  std::vector<BigInt> cur(g.dart_count()), next;
  for (auto e : g.darts_at(x)) cur[e] = 1;
  for (std::size_t k = 1; k < n; ++k) {
    B.push(cur, next);
    std::swap(cur, next);
  }
  BigInt total = 0;
  for (const auto& c : cur) total += c;
  return total;
}

struct CensusOptions {
  std::size_t budget = std::size_t{1} << 26;  // dart_count * N cap
  std::size_t workers = 1;
  std::optional<double> cogrowth;  // enables the c_x bound
};

struct CycleCensus {
  std::string root;
  std::size_t N = 0;
  std::vector<BigInt> b;       // index 0..N; b[0] = 1 stands for the empty cycle
  std::vector<BigInt> b_star;  // same indexing
  std::vector<std::size_t> S, S_star;
  double fekete_lower = 0;     // max over n >= 1 of (b*_n / 2)^(1/n)
  std::optional<std::size_t> fekete_argmax;
  std::optional<std::size_t> shortest_simple_cycle;
  std::optional<double> c_x_bound;
};

/// Length of the shortest simple cycle through x: 1 for a loop, 2 for a
/// parallel pair, else 2 + the shortest path between two neighbours that
/// avoids x.
inline std::optional<std::size_t> shortest_simple_cycle(const Multigraph& g, VertexId x) {
  const auto ds = g.darts_at(x);
  for (auto e : ds)
    if (g.dart(e).is_loop()) return 1;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto a = g.head(ds[i]);
    std::vector<std::size_t> dist(g.vertex_count(), std::numeric_limits<std::size_t>::max());
    std::deque<VertexId> q{a};
    dist[a] = 0;
    while (!q.empty()) {
      const auto v = q.front();
      q.pop_front();
      for (auto f : g.darts_at(v)) {
        const auto w = g.head(f);
        if (w == x || dist[w] != std::numeric_limits<std::size_t>::max()) continue;
        dist[w] = dist[v] + 1;
        q.push_back(w);
      }
    }
    for (std::size_t j = i + 1; j < ds.size(); ++j) {
      const auto d = dist[g.head(ds[j])];
      if (d == std::numeric_limits<std::size_t>::max()) continue;
      if (!best || d + 2 < *best) best = d + 2;
    }
  }
  return best;
}

inline double bigint_to_double(const BigInt& v) { return v.convert_to<double>(); }

/// (b / 2)^(1/n) computed through logarithms so huge counts stay finite.
inline double fekete_term(const BigInt& b, std::size_t n) {
  if (b <= 0) return 0;
  const auto bits = boost::multiprecision::msb(b);
  double lg;
  if (bits < 1000) {
    lg = std::log(b.convert_to<double>());
  } else {
    const auto shift = bits - 60;
    lg = std::log(static_cast<BigInt>(b >> shift).convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
  }
  return std::exp((lg - std::log(2.0)) / static_cast<double>(n));
}

/// Counts NB-cycles and FNB-cycles of every length 1..N through x, by a DP
/// over (current dart) run once per starting dart.
inline CycleCensus cycle_census(const Multigraph& g, VertexId x, std::size_t N, const CensusOptions& opt = {}) {
  if (N < 1) throw ConfigError("census depth N must be at least 1");
  if (g.dart_count() > 0 && N > opt.budget / g.dart_count())
    throw ResourceGuardError("census-budget", "dart count " + std::to_string(g.dart_count()) + " x N " +
                                                  std::to_string(N) + " exceeds budget " +
                                                  std::to_string(opt.budget));
  const NbOperator B(g);
  const auto starts = g.darts_at(x);
  std::vector<std::vector<BigInt>> part_b(starts.size()), part_star(starts.size());

  parallel_for(starts.size(), opt.workers, [&](std::size_t i) {
    const auto e0 = starts[i];
    auto& pb = part_b[i];
    auto& ps = part_star[i];
    pb.assign(N + 1, 0);
    ps.assign(N + 1, 0);
    std::vector<BigInt> cur(g.dart_count()), next;
    cur[e0] = 1;
    const auto closing_ban = g.reversal(e0);
    for (std::size_t k = 1; k <= N; ++k) {
      if (k > 1) {
        B.push(cur, next);
        std::swap(cur, next);
      }
      for (auto f : g.darts_at(x)) {
        const auto r = g.reversal(f);  // darts with head x are reversals of darts at x
        const auto& c = cur[r];
        if (c == 0) continue;
        pb[k] += c;
        if (k == 1 || r != closing_ban) ps[k] += c;
      }
    }
  });

  CycleCensus cc;
  cc.root = g.name(x);
  cc.N = N;
  cc.b.assign(N + 1, 0);
  cc.b_star.assign(N + 1, 0);
  cc.b[0] = cc.b_star[0] = 1;
  for (std::size_t i = 0; i < starts.size(); ++i)
    for (std::size_t k = 1; k <= N; ++k) {
      cc.b[k] += part_b[i][k];
      cc.b_star[k] += part_star[i][k];
    }
  for (std::size_t n = 1; n <= N; ++n) {
    if (cc.b[n] != 0) cc.S.push_back(n);
    if (cc.b_star[n] != 0) {
      cc.S_star.push_back(n);
      const auto f = fekete_term(cc.b_star[n], n);
      if (f > cc.fekete_lower) {
        cc.fekete_lower = f;
        cc.fekete_argmax = n;
      }
    }
  }
  cc.shortest_simple_cycle = shortest_simple_cycle(g, x);
  if (opt.cogrowth && cc.shortest_simple_cycle) {
    const auto L = static_cast<double>(*cc.shortest_simple_cycle);
    cc.c_x_bound = 2 + 2 * L * std::pow(*opt.cogrowth, L - 2);
  }
  return cc;
}

inline nlohmann::json bigint_json(const BigInt& v) {
  if (v >= 0 && v <= std::numeric_limits<std::uint64_t>::max()) return v.convert_to<std::uint64_t>();
  return v.str();
}

inline nlohmann::json to_json(const CycleCensus& c) {
  nlohmann::json b = nlohmann::json::array(), bs = nlohmann::json::array();
  for (std::size_t n = 1; n <= c.N; ++n) {
    b.push_back(bigint_json(c.b[n]));
    bs.push_back(bigint_json(c.b_star[n]));
  }
  nlohmann::json j{{"root", c.root}, {"N", c.N},   {"b", b},
                   {"b_star", bs},   {"S", c.S}, {"S_star", c.S_star},
                   {"fekete_lower", c.fekete_lower}};
  j["fekete_argmax"] = c.fekete_argmax ? nlohmann::json(*c.fekete_argmax) : nlohmann::json(nullptr);
  j["shortest_simple_cycle"] =
      c.shortest_simple_cycle ? nlohmann::json(*c.shortest_simple_cycle) : nlohmann::json(nullptr);
  j["c_x_bound"] = c.c_x_bound ? nlohmann::json(*c.c_x_bound) : nlohmann::json(nullptr);
  return j;
}

struct PowerIterationOptions {
  double tolerance = 1e-12;
  std::size_t max_iterations = 100000;
};

struct CogrowthEstimate {
  std::string method;  // "spectral", "spectral-squared" or "fekete-lower"
  std::optional<double> value;
  bool converged = false;
  std::size_t iterations = 0;
  double last_delta = 0;
  std::optional<std::size_t> radius;
  std::vector<double> lower_by_radius;  // oracle mode: best lower bound per radius
  std::string note;
};

namespace detail {
struct PowerResult {
  double value = 0;
  bool converged = false;
  std::size_t iterations = 0;
  double last_delta = 0;
};

// Dominant eigenvalue of a nonnegative operator by power iteration from the
// uniform vector, measured by the growth of the l1 norm. Stops when both the
// ratio and the normalized iterate settle; the ratio alone can repeat by
// accident while the vector is still moving.
template <class Apply>
PowerResult power_iterate(std::size_t dim, Apply&& apply, const PowerIterationOptions& opt) {
  PowerResult r;
  std::vector<double> v(dim, dim ? 1.0 / static_cast<double>(dim) : 0.0), w;
  double prev = -1;
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    apply(v, w);
    double norm = 0;
    for (auto x : w) norm += x;
    r.iterations = it;
    if (norm == 0) {
      r.value = 0;
      r.converged = true;
      r.last_delta = prev < 0 ? 0 : std::abs(prev);
      return r;
    }
    const double lambda = norm;  // v has unit l1 norm
    double moved = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      w[i] /= norm;
      moved += std::abs(w[i] - v[i]);
    }
    std::swap(v, w);
    if (prev >= 0) {
      r.last_delta = std::max(std::abs(lambda - prev), moved * lambda);
      if (r.last_delta <= opt.tolerance * lambda) {
        r.value = lambda;
        r.converged = true;
        return r;
      }
    }
    prev = lambda;
  }
  r.value = prev;
  return r;
}
}  // namespace detail

/// Cogrowth of a finite graph as the spectral radius of the NB operator.
/// When the iteration oscillates (periodic dart dynamics) the square of the
/// operator is used instead; if that also fails, no value is reported.
inline CogrowthEstimate cogrowth(const Multigraph& g, const PowerIterationOptions& opt = {}) {
  const NbOperator B(g);
  CogrowthEstimate est;
  auto once = [&B](const std::vector<double>& x, std::vector<double>& y) { B.apply(x, y); };
  auto r = detail::power_iterate(B.dimension(), once, opt);
  est.iterations = r.iterations;
  est.last_delta = r.last_delta;
  if (r.converged) {
    est.method = "spectral";
    est.value = r.value;
    est.converged = true;
    return est;
  }
  std::vector<double> tmp;
  auto twice = [&B, &tmp](const std::vector<double>& x, std::vector<double>& y) {
    B.apply(x, tmp);
    B.apply(tmp, y);
  };
  auto r2 = detail::power_iterate(B.dimension(), twice, opt);
  est.method = "spectral-squared";
  est.iterations += r2.iterations;
  est.last_delta = r2.last_delta;
  if (r2.converged) {
    est.value = std::sqrt(r2.value);
    est.converged = true;
    est.note = "power iteration oscillated; used the squared operator";
  } else {
    est.note = "power iteration did not converge";
  }
  return est;
}

/// Certified lower bounds on the cogrowth of an infinite graph: cycle
/// censuses at the root on balls of radius 1..r (cycles of length <= 2r
/// through the root fit inside the ball of radius r).
template <GraphOracle O>
CogrowthEstimate cogrowth_lower(const O& oracle, std::size_t max_radius, const CensusOptions& copt = {},
                                std::size_t max_ball = std::size_t{1} << 22) {
  CogrowthEstimate est;
  est.method = "fekete-lower";
  est.radius = max_radius;
  est.converged = true;
  double best = 0;
  for (std::size_t r = 1; r <= max_radius; ++r) {
    const auto b = ball(oracle, oracle.root(), r, max_ball);
    const auto cc = cycle_census(b.graph, b.center, 2 * r, copt);
    best = std::max(best, cc.fekete_lower);
    est.lower_by_radius.push_back(best);
  }
  est.value = best;
  est.note = "lower bound only";
  return est;
}

inline nlohmann::json to_json(const CogrowthEstimate& e) {
  nlohmann::json j{{"method", e.method},
                   {"converged", e.converged},
                   {"iterations", e.iterations},
                   {"last_delta", e.last_delta},
                   {"note", e.note}};
  j["value"] = e.value ? nlohmann::json(*e.value) : nlohmann::json(nullptr);
  j["radius"] = e.radius ? nlohmann::json(*e.radius) : nlohmann::json(nullptr);
  if (!e.lower_by_radius.empty()) j["lower_by_radius"] = e.lower_by_radius;
  return j;
}

struct RamanujanWitness {
  std::string vertex;
  std::size_t n = 0;
  BigInt b_star;
};

struct RamanujanCertificate {
  bool pass = true;
  std::size_t d = 0;
  std::size_t N = 0;
  std::size_t roots_checked = 0;
  std::optional<RamanujanWitness> witness;
  std::string note;
};

/// Checks b*_n(x) <= 2 (d-1)^(n/2) for every root and 1 <= n <= N, exactly:
/// the comparison is b*^2 <= 4 (d-1)^n in integers. The degree comes from
/// the graph unless given (truncated balls of regular graphs are not
/// regular themselves).
inline RamanujanCertificate ramanujan_certificate(const Multigraph& g, const std::vector<VertexId>& roots,
                                                  std::size_t N, std::optional<std::size_t> degree = {},
                                                  const CensusOptions& opt = {}) {
  RamanujanCertificate cert;
  if (degree) {
    cert.d = *degree;
  } else {
    const auto d = g.regular_degree();
    if (!d) throw ConfigError("Ramanujan check needs a regular graph (or an explicit degree)");
    cert.d = *d;
  }
  if (cert.d < 1) throw ConfigError("Ramanujan check needs degree >= 1");
  cert.N = N;
  for (auto x : roots) {
    const auto cc = cycle_census(g, x, N, opt);
    ++cert.roots_checked;
    BigInt power = 1;
    for (std::size_t n = 1; n <= N; ++n) {
      power *= static_cast<unsigned>(cert.d - 1);
      if (cc.b_star[n] * cc.b_star[n] > 4 * power) {
        cert.pass = false;
        cert.witness = RamanujanWitness{g.name(x), n, cc.b_star[n]};
        break;
      }
    }
    if (!cert.pass) break;
  }
  cert.note = cert.pass ? "bound holds up to N; this is necessary evidence only, not a proof"
                        : "bound violated; the graph is not Ramanujan";
  return cert;
}

inline nlohmann::json to_json(const RamanujanCertificate& c) {
  nlohmann::json j{{"pass", c.pass}, {"d", c.d}, {"N", c.N}, {"roots_checked", c.roots_checked}, {"note", c.note}};
  if (c.witness) {
    j["witness"] = {{"vertex", c.witness->vertex},
                    {"n", c.witness->n},
                    {"b_star", bigint_json(c.witness->b_star)},
                    {"bound", 2 * std::pow(static_cast<double>(c.d - 1), static_cast<double>(c.witness->n) / 2)}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

}  // namespace nbwalk
