#pragma once

// Return probabilities of simple random walk, spectral-radius estimates and
// the closed-form relations between cogrowth and spectral radius.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "nbwalk/errors.hpp"
#include "nbwalk/oracle.hpp"

namespace nbwalk {

using Rational = boost::multiprecision::cpp_rational;

/// Finite Markov chain with rational transition probabilities num/den.
struct MarkovChain {
  struct Transition {
    std::size_t to;
    std::uint64_t num;
    std::uint64_t den;
  };
  std::vector<std::vector<Transition>> out;
  std::size_t start = 0;
  std::string description;

  std::size_t size() const noexcept { return out.size(); }
};

namespace chains {

/// Distance from the root of the d-regular tree.
inline MarkovChain tree_depth(std::size_t d, std::size_t N) {
  MarkovChain c;
  c.description = "depth chain of the regular tree";
  c.out.resize(N + 1);
  c.out[0].push_back({1, 1, 1});
  for (std::size_t k = 1; k <= N; ++k) {
    c.out[k].push_back({k - 1, 1, d});
    c.out[k].push_back({std::min(k + 1, N), d - 1, d});
  }
  return c;
}

/// Distance from the root in the (d-1)-regular tree with a loop everywhere.
inline MarkovChain looped_tree_depth(std::size_t d, std::size_t N) {
  MarkovChain c;
  c.description = "depth chain of the looped tree";
  c.out.resize(N + 1);
  c.out[0].push_back({0, 1, d});
  c.out[0].push_back({1, d - 1, d});
  for (std::size_t k = 1; k <= N; ++k) {
    c.out[k].push_back({k, 1, d});
    c.out[k].push_back({k - 1, 1, d});
    if (d > 2) c.out[k].push_back({std::min(k + 1, N), d - 2, d});
  }
  return c;
}

/// (cycle position, depth in the hanging tree) for a walk started on the cycle.
inline MarkovChain tree_plus_cycle(const TreePlusCycleOracle& g, std::uint32_t position, std::size_t N) {
  const auto d = g.d();
  const auto L = g.cycle_length();
  const auto t = g.tree_ports();
  MarkovChain c;
  c.description = "cycle position and depth chain";
  auto id = [N](std::size_t i, std::size_t k) { return i * (N + 1) + k; };
  c.out.resize(L * (N + 1));
  c.start = id(position, 0);
  for (std::size_t i = 0; i < L; ++i) {
    auto& root = c.out[id(i, 0)];
    if (t > 0) root.push_back({id(i, 1), t, d});
    if (L == 1) {
      root.push_back({id(i, 0), 1, d});
    } else {
      root.push_back({id((i + 1) % L, 0), 1, d});
      root.push_back({id((i + L - 1) % L, 0), 1, d});
    }
    for (std::size_t k = 1; k <= N; ++k) {
      c.out[id(i, k)].push_back({id(i, k - 1), 1, d});
      c.out[id(i, k)].push_back({id(i, std::min(k + 1, N)), d - 1, d});
    }
  }
  return c;
}

/// Simple random walk on a finite multigraph; each dart has weight 1/degree.
inline MarkovChain simple_walk(const Multigraph& g, VertexId start) {
  MarkovChain c;
  c.description = "simple random walk";
  c.out.resize(g.vertex_count());
  c.start = start;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto deg = g.degree(v);
    std::unordered_map<VertexId, std::uint64_t> mult;
    std::vector<VertexId> order;
    for (auto e : g.darts_at(v)) {
      if (mult[g.head(e)]++ == 0) order.push_back(g.head(e));
    }
    for (auto w : order) c.out[v].push_back({w, mult[w], deg});
  }
  return c;
}

}  // namespace chains

/// Picks an exact finite chain for p_n(o, o), n <= N. Infinite families use
/// lumped chains whose top state is never reached back from within N steps
/// (a walk needs N steps out and N back); other cases fall back to the ball
/// of radius N.
template <GraphOracle O>
MarkovChain return_chain(const O& g, const typename O::vertex_type& o, std::size_t N, std::size_t max_ball) {
  if constexpr (std::is_same_v<O, RegularTreeOracle>) {
    return chains::tree_depth(g.d(), N + 1);
  } else if constexpr (std::is_same_v<O, LoopedTreeOracle>) {
    return chains::looped_tree_depth(g.d(), N + 1);
  } else if constexpr (std::is_same_v<O, TreePlusCycleOracle>) {
    if (g.on_cycle(o)) return chains::tree_plus_cycle(g, o.position, N + 1);
  } else if constexpr (std::is_same_v<O, FiniteOracle>) {
    return chains::simple_walk(g.graph(), o);
  }
  const auto b = ball(g, o, N, max_ball);
  auto c = chains::simple_walk(b.graph, b.center);
  c.description = "simple random walk on a ball";
  return c;
}

struct ReturnTable {
  std::string origin;
  std::vector<double> p;                 // p[n] = p_n(o, o), 0 <= n <= N
  std::optional<std::vector<Rational>> exact;
  double conservation_error = 0;         // max |total mass - 1| over steps
  std::size_t states = 0;
  std::string chain;
};

struct ReturnOptions {
  std::size_t max_ball = std::size_t{1} << 22;
  std::size_t exact_up_to = 0;  // exact rational DP for n <= this (capped at 30)
};

inline ReturnTable run_chain(const MarkovChain& c, std::size_t N, std::size_t exact_up_to = 0) {
  ReturnTable t;
  t.states = c.size();
  t.chain = c.description;
  t.p.assign(N + 1, 0.0);
  std::vector<double> cur(c.size(), 0.0), next(c.size(), 0.0);
  cur[c.start] = 1.0;
  t.p[0] = 1.0;
  for (std::size_t n = 1; n <= N; ++n) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t v = 0; v < c.size(); ++v) {
      if (cur[v] == 0.0) continue;
      for (const auto& tr : c.out[v])
        next[tr.to] += cur[v] * static_cast<double>(tr.num) / static_cast<double>(tr.den);
    }
    std::swap(cur, next);
    t.p[n] = cur[c.start];
    double mass = 0;
    for (auto x : cur) mass += x;
    t.conservation_error = std::max(t.conservation_error, std::abs(mass - 1.0));
  }
  const auto ex = std::min<std::size_t>({exact_up_to, 30, N});
  if (ex > 0) {
    std::vector<Rational> rc(c.size()), rn(c.size());
    rc[c.start] = 1;
    std::vector<Rational> exact{1};
    for (std::size_t n = 1; n <= ex; ++n) {
      std::fill(rn.begin(), rn.end(), Rational(0));
      for (std::size_t v = 0; v < c.size(); ++v) {
        if (rc[v] == 0) continue;
        for (const auto& tr : c.out[v]) rn[tr.to] += rc[v] * Rational(tr.num, tr.den);
      }
      std::swap(rc, rn);
      exact.push_back(rc[c.start]);
    }
    t.exact = std::move(exact);
  }
  return t;
}

template <GraphOracle O>
ReturnTable return_probabilities(const O& g, const typename O::vertex_type& o, std::size_t N,
                                 const ReturnOptions& opt = {}) {
  auto t = run_chain(return_chain(g, o, N, opt.max_ball), N, opt.exact_up_to);
  t.origin = g.canonical_key(o);
  return t;
}

struct SpectralReport {
  std::vector<double> lower_bounds;  // index n-1: p_{2n}^{1/(2n)}
  double best_lower = 0;
  double fitted_rho = 0;
  double kappa = 0;
  double intercept = 0;
  std::size_t fit_from = 0;  // fitted over 2n for n in [fit_from, fit_to]
  std::size_t fit_to = 0;
  double fit_rms = 0;
  bool slow_convergence = false;
};

/// Lower bounds p_{2n}^{1/(2n)} and a least-squares fit of
/// log p_{2n} = a + 2n log(rho) + kappa log(n) over the top half of the
/// even horizons.
inline SpectralReport rho_estimate(const ReturnTable& t) {
  if (t.p.size() < 9) throw ConfigError("rho estimate needs at least 8 steps");
  const auto half = (t.p.size() - 1) / 2;
  bool any = false;
  SpectralReport r;
  for (std::size_t n = 1; n <= half; ++n) {
    const auto p = t.p[2 * n];
    const double lb = p > 0 ? std::pow(p, 1.0 / static_cast<double>(2 * n)) : 0.0;
    any = any || p > 0;
    r.lower_bounds.push_back(lb);
    r.best_lower = std::max(r.best_lower, lb);
  }
  if (!any) throw ConfigError("all even return probabilities vanish; the walk never returns");

  r.fit_from = std::max<std::size_t>(1, half / 2 + 1);
  r.fit_to = half;
  std::vector<std::size_t> ns;
  for (auto n = r.fit_from; n <= r.fit_to; ++n)
    if (t.p[2 * n] > 0) ns.push_back(n);
  if (ns.size() < 3) throw ConfigError("too few positive return probabilities to fit");
  Eigen::MatrixXd A(static_cast<Eigen::Index>(ns.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(ns.size()));
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto n = static_cast<double>(ns[i]);
    const auto row = static_cast<Eigen::Index>(i);
    A(row, 0) = 1.0;
    A(row, 1) = 2.0 * n;
    A(row, 2) = std::log(n);
    y(row) = std::log(t.p[2 * ns[i]]);
  }
  const Eigen::Vector3d coef = A.colPivHouseholderQr().solve(y);
  r.intercept = coef(0);
  r.fitted_rho = std::exp(coef(1));
  r.kappa = coef(2);
  r.fit_rms = std::sqrt((A * coef - y).squaredNorm() / static_cast<double>(ns.size()));
  r.slow_convergence = std::abs(r.kappa) > 3;
  return r;
}

inline double tree_rho(double d) {
  if (d < 2) throw ConfigError("tree_rho needs d >= 2");
  return 2 * std::sqrt(d - 1) / d;
}

struct RhoFromCogrowth {
  double rho = 0;
  bool regime_boundary = false;  // cogrowth <= sqrt(d-1): the tree value applies
};

inline RhoFromCogrowth rho_from_cogrowth(double cogr, double d) {
  if (d < 3) throw ConfigError("rho_from_cogrowth needs d >= 3");
  if (cogr <= std::sqrt(d - 1)) return {tree_rho(d), true};
  return {((d - 1) / cogr + cogr) / d, false};
}

inline double cogr_from_rho(double rho, double d) {
  if (d < 3) throw ConfigError("cogr_from_rho needs d >= 3");
  const auto lo = tree_rho(d);
  // Accept the boundary itself up to rounding of the tree value.
  if (rho < lo - 1e-15 || rho > 1) throw ConfigError("rho must lie in [2 sqrt(d-1)/d, 1]");
  const auto disc = std::max(0.0, d * d * rho * rho - 4 * (d - 1));
  return (d * rho + std::sqrt(disc)) / 2;
}

inline double lazy_rho(double rho, double p_delay) {
  if (!(p_delay >= 0 && p_delay < 1)) throw ConfigError("delay probability must lie in [0, 1)");
  return p_delay + (1 - p_delay) * rho;
}

/// |d rho - (d-1)/c - c|, the residual of the cogrowth relation.
inline double formula_residual(double d, double rho, double cogr) { return std::abs(d * rho - (d - 1) / cogr - cogr); }

inline nlohmann::json to_json(const ReturnTable& t) {
  nlohmann::json j{{"origin", t.origin},
                   {"N", t.p.size() - 1},
                   {"p", t.p},
                   {"conservation_error", t.conservation_error},
                   {"states", t.states},
                   {"chain", t.chain}};
  if (t.exact) {
    nlohmann::json ex = nlohmann::json::array();
    for (const auto& q : *t.exact) ex.push_back(q.str());
    j["exact"] = ex;
  }
  return j;
}

inline nlohmann::json to_json(const SpectralReport& r) {
  return {{"lower_bounds", r.lower_bounds},
          {"best_lower", r.best_lower},
          {"fitted_rho", r.fitted_rho},
          {"kappa", r.kappa},
          {"intercept", r.intercept},
          {"fit_window", {2 * r.fit_from, 2 * r.fit_to}},
          {"fit_rms", r.fit_rms},
          {"slow_convergence", r.slow_convergence}};
}

}  // namespace nbwalk
