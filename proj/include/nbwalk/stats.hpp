#pragma once

// Small statistics helpers for experiment reports.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace nbwalk {

struct ConfidenceInterval {
  double estimate = 0;
  double low = 0;
  double high = 0;
  std::string method;
};

/// Clopper-Pearson interval for k successes out of n.
inline ConfidenceInterval exact_binomial_ci(std::size_t k, std::size_t n, double level = 0.95) {
  const double a = (1 - level) / 2;
  ConfidenceInterval ci{n ? static_cast<double>(k) / static_cast<double>(n) : 0.0, 0, 1, "clopper-pearson"};
  if (n == 0) return ci;
  using boost::math::beta_distribution;
  using boost::math::quantile;
  if (k > 0) ci.low = quantile(beta_distribution<>(static_cast<double>(k), static_cast<double>(n - k + 1)), a);
  if (k < n) ci.high = quantile(beta_distribution<>(static_cast<double>(k + 1), static_cast<double>(n - k)), 1 - a);
  return ci;
}

/// Normal approximation with continuity correction; switches to the exact
/// interval for proportions below 1e-3 (and for the degenerate ends).
inline ConfidenceInterval proportion_ci(std::size_t k, std::size_t n) {
  if (n == 0) return {0, 0, 1, "empty"};
  const double p = static_cast<double>(k) / static_cast<double>(n);
  if (p < 1e-3 || k == n) return exact_binomial_ci(k, n);
  const double half = 1.959963984540054 * std::sqrt(p * (1 - p) / static_cast<double>(n)) + 0.5 / static_cast<double>(n);
  return {p, std::max(0.0, p - half), std::min(1.0, p + half), "normal-cc"};
}

struct Moments {
  std::size_t n = 0;
  double mean = 0;
  double variance = 0;  // unbiased
};

inline Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.n = xs.size();
  if (m.n == 0) return m;
  double s = 0;
  for (auto x : xs) s += x;
  m.mean = s / static_cast<double>(m.n);
  if (m.n > 1) {
    double q = 0;
    for (auto x : xs) q += (x - m.mean) * (x - m.mean);
    m.variance = q / static_cast<double>(m.n - 1);
  }
  return m;
}

inline ConfidenceInterval mean_ci(const std::vector<double>& xs) {
  const auto m = moments(xs);
  const double half = m.n > 1 ? 1.959963984540054 * std::sqrt(m.variance / static_cast<double>(m.n)) : 0.0;
  return {m.mean, m.mean - half, m.mean + half, "normal-mean"};
}

struct ChiSquare {
  double statistic = 0;
  std::size_t dof = 0;
  double p_value = 1;
  std::vector<double> observed;
  std::vector<double> expected;
};

/// Pearson chi-square of observed counts against expected counts; adjacent
/// bins are merged from both ends inward until every bin expects >= 5.
inline ChiSquare chi_square(std::vector<double> observed, std::vector<double> expected) {
  ChiSquare r;
  std::vector<double> o, e;
  double ob = 0, eb = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    ob += observed[i];
    eb += expected[i];
    if (eb >= 5) {
      o.push_back(ob);
      e.push_back(eb);
      ob = eb = 0;
    }
  }
  if (eb > 0 || ob > 0) {
    if (e.empty()) {
      o.push_back(ob);
      e.push_back(eb);
    } else {
      o.back() += ob;
      e.back() += eb;
    }
  }
  for (std::size_t i = 0; i < e.size(); ++i) r.statistic += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
  r.dof = e.size() > 1 ? e.size() - 1 : 0;
  r.p_value = r.dof ? boost::math::gamma_q(static_cast<double>(r.dof) / 2, r.statistic / 2) : 1.0;
  r.observed = std::move(o);
  r.expected = std::move(e);
  return r;
}

}  // namespace nbwalk
