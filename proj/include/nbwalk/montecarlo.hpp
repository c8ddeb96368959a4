#pragma once

// Seeded random walks on graph oracles and the experiments built on them.
// Every trial draws from its own engine seeded by trial_seed(master, index),
// and results are stored by trial index, so reports do not depend on the
// number of workers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <json.hpp>

#include "nbwalk/census.hpp"
#include "nbwalk/cover.hpp"
#include "nbwalk/errors.hpp"
#include "nbwalk/oracle.hpp"
#include "nbwalk/parallel.hpp"
#include "nbwalk/random.hpp"
#include "nbwalk/stats.hpp"

namespace nbwalk {

template <GraphOracle O>
Path simulate_srw(const O& g, const typename O::vertex_type& o, std::size_t n, std::uint64_t seed,
                  bool with_names = false) {
  Engine rng(seed);
  Explorer<O> ex(g);
  const auto start = ex.intern(o);
  Path p{nullptr, start, {}};
  p.darts.reserve(n);
  VertexId v = start;
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = ex.dart(v, static_cast<Port>(uniform_below(rng, ex.degree(v))));
    p.darts.push_back(e);
    v = ex.graph().head(e);
  }
  p.graph = ex.finish(with_names);
  return p;
}

template <GraphOracle O>
Path simulate_nbw(const O& g, const typename O::vertex_type& o, std::size_t n, std::uint64_t seed,
                  bool with_names = false) {
  Engine rng(seed);
  Explorer<O> ex(g);
  const auto start = ex.intern(o);
  Path p{nullptr, start, {}};
  p.darts.reserve(n);
  VertexId v = start;
  std::optional<Port> banned;
  for (std::size_t i = 0; i < n; ++i) {
    const auto deg = ex.degree(v);
    Port port;
    if (!banned) {
      if (deg == 0) throw StuckWalkError("walk is stuck: start vertex has no darts");
      port = static_cast<Port>(uniform_below(rng, deg));
    } else {
      if (deg < 2) throw StuckWalkError("walk is stuck at a vertex of degree " + std::to_string(deg));
      port = static_cast<Port>(uniform_below(rng, deg - 1));
      if (port >= *banned) ++port;
    }
    const auto e = ex.dart(v, port);
    p.darts.push_back(e);
    v = ex.graph().head(e);
    banned = ex.port_of(ex.graph().reversal(e));
  }
  p.graph = ex.finish(with_names);
  return p;
}

/// Walk state without path bookkeeping, for experiments that only need
/// where the walk is.
template <GraphOracle O>
struct Cursor {
  typename O::vertex_type at;
  Port arrived_by = 0;  // port at `at` of the reversal of the last dart
  bool moved = false;

  void srw_step(const O& g, Engine& rng, Port* taken = nullptr) {
    const auto p = static_cast<Port>(uniform_below(rng, g.degree(at)));
    auto s = g.step(at, p);
    if (taken) *taken = p;
    at = std::move(s.head);
    arrived_by = s.reverse_port;
    moved = true;
  }
};

struct WalkConfig {
  std::string experiment;  // nt_density | qn | escape_tail | backtrack_pair
  FamilySpec family;
  std::optional<std::string> origin;
  std::size_t steps = 1000;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::size_t max_trials = 10'000'000;
  bool per_trial = true;  // include per-trial columns in the report

  std::vector<std::size_t> checkpoints;  // nt_density; default n/4, n/2, n
  std::size_t L = 4;                     // qn
  std::vector<std::size_t> horizons;     // qn; default powers of 10 up to steps
  std::size_t t_min = 10;                // escape_tail
  std::size_t t_max = 40;
  std::size_t t0 = 0;

  nlohmann::json to_json() const {
    nlohmann::json j{{"experiment", experiment}, {"graph", family.to_json()}, {"steps", steps},
                     {"trials", trials},         {"seed", seed},              {"workers", workers},
                     {"max_trials", max_trials}, {"per_trial", per_trial}};
    j["origin"] = origin ? nlohmann::json(*origin) : nlohmann::json(nullptr);
    if (experiment == "nt_density") j["checkpoints"] = resolved_checkpoints();
    if (experiment == "qn") {
      j["L"] = L;
      j["horizons"] = resolved_horizons();
    }
    if (experiment == "escape_tail") {
      j["t_min"] = t_min;
      j["t_max"] = t_max;
      j["t0"] = t0;
    }
    return j;
  }

  static WalkConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
    WalkConfig c;
    try {
      c.experiment = j.at("experiment").get<std::string>();
      c.family = FamilySpec::from_json(j.at("graph"));
      if (j.contains("origin") && !j.at("origin").is_null()) c.origin = detail::key_of(j.at("origin"));
      c.steps = j.value("steps", c.steps);
      c.trials = j.value("trials", c.trials);
      c.seed = j.value("seed", c.seed);
      c.workers = j.value("workers", c.workers);
      c.max_trials = j.value("max_trials", c.max_trials);
      c.per_trial = j.value("per_trial", c.per_trial);
      c.checkpoints = j.value("checkpoints", c.checkpoints);
      c.L = j.value("L", c.L);
      c.horizons = j.value("horizons", c.horizons);
      c.t_min = j.value("t_min", c.t_min);
      c.t_max = j.value("t_max", c.t_max);
      c.t0 = j.value("t0", c.t0);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad experiment config: ") + e.what());
    }
    c.validate();
    return c;
  }

  void validate() const {
    static const std::vector<std::string> known{"nt_density", "qn", "escape_tail", "backtrack_pair"};
    if (std::find(known.begin(), known.end(), experiment) == known.end())
      throw ConfigError("unknown experiment '" + experiment + "'");
    if (steps < 1) throw ConfigError("steps must be at least 1");
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (trials > max_trials)
      throw ResourceGuardError("trial-count", std::to_string(trials) + " trials exceed the cap of " +
                                                  std::to_string(max_trials));
    if (workers < 1) throw ConfigError("workers must be at least 1");
    if (L < 1) throw ConfigError("L must be at least 1");
    if (t_min > t_max) throw ConfigError("t_min must not exceed t_max");
    for (auto h : horizons)
      if (h < 1 || h > steps) throw ConfigError("horizons must lie in [1, steps]");
    for (auto h : checkpoints)
      if (h < 1 || h > steps) throw ConfigError("checkpoints must lie in [1, steps]");
  }

  std::vector<std::size_t> resolved_checkpoints() const {
    if (!checkpoints.empty()) return checkpoints;
    std::vector<std::size_t> cps;
    for (auto c : {steps / 4, steps / 2, steps})
      if (c >= 1 && (cps.empty() || cps.back() != c)) cps.push_back(c);
    return cps;
  }

  std::vector<std::size_t> resolved_horizons() const {
    if (!horizons.empty()) return horizons;
    std::vector<std::size_t> hs;
    for (std::size_t h = 10; h <= steps; h *= 10) hs.push_back(h);
    if (hs.empty()) hs.push_back(steps);
    return hs;
  }
};

struct Estimate {
  std::string label;
  double value = 0;
  double ci_low = 0;
  double ci_high = 0;
  std::size_t samples = 0;
  std::string method;
};

struct ExperimentReport {
  std::string experiment;
  nlohmann::json config;
  std::vector<Estimate> estimates;
  std::vector<std::pair<std::string, std::vector<double>>> columns;  // per-trial values
  nlohmann::json tallies = nlohmann::json::object();
  nlohmann::json diagnostics = nlohmann::json::object();

  const Estimate& estimate(const std::string& label) const {
    for (const auto& e : estimates)
      if (e.label == label) return e;
    throw std::out_of_range("no estimate labelled " + label);
  }

  const std::vector<double>& column(const std::string& name) const {
    for (const auto& [n, v] : columns)
      if (n == name) return v;
    throw std::out_of_range("no column named " + name);
  }

  nlohmann::json to_json(bool include_columns = true) const {
    nlohmann::json est = nlohmann::json::array();
    for (const auto& e : estimates)
      est.push_back({{"label", e.label},
                     {"value", e.value},
                     {"ci_low", e.ci_low},
                     {"ci_high", e.ci_high},
                     {"samples", e.samples},
                     {"method", e.method}});
    nlohmann::json j{{"experiment", experiment},
                     {"config", config},
                     {"estimates", est},
                     {"tallies", tallies},
                     {"diagnostics", diagnostics}};
    if (include_columns) {
      nlohmann::json cols = nlohmann::json::object();
      for (const auto& [n, v] : columns) cols[n] = v;
      j["per_trial"] = cols;
    }
    return j;
  }

  /// One row per trial, one column per statistic.
  std::string to_csv() const {
    std::ostringstream os;
    os << "trial";
    for (const auto& [n, v] : columns) os << ',' << n;
    os << '\n';
    const auto rows = columns.empty() ? 0 : columns.front().second.size();
    os.precision(17);
    for (std::size_t r = 0; r < rows; ++r) {
      os << r;
      for (const auto& [n, v] : columns) os << ',' << v[r];
      os << '\n';
    }
    return os.str();
  }
};

namespace detail {

inline Estimate from_ci(std::string label, const ConfidenceInterval& ci, std::size_t n) {
  return {std::move(label), ci.estimate, ci.low, ci.high, n, ci.method};
}

template <GraphOracle O>
typename O::vertex_type resolve_origin(const O& g, const WalkConfig& cfg) {
  return cfg.origin ? g.parse_key(*cfg.origin) : g.root();
}

template <GraphOracle O>
std::size_t min_degree_of(const O& g) {
  if (auto d = g.regular_degree()) return *d;
  if constexpr (std::is_same_v<O, FiniteOracle>) return g.graph().min_degree();
  return 0;
}

}  // namespace detail

/// Fraction of NT-cycle times in SRW prefixes, per trial and checkpoint.
template <GraphOracle O>
ExperimentReport nt_density_experiment(const O& g, const WalkConfig& cfg) {
  cfg.validate();
  const auto o = detail::resolve_origin(g, cfg);
  const auto cps = cfg.resolved_checkpoints();
  std::vector<std::vector<std::size_t>> counts(cfg.trials);
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t i) {
    const auto p = simulate_srw(g, o, cfg.steps, trial_seed(cfg.seed, i));
    counts[i] = nt_cycle_time_counts(p, lift_trace(p), cps);
  });

  ExperimentReport r;
  r.experiment = "nt_density";
  r.config = cfg.to_json();
  std::vector<double> final_density(cfg.trials), max_density(cfg.trials);
  std::size_t with_cycles = 0;
  for (std::size_t c = 0; c < cps.size(); ++c) {
    std::vector<double> col(cfg.trials);
    for (std::size_t i = 0; i < cfg.trials; ++i) col[i] = static_cast<double>(counts[i][c]) / static_cast<double>(cps[c]);
    const auto ci = mean_ci(col);
    r.estimates.push_back(detail::from_ci("density@" + std::to_string(cps[c]), ci, cfg.trials));
    r.columns.emplace_back("density@" + std::to_string(cps[c]), std::move(col));
  }
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    double best = 0;
    for (std::size_t c = 0; c < cps.size(); ++c)
      best = std::max(best, static_cast<double>(counts[i][c]) / static_cast<double>(cps[c]));
    max_density[i] = best;
    const auto last = std::max_element(cps.begin(), cps.end()) - cps.begin();
    final_density[i] = static_cast<double>(counts[i][static_cast<std::size_t>(last)]) /
                       static_cast<double>(cps[static_cast<std::size_t>(last)]);
    with_cycles += counts[i][static_cast<std::size_t>(last)] > 0;
  }
  r.estimates.insert(r.estimates.begin(), detail::from_ci("density", mean_ci(final_density), cfg.trials));
  r.estimates.push_back(detail::from_ci("max_density", mean_ci(max_density), cfg.trials));
  r.columns.emplace_back("max_density", std::move(max_density));
  r.tallies = {{"trials", cfg.trials}, {"with_nt_cycles", with_cycles}, {"without_nt_cycles", cfg.trials - with_cycles}};
  r.diagnostics = {{"checkpoints", cps}, {"note", "finite-horizon densities; no limit is certified"}};
  return r;
}

/// True iff v lies on an NT-cycle of at most L darts: any such cycle stays
/// inside the ball of radius L, where it shows up as an NB-cycle at v.
template <GraphOracle O>
bool on_short_cycle(const O& g, const typename O::vertex_type& v, std::size_t L) {
  const auto b = ball(g, v, L);
  const auto cc = cycle_census(b.graph, b.center, L);
  return !cc.S.empty();
}

/// Probability that the SRW position at each horizon lies on a short cycle.
template <GraphOracle O>
ExperimentReport qn_experiment(const O& g, const WalkConfig& cfg) {
  cfg.validate();
  const auto o = detail::resolve_origin(g, cfg);
  auto hs = cfg.resolved_horizons();
  std::sort(hs.begin(), hs.end());
  std::vector<std::vector<char>> hits(cfg.trials, std::vector<char>(hs.size(), 0));
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t i) {
    Engine rng(trial_seed(cfg.seed, i));
    Cursor<O> cur{o};
    std::size_t t = 0;
    for (std::size_t h = 0; h < hs.size(); ++h) {
      for (; t < hs[h]; ++t) cur.srw_step(g, rng);
      hits[i][h] = on_short_cycle(g, cur.at, cfg.L);
    }
  });

  ExperimentReport r;
  r.experiment = "qn";
  r.config = cfg.to_json();
  nlohmann::json counts = nlohmann::json::object();
  std::vector<double> qs;
  for (std::size_t h = 0; h < hs.size(); ++h) {
    std::vector<double> col(cfg.trials);
    std::size_t k = 0;
    for (std::size_t i = 0; i < cfg.trials; ++i) {
      col[i] = hits[i][h];
      k += static_cast<std::size_t>(hits[i][h]);
    }
    const auto label = "q@" + std::to_string(hs[h]);
    r.estimates.push_back(detail::from_ci(label, proportion_ci(k, cfg.trials), cfg.trials));
    r.columns.emplace_back(label, std::move(col));
    counts[std::to_string(hs[h])] = k;
    qs.push_back(static_cast<double>(k) / static_cast<double>(cfg.trials));
  }
  bool strictly = true;
  for (std::size_t h = 1; h < qs.size(); ++h) strictly = strictly && qs[h] < qs[h - 1];
  r.tallies = {{"trials", cfg.trials}, {"on_short_cycle", counts}};
  r.diagnostics = {{"horizons", hs}, {"q_column", qs}, {"strictly_decreasing", strictly}, {"L", cfg.L}};
  return r;
}

/// Gaps Phi(k+1) - Phi(k) between surviving darts, against (8/9)^(t/2).
template <GraphOracle O>
ExperimentReport escape_tail_experiment(const O& g, const WalkConfig& cfg) {
  cfg.validate();
  if (detail::min_degree_of(g) < 3) throw ConfigError("escape tails need every degree to be at least 3");
  const auto o = detail::resolve_origin(g, cfg);
  std::vector<std::vector<std::size_t>> gaps(cfg.trials);
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t i) {
    const auto p = simulate_srw(g, o, cfg.steps, trial_seed(cfg.seed, i));
    const auto tr = lift_trace(p);
    std::size_t prev = 0;
    // Survivors late in the walk may still be erased; keep the first half.
    for (auto f : tr.phi) {
      if (2 * f > cfg.steps) break;
      gaps[i].push_back(f - prev);
      prev = f;
    }
  });

  ExperimentReport r;
  r.experiment = "escape_tail";
  r.config = cfg.to_json();
  std::vector<std::size_t> all;
  std::vector<double> per_trial_count(cfg.trials), per_trial_max(cfg.trials);
  std::size_t parity_violations = 0;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    per_trial_count[i] = static_cast<double>(gaps[i].size());
    std::size_t mx = 0;
    for (auto x : gaps[i]) {
      all.push_back(x);
      mx = std::max(mx, x);
      if ((x - 1) % 2 != 0) ++parity_violations;
    }
    per_trial_max[i] = static_cast<double>(mx);
  }
  const auto G = all.size();
  std::sort(all.begin(), all.end());
  nlohmann::json tail = nlohmann::json::array();
  std::size_t exceed = 0;
  for (auto t = cfg.t_min; t <= cfg.t_max; ++t) {
    const auto above = static_cast<std::size_t>(all.end() - std::upper_bound(all.begin(), all.end(), t));
    const double p = G ? static_cast<double>(above) / static_cast<double>(G) : 0.0;
    const double sigma = G ? std::sqrt(p * (1 - p) / static_cast<double>(G)) : 0.0;
    const double env = std::pow(8.0 / 9.0, static_cast<double>(t) / 2);
    const bool over = t > cfg.t0 && p > env + 3 * sigma;
    exceed += over;
    tail.push_back({{"t", t}, {"tail", p}, {"sigma", sigma}, {"envelope", env}, {"exceeds", over}, {"count", above}});
    const auto ci = proportion_ci(above, G);
    r.estimates.push_back(detail::from_ci("P(gap>" + std::to_string(t) + ")", ci, G));
  }
  r.columns.emplace_back("gaps", std::move(per_trial_count));
  r.columns.emplace_back("max_gap", std::move(per_trial_max));
  r.tallies = {{"trials", cfg.trials}, {"gaps", G}, {"parity_violations", parity_violations}};
  r.diagnostics = {{"tail", tail}, {"envelope_exceeded", exceed}, {"t0", cfg.t0}};
  return r;
}

/// Z = #{i <= n/2 : X_{2i} is the reversal of X_{2i-1}} against
/// Binomial(floor(n/2), 1/d).
template <GraphOracle O>
ExperimentReport backtrack_pair_experiment(const O& g, const WalkConfig& cfg) {
  cfg.validate();
  const auto d = g.regular_degree();
  if (!d) throw ConfigError("backtrack pairs need a regular graph");
  const auto o = detail::resolve_origin(g, cfg);
  const auto pairs = cfg.steps / 2;
  std::vector<double> z(cfg.trials);
  parallel_for(cfg.trials, cfg.workers, [&](std::size_t i) {
    Engine rng(trial_seed(cfg.seed, i));
    Cursor<O> cur{o};
    std::size_t count = 0;
    for (std::size_t k = 0; k < pairs; ++k) {
      cur.srw_step(g, rng);
      const auto back = cur.arrived_by;
      Port taken = 0;
      cur.srw_step(g, rng, &taken);
      count += taken == back;
    }
    z[i] = static_cast<double>(count);
  });

  ExperimentReport r;
  r.experiment = "backtrack_pair";
  r.config = cfg.to_json();
  const double p = 1.0 / static_cast<double>(*d);
  const double n = static_cast<double>(pairs);
  const double N = static_cast<double>(cfg.trials);
  const double mu = n * p;
  const double var = n * p * (1 - p);
  const double mu4 = var * (1 + 3 * (n - 2) * p * (1 - p));
  const auto m = moments(z);
  const double sigma_mean = std::sqrt(var / N);
  const double sigma_var = std::sqrt(std::max(0.0, (mu4 - var * var * (N - 3) / (N - 1)) / N));

  boost::math::binomial_distribution<> bin(n, p);
  std::vector<double> observed(pairs + 1, 0.0), expected(pairs + 1, 0.0);
  for (auto x : z) observed[static_cast<std::size_t>(x)] += 1;
  for (std::size_t k = 0; k <= pairs; ++k) expected[k] = N * boost::math::pdf(bin, static_cast<double>(k));
  const auto chi = chi_square(observed, expected);

  r.estimates.push_back(detail::from_ci("mean", mean_ci(z), cfg.trials));
  r.estimates.push_back({"variance", m.variance, m.variance - 1.959963984540054 * sigma_var,
                         m.variance + 1.959963984540054 * sigma_var, cfg.trials, "normal-variance"});
  r.estimates.push_back({"chi_square_p", chi.p_value, chi.p_value, chi.p_value, cfg.trials, "pearson"});
  r.columns.emplace_back("Z", z);
  nlohmann::json hist = nlohmann::json::object();
  for (std::size_t k = 0; k <= pairs; ++k)
    if (observed[k] > 0) hist[std::to_string(k)] = static_cast<std::size_t>(observed[k]);
  r.tallies = {{"trials", cfg.trials}, {"histogram", hist}};
  r.diagnostics = {{"pairs", pairs},
                   {"d", *d},
                   {"binomial_mean", mu},
                   {"binomial_variance", var},
                   {"sigma_mean", sigma_mean},
                   {"sigma_variance", sigma_var},
                   {"mean_within_3sigma", std::abs(m.mean - mu) <= 3 * sigma_mean},
                   {"variance_within_3sigma", std::abs(m.variance - var) <= 3 * sigma_var},
                   {"chi_square", chi.statistic},
                   {"chi_square_dof", chi.dof}};
  return r;
}

inline ExperimentReport run_experiment(const WalkConfig& cfg) {
  cfg.validate();
  const auto oracle = make_oracle(cfg.family);
  return std::visit(
      [&cfg](const auto& g) -> ExperimentReport {
        if (cfg.experiment == "nt_density") return nt_density_experiment(g, cfg);
        if (cfg.experiment == "qn") return qn_experiment(g, cfg);
        if (cfg.experiment == "escape_tail") return escape_tail_experiment(g, cfg);
        return backtrack_pair_experiment(g, cfg);
      },
      oracle);
}

}  // namespace nbwalk
