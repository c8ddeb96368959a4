// nbwalk command-line tool.
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error,
// 3 resource guard rejection.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "nbwalk/nbwalk.hpp"

using nlohmann::json;
using namespace nbwalk;

namespace {

struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::uint64_t seed = 1;
  std::string out;
  std::size_t workers = 1;
  std::string format = "json";
  std::size_t budget = std::size_t{1} << 26;
  std::size_t max_ball = std::size_t{1} << 22;
  std::size_t max_trials = 10'000'000;

  std::string graph_file;
  std::string family;
  std::size_t d = 0, L = 0, k = 0, m = 0, j = 0;
  std::string origin;

  std::size_t N = 10;
  std::size_t steps = 400;
  std::size_t radius = 6;
  std::vector<std::string> roots;
  std::size_t degree = 0;
  std::string kind = "srw";
  std::string config_file;
  std::size_t exact_up_to = 0;
};

std::string iso_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
}

FamilySpec family_from(const Options& o) {
  if (!o.graph_file.empty() && !o.family.empty()) throw ConfigError("give either --graph or --family, not both");
  if (!o.graph_file.empty())
    return FamilySpec::finite(std::make_shared<const Multigraph>(graph_from_json(read_json_file(o.graph_file))));
  if (o.family.empty()) throw ConfigError("a graph is required: --graph FILE or --family NAME");
  json j{{"family", o.family}};
  if (o.family == "finite") throw ConfigError("use --graph FILE for finite graphs");
  if (o.d) j["d"] = o.d;
  if (o.L) j["L"] = o.L;
  if (o.k) j["k"] = o.k;
  if (o.m) j["m"] = o.m;
  if (o.j) j["j"] = o.j;
  return FamilySpec::from_json(j);
}

template <class O>
typename O::vertex_type origin_of(const O& g, const Options& o) {
  return o.origin.empty() ? g.root() : g.parse_key(o.origin);
}

std::shared_ptr<const Multigraph> finite_graph(const FamilySpec& spec, const char* what) {
  const auto oracle = make_oracle(spec);
  if (const auto* f = std::get_if<FiniteOracle>(&oracle)) return f->shared_graph();
  throw ConfigError(std::string(what) + " needs a finite graph");
}

json cmd_graph_validate(const Options& o) {
  const auto g = finite_graph(family_from(o), "graph validate");
  const auto r = validate(*g);
  auto j = to_json(r);
  if (!r.ok()) throw ValidationFailure(j.dump());
  return j;
}

json cmd_graph_info(const Options& o) {
  const auto g = finite_graph(family_from(o), "graph info");
  const auto r = validate(*g);
  json degrees = json::object();
  std::size_t loops = 0;
  for (VertexId v = 0; v < g->vertex_count(); ++v) degrees[g->name(v)] = g->degree(v);
  for (const auto& e : g->darts()) loops += e.is_loop();
  auto j = to_json(r);
  j["degrees"] = degrees;
  j["loops"] = loops;
  j["edges"] = (g->dart_count() - loops) / 2;
  return j;
}

json cmd_census(const Options& o) {
  const auto spec = family_from(o);
  const CensusOptions copt{o.budget, o.workers, std::nullopt};
  return std::visit(
      [&](const auto& g) -> json {
        using O = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<O, FiniteOracle>) {
          const auto x = origin_of(g, o);
          CensusOptions with = copt;
          const auto c = cogrowth(g.graph());
          with.cogrowth = c.value;
          return to_json(cycle_census(g.graph(), x, o.N, with));
        } else {
          // Cycles of length <= N through the root stay within radius N/2.
          const auto b = ball(g, origin_of(g, o), (o.N + 1) / 2, o.max_ball);
          auto j = to_json(cycle_census(b.graph, b.center, o.N, copt));
          j["ball_radius"] = (o.N + 1) / 2;
          j["ball_vertices"] = b.graph.vertex_count();
          return j;
        }
      },
      make_oracle(spec));
}

json cmd_cogrowth(const Options& o) {
  const auto spec = family_from(o);
  return std::visit(
      [&](const auto& g) -> json {
        using O = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<O, FiniteOracle>) {
          return to_json(cogrowth(g.graph()));
        } else {
          return to_json(cogrowth_lower(g, o.radius, CensusOptions{o.budget, o.workers, std::nullopt}, o.max_ball));
        }
      },
      make_oracle(spec));
}

json cmd_rho(const Options& o) {
  const auto spec = family_from(o);
  return std::visit(
      [&](const auto& g) -> json {
        const auto t = return_probabilities(g, origin_of(g, o), o.steps, ReturnOptions{o.max_ball, o.exact_up_to});
        const auto r = rho_estimate(t);
        json j = to_json(r);
        j["table"] = to_json(t);
        if (auto d = g.regular_degree(); d && *d >= 2) j["tree_rho"] = tree_rho(static_cast<double>(*d));
        return j;
      },
      make_oracle(spec));
}

json cmd_formula_check(const Options& o) {
  const auto g = finite_graph(family_from(o), "formula-check");
  const auto d = g->regular_degree();
  if (!d) throw ConfigError("formula-check needs a regular graph");
  if (*d < 3) throw ConfigError("formula-check needs degree at least 3");
  if (!validate(*g).connected) throw ValidationFailure("formula-check needs a connected graph");
  const auto c = cogrowth(*g);
  if (!c.value) throw ValidationFailure("cogrowth did not converge");
  const double dd = static_cast<double>(*d);
  const double rho = 1.0;  // finite connected graphs
  const auto measured = rho_estimate(return_probabilities(FiniteOracle(g), 0, o.steps));
  const auto pred = rho_from_cogrowth(*c.value, dd);
  const double residual = formula_residual(dd, rho, *c.value);
  json j{{"d", *d},
         {"cogrowth", to_json(c)},
         {"rho", rho},
         {"rho_measured", measured.fitted_rho},
         {"rho_from_cogrowth", pred.rho},
         {"regime_boundary", pred.regime_boundary},
         {"residual", residual},
         {"pass", residual < 1e-6}};
  return j;
}

json cmd_ramanujan(const Options& o) {
  const auto spec = family_from(o);
  return std::visit(
      [&](const auto& g) -> json {
        using O = std::decay_t<decltype(g)>;
        const CensusOptions copt{o.budget, o.workers, std::nullopt};
        std::optional<std::size_t> degree;
        if (o.degree) degree = o.degree;
        if constexpr (std::is_same_v<O, FiniteOracle>) {
          std::vector<VertexId> roots;
          if (o.roots.empty())
            for (VertexId v = 0; v < g.graph().vertex_count(); ++v) roots.push_back(v);
          else
            for (const auto& r : o.roots) roots.push_back(g.graph().require(r));
          return to_json(ramanujan_certificate(g.graph(), roots, o.N, degree, copt));
        } else {
          if (!degree) degree = g.regular_degree();
          const auto x = origin_of(g, o);
          const auto b = ball(g, x, (o.N + 1) / 2, o.max_ball);
          auto j = to_json(ramanujan_certificate(b.graph, {b.center}, o.N, degree, copt));
          j["ball_radius"] = (o.N + 1) / 2;
          return j;
        }
      },
      make_oracle(spec));
}

json cmd_walk(const Options& o) {
  const auto spec = family_from(o);
  if (o.kind != "srw" && o.kind != "nbw") throw ConfigError("--kind must be srw or nbw");
  return std::visit(
      [&](const auto& g) -> json {
        const auto x = origin_of(g, o);
        const auto p = o.kind == "srw" ? simulate_srw(g, x, o.steps, o.seed, true)
                                       : simulate_nbw(g, x, o.steps, o.seed, true);
        const auto tr = lift_trace(p);
        const auto cls = classify_cycle(p);
        json vertices = json::array();
        for (std::size_t t = 0; t <= p.size(); ++t) vertices.push_back(p.graph->name(p.vertex_at(t)));
        json j{{"kind", o.kind},
               {"path", to_json(p)},
               {"vertices", vertices},
               {"graph", graph_to_json(*p.graph)},
               {"lift", to_json(tr)},
               {"escape_times", escape_times(tr)},
               {"nt_cycle_time_count", nt_cycle_times(p, tr).size()},
               {"classification", to_string(cls.kind)},
               {"fnt", cls.fnt}};
        j["fnb"] = cls.fnb ? json(*cls.fnb) : json(nullptr);
        return j;
      },
      make_oracle(spec));
}

struct Result {
  json payload;
  std::optional<std::string> csv;
  json config;
};

Result cmd_experiment(const Options& o, const CLI::App& app) {
  if (o.config_file.empty()) throw ConfigError("experiment needs --config FILE");
  auto j = read_json_file(o.config_file);
  if (app.get_option("--seed")->count()) j["seed"] = o.seed;
  if (app.get_option("--workers")->count()) j["workers"] = o.workers;
  if (app.get_option("--max-trials")->count()) j["max_trials"] = o.max_trials;
  const auto cfg = WalkConfig::from_json(j);
  const auto r = run_experiment(cfg);
  Result res{r.to_json(cfg.per_trial), std::nullopt, cfg.to_json()};
  if (o.format == "csv") res.csv = r.to_csv();
  return res;
}

std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

/// CSV view of a command payload: the natural table where there is one,
/// otherwise the scalar fields as key,value rows.
std::string csv_projection(const std::string& command, const json& j) {
  std::ostringstream os;
  auto column_table = [&](const std::vector<std::pair<std::string, const json*>>& cols, std::size_t first) {
    os << "n";
    for (const auto& [name, _] : cols) os << ',' << name;
    os << '\n';
    std::size_t rows = 0;
    for (const auto& [_, c] : cols) rows = std::max(rows, c->size());
    for (std::size_t r = 0; r < rows; ++r) {
      os << r + first;
      for (const auto& [_, c] : cols) os << ',' << (r < c->size() ? csv_cell((*c)[r]) : "");
      os << '\n';
    }
  };
  if (command == "census") {
    column_table({{"b", &j.at("b")}, {"b_star", &j.at("b_star")}}, 1);
  } else if (command == "rho") {
    column_table({{"p", &j.at("table").at("p")}}, 0);
  } else if (command == "cogrowth" && j.contains("lower_by_radius")) {
    column_table({{"lower", &j.at("lower_by_radius")}}, 1);
  } else if (command == "walk") {
    os << "t,dart,vertex\n";
    const auto& d = j.at("path").at("darts");
    const auto& v = j.at("vertices");
    for (std::size_t t = 0; t < v.size(); ++t)
      os << t << ',' << (t == 0 ? "" : csv_cell(d[t - 1])) << ',' << csv_cell(v[t]) << '\n';
  } else {
    os << "key,value\n";
    for (const auto& [k, v] : j.items())
      if (!v.is_structured()) os << k << ',' << csv_cell(v) << '\n';
  }
  return os.str();
}

json options_json(const Options& o) {
  return {{"seed", o.seed},          {"workers", o.workers},   {"format", o.format},   {"budget", o.budget},
          {"max_ball", o.max_ball},  {"max_trials", o.max_trials}, {"graph", o.graph_file}, {"family", o.family},
          {"d", o.d},                {"L", o.L},               {"k", o.k},             {"m", o.m},
          {"j", o.j},                {"origin", o.origin},     {"N", o.N},             {"steps", o.steps},
          {"radius", o.radius},      {"roots", o.roots},       {"degree", o.degree},   {"kind", o.kind},
          {"config", o.config_file}, {"exact_up_to", o.exact_up_to}};
}

void add_graph_options(CLI::App* sub, Options& o) {
  sub->add_option("--graph", o.graph_file, "graph JSON file");
  sub->add_option("--family", o.family, "regular_tree|looped_tree|tree_plus_cycle|cycle|complete|bouquet");
  sub->add_option("--d", o.d, "degree parameter");
  sub->add_option("--L", o.L, "cycle length for tree_plus_cycle");
  sub->add_option("--k", o.k, "cycle length for cycle");
  sub->add_option("--m", o.m, "size for complete");
  sub->add_option("--j", o.j, "loop count for bouquet");
  sub->add_option("--origin,--root", o.origin, "vertex key (default: the family root / vertex 0)");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Non-backtracking walks, cycle censuses and spectral radii of multigraphs"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(NBWALK_VERSION));
  app.add_option("--seed", o.seed, "master seed")->capture_default_str();
  app.add_option("--out", o.out, "write the result here (a manifest goes beside it)");
  app.add_option("--workers", o.workers, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--budget", o.budget, "census guard: darts x N")->capture_default_str();
  app.add_option("--max-ball", o.max_ball, "ball size guard (vertices)")->capture_default_str();
  app.add_option("--max-trials", o.max_trials, "trial count guard")->capture_default_str();

  auto* graph = app.add_subcommand("graph", "load and check graph files");
  graph->require_subcommand(1);
  graph->fallthrough();
  auto* gval = graph->add_subcommand("validate", "involution, incidence and connectivity checks");
  auto* ginfo = graph->add_subcommand("info", "degrees and counts");
  add_graph_options(gval, o);
  add_graph_options(ginfo, o);

  auto* census = app.add_subcommand("census", "NB-cycle counts b_n and b*_n at a root");
  add_graph_options(census, o);
  census->add_option("--N", o.N, "maximum cycle length")->capture_default_str();

  auto* cogr = app.add_subcommand("cogrowth", "cogrowth by power iteration or Fekete lower bounds");
  add_graph_options(cogr, o);
  cogr->add_option("--radius", o.radius, "largest ball radius for infinite families")->capture_default_str();

  auto* rho = app.add_subcommand("rho", "return probabilities and spectral radius estimate");
  add_graph_options(rho, o);
  rho->add_option("--steps", o.steps, "number of steps N")->capture_default_str();
  rho->add_option("--exact", o.exact_up_to, "also compute exact rationals up to this many steps (max 30)");

  auto* formula = app.add_subcommand("formula-check", "cogrowth versus spectral radius on a finite regular graph");
  add_graph_options(formula, o);
  formula->add_option("--steps", o.steps, "steps for the measured spectral radius")->capture_default_str();

  auto* raman = app.add_subcommand("ramanujan-check", "check b*_n <= 2 (d-1)^(n/2)");
  add_graph_options(raman, o);
  raman->add_option("--N", o.N, "maximum cycle length")->capture_default_str();
  raman->add_option("--roots", o.roots, "vertex keys to check (default all)");
  raman->add_option("--degree", o.degree, "degree to test against (default: the graph's)");

  auto* walk = app.add_subcommand("walk", "simulate a walk and lift it to the universal cover");
  add_graph_options(walk, o);
  walk->add_option("--steps", o.steps, "walk length")->capture_default_str();
  walk->add_option("--kind", o.kind, "srw or nbw")->capture_default_str();

  auto* exp = app.add_subcommand("experiment", "run a Monte Carlo experiment config");
  exp->add_option("--config", o.config_file, "experiment JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const auto started = iso_now();
  std::string command;
  Result res;
  try {
    if (gval->parsed()) command = "graph validate", res.payload = cmd_graph_validate(o);
    else if (ginfo->parsed()) command = "graph info", res.payload = cmd_graph_info(o);
    else if (census->parsed()) command = "census", res.payload = cmd_census(o);
    else if (cogr->parsed()) command = "cogrowth", res.payload = cmd_cogrowth(o);
    else if (rho->parsed()) command = "rho", res.payload = cmd_rho(o);
    else if (formula->parsed()) command = "formula-check", res.payload = cmd_formula_check(o);
    else if (raman->parsed()) command = "ramanujan-check", res.payload = cmd_ramanujan(o);
    else if (walk->parsed()) command = "walk", res.payload = cmd_walk(o);
    else if (exp->parsed()) command = "experiment", res = cmd_experiment(o, app);
  } catch (const ValidationFailure& e) {
    std::cerr << "validation failed: " << e.what() << '\n';
    return 1;
  } catch (const ResourceGuardError& e) {
    std::cerr << "resource guard '" << e.guard() << "' rejected the request: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const StuckWalkError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }

  if (o.format == "csv" && !res.csv) res.csv = csv_projection(command, res.payload);
  const std::string text = res.csv ? *res.csv : res.payload.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
    return 0;
  }
  {
    std::ofstream out(o.out, std::ios::binary);
    if (!out) {
      std::cerr << "configuration error: cannot write " << o.out << '\n';
      return 2;
    }
    out << text;
  }
  json argv_json = json::array();
  for (int i = 0; i < argc; ++i) argv_json.push_back(argv[i]);
  json manifest{{"command", command},
                {"argv", argv_json},
                {"config", res.config.is_null() ? options_json(o) : res.config},
                {"options", options_json(o)},
                {"tool_version", NBWALK_VERSION},
                {"seed", res.config.is_null() ? o.seed : res.config.value("seed", o.seed)},
                {"started_at", started},
                {"finished_at", iso_now()},
                {"payload_sha256", sha256_hex(text)}};
  std::ofstream(o.out + ".manifest.json") << manifest.dump(2) << '\n';
  return 0;
}
