#include "aninorm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "aninorm/anisotropy.hpp"
#include "aninorm/bench.hpp"
#include "aninorm/errors.hpp"
#include "aninorm/norms.hpp"
#include "aninorm/verify.hpp"

namespace aninorm {

namespace {

using nlohmann::json;

json number(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

json matrix_json(const Matrix& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream stream(text);
  while (std::getline(stream, item, ',')) {
    if (item.empty()) throw UsageError("empty entry in list '" + text + "'");
    items.push_back(item);
  }
  if (items.empty()) throw UsageError("empty list");
  return items;
}

template <class T>
T parse_number(const std::string& text) {
  try {
    std::size_t used = 0;
    T value;
    if constexpr (std::is_same_v<T, double>) {
      value = std::stod(text, &used);
    } else {
      value = std::stoi(text, &used);
    }
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + text + "'");
  }
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const int n = parse_number<int>(text);
    return {n, n};
  }
  return {parse_number<int>(text.substr(0, dots)), parse_number<int>(text.substr(dots + 2))};
}

json norm_json(const AnisoNormResult& r, double a) {
  return {{"a", a},
          {"gamma", r.gamma},
          {"gamma_hat", r.gamma_hat},
          {"eta_star", number(r.eta_star)},
          {"q_star", r.q_star},
          {"evaluations", r.evaluations},
          {"status", to_string(r.status)},
          {"h2_bound", r.h2_bound},
          {"hinf_bound", r.hinf_bound}};
}

struct Options {
  std::string model;
  double a = 0.0;
  double gamma = 0.0;
  double tol = 1e-9;
  int grid = 2000;
  std::uint64_t seed = 1;
  int samples = 50;
  std::string out = "bench.csv";
  std::string n_range = "1..8";
  std::string m_list = "3,5";
  int p = 2;
  int trials = 10;
  std::string a_list;
  double rho_cap = 0.999999;
  std::string csv;
  std::optional<int> bench_grid;
};

json run_verify(const Options& o) {
  const StateSpaceModel F = load_model(o.model);
  const AnisoNormResult main = anisotropic_norm(AnisoQuery{F, o.a, o.tol});
  const double grid = grid_oracle_norm(F, o.a, o.grid);
  const double gap = std::abs(main.gamma - grid) / std::max(main.gamma, 1e-300);
  const double mc = monte_carlo_lower_bound(F, o.a, o.samples, o.seed);
  std::vector<double> levels{0.0};
  if (o.a > 0.0) levels.push_back(o.a);
  const Report limits = limits_check(F, levels, o.tol);
  const ConvexityProbeResult convexity = convexity_probe(F, o.a, 20, o.seed);
  const bool oracle_ok = gap <= 1e-4 || main.gamma == grid;
  const bool mc_ok = mc <= main.gamma + 1e-6;
  return {{"a", o.a},
          {"gamma", main.gamma},
          {"grid_oracle", grid},
          {"relative_gap", gap},
          {"monte_carlo_lower_bound", mc},
          {"limits", limits.to_json()},
          {"convexity", convexity.report.to_json()},
          {"passed", oracle_ok && mc_ok && limits.passed() && convexity.report.passed()}};
}

json run_bench_command(const Options& o) {
  BenchConfig config;
  std::tie(config.n_min, config.n_max) = parse_range(o.n_range);
  config.m_list.clear();
  for (const auto& item : split_list(o.m_list)) config.m_list.push_back(parse_number<int>(item));
  config.p = o.p;
  config.trials_per_cell = o.trials;
  if (!o.a_list.empty()) {
    config.a_list.clear();
    for (const auto& item : split_list(o.a_list)) config.a_list.push_back(parse_number<double>(item));
  }
  config.master_seed = o.seed;
  config.rho_cap = o.rho_cap;
  config.tolerance = o.tol;
  if (o.bench_grid) config.grid_size = *o.bench_grid;
  config.out_path = o.out;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto records = run_bench(config);
  std::map<std::string, std::map<std::string, int>> counts;
  for (const auto& r : records) ++counts[to_string(r.algo)][to_string(r.status)];
  return {{"records", records.size()}, {"out", o.out}, {"status_counts", counts}};
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"a-anisotropic norm of discrete-time LTI systems", "aninorm"};
  app.require_subcommand(1);
  Options o;

  auto* norm = app.add_subcommand("norm", "a-anisotropic norm");
  auto* h2 = app.add_subcommand("h2", "H2 norm");
  auto* hinf = app.add_subcommand("hinf", "H-infinity norm");
  auto* aniso = app.add_subcommand("anisotropy", "mean anisotropy of a square shaping filter");
  auto* feasible = app.add_subcommand("feasible", "test |||F|||_a < gamma and return a witness");
  auto* verify = app.add_subcommand("verify", "cross-check the norm against independent oracles");
  auto* bench = app.add_subcommand("bench", "random-corpus benchmark, CSV output");
  auto* summarize_cmd = app.add_subcommand("summarize", "summary table of a benchmark CSV");

  for (auto* sub : {norm, h2, hinf, aniso, feasible, verify}) {
    sub->add_option("--model", o.model, "model JSON file")->required();
    sub->add_option("--tol", o.tol, "tolerance")->check(CLI::PositiveNumber);
  }
  for (auto* sub : {norm, feasible, verify}) {
    sub->add_option("--a", o.a, "mean anisotropy level")->required()->check(CLI::NonNegativeNumber);
  }
  feasible->add_option("--gamma", o.gamma, "threshold")->required()->check(CLI::PositiveNumber);
  verify->add_option("--grid", o.grid, "grid-oracle points")->check(CLI::Range(2, 10000000));
  verify->add_option("--seed", o.seed, "Monte-Carlo seed");
  verify->add_option("--samples", o.samples, "Monte-Carlo samples")->check(CLI::Range(1, 1000000));
  aniso->add_option("--grid", o.grid, "initial quadrature nodes (power of two >= 64)");

  bench->add_option("--n", o.n_range, "state dimension range A..B");
  bench->add_option("--m", o.m_list, "input dimensions, comma separated");
  bench->add_option("--p", o.p, "output dimension");
  bench->add_option("--trials", o.trials, "trials per (n, m) cell");
  bench->add_option("--a-list", o.a_list, "anisotropy levels, comma separated");
  bench->add_option("--rho-cap", o.rho_cap, "spectral radius cap");
  bench->add_option("--seed", o.seed, "master seed");
  bench->add_option("--out", o.out, "CSV output path");
  bench->add_option("--tol", o.tol, "tolerance")->check(CLI::PositiveNumber);
  bench->add_option("--grid", o.bench_grid, "grid-oracle points (default 200)");
  summarize_cmd->add_option("csv", o.csv, "benchmark CSV")->required();

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("aninorm");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    json result;
    if (norm->parsed()) {
      const AnisoNormResult r = anisotropic_norm(AnisoQuery{load_model(o.model), o.a, o.tol});
      result = norm_json(r, o.a);
    } else if (h2->parsed()) {
      const StateSpaceModel F = load_model(o.model);
      const double value = h2_norm(F);
      result = {{"gamma", value},
                {"scaled", F.inputs() > 0 ? number(value / std::sqrt(double(F.inputs()))) : json()}};
    } else if (hinf->parsed()) {
      const StateSpaceModel F = load_model(o.model);
      const HinfBracket b = hinf_bracket(F, o.tol);
      result = {{"gamma", 0.5 * (b.lower + b.upper)}, {"lower", b.lower}, {"upper", b.upper}};
    } else if (aniso->parsed()) {
      const int grid = aniso->count("--grid") ? o.grid : 256;
      const double value = mean_anisotropy(ShapingFilter(load_model(o.model)), grid);
      result = {{"mean_anisotropy", number(value)}, {"rank_deficient", std::isinf(value)}};
    } else if (feasible->parsed()) {
      const FeasibilityResult r = aninorm_feasible(load_model(o.model), o.a, o.gamma, o.tol);
      result = {{"feasible", r.feasible}, {"norm", r.norm}, {"gamma", o.gamma}, {"a", o.a}};
      if (r.witness) {
        result["witness"] = {{"q", r.witness->q},
                             {"R", matrix_json(r.witness->R)},
                             {"determinant_margin", r.witness->determinant_margin},
                             {"lmi_max_eigenvalue", r.witness->lmi_max_eigenvalue}};
      }
    } else if (verify->parsed()) {
      result = run_verify(o);
      out << result.dump(2) << '\n';
      return result["passed"].get<bool>() ? 0 : 1;
    } else if (bench->parsed()) {
      result = run_bench_command(o);
    } else if (summarize_cmd->parsed()) {
      write_summary_csv(summarize(std::filesystem::path(o.csv)), out);
      return 0;
    }
    out << result.dump(2) << '\n';
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace aninorm
