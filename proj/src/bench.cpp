#include "aninorm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "aninorm/anisotropy.hpp"
#include "aninorm/errors.hpp"
#include "aninorm/lti.hpp"
#include "aninorm/parallel.hpp"
#include "aninorm/verify.hpp"

namespace aninorm {

const char* const kBenchCsvHeader = "n,m,p,seed,a,algo,gamma,q_star,evaluations,cpu_ms,status";

std::string to_string(Algo algo) { return algo == Algo::MAIN ? "MAIN" : "GRID"; }

std::string to_string(BenchStatus status) {
  switch (status) {
    case BenchStatus::SUCCESS:
      return "SUCCESS";
    case BenchStatus::INFEASIBLE:
      return "INFEASIBLE";
    case BenchStatus::NUMERICAL:
      return "NUMERICAL";
    case BenchStatus::MAXITER:
      return "MAXITER";
  }
  return "NUMERICAL";
}

std::vector<double> default_a_grid() {
  return {0.0, 0.02, 0.04, 0.06, 0.08, 0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0,
          4.5, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 14.0, 16.0, 18.0, 20.0};
}

void BenchConfig::validate() const {
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("bench: empty n range");
  if (m_list.empty() || std::any_of(m_list.begin(), m_list.end(), [](int m) { return m < 1; })) {
    throw std::invalid_argument("bench: m list must be non-empty and positive");
  }
  if (p < 1) throw std::invalid_argument("bench: p must be positive");
  if (trials_per_cell < 1) throw std::invalid_argument("bench: trials must be positive");
  if (a_list.empty()) throw std::invalid_argument("bench: a list is empty");
  for (double a : a_list) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("bench: a must be >= 0");
  }
  if (!(rho_cap > 0.0 && rho_cap < 1.0)) throw std::invalid_argument("bench: rho_cap must lie in (0, 1)");
  if (!(tolerance > 0.0)) throw std::invalid_argument("bench: tolerance must be positive");
  if (grid_size < 2) throw std::invalid_argument("bench: grid size must be at least 2");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

BenchStatus classify_current_exception() {
  try {
    throw;
  } catch (const NoStabilizingSolution&) {
    return BenchStatus::INFEASIBLE;
  } catch (const StabilityError&) {
    return BenchStatus::INFEASIBLE;
  } catch (const BracketFailure&) {
    return BenchStatus::INFEASIBLE;
  } catch (const MaxIterationsExceeded&) {
    return BenchStatus::MAXITER;
  } catch (const ToleranceNotReached&) {
    return BenchStatus::MAXITER;
  } catch (...) {
    return BenchStatus::NUMERICAL;
  }
}

template <class Run>
BenchRecord timed_run(BenchRecord record, Run&& run) {
  const auto start = std::chrono::steady_clock::now();
  try {
    run(record);
    record.status = record.gamma && std::isfinite(*record.gamma) ? BenchStatus::SUCCESS
                                                                  : BenchStatus::NUMERICAL;
  } catch (...) {
    record.status = classify_current_exception();
  }
  if (record.status != BenchStatus::SUCCESS) {
    record.gamma.reset();
    record.q_star.reset();
  }
  const auto stop = std::chrono::steady_clock::now();
  record.cpu_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return record;
}

std::vector<BenchRecord> run_model(const BenchConfig& config, int n, int m, int trial) {
  const std::uint64_t seed = cell_seed(config.master_seed, n, m, trial);
  BenchRecord base;
  base.n = n;
  base.m = m;
  base.p = config.p;
  base.seed = seed;
  std::vector<BenchRecord> out;
  std::optional<StateSpaceModel> model;
  BenchStatus generation_failure = BenchStatus::SUCCESS;
  try {
    model = random_stable(n, m, config.p, seed, config.rho_cap);
  } catch (...) {
    generation_failure = classify_current_exception();
  }
  for (double a : config.a_list) {
    base.a = a;
    for (Algo algo : {Algo::MAIN, Algo::GRID}) {
      base.algo = algo;
      if (!model) {
        BenchRecord failed = base;
        failed.status = generation_failure;
        out.push_back(failed);
        continue;
      }
      out.push_back(timed_run(base, [&](BenchRecord& r) {
        if (algo == Algo::MAIN) {
          const AnisoNormResult result = anisotropic_norm(AnisoQuery{*model, a, config.tolerance});
          r.gamma = result.gamma;
          r.q_star = result.q_star;
          r.evaluations = result.evaluations;
        } else {
          const GridOracleResult result = grid_oracle(*model, a, config.grid_size);
          r.gamma = result.gamma;
          r.q_star = result.q_star;
          r.evaluations = result.evaluations;
        }
      }));
    }
  }
  return out;
}

std::string format_number(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", x);
  return buffer;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

template <class T>
T parse_field(const std::string& text, const char* name, std::size_t row) {
  try {
    std::size_t used = 0;
    T value;
    if constexpr (std::is_same_v<T, double>) {
      value = std::stod(text, &used);
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      value = std::stoull(text, &used);
    } else {
      value = static_cast<T>(std::stol(text, &used));
    }
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw SchemaError("bench csv: row " + std::to_string(row) + ": bad " + name + " '" + text + "'");
  }
}

BenchStatus parse_status(const std::string& text, std::size_t row) {
  for (BenchStatus s : {BenchStatus::SUCCESS, BenchStatus::INFEASIBLE, BenchStatus::NUMERICAL,
                        BenchStatus::MAXITER}) {
    if (text == to_string(s)) return s;
  }
  throw SchemaError("bench csv: row " + std::to_string(row) + ": unknown status '" + text + "'");
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t master_seed, int n, int m, int trial) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(n));
  h = splitmix64(h ^ static_cast<std::uint64_t>(m));
  return splitmix64(h ^ static_cast<std::uint64_t>(trial));
}

std::vector<BenchRecord> run_bench(const BenchConfig& config) {
  config.validate();
  struct Cell {
    int n, m, trial;
  };
  std::vector<Cell> cells;
  for (int n = config.n_min; n <= config.n_max; ++n) {
    for (int m : config.m_list) {
      for (int t = 0; t < config.trials_per_cell; ++t) cells.push_back({n, m, t});
    }
  }
  std::vector<std::vector<BenchRecord>> per_cell(cells.size());
  parallel_for(
      cells.size(),
      [&](std::size_t i) { per_cell[i] = run_model(config, cells[i].n, cells[i].m, cells[i].trial); },
      config.threads);

  std::vector<BenchRecord> records;
  for (auto& chunk : per_cell) records.insert(records.end(), chunk.begin(), chunk.end());
  std::sort(records.begin(), records.end(), [](const BenchRecord& x, const BenchRecord& y) {
    return std::tie(x.n, x.m, x.seed, x.a, x.algo) < std::tie(y.n, y.m, y.seed, y.a, y.algo);
  });
  if (!config.out_path.empty()) write_csv(records, config.out_path);
  return records;
}

void write_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << kBenchCsvHeader << '\n';
  for (const BenchRecord& r : records) {
    out << r.n << ',' << r.m << ',' << r.p << ',' << r.seed << ',' << format_number(r.a) << ','
        << to_string(r.algo) << ',' << (r.gamma ? format_number(*r.gamma) : "") << ','
        << (r.q_star ? format_number(*r.q_star) : "") << ',' << r.evaluations << ','
        << format_number(r.cpu_ms) << ',' << to_string(r.status) << '\n';
  }
}

void write_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("bench: cannot open " + path.string() + " for writing");
  write_csv(records, out);
  out.flush();
  if (!out) throw std::runtime_error("bench: write to " + path.string() + " failed");
}

std::vector<BenchRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("bench csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kBenchCsvHeader) throw SchemaError("bench csv: unexpected header '" + line + "'");
  std::vector<BenchRecord> records;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 11) {
      throw SchemaError("bench csv: row " + std::to_string(row) + " has " +
                        std::to_string(f.size()) + " fields, expected 11");
    }
    BenchRecord r;
    r.n = parse_field<int>(f[0], "n", row);
    r.m = parse_field<int>(f[1], "m", row);
    r.p = parse_field<int>(f[2], "p", row);
    r.seed = parse_field<std::uint64_t>(f[3], "seed", row);
    r.a = parse_field<double>(f[4], "a", row);
    if (f[5] == "MAIN") {
      r.algo = Algo::MAIN;
    } else if (f[5] == "GRID") {
      r.algo = Algo::GRID;
    } else {
      throw SchemaError("bench csv: row " + std::to_string(row) + ": unknown algo '" + f[5] + "'");
    }
    if (!f[6].empty()) r.gamma = parse_field<double>(f[6], "gamma", row);
    if (!f[7].empty()) r.q_star = parse_field<double>(f[7], "q_star", row);
    r.evaluations = parse_field<int>(f[8], "evaluations", row);
    r.cpu_ms = parse_field<double>(f[9], "cpu_ms", row);
    r.status = parse_status(f[10], row);
    records.push_back(r);
  }
  return records;
}

namespace {

struct Tally {
  double cpu_ms = 0.0;
  int runs = 0;
  int by_status[4] = {0, 0, 0, 0};

  void add(const BenchRecord& r) {
    cpu_ms += r.cpu_ms;
    ++runs;
    ++by_status[static_cast<int>(r.status)];
  }
  double mean_cpu() const { return runs ? cpu_ms / runs : 0.0; }
  double pct(BenchStatus s) const { return runs ? 100.0 * by_status[static_cast<int>(s)] / runs : 0.0; }
};

SummaryRow make_row(std::string group, const Tally& main, const Tally& grid) {
  SummaryRow row;
  row.group = std::move(group);
  row.main_mean_cpu_ms = main.mean_cpu();
  row.grid_mean_cpu_ms = grid.mean_cpu();
  row.main_success_pct = main.pct(BenchStatus::SUCCESS);
  row.grid_success_pct = grid.pct(BenchStatus::SUCCESS);
  row.main_infeasible_pct = main.pct(BenchStatus::INFEASIBLE);
  row.grid_infeasible_pct = grid.pct(BenchStatus::INFEASIBLE);
  row.main_numerical_pct = main.pct(BenchStatus::NUMERICAL);
  row.grid_numerical_pct = grid.pct(BenchStatus::NUMERICAL);
  row.main_maxiter_pct = main.pct(BenchStatus::MAXITER);
  row.grid_maxiter_pct = grid.pct(BenchStatus::MAXITER);
  return row;
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& records) {
  using Pair = std::pair<Tally, Tally>;
  std::map<std::pair<int, int>, Pair> cells;
  std::map<double, Pair> levels;
  for (const BenchRecord& r : records) {
    Pair& cell = cells[{r.n, r.m}];
    Pair& level = levels[r.a];
    (r.algo == Algo::MAIN ? cell.first : cell.second).add(r);
    (r.algo == Algo::MAIN ? level.first : level.second).add(r);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, tallies] : cells) {
    SummaryRow row = make_row("cell", tallies.first, tallies.second);
    row.n = key.first;
    row.m = key.second;
    rows.push_back(row);
  }
  for (const auto& [a, tallies] : levels) {
    SummaryRow row = make_row("a", tallies.first, tallies.second);
    row.a = a;
    rows.push_back(row);
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("summarize: cannot open " + csv_path.string());
  return summarize(read_csv(in));
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "group,n,m,a,"
         "main_mean_cpu_ms,main_success_pct,main_infeasible_pct,main_numerical_pct,main_maxiter_pct,"
         "grid_mean_cpu_ms,grid_success_pct,grid_infeasible_pct,grid_numerical_pct,grid_maxiter_pct\n";
  for (const SummaryRow& r : rows) {
    out << r.group << ',' << (r.n ? std::to_string(*r.n) : "") << ','
        << (r.m ? std::to_string(*r.m) : "") << ',' << (r.a ? format_number(*r.a) : "") << ','
        << format_number(r.main_mean_cpu_ms) << ',' << format_number(r.main_success_pct) << ','
        << format_number(r.main_infeasible_pct) << ',' << format_number(r.main_numerical_pct) << ','
        << format_number(r.main_maxiter_pct) << ',' << format_number(r.grid_mean_cpu_ms) << ','
        << format_number(r.grid_success_pct) << ',' << format_number(r.grid_infeasible_pct) << ','
        << format_number(r.grid_numerical_pct) << ',' << format_number(r.grid_maxiter_pct) << '\n';
  }
}

}  // namespace aninorm
