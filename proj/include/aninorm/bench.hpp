#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aninorm {

enum class Algo { MAIN, GRID };
enum class BenchStatus { SUCCESS, INFEASIBLE, NUMERICAL, MAXITER };

std::string to_string(Algo algo);
std::string to_string(BenchStatus status);

/// 27 levels on [0, 20], dense near zero.
std::vector<double> default_a_grid();

struct BenchConfig {
  int n_min = 1;
  int n_max = 8;
  std::vector<int> m_list{3, 5};
  int p = 2;
  int trials_per_cell = 10;
  std::vector<double> a_list = default_a_grid();
  std::uint64_t master_seed = 1;
  double rho_cap = 0.999999;
  double tolerance = 1e-9;
  int grid_size = 200;
  // Empty path: records are returned but no file is written.
  std::filesystem::path out_path = "bench.csv";
  // 0 selects worker_count().
  std::size_t threads = 0;

  /// Throws std::invalid_argument on empty ranges or nonpositive tolerance.
  void validate() const;
};

struct BenchRecord {
  int n = 0;
  int m = 0;
  int p = 0;
  std::uint64_t seed = 0;
  double a = 0.0;
  Algo algo = Algo::MAIN;
  std::optional<double> gamma;
  std::optional<double> q_star;
  int evaluations = 0;
  double cpu_ms = 0.0;
  BenchStatus status = BenchStatus::SUCCESS;
};

/// Model seed of trial `trial` in cell (n, m); a pure function of its inputs.
std::uint64_t cell_seed(std::uint64_t master_seed, int n, int m, int trial);

/// Every (n, m, trial) model is run through MAIN and GRID at every a. Per-run
/// failures become statuses; records come back sorted by (n, m, seed, a, algo)
/// and are written to config.out_path when it is non-empty.
std::vector<BenchRecord> run_bench(const BenchConfig& config);

extern const char* const kBenchCsvHeader;

void write_csv(const std::vector<BenchRecord>& records, std::ostream& out);
void write_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path);
/// Throws SchemaError on a wrong header or malformed row.
std::vector<BenchRecord> read_csv(std::istream& in);

/// One row per (n, m) cell (mean cpu_ms per algorithm), then one row per a
/// (status percentages per algorithm).
struct SummaryRow {
  std::string group;  // "cell" or "a"
  std::optional<int> n;
  std::optional<int> m;
  std::optional<double> a;
  double main_mean_cpu_ms = 0.0;
  double grid_mean_cpu_ms = 0.0;
  double main_success_pct = 0.0;
  double grid_success_pct = 0.0;
  double main_infeasible_pct = 0.0;
  double grid_infeasible_pct = 0.0;
  double main_numerical_pct = 0.0;
  double grid_numerical_pct = 0.0;
  double main_maxiter_pct = 0.0;
  double grid_maxiter_pct = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& records);
std::vector<SummaryRow> summarize(const std::filesystem::path& csv_path);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);

}  // namespace aninorm
