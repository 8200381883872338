#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sbm/detect.hpp"
#include "sbm/params.hpp"

namespace sbm {

// Misclassification budget: absolute, n^x, or exact recovery (s < 1).
struct SSpec {
  enum class Kind { Absolute, Power, Exact };
  Kind kind = Kind::Exact;
  double value = 0;  // s for Absolute, exponent x for Power

  double resolve(int n) const;
  // "exact" | "n^<x>" | "<number>"
  static SSpec parse(const std::string& text);
  std::string str() const;
};

struct SweepConfig {
  int n = 0;
  int k = 2;
  std::vector<double> alphas;  // empty: equal fractions
  // Either coefficient grids (p = a ln n / n, q = b ln n / n) or explicit
  // probability grids; use_ab picks which pair is live.
  std::vector<double> a_grid;
  std::vector<double> b_grid;
  std::vector<double> p_grid;
  std::vector<double> q_grid;
  bool use_ab = true;
  SSpec s;
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::string out;
  double trim_multiplier = 5.0;
  int jobs = 1;
  bool timings = false;  // wall-clock column breaks byte-reproducibility; opt-in

  void validate() const;
  std::size_t row_count() const;
  std::size_t col_count() const;
  std::vector<double> resolved_alphas() const;
  // (p, q) of cell (ai, bi); a/b converted with natural log.
  std::pair<double, double> cell_pq(std::size_t ai, std::size_t bi) const;
};

// Per-trial seeds: derive(master, kTagTrial, ai, bi, trial). Cells are
// reproducible in isolation.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t a_index,
                         std::size_t b_index, int trial);

struct TrialOutcome {
  int misclassified = -1;
  double runtime_ms = 0;
  std::string error;
};

struct CellResult {
  double a = std::numeric_limits<double>::quiet_NaN();
  double b = std::numeric_limits<double>::quiet_NaN();
  double p = 0;
  double q = 0;
  int n = 0;
  int k = 0;
  double s = 0;
  int trials = 0;
  ThresholdReport predicted;
  bool predicted_valid = false;
  bool skipped = false;  // p < q cells are skipped and marked
  double success_rate = 0;
  double mean_misclassified = 0;
  double mean_runtime_ms = 0;
  std::vector<TrialOutcome> outcomes;
  std::string error;
};

CellResult run_cell(const SweepConfig& config, std::size_t a_index, std::size_t b_index);

inline constexpr const char* kSweepCsvHeader =
    "a,b,p,q,n,K,s,trials,divergence,eq1_ratio,theorem1_holds,success_rate,"
    "mean_misclassified,mean_runtime_ms,error";

std::string cell_csv_row(const CellResult& cell, bool timings);

// Iterates the grid row-major (a outer, b inner), writing and flushing one
// CSV row per cell. Comment lines (#...) carry the timestamp and config echo
// and are excluded from reproducibility comparisons. Resumable: data rows
// already present in `out` are kept verbatim and their cells skipped.
// Returns the number of data rows in the finished file.
std::size_t sweep(const SweepConfig& config);

struct DiagnoseConfig {
  std::vector<int> n_grid;
  int k = 2;
  std::vector<double> alphas;
  bool use_ab = true;
  double a = 0, b = 0;
  double p = 0, q = 0;
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::string out;
  double trim_multiplier = 5.0;
  int jobs = 1;

  void validate() const;
};

inline constexpr const char* kDiagnoseCsvHeader =
    "n,trial,p,q,np,norm_x,sqrt_np,ratio,kept,trimmed,h1_margin_min,"
    "h1_margin_mean,h1_violations,h2_violations,h3_violations";

// Concentration diagnostics per (n, trial): spectral norm of the centered
// trimmed adjacency against sqrt(np), trim counts, and counters styled on
// the (H1)(H2)(H3) vertex conditions. Diagnostic only.
std::size_t diagnose(const DiagnoseConfig& config);

// One diagnostics row, exposed for tests.
struct DiagnoseRow {
  int n = 0;
  int trial = 0;
  double p = 0, q = 0, np = 0;
  double norm_x = 0, sqrt_np = 0, ratio = 0;
  int kept = 0, trimmed = 0;
  double h1_margin_min = 0, h1_margin_mean = 0;
  int h1_violations = 0, h2_violations = 0, h3_violations = 0;
};
DiagnoseRow diagnose_row(const SbmParams& params, std::uint64_t seed,
                         double trim_multiplier, int threads);

}  // namespace sbm
