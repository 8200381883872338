#include "sbm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "sbm/generate.hpp"
#include "sbm/parallel.hpp"
#include "sbm/rng.hpp"
#include "sbm/spectral.hpp"

namespace sbm {

namespace {

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::string timestamp_utc() {
  const std::time_t t = std::time(nullptr);
  char buf[40];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> equal_fractions(int k) {
  return std::vector<double>(static_cast<std::size_t>(k), 1.0 / k);
}

}  // namespace

double SSpec::resolve(int n) const {
  switch (kind) {
    case Kind::Exact:
      return kExactRecoveryS;
    case Kind::Power:
      return std::pow(static_cast<double>(n), value);
    case Kind::Absolute:
    default:
      return value;
  }
}

SSpec SSpec::parse(const std::string& text) {
  if (text == "exact") return {Kind::Exact, 0.0};
  try {
    if (text.rfind("n^", 0) == 0) {
      std::size_t used = 0;
      const double x = std::stod(text.substr(2), &used);
      if (used != text.size() - 2) throw std::invalid_argument(text);
      return {Kind::Power, x};
    }
    std::size_t used = 0;
    const double s = std::stod(text, &used);
    if (used != text.size() || !(s >= 0)) throw std::invalid_argument(text);
    return {Kind::Absolute, s};
  } catch (const std::exception&) {
    throw std::invalid_argument("s spec: expected \"exact\", \"n^<x>\" or a number, got \"" +
                                text + "\"");
  }
}

std::string SSpec::str() const {
  switch (kind) {
    case Kind::Exact:
      return "exact";
    case Kind::Power:
      return "n^" + fmt_g(value);
    case Kind::Absolute:
    default:
      return fmt_g(value);
  }
}

void SweepConfig::validate() const {
  if (n < 2) throw std::invalid_argument("sweep: n must be >= 2");
  if (k < 2) throw std::invalid_argument("sweep: K must be >= 2");
  if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (jobs < 1) throw std::invalid_argument("sweep: jobs must be >= 1");
  if (!(trim_multiplier > 0)) throw std::invalid_argument("sweep: trim multiplier must be > 0");
  if (use_ab) {
    if (a_grid.empty() || b_grid.empty())
      throw std::invalid_argument("sweep: a/b grids must be nonempty");
  } else {
    if (p_grid.empty() || q_grid.empty())
      throw std::invalid_argument("sweep: p/q grids must be nonempty");
  }
  if (!alphas.empty() && static_cast<int>(alphas.size()) != k)
    throw std::invalid_argument("sweep: alphas must have K entries");
}

std::size_t SweepConfig::row_count() const {
  return use_ab ? a_grid.size() : p_grid.size();
}

std::size_t SweepConfig::col_count() const {
  return use_ab ? b_grid.size() : q_grid.size();
}

std::vector<double> SweepConfig::resolved_alphas() const {
  return alphas.empty() ? equal_fractions(k) : alphas;
}

std::pair<double, double> SweepConfig::cell_pq(std::size_t ai, std::size_t bi) const {
  if (use_ab) {
    const double scale = std::log(static_cast<double>(n)) / n;
    return {a_grid.at(ai) * scale, b_grid.at(bi) * scale};
  }
  return {p_grid.at(ai), q_grid.at(bi)};
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t a_index,
                         std::size_t b_index, int trial) {
  return derive(master_seed, kTagTrial, a_index, b_index,
                static_cast<std::uint64_t>(trial));
}

CellResult run_cell(const SweepConfig& config, std::size_t a_index, std::size_t b_index) {
  CellResult cell;
  cell.n = config.n;
  cell.k = config.k;
  cell.trials = config.trials;
  cell.s = config.s.resolve(config.n);
  if (config.use_ab) {
    cell.a = config.a_grid.at(a_index);
    cell.b = config.b_grid.at(b_index);
  }
  const auto [p, q] = config.cell_pq(a_index, b_index);
  cell.p = p;
  cell.q = q;
  if (p < q) {
    cell.skipped = true;
    cell.error = "skipped: q > p";
    return cell;
  }

  std::optional<SbmParams> params;
  try {
    params.emplace(config.n, config.k, config.resolved_alphas(), p, q);
  } catch (const std::exception& e) {
    cell.skipped = true;
    cell.error = sanitize(std::string("params: ") + e.what());
    return cell;
  }

  try {
    cell.predicted = check_condition(*params, cell.s);
    cell.predicted_valid = true;
  } catch (const std::exception& e) {
    cell.predicted.divergence = divergence(*params);
    cell.error = sanitize(std::string("threshold: ") + e.what());
  }

  cell.outcomes.assign(static_cast<std::size_t>(config.trials), {});
  parallel_for(config.trials, config.jobs, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t t = begin; t < end; ++t) {
      TrialOutcome& out = cell.outcomes[t];
      try {
        const std::uint64_t seed =
            trial_seed(config.master_seed, a_index, b_index, static_cast<int>(t));
        const SbmInstance inst = generate_sbm(*params, seed);
        DetectConfig dc;
        dc.seed = seed;
        dc.trim_multiplier = config.trim_multiplier;
        const auto t0 = std::chrono::steady_clock::now();
        const DetectionResult det = spectral_partition(inst.graph, config.k, dc);
        const auto t1 = std::chrono::steady_clock::now();
        out.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        out.misclassified = misclassified(det.estimate, inst.truth);
      } catch (const std::exception& e) {
        out.error = sanitize(e.what());
      }
    }
  });

  int successes = 0, valid = 0;
  double mis_sum = 0, ms_sum = 0;
  std::string trial_errors;
  for (int t = 0; t < config.trials; ++t) {
    const TrialOutcome& out = cell.outcomes[t];
    if (!out.error.empty()) {
      if (trial_errors.size() < 160)
        trial_errors += "trial " + std::to_string(t) + ": " + out.error + "; ";
      continue;
    }
    ++valid;
    mis_sum += out.misclassified;
    ms_sum += out.runtime_ms;
    if (out.misclassified <= cell.s) ++successes;
  }
  cell.success_rate = static_cast<double>(successes) / config.trials;
  cell.mean_misclassified = valid > 0 ? mis_sum / valid : 0.0;
  cell.mean_runtime_ms = valid > 0 ? ms_sum / valid : 0.0;
  if (!trial_errors.empty()) cell.error += sanitize(trial_errors);
  return cell;
}

std::string cell_csv_row(const CellResult& cell, bool timings) {
  std::ostringstream row;
  row << (std::isnan(cell.a) ? "" : fmt_g(cell.a)) << ','
      << (std::isnan(cell.b) ? "" : fmt_g(cell.b)) << ',' << fmt_g(cell.p) << ','
      << fmt_g(cell.q) << ',' << cell.n << ',' << cell.k << ',' << fmt_g(cell.s) << ','
      << cell.trials << ',';
  if (cell.skipped) {
    row << ",,,,,";
  } else {
    row << fmt_g(cell.predicted.divergence) << ',';
    if (cell.predicted_valid)
      row << fmt_g(cell.predicted.eq1_ratio) << ','
          << (cell.predicted.theorem1_holds ? 1 : 0) << ',';
    else
      row << ",,";
    row << fmt_g(cell.success_rate) << ',' << fmt_g(cell.mean_misclassified) << ',';
    if (timings) row << fmt_g(cell.mean_runtime_ms);
  }
  row << ',' << cell.error;
  return row.str();
}

namespace {

// Complete non-comment lines of an existing output file; the trailing
// partial line of an interrupted run is dropped.
std::vector<std::string> existing_rows(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  if (content.empty()) return {};
  const std::size_t last_nl = content.rfind('\n');
  if (last_nl == std::string::npos) return {};
  content.resize(last_nl);
  std::vector<std::string> lines;
  std::istringstream ss(content);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::size_t sweep(const SweepConfig& config) {
  config.validate();
  if (config.out.empty()) throw std::invalid_argument("sweep: output path required");

  std::vector<std::string> kept = existing_rows(config.out);
  if (!kept.empty()) {
    if (kept.front() != kSweepCsvHeader)
      throw std::invalid_argument("sweep: " + config.out +
                                  " exists with a different schema; refusing to resume");
    kept.erase(kept.begin());
  }
  const std::size_t total = config.row_count() * config.col_count();
  if (kept.size() > total)
    throw std::invalid_argument("sweep: existing file has more rows than the grid");

  std::ofstream out(config.out, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + config.out + " for writing");
  out << "# sbm sweep " << timestamp_utc() << " n=" << config.n << " K=" << config.k
      << " s=" << config.s.str() << " trials=" << config.trials
      << " seed=" << config.master_seed << " grid=" << config.row_count() << "x"
      << config.col_count() << (config.use_ab ? " mode=ab" : " mode=pq")
      << " resumed_rows=" << kept.size() << "\n";
  out << kSweepCsvHeader << "\n";
  for (const std::string& line : kept) out << line << "\n";
  out.flush();
  if (!out) throw IoError("write failed: " + config.out);

  std::size_t written = kept.size();
  for (std::size_t idx = written; idx < total; ++idx) {
    const std::size_t ai = idx / config.col_count();
    const std::size_t bi = idx % config.col_count();
    const CellResult cell = run_cell(config, ai, bi);
    out << cell_csv_row(cell, config.timings) << "\n";
    out.flush();
    if (!out) throw IoError("write failed: " + config.out);
    ++written;
  }
  return written;
}

void DiagnoseConfig::validate() const {
  if (k < 2) throw std::invalid_argument("diagnose: K must be >= 2");
  if (trials < 1) throw std::invalid_argument("diagnose: trials must be >= 1");
  if (jobs < 1) throw std::invalid_argument("diagnose: jobs must be >= 1");
  if (!(trim_multiplier > 0))
    throw std::invalid_argument("diagnose: trim multiplier must be > 0");
  for (int n : n_grid)
    if (n < 2) throw std::invalid_argument("diagnose: every n must be >= 2");
  if (!alphas.empty() && static_cast<int>(alphas.size()) != k)
    throw std::invalid_argument("diagnose: alphas must have K entries");
}

DiagnoseRow diagnose_row(const SbmParams& params, std::uint64_t seed,
                         double trim_multiplier, int threads) {
  DiagnoseRow row;
  row.n = params.n();
  row.p = params.p();
  row.q = params.q();
  row.np = static_cast<double>(params.n()) * params.p();
  row.sqrt_np = std::sqrt(row.np);

  const SbmInstance inst = generate_sbm(params, seed);
  const TrimResult tr = trim(inst.graph, params.k(), trim_multiplier);
  row.kept = static_cast<int>(tr.gamma.size());
  row.trimmed = static_cast<int>(tr.removed.size());

  // X_Gamma = A_Gamma - E[A_Gamma], centered with the true block expectation
  // (simulation only).
  SparseSym a_gamma = SparseSym::from_graph_subset(inst.graph, tr.gamma);
  std::vector<int> labels_gamma;
  labels_gamma.reserve(tr.gamma.size());
  for (int v : tr.gamma) labels_gamma.push_back(inst.truth.label(v));
  const CenteredSym x(std::move(a_gamma), std::move(labels_gamma), params.k(),
                      params.p(), params.q());
  row.norm_x = spectral_norm(x, 1e-6, 20000, seed, threads);
  row.ratio = row.sqrt_np > 0 ? row.norm_x / row.sqrt_np : 0.0;

  // (H1)/(H2)/(H3)-style counters; diagnostics, not the proof's H set.
  const int n = params.n();
  const auto sizes = inst.truth.community_sizes();
  const double lognp = std::log(row.np);
  const double h1_threshold =
      row.np > 1 ? params.p() / std::pow(lognp, 4) : std::numeric_limits<double>::infinity();
  const double h2_threshold = 10.0 * row.np;
  const double h3_threshold = row.np > 1 ? 2.0 * lognp * lognp : 0.0;

  std::vector<char> z1(static_cast<std::size_t>(n), 0);
  double margin_sum = 0;
  row.h1_margin_min = std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> cnt(static_cast<std::size_t>(params.k()));
  for (int v = 0; v < n; ++v) {
    std::fill(cnt.begin(), cnt.end(), 0);
    for (int w : inst.graph.neighbors(v)) ++cnt[inst.truth.label(w)];
    const int cv = inst.truth.label(v);
    double margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < params.k(); ++j) {
      if (j == cv || sizes[j] == 0) continue;
      margin = std::min(margin, static_cast<double>(cnt[cv]) / sizes[cv] -
                                    static_cast<double>(cnt[j]) / sizes[j]);
    }
    margin_sum += margin;
    row.h1_margin_min = std::min(row.h1_margin_min, margin);
    const bool h1_bad = margin <= h1_threshold;
    const bool h2_bad = inst.graph.degree(v) > h2_threshold;
    if (h1_bad) ++row.h1_violations;
    if (h2_bad) ++row.h2_violations;
    if (h1_bad || h2_bad) z1[v] = 1;
  }
  row.h1_margin_mean = margin_sum / n;
  for (int v = 0; v < n; ++v) {
    if (z1[v]) continue;
    int into_z1 = 0;
    for (int w : inst.graph.neighbors(v)) into_z1 += z1[w];
    if (into_z1 > h3_threshold) ++row.h3_violations;
  }
  return row;
}

std::size_t diagnose(const DiagnoseConfig& config) {
  config.validate();
  if (config.out.empty()) throw std::invalid_argument("diagnose: output path required");
  std::ofstream out(config.out, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + config.out + " for writing");
  out << "# sbm diagnose " << timestamp_utc() << " trials=" << config.trials
      << " seed=" << config.master_seed << "\n";
  out << kDiagnoseCsvHeader << "\n";

  const auto alphas =
      config.alphas.empty() ? equal_fractions(config.k) : config.alphas;
  std::size_t rows = 0;
  for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
    const int n = config.n_grid[ni];
    const double p = config.use_ab ? config.a * std::log(static_cast<double>(n)) / n
                                   : config.p;
    const double q = config.use_ab ? config.b * std::log(static_cast<double>(n)) / n
                                   : config.q;
    const SbmParams params(n, config.k, alphas, p, q);
    for (int t = 0; t < config.trials; ++t) {
      const std::uint64_t seed =
          derive(config.master_seed, kTagDiag, ni, static_cast<std::uint64_t>(t));
      DiagnoseRow row =
          diagnose_row(params, seed, config.trim_multiplier, config.jobs);
      row.trial = t;
      out << row.n << ',' << row.trial << ',' << fmt_g(row.p) << ',' << fmt_g(row.q)
          << ',' << fmt_g(row.np) << ',' << fmt_g(row.norm_x) << ','
          << fmt_g(row.sqrt_np) << ',' << fmt_g(row.ratio) << ',' << row.kept << ','
          << row.trimmed << ',' << fmt_g(row.h1_margin_min) << ','
          << fmt_g(row.h1_margin_mean) << ',' << row.h1_violations << ','
          << row.h2_violations << ',' << row.h3_violations << "\n";
      out.flush();
      if (!out) throw IoError("write failed: " + config.out);
      ++rows;
    }
  }
  return rows;
}

}  // namespace sbm
