#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sbm/harness.hpp"
#include "sbm/rng.hpp"

using namespace sbm;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Non-comment lines; the reproducibility contract covers exactly these.
std::vector<std::string> body_lines(const std::string& path) {
  std::istringstream ss(slurp(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(ss, line))
    if (line.empty() || line[0] != '#') lines.push_back(line);
  return lines;
}

std::string tmp_path(const std::string& name) {
  return std::string("harness_test_") + name + ".csv";
}

SweepConfig small_config(const std::string& out) {
  SweepConfig c;
  c.n = 120;
  c.k = 2;
  c.a_grid = {6.0, 3.0};
  c.b_grid = {1.0, 4.0};  // (3, 4) cell violates p >= q and must be skipped
  c.s = {SSpec::Kind::Exact, 0.0};
  c.trials = 2;
  c.master_seed = 11;
  c.out = out;
  return c;
}

}  // namespace

TEST_CASE("SSpec parses the three forms and rejects junk") {
  CHECK(SSpec::parse("exact").kind == SSpec::Kind::Exact);
  CHECK(SSpec::parse("exact").resolve(2000) == kExactRecoveryS);
  const SSpec pow_half = SSpec::parse("n^0.5");
  CHECK(pow_half.kind == SSpec::Kind::Power);
  CHECK(pow_half.resolve(2000) == doctest::Approx(std::sqrt(2000.0)));
  const SSpec abs = SSpec::parse("44.7");
  CHECK(abs.kind == SSpec::Kind::Absolute);
  CHECK(abs.resolve(2000) == 44.7);
  CHECK_THROWS_AS(SSpec::parse("n^"), std::invalid_argument);
  CHECK_THROWS_AS(SSpec::parse("fraction"), std::invalid_argument);
  CHECK_THROWS_AS(SSpec::parse("-3"), std::invalid_argument);
  CHECK(SSpec::parse("n^0.5").str() == "n^0.5");
}

TEST_CASE("trial seeds separate cells and trials") {
  CHECK(trial_seed(1, 0, 0, 0) != trial_seed(1, 0, 0, 1));
  CHECK(trial_seed(1, 0, 0, 0) != trial_seed(1, 0, 1, 0));
  CHECK(trial_seed(1, 0, 0, 0) != trial_seed(1, 1, 0, 0));
  CHECK(trial_seed(1, 2, 3, 4) == trial_seed(1, 2, 3, 4));
  CHECK(trial_seed(1, 2, 3, 4) != trial_seed(2, 2, 3, 4));
}

TEST_CASE("run_cell: p=q cell has (essentially) zero exact-recovery rate") {
  SweepConfig c;
  c.n = 300;
  c.k = 2;
  c.a_grid = {3.0};
  c.b_grid = {3.0};
  c.s = {SSpec::Kind::Exact, 0.0};
  c.trials = 5;
  c.master_seed = 3;
  const auto cell = run_cell(c, 0, 0);
  CHECK_FALSE(cell.skipped);
  CHECK(cell.success_rate == 0.0);
  CHECK(cell.predicted.divergence == 0.0);
  CHECK_FALSE(cell.predicted.theorem1_holds);
  CHECK(cell.mean_misclassified > 10.0);
  CHECK(cell.mean_runtime_ms > 0.0);
}

TEST_CASE("run_cell: q > p cells are skipped and marked") {
  const auto c = small_config("");
  const auto cell = run_cell(c, 1, 1);  // a=3, b=4
  CHECK(cell.skipped);
  CHECK(cell.error == "skipped: q > p");
  CHECK(cell.trials == 2);
  const std::string row = cell_csv_row(cell, false);
  CHECK(row.find("skipped: q > p") != std::string::npos);
}

TEST_CASE("run_cell: success monotone in s on identical outcomes") {
  SweepConfig c;
  c.n = 200;
  c.k = 2;
  c.a_grid = {4.0};
  c.b_grid = {1.5};
  c.trials = 6;
  c.master_seed = 5;
  c.s = SSpec::parse("exact");
  const auto exact = run_cell(c, 0, 0);
  c.s = SSpec::parse("n^0.5");
  const auto partial = run_cell(c, 0, 0);
  c.s = SSpec::parse("150");
  const auto loose = run_cell(c, 0, 0);
  // Same master seed: identical trials, so rates are ordered by s.
  for (int t = 0; t < c.trials; ++t)
    CHECK(exact.outcomes[t].misclassified == partial.outcomes[t].misclassified);
  CHECK(exact.success_rate <= partial.success_rate);
  CHECK(partial.success_rate <= loose.success_rate);
}

TEST_CASE("sweep: 1x1 grid writes exactly the run_cell row") {
  const std::string out = tmp_path("one_cell");
  std::remove(out.c_str());
  SweepConfig c = small_config(out);
  c.a_grid = {6.0};
  c.b_grid = {1.0};
  CHECK(sweep(c) == 1);
  const auto body = body_lines(out);
  REQUIRE(body.size() == 2);
  CHECK(body[0] == kSweepCsvHeader);
  CHECK(body[1] == cell_csv_row(run_cell(c, 0, 0), false));
  std::remove(out.c_str());
}

TEST_CASE("sweep: reruns are byte-identical outside comments") {
  const std::string out1 = tmp_path("repro1");
  const std::string out2 = tmp_path("repro2");
  std::remove(out1.c_str());
  std::remove(out2.c_str());
  SweepConfig c = small_config(out1);
  CHECK(sweep(c) == 4);
  c.out = out2;
  CHECK(sweep(c) == 4);
  CHECK(body_lines(out1) == body_lines(out2));
  // The timing column stays empty unless explicitly requested.
  for (const auto& line : body_lines(out1))
    if (line != kSweepCsvHeader) CHECK(line.find(",,") != std::string::npos);
  std::remove(out1.c_str());
  std::remove(out2.c_str());
}

TEST_CASE("sweep: resume reproduces the uninterrupted file") {
  const std::string full_path = tmp_path("full");
  const std::string resumed_path = tmp_path("resumed");
  std::remove(full_path.c_str());
  std::remove(resumed_path.c_str());

  SweepConfig c = small_config(full_path);
  CHECK(sweep(c) == 4);
  const std::string full = slurp(full_path);

  // Interrupt after two cells: header + 2 rows, mid-row tail garbage.
  const auto body = body_lines(full_path);
  {
    std::ofstream trunc(resumed_path, std::ios::binary);
    trunc << "# interrupted run\n" << body[0] << "\n" << body[1] << "\n" << body[2]
          << "\n1.5,0.2,partia";  // no trailing newline: dropped on resume
  }
  c.out = resumed_path;
  CHECK(sweep(c) == 4);
  CHECK(body_lines(resumed_path) == body_lines(full_path));
  std::remove(full_path.c_str());
  std::remove(resumed_path.c_str());
}

TEST_CASE("sweep: refuses to resume onto a foreign schema") {
  const std::string out = tmp_path("foreign");
  {
    std::ofstream f(out, std::ios::binary);
    f << "x,y,z\n1,2,3\n";
  }
  SweepConfig c = small_config(out);
  CHECK_THROWS_AS(sweep(c), std::invalid_argument);
  std::remove(out.c_str());
}

TEST_CASE("sweep: validation rejects bad configs") {
  SweepConfig c = small_config("out.csv");
  c.trials = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small_config("out.csv");
  c.a_grid.clear();
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small_config("out.csv");
  c.alphas = {0.2, 0.3, 0.5};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small_config("");
  CHECK_THROWS_AS(sweep(c), std::invalid_argument);
}

TEST_CASE("diagnose: empty grid emits a header-only CSV") {
  const std::string out = tmp_path("diag_empty");
  std::remove(out.c_str());
  DiagnoseConfig c;
  c.out = out;
  c.use_ab = true;
  c.a = 20;
  c.b = 2;
  CHECK(diagnose(c) == 0);
  const auto body = body_lines(out);
  REQUIRE(body.size() == 1);
  CHECK(body[0] == kDiagnoseCsvHeader);
  std::remove(out.c_str());
}

TEST_CASE("diagnose: rows carry the concentration diagnostics" *
          doctest::timeout(300)) {
  const std::string out = tmp_path("diag");
  std::remove(out.c_str());
  DiagnoseConfig c;
  c.out = out;
  c.n_grid = {200, 400};
  c.a = 20;
  c.b = 2;
  c.trials = 1;
  c.master_seed = 2;
  CHECK(diagnose(c) == 2);
  const auto body = body_lines(out);
  REQUIRE(body.size() == 3);
  CHECK(body[0] == kDiagnoseCsvHeader);
  std::remove(out.c_str());

  // Direct row checks at n = 500, a = 20: the (H2) bound 10np is violated by
  // (essentially) nobody, and kept + trimmed covers V.
  const int n = 500;
  const double scale = std::log(static_cast<double>(n)) / n;
  const SbmParams params(n, 2, {0.5, 0.5}, 20 * scale, 2 * scale);
  const auto row = diagnose_row(params, 1, 5.0, 1);
  CHECK(row.kept + row.trimmed == n);
  CHECK(row.h2_violations <= n / 100);  // fraction <= 0.01
  CHECK(row.ratio > 0.2);
  CHECK(row.ratio < 3.0);
  CHECK(row.h1_margin_mean > 0.0);  // communities separate on average
}
