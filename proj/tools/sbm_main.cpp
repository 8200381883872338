// sbm: generate / detect / sweep / diagnose for the spectral partition
// pipeline. Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbm/detect.hpp"
#include "sbm/generate.hpp"
#include "sbm/harness.hpp"
#include "sbm/oracle.hpp"
#include "sbm/params.hpp"

namespace {

// "1,2.5,3" or "lo:hi:step" (inclusive upper end within 1e-9).
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0, step = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
      throw std::invalid_argument("grid: expected lo:hi:step with step > 0, got " + text);
    for (double x = lo; x <= hi + 1e-9; x += step) out.push_back(x);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string tok = text.substr(pos, comma - pos);
    if (tok.empty()) throw std::invalid_argument("grid: empty element in " + text);
    std::size_t used = 0;
    out.push_back(std::stod(tok, &used));
    if (used != tok.size()) throw std::invalid_argument("grid: bad number " + tok);
    pos = comma + 1;
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double x : parse_grid(text)) {
    const int v = static_cast<int>(std::llround(x));
    if (std::abs(x - v) > 1e-9) throw std::invalid_argument("expected integers: " + text);
    out.push_back(v);
  }
  return out;
}

// Flat key=value file, same names as the long flags (no leading dashes).
// '#' starts a comment line; blank lines are ignored.
std::map<std::string, std::string> read_flat_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sbm::IoError("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("expected a boolean, got \"" + v + "\"");
}

std::pair<double, double> resolve_pq(int n, double a, double b, double p, double q,
                                     bool have_ab, bool have_pq) {
  if (have_ab == have_pq)
    throw std::invalid_argument("give exactly one of (--a, --b) or (--p, --q)");
  if (have_ab) {
    const double scale = std::log(static_cast<double>(n)) / n;
    return {a * scale, b * scale};
  }
  return {p, q};
}

struct GenerateArgs {
  int n = 0, k = 2;
  std::string alphas;
  double a = -1, b = -1, p = -1, q = -1;
  std::uint64_t seed = 0;
  std::string out;
};

int run_generate(const GenerateArgs& args) {
  const auto [p, q] = resolve_pq(args.n, args.a, args.b, args.p, args.q,
                                 args.a >= 0 || args.b >= 0, args.p >= 0 || args.q >= 0);
  std::vector<double> alphas;
  if (!args.alphas.empty()) alphas = parse_grid(args.alphas);
  else alphas.assign(args.k, 1.0 / args.k);
  const sbm::SbmParams params(args.n, args.k, alphas, p, q);
  const auto inst = sbm::generate_sbm(params, args.seed);
  const std::string edges_file = args.out + ".edges";
  const std::string truth_file = args.out + ".truth";
  sbm::write_edge_list_file(inst.graph, edges_file);
  sbm::write_partition_file(inst.truth, truth_file);
  std::printf("n=%d\nm=%lld\nexpected_edges=%.12g\np=%.12g\nq=%.12g\nseed=%llu\n",
              inst.graph.n(), static_cast<long long>(inst.graph.m()),
              params.expected_edges(), p, q,
              static_cast<unsigned long long>(args.seed));
  std::printf("edges_file=%s\ntruth_file=%s\n", edges_file.c_str(), truth_file.c_str());
  return 0;
}

struct DetectArgs {
  std::string in;
  int k = 2;
  std::uint64_t seed = 0;
  std::string out = "partition.txt";
  std::string truth;
  double trim_mult = 5.0;
  int jobs = 1;
};

int run_detect(const DetectArgs& args) {
  const sbm::Graph g = sbm::read_edge_list_file(args.in);
  sbm::DetectConfig cfg;
  cfg.seed = args.seed;
  cfg.trim_multiplier = args.trim_mult;
  cfg.threads = args.jobs;
  std::optional<sbm::Partition> truth;
  if (!args.truth.empty()) {
    truth = sbm::read_partition_file(args.truth, args.k);
    cfg.truth = &*truth;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const sbm::DetectionResult det = sbm::spectral_partition(g, args.k, cfg);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  sbm::write_partition_file(det.estimate, args.out);

  const auto& rec = det.trace.records[det.trace.chosen];
  std::printf("n=%d\nm=%lld\nk=%d\ntrimmed=%d\ni_star=%lld\nr_star=%.12g\n", g.n(),
              static_cast<long long>(g.m()), args.k, det.trimmed, static_cast<long long>(rec.radius_index),
              rec.residual);
  std::printf("iterations=%d\ndeltas=", det.iterations);
  for (std::size_t i = 0; i < det.improvement_deltas.size(); ++i)
    std::printf("%s%d", i ? "," : "", det.improvement_deltas[i]);
  std::printf("\ndegenerate=%d\n", det.degenerate ? 1 : 0);
  if (truth) {
    std::printf("misclassified=%d\nstage_misclassified=", det.stage_misclassified.back());
    for (std::size_t i = 0; i < det.stage_misclassified.size(); ++i)
      std::printf("%s%d", i ? "," : "", det.stage_misclassified[i]);
    std::printf("\n");
  }
  std::printf("out=%s\n", args.out.c_str());
  std::fprintf(stderr, "detect: %.1f ms\n", ms);
  return 0;
}

struct SweepArgs {
  std::string config;
  int n = 0, k = 2;
  std::string alphas;
  std::string a, b, p, q;
  std::string s = "exact";
  bool exact = false;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string out;
  double trim_mult = 5.0;
  int jobs = 1;
  bool timings = false;
};

// Config-file values fill in whatever was not given on the command line.
void merge_config_file(SweepArgs& args, const CLI::App& cmd) {
  const auto kv = read_flat_config(args.config);
  auto given = [&](const std::string& flag) { return cmd.count("--" + flag) > 0; };
  for (const auto& [key, value] : kv) {
    if (given(key)) continue;
    if (key == "exact" && given("s")) continue;
    if (key == "s" && given("exact")) continue;
    if (key == "n") args.n = std::stoi(value);
    else if (key == "k") args.k = std::stoi(value);
    else if (key == "alphas") args.alphas = value;
    else if (key == "a") args.a = value;
    else if (key == "b") args.b = value;
    else if (key == "p") args.p = value;
    else if (key == "q") args.q = value;
    else if (key == "s") args.s = value;
    else if (key == "exact") args.exact = parse_bool(value);
    else if (key == "trials") args.trials = std::stoi(value);
    else if (key == "seed") args.seed = std::stoull(value);
    else if (key == "out") args.out = value;
    else if (key == "trim-mult") args.trim_mult = std::stod(value);
    else if (key == "jobs") args.jobs = std::stoi(value);
    else if (key == "timings") args.timings = parse_bool(value);
    else throw std::invalid_argument("config: unknown key \"" + key + "\"");
  }
}

int run_sweep(const SweepArgs& args) {
  sbm::SweepConfig config;
  config.n = args.n;
  config.k = args.k;
  if (!args.alphas.empty()) config.alphas = parse_grid(args.alphas);
  const bool have_ab = !args.a.empty() || !args.b.empty();
  const bool have_pq = !args.p.empty() || !args.q.empty();
  if (have_ab == have_pq)
    throw std::invalid_argument("give exactly one of (--a, --b) or (--p, --q) grids");
  config.use_ab = have_ab;
  if (have_ab) {
    config.a_grid = parse_grid(args.a);
    config.b_grid = parse_grid(args.b);
  } else {
    config.p_grid = parse_grid(args.p);
    config.q_grid = parse_grid(args.q);
  }
  config.s = args.exact ? sbm::SSpec{sbm::SSpec::Kind::Exact, 0.0}
                        : sbm::SSpec::parse(args.s);
  config.trials = args.trials;
  config.master_seed = args.seed;
  config.out = args.out;
  config.trim_multiplier = args.trim_mult;
  config.jobs = args.jobs;
  config.timings = args.timings;
  const std::size_t rows = sbm::sweep(config);
  std::printf("cells=%zu\nout=%s\n", rows, config.out.c_str());
  return 0;
}

struct DiagnoseArgs {
  std::string n;
  int k = 2;
  std::string alphas;
  double a = -1, b = -1, p = -1, q = -1;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string out;
  double trim_mult = 5.0;
  int jobs = 1;
};

int run_diagnose(const DiagnoseArgs& args) {
  sbm::DiagnoseConfig config;
  config.n_grid = parse_int_list(args.n);
  config.k = args.k;
  if (!args.alphas.empty()) config.alphas = parse_grid(args.alphas);
  const bool have_ab = args.a >= 0 || args.b >= 0;
  const bool have_pq = args.p >= 0 || args.q >= 0;
  if (have_ab == have_pq)
    throw std::invalid_argument("give exactly one of (--a, --b) or (--p, --q)");
  config.use_ab = have_ab;
  config.a = args.a;
  config.b = args.b;
  config.p = args.p;
  config.q = args.q;
  config.trials = args.trials;
  config.master_seed = args.seed;
  config.out = args.out;
  config.trim_multiplier = args.trim_mult;
  config.jobs = args.jobs;
  const std::size_t rows = sbm::diagnose(config);
  std::printf("rows=%zu\nout=%s\n", rows, config.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral Partition pipeline for stochastic block models"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Draw a graph and its ground truth");
  generate->add_option("--n", gen.n, "vertex count")->required();
  generate->add_option("--k", gen.k, "community count");
  generate->add_option("--alphas", gen.alphas, "community fractions, ascending, comma list");
  generate->add_option("--a", gen.a, "p = a ln(n)/n");
  generate->add_option("--b", gen.b, "q = b ln(n)/n");
  generate->add_option("--p", gen.p, "within-community edge probability");
  generate->add_option("--q", gen.q, "across-community edge probability");
  generate->add_option("--seed", gen.seed, "generator seed");
  generate->add_option("--out", gen.out, "output prefix (.edges/.truth)")->required();

  DetectArgs det;
  auto* detect = app.add_subcommand("detect", "Run Spectral Partition on an edge list");
  detect->add_option("--in", det.in, "edge list file")->required();
  detect->add_option("--k", det.k, "community count")->required();
  detect->add_option("--seed", det.seed, "pipeline seed");
  detect->add_option("--out", det.out, "partition output file");
  detect->add_option("--truth", det.truth, "ground-truth partition for scoring");
  detect->add_option("--trim-mult", det.trim_mult, "trimming multiplier (of K*avg degree)");
  detect->add_option("--jobs", det.jobs, "worker threads");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo phase-diagram sweep to CSV");
  sweep_cmd->add_option("--config", sw.config,
                        "flat key=value config file (same names as the flags)");
  sweep_cmd->add_option("--n", sw.n, "vertex count");
  sweep_cmd->add_option("--k", sw.k, "community count");
  sweep_cmd->add_option("--alphas", sw.alphas, "community fractions, comma list");
  sweep_cmd->add_option("--a", sw.a, "a grid (comma list or lo:hi:step)");
  sweep_cmd->add_option("--b", sw.b, "b grid");
  sweep_cmd->add_option("--p", sw.p, "p grid");
  sweep_cmd->add_option("--q", sw.q, "q grid");
  auto* sopt = sweep_cmd->add_option("--s", sw.s, "budget: number, n^<x>, or exact");
  sweep_cmd->add_flag("--exact", sw.exact, "shorthand for --s exact")->excludes(sopt);
  sweep_cmd->add_option("--trials", sw.trials, "trials per cell");
  sweep_cmd->add_option("--seed", sw.seed, "master seed");
  sweep_cmd->add_option("--out", sw.out, "CSV output path");
  sweep_cmd->add_option("--trim-mult", sw.trim_mult, "trimming multiplier");
  sweep_cmd->add_option("--jobs", sw.jobs, "concurrent trials per cell");
  sweep_cmd->add_flag("--timings", sw.timings,
                      "record wall-clock column (breaks byte reproducibility)");

  DiagnoseArgs diag;
  auto* diagnose = app.add_subcommand("diagnose", "Concentration diagnostics to CSV");
  diagnose->add_option("--n", diag.n, "n grid, comma list")->required();
  diagnose->add_option("--k", diag.k, "community count");
  diagnose->add_option("--alphas", diag.alphas, "community fractions, comma list");
  diagnose->add_option("--a", diag.a, "p = a ln(n)/n");
  diagnose->add_option("--b", diag.b, "q = b ln(n)/n");
  diagnose->add_option("--p", diag.p, "fixed p");
  diagnose->add_option("--q", diag.q, "fixed q");
  diagnose->add_option("--trials", diag.trials, "trials per n");
  diagnose->add_option("--seed", diag.seed, "master seed");
  diagnose->add_option("--out", diag.out, "CSV output path")->required();
  diagnose->add_option("--trim-mult", diag.trim_mult, "trimming multiplier");
  diagnose->add_option("--jobs", diag.jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (generate->parsed()) return run_generate(gen);
    if (detect->parsed()) return run_detect(det);
    if (sweep_cmd->parsed()) {
      if (!sw.config.empty()) merge_config_file(sw, *sweep_cmd);
      return run_sweep(sw);
    }
    if (diagnose->parsed()) return run_diagnose(diag);
  } catch (const sbm::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
