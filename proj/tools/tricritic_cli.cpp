// Command-line front end. Exit codes: 0 ok, 1 run failure, 2 config error.

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tricritic/agents/gradcheck.hpp"
#include "tricritic/biasmodel/gaussian_bias.hpp"
#include "tricritic/biasmodel/oracle.hpp"
#include "tricritic/biasmodel/phase.hpp"
#include "tricritic/diagnostics/csv.hpp"
#include "tricritic/harness/compare.hpp"
#include "tricritic/harness/experiment.hpp"
#include "tricritic/simd/kernels.hpp"

using namespace tricritic;

namespace {

constexpr int kOk = 0;
constexpr int kRunFailure = 1;
constexpr int kConfigError = 2;

std::vector<double> doubles(const YAML::Node& n, const char* key, std::vector<double> fallback) {
  if (!n[key]) return fallback;
  if (!n[key].IsSequence()) throw ConfigError(std::string(key) + ": expected a list");
  std::vector<double> v;
  for (const auto& x : n[key]) v.push_back(x.as<double>());
  if (v.empty()) throw ConfigError(std::string(key) + ": must not be empty");
  return v;
}

bias::PhaseGrid load_grid(const std::string& path) {
  YAML::Node n;
  try {
    n = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  bias::PhaseGrid g;
  if (!n || n.IsNull()) return g;
  if (!n.IsMap()) throw ConfigError(path + ": expected a mapping");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (key != "eps1" && key != "eps2" && key != "sigma" && key != "rho" && key != "samples" && key != "seed")
      throw ConfigError(path + ": unknown key '" + key + "'");
  }
  try {
    g.eps1 = doubles(n, "eps1", g.eps1);
    g.eps2 = doubles(n, "eps2", g.eps2);
    g.sigma = doubles(n, "sigma", g.sigma);
    g.rho = doubles(n, "rho", g.rho);
    if (n["samples"]) g.samples = n["samples"].as<std::size_t>();
    if (n["seed"]) g.seed = n["seed"].as<std::uint64_t>();
  } catch (const YAML::BadConversion& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return g;
}

int cmd_run(const std::string& path, std::size_t jobs) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  RunOptions opts;
  opts.jobs = jobs;
  opts.quiet = false;
  const RunReport report = run_experiment(cfg, opts);
  std::cout << "report: " << (report.output_dir / "report.json").string() << '\n'
            << "config hash: " << report.config_hash << '\n'
            << "final return: " << report.final_mean_return << " +- " << report.final_std_return << '\n';
  if (report.failed_seeds() > 0) {
    std::cerr << report.failed_seeds() << " seed(s) failed\n";
    return kRunFailure;
  }
  return kOk;
}

int cmd_phase(const std::string& path, const std::string& out, unsigned workers) {
  bias::PhaseGrid grid;
  try {
    grid = load_grid(path);
    const auto points = bias::phase_diagram(grid, workers);
    csv::Writer w(out, "phase", csv::phase_columns());
    for (const auto& p : points)
      w.row({csv::format_double(p.model.eps1), csv::format_double(p.model.eps2), csv::format_double(p.model.sigma1),
             csv::format_double(p.model.rho), csv::format_double(p.closed_pair), csv::format_double(p.closed_triplet),
             csv::format_double(p.oracle_pair.mean), csv::format_double(p.oracle_triplet.mean),
             csv::format_double(p.oracle_pair.std_error), csv::format_double(p.oracle_triplet.std_error)});
    w.flush();
    std::cout << points.size() << " points written to " << out << '\n';
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}

int cmd_compare(const std::vector<std::string>& reports, std::size_t window, const std::string& curves,
                const std::string& finals) {
  std::vector<std::filesystem::path> paths(reports.begin(), reports.end());
  const Comparison cmp = compare_runs(paths);
  std::cout << render_table(cmp);
  if (!curves.empty()) write_curves(curves, cmp, window);
  if (!finals.empty()) write_final_returns(finals, cmp);
  return kOk;
}

int cmd_gradcheck(std::size_t trials, std::uint64_t seed) {
  const auto r = run_gradcheck(trials, seed);
  std::printf("backend %s, %zu trials, %zu coordinates\n", std::string(simd::backend_name(simd::active_backend())).c_str(),
              r.trials, r.coordinates);
  std::printf("critic loss max relative error:     %.3e\n", r.max_critic_rel_error);
  std::printf("actor objective max relative error: %.3e\n", r.max_actor_rel_error);
  return std::max(r.max_critic_rel_error, r.max_actor_rel_error) < 1e-4 ? kOk : kRunFailure;
}

int cmd_oracle(const bias::GaussianErrorModel& m, const std::string& estimator, std::size_t samples,
               std::uint64_t seed, unsigned workers) {
  bias::EstimatorKind kind;
  try {
    kind = bias::parse_estimator(estimator);
    m.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  const auto est = bias::mc_bias_oracle(m, kind, samples, seed, workers);
  std::printf("estimator %s, %zu samples\n", std::string(bias::estimator_name(kind)).c_str(), est.samples);
  std::printf("monte carlo: %.6f +- %.6f (1 SE)\n", est.mean, est.std_error);
  double closed = std::nan("");
  switch (kind) {
    case bias::EstimatorKind::Single: closed = m.eps1; break;
    case bias::EstimatorKind::MinOfTwo: closed = bias::clipped_double_bias(m); break;
    case bias::EstimatorKind::MaxOfTwo: closed = bias::max_of_two_exact(m); break;
    case bias::EstimatorKind::MinMaxMin: closed = bias::triplet_bias(m); break;
  }
  std::printf("closed form: %.6f\n", closed);
  if (kind == bias::EstimatorKind::MinOfTwo) std::printf("exact mean:  %.6f\n", bias::min_of_two_exact(m));
  std::printf("threshold sqrt(pi/(1-rho))*eps1: %.6f\n", bias::underestimation_threshold(m.eps1, m.rho));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Triplet-critic TD3 experiments and bias analysis"};
  app.require_subcommand(1);

  std::string config_path;
  std::size_t jobs = 1;
  auto* run = app.add_subcommand("run", "train every seed of an experiment config");
  run->add_option("config", config_path, "YAML experiment config")->required();
  run->add_option("-j,--jobs", jobs, "seeds run concurrently")->check(CLI::PositiveNumber);

  std::string grid_path, phase_out = "phase.csv";
  unsigned workers = 1;
  auto* phase = app.add_subcommand("bias-phase-diagram", "closed forms vs Monte Carlo over a grid");
  phase->add_option("grid", grid_path, "YAML grid (eps1, eps2, sigma, rho, samples, seed)")->required();
  phase->add_option("-o,--out", phase_out, "output CSV");
  phase->add_option("-w,--workers", workers, "oracle threads")->check(CLI::PositiveNumber);

  std::vector<std::string> reports;
  std::size_t window = 20;
  std::string curves, finals;
  auto* compare = app.add_subcommand("compare", "summarize runs side by side");
  compare->add_option("reports", reports, "report.json files")->required();
  compare->add_option("--window", window, "smoothing window for curves")->check(CLI::PositiveNumber);
  compare->add_option("--curves", curves, "write smoothed learning curves CSV");
  compare->add_option("--final-returns", finals, "write per-seed final returns CSV");

  std::size_t trials = 100;
  std::uint64_t gc_seed = 0;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of critic and actor gradients");
  gradcheck->add_option("-n,--trials", trials, "random networks")->check(CLI::PositiveNumber);
  gradcheck->add_option("--seed", gc_seed);

  bias::GaussianErrorModel model;
  std::string estimator = "min";
  std::size_t samples = 1'000'000;
  std::uint64_t oracle_seed = 0;
  auto* oracle = app.add_subcommand("oracle", "bias of a min/max estimator under Gaussian errors");
  oracle->add_option("--eps1", model.eps1);
  oracle->add_option("--eps2", model.eps2);
  oracle->add_option("--sigma1", model.sigma1);
  oracle->add_option("--sigma2", model.sigma2);
  oracle->add_option("--rho", model.rho);
  oracle->add_option("--rho3", model.rho3);
  oracle->add_option("-e,--estimator", estimator, "single, min, max or minmaxmin");
  oracle->add_option("-n,--samples", samples);
  oracle->add_option("--seed", oracle_seed);
  oracle->add_option("-w,--workers", workers)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, jobs);
    if (*phase) return cmd_phase(grid_path, phase_out, workers);
    if (*compare) return cmd_compare(reports, window, curves, finals);
    if (*gradcheck) return cmd_gradcheck(trials, gc_seed);
    if (*oracle) return cmd_oracle(model, estimator, samples, oracle_seed, workers);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRunFailure;
  }
  return kOk;
}
