#include "tricritic/harness/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <thread>

#include "json.hpp"
#include "tricritic/agents/training.hpp"
#include "tricritic/diagnostics/csv.hpp"
#include "tricritic/diagnostics/probes.hpp"
#include "tricritic/envs/registry.hpp"

namespace tricritic {
namespace {

using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> train_row(const StepMetrics& m) {
  std::vector<std::string> row = {std::to_string(m.step), std::to_string(m.episode), csv::format_double(m.reward)};
  for (std::size_t i = 0; i < 3; ++i)
    row.push_back(i < m.critic_losses.size() ? csv::format_double(m.critic_losses[i]) : "");
  row.push_back(std::isnan(m.actor_objective) ? "" : csv::format_double(m.actor_objective));
  row.push_back(csv::format_double(m.action_mean));
  row.push_back(m.episode_return ? csv::format_double(*m.episode_return) : "");
  return row;
}

}  // namespace

std::size_t RunReport::failed_seeds() const {
  std::size_t n = 0;
  for (const auto& s : seeds) n += s.ok ? 0 : 1;
  return n;
}

SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed, const fs::path& dir) {
  SeedResult result;
  result.seed = seed;
  const auto t_start = Clock::now();
  try {
    fs::create_directories(dir);
    result.train_csv = dir / "train.csv";
    result.eval_csv = dir / "eval.csv";
    result.bias_csv = dir / "bias.csv";
    result.checkpoint = dir / "checkpoint.bin";

    // Training and probes see the transformed reward; evaluation reports
    // returns of the untransformed task so strategies stay comparable.
    const EnvFactory train_env = env_factory(config.env_id, config.reward, seed);
    const EnvFactory eval_env = env_factory(config.env_id);
    auto env = train_env();
    Agent agent(env->spec(), config.strategy, config.agent, config.network, derive_seed(seed, "agent"));
    TrainingSession session(std::move(agent), std::move(env), seed);

    csv::Writer train_out(result.train_csv, "train", csv::train_columns());
    csv::Writer eval_out(result.eval_csv, "eval", csv::eval_columns());
    csv::Writer bias_out(result.bias_csv, "bias", csv::bias_columns());

    std::uint64_t eval_index = 0;
    std::uint64_t probe_index = 0;
    auto evaluate = [&](std::uint64_t step) {
      const auto t0 = Clock::now();
      const auto report = diag::evaluate_policy(session.agent().policy_snapshot(), eval_env, config.eval_episodes,
                                                derive_seed(seed, "evaluation", eval_index++), step);
      eval_out.row(csv::eval_row(report));
      result.final_mean_return = report.mean_return;
      result.timings.eval_seconds += seconds_since(t0);
    };

    for (std::uint64_t t = 1; t <= config.total_steps; ++t) {
      const auto t0 = Clock::now();
      const StepMetrics m = train_step(session);
      if (m.critics_updated && t % config.train_log_every == 0) train_out.row(train_row(m));
      result.timings.train_seconds += seconds_since(t0);

      if (t % config.eval_every == 0 || t == config.total_steps) evaluate(t);
      if (t % config.bias_probe_every == 0) {
        const auto t1 = Clock::now();
        diag::ProbeConfig probe;
        probe.episodes = config.bias_episodes;
        probe.gamma = config.agent.gamma;
        probe.seed = derive_seed(seed, "bias-probe", probe_index++);
        probe.use_target_critics = config.probe_target_critics;
        bias_out.row(csv::bias_row(diag::bias_probe(session.agent(), train_env, probe, t)));
        result.timings.probe_seconds += seconds_since(t1);
      }
    }
    train_out.flush();
    eval_out.flush();
    bias_out.flush();
    session.agent().save(result.checkpoint);
    result.ok = true;
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
  }
  result.timings.total_seconds = seconds_since(t_start);
  return result;
}

RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  RunReport report;
  report.config_hash = config_hash(config);
  report.env_id = config.env_id;
  report.strategy = std::string(rule_name(config.strategy));
  report.output_dir = resolve_output_dir(config);
  fs::create_directories(report.output_dir);
  {
    std::ofstream cfg(report.output_dir / "config.json", std::ios::binary);
    cfg << Json::parse(canonical_config_text(config)).dump(2) << '\n';
  }

  const std::size_t n = config.seeds.size();
  report.seeds.resize(n);
  auto run_one = [&](std::size_t i) {
    const std::uint64_t s = config.seeds[i];
    report.seeds[i] = run_seed(config, s, report.output_dir / ("seed_" + std::to_string(s)));
    if (!options.quiet) {
      const auto& r = report.seeds[i];
      if (r.ok)
        std::cerr << "seed " << s << ": final return " << r.final_mean_return << " (" << r.timings.total_seconds
                  << " s)\n";
      else
        std::cerr << "seed " << s << ": failed: " << r.error << '\n';
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run_one(i);
      });
    for (auto& w : workers) w.join();
  }

  std::vector<double> finals;
  for (const auto& s : report.seeds)
    if (s.ok) finals.push_back(s.final_mean_return);
  if (!finals.empty()) {
    double mean = 0.0;
    for (double v : finals) mean += v;
    mean /= static_cast<double>(finals.size());
    double var = 0.0;
    for (double v : finals) var += (v - mean) * (v - mean);
    report.final_mean_return = mean;
    report.final_std_return = std::sqrt(var / static_cast<double>(finals.size()));
  } else {
    report.final_mean_return = report.final_std_return = std::nan("");
  }
  write_report(report.output_dir / "report.json", report);
  return report;
}

void write_report(const fs::path& path, const RunReport& report) {
  const fs::path base = path.parent_path();
  auto rel = [&](const fs::path& p) { return p.empty() ? std::string() : p.lexically_relative(base).generic_string(); };
  Json seeds = Json::array();
  for (const auto& s : report.seeds) {
    seeds.push_back({{"seed", s.seed},
                     {"ok", s.ok},
                     {"error", s.error},
                     {"train_csv", rel(s.train_csv)},
                     {"eval_csv", rel(s.eval_csv)},
                     {"bias_csv", rel(s.bias_csv)},
                     {"checkpoint", rel(s.checkpoint)},
                     {"final_mean_return", s.ok ? Json(s.final_mean_return) : Json(nullptr)},
                     {"seconds",
                      {{"train", s.timings.train_seconds},
                       {"eval", s.timings.eval_seconds},
                       {"probe", s.timings.probe_seconds},
                       {"total", s.timings.total_seconds}}}});
  }
  auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  const Json j = {{"config_hash", report.config_hash},
                  {"env", report.env_id},
                  {"strategy", report.strategy},
                  {"final_mean_return", num(report.final_mean_return)},
                  {"final_std_return", num(report.final_std_return)},
                  {"seeds", seeds}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

RunReport read_report(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::runtime_error("malformed report " + path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();
  auto resolve = [&](const Json& v) {
    const std::string s = v.get<std::string>();
    return s.empty() ? fs::path() : base / s;
  };
  auto num = [](const Json& v) { return v.is_null() ? std::nan("") : v.get<double>(); };
  try {
    RunReport r;
    r.config_hash = j.at("config_hash").get<std::string>();
    r.env_id = j.at("env").get<std::string>();
    r.strategy = j.at("strategy").get<std::string>();
    r.output_dir = base;
    r.final_mean_return = num(j.at("final_mean_return"));
    r.final_std_return = num(j.at("final_std_return"));
    for (const auto& s : j.at("seeds")) {
      SeedResult sr;
      sr.seed = s.at("seed").get<std::uint64_t>();
      sr.ok = s.at("ok").get<bool>();
      sr.error = s.at("error").get<std::string>();
      sr.train_csv = resolve(s.at("train_csv"));
      sr.eval_csv = resolve(s.at("eval_csv"));
      sr.bias_csv = resolve(s.at("bias_csv"));
      sr.checkpoint = resolve(s.at("checkpoint"));
      sr.final_mean_return = num(s.at("final_mean_return"));
      const auto& t = s.at("seconds");
      sr.timings = {t.at("train").get<double>(), t.at("eval").get<double>(), t.at("probe").get<double>(),
                    t.at("total").get<double>()};
      r.seeds.push_back(std::move(sr));
    }
    return r;
  } catch (const Json::exception& e) {
    throw std::runtime_error("malformed report " + path.string() + ": " + e.what());
  }
}

}  // namespace tricritic
