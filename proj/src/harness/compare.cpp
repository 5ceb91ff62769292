#include "tricritic/harness/compare.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "tricritic/diagnostics/csv.hpp"

namespace tricritic {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

double mean_of(std::span<const double> v) {
  if (v.empty()) return std::nan("");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double pop_std(std::span<const double> v) {
  if (v.empty()) return std::nan("");
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

// config.json beside the report with the strategy removed.
Json comparable_config(const fs::path& report_path) {
  const fs::path cfg = report_path.parent_path() / "config.json";
  std::ifstream in(cfg);
  if (!in) throw CompareError("missing " + cfg.string());
  Json j = Json::parse(in);
  j.erase("strategy");
  return j;
}

SeedSummary summarize_seed(const SeedResult& r) {
  SeedSummary s;
  s.seed = r.seed;
  const csv::Table eval = csv::read(r.eval_csv);
  for (std::size_t i = 0; i < eval.rows.size(); ++i) {
    s.eval_steps.push_back(eval.number(i, "step"));
    s.eval_returns.push_back(eval.number(i, "mean_return"));
  }
  s.final_return = s.eval_returns.empty() ? std::nan("") : s.eval_returns.back();
  s.auc = mean_of(s.eval_returns);

  const csv::Table bias = csv::read(r.bias_csv);
  std::vector<double> b;
  for (std::size_t i = 0; i < bias.rows.size(); ++i) b.push_back(bias.number(i, "bias"));
  const auto tail = final_quarter(b);
  s.mean_bias = mean_of(tail);
  std::vector<double> abs_tail;
  for (double x : tail) abs_tail.push_back(std::fabs(x));
  s.mean_abs_bias = mean_of(abs_tail);
  return s;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::span<const double> final_quarter(std::span<const double> values) {
  const std::size_t n = values.size();
  const std::size_t k = (n + 3) / 4;
  return values.subspan(n - k);
}

std::vector<double> smooth(std::span<const double> values, std::size_t window) {
  if (window == 0) throw std::invalid_argument("smoothing window must be >= 1");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t lo = i + 1 >= window ? i + 1 - window : 0;
    if (i == lo) {
      out[i] = values[i];
      continue;
    }
    double s = 0.0;
    for (std::size_t j = lo; j <= i; ++j) s += values[j];
    out[i] = s / static_cast<double>(i - lo + 1);
  }
  return out;
}

Comparison compare_runs(std::span<const fs::path> report_paths) {
  if (report_paths.empty()) throw CompareError("compare needs at least one report");
  Comparison cmp;
  Json reference;
  std::map<std::string, int> label_count;
  for (std::size_t i = 0; i < report_paths.size(); ++i) {
    const fs::path& path = report_paths[i];
    RunReport report;
    Json cfg;
    try {
      report = read_report(path);
      cfg = comparable_config(path);
    } catch (const CompareError&) {
      throw;
    } catch (const std::exception& e) {
      throw CompareError(e.what());
    }
    if (i == 0) {
      cmp.env_id = report.env_id;
      reference = cfg;
    } else if (report.env_id != cmp.env_id) {
      throw CompareError("environment mismatch: " + path.string() + " ran " + report.env_id + ", expected " +
                         cmp.env_id);
    } else if (cfg != reference) {
      std::string field = "?";
      for (const auto& [k, v] : reference.items())
        if (!cfg.contains(k) || cfg.at(k) != v) {
          field = k;
          break;
        }
      throw CompareError("config mismatch in '" + field + "': " + path.string() + " vs " +
                         report_paths[0].string());
    }
    if (report.failed_seeds() > 0) throw CompareError(path.string() + " has failed seeds");

    StrategySummary row;
    row.strategy = report.strategy;
    row.report = path;
    const int dup = label_count[report.strategy]++;
    row.label = dup == 0 ? report.strategy : report.strategy + "#" + std::to_string(dup + 1);
    std::vector<double> finals, aucs, biases, abs_biases;
    for (const auto& s : report.seeds) {
      try {
        row.seeds.push_back(summarize_seed(s));
      } catch (const std::exception& e) {
        throw CompareError(e.what());
      }
      finals.push_back(row.seeds.back().final_return);
      aucs.push_back(row.seeds.back().auc);
      biases.push_back(row.seeds.back().mean_bias);
      abs_biases.push_back(row.seeds.back().mean_abs_bias);
    }
    row.final_mean = mean_of(finals);
    row.final_std = pop_std(finals);
    row.auc_mean = mean_of(aucs);
    row.mean_bias = mean_of(biases);
    row.mean_abs_bias = mean_of(abs_biases);
    cmp.rows.push_back(std::move(row));
  }
  return cmp;
}

std::string render_table(const Comparison& cmp) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-18s %5s %22s %12s %12s %12s\n", "strategy", "seeds", "final return", "auc",
                "bias", "|bias|");
  os << "env: " << cmp.env_id << '\n' << line;
  for (const auto& r : cmp.rows) {
    const std::string ret = fixed(r.final_mean, 2) + " +- " + fixed(r.final_std, 2);
    std::snprintf(line, sizeof line, "%-18s %5zu %22s %12s %12s %12s\n", r.label.c_str(), r.seeds.size(),
                  ret.c_str(), fixed(r.auc_mean, 2).c_str(), fixed(r.mean_bias, 3).c_str(),
                  fixed(r.mean_abs_bias, 3).c_str());
    os << line;
  }
  os << "(+- is one population std over seeds; bias columns use the last 25% of probes)\n";
  return os.str();
}

void write_curves(const fs::path& path, const Comparison& cmp, std::size_t window) {
  csv::Writer out(path, "curves", {"label", "step", "mean_return", "std_return", "smoothed_mean", "n"});
  for (const auto& r : cmp.rows) {
    if (r.seeds.empty()) continue;
    const std::size_t points = r.seeds.front().eval_returns.size();
    for (const auto& s : r.seeds)
      if (s.eval_returns.size() != points) throw CompareError("seeds of " + r.label + " have unequal eval counts");
    std::vector<double> means(points), stds(points);
    for (std::size_t p = 0; p < points; ++p) {
      std::vector<double> v;
      for (const auto& s : r.seeds) v.push_back(s.eval_returns[p]);
      means[p] = mean_of(v);
      stds[p] = pop_std(v);
    }
    const auto smoothed = smooth(means, window);
    for (std::size_t p = 0; p < points; ++p)
      out.row({r.label, csv::format_double(r.seeds.front().eval_steps[p]), csv::format_double(means[p]),
               csv::format_double(stds[p]), csv::format_double(smoothed[p]), std::to_string(r.seeds.size())});
  }
  out.flush();
}

void write_final_returns(const fs::path& path, const Comparison& cmp) {
  csv::Writer out(path, "final_returns", {"label", "seed", "final_return"});
  for (const auto& r : cmp.rows)
    for (const auto& s : r.seeds) out.row({r.label, std::to_string(s.seed), csv::format_double(s.final_return)});
  out.flush();
}

}  // namespace tricritic
