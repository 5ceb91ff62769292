#include "tricritic/diagnostics/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tricritic::csv {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string schema_line(std::string_view kind) {
  return "# tricritic " + std::string(kind) + " v" + std::to_string(kSchemaVersion);
}

const std::vector<std::string>& bias_columns() {
  static const std::vector<std::string> c = {"step", "estimated_q", "true_q", "bias", "n"};
  return c;
}

const std::vector<std::string>& eval_columns() {
  static const std::vector<std::string> c = {"step", "mean_return", "min", "max", "std", "n"};
  return c;
}

const std::vector<std::string>& train_columns() {
  static const std::vector<std::string> c = {"step",          "episode",       "reward",
                                             "critic_loss_1", "critic_loss_2", "critic_loss_3",
                                             "actor_objective", "action_mean", "episode_return"};
  return c;
}

const std::vector<std::string>& phase_columns() {
  static const std::vector<std::string> c = {"eps1",        "eps2",           "sigma",    "rho",
                                             "closed_pair", "closed_triplet", "oracle_pair",
                                             "oracle_triplet", "se_pair",     "se_triplet"};
  return c;
}

Writer::Writer(const std::filesystem::path& path, std::string_view kind, const std::vector<std::string>& columns)
    : out_(path, std::ios::trunc), path_(path), columns_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out_ << schema_line(kind) << '\n';
  row(columns);
}

void Writer::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw std::logic_error("csv row width differs from header in " + path_.string());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
  if (!out_) throw std::runtime_error("write failed: " + path_.string());
}

void Writer::flush() {
  out_.flush();
  if (!out_) throw std::runtime_error("write failed: " + path_.string());
}

std::vector<std::string> bias_row(const diag::BiasSample& s) {
  return {std::to_string(s.train_step), format_double(s.estimated_q_mean), format_double(s.true_q_mean),
          format_double(s.bias), std::to_string(s.n_samples)};
}

std::vector<std::string> eval_row(const diag::EvalReport& r) {
  return {std::to_string(r.train_step), format_double(r.mean_return), format_double(r.min_return()),
          format_double(r.max_return()), format_double(r.std_return()), std::to_string(r.n_episodes)};
}

void write_bias(const std::filesystem::path& path, std::span<const diag::BiasSample> samples) {
  Writer w(path, "bias", bias_columns());
  for (const auto& s : samples) w.row(bias_row(s));
  w.flush();
}

void write_eval(const std::filesystem::path& path, std::span<const diag::EvalReport> reports) {
  Writer w(path, "eval", eval_columns());
  for (const auto& r : reports) w.row(eval_row(r));
  w.flush();
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("no column '" + std::string(name) + "'");
}

double Table::number(std::size_t row, std::string_view name) const {
  const std::string& field = rows.at(row).at(column(name));
  if (field.empty()) return std::nan("");
  return std::stod(field);
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Table t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(l);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!l.empty() && l.back() == ',') out.emplace_back();
    return out;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (t.schema.empty()) t.schema = line;
      continue;
    }
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    auto fields = split(line);
    if (fields.size() != t.header.size()) throw std::runtime_error("malformed row in " + path.string());
    t.rows.push_back(std::move(fields));
  }
  return t;
}

}  // namespace tricritic::csv
