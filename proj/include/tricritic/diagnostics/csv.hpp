#pragma once

// CSV files written by the harness. Every file starts with one schema line
// "# tricritic <kind> v<version>" followed by the column header. Reals are
// written in shortest round-trip form, so re-reading reproduces them exactly.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tricritic/diagnostics/probes.hpp"

namespace tricritic::csv {

inline constexpr int kSchemaVersion = 1;

std::string format_double(double v);
std::string schema_line(std::string_view kind);

const std::vector<std::string>& bias_columns();   // step, estimated_q, true_q, bias, n
const std::vector<std::string>& eval_columns();   // step, mean_return, min, max, std, n
const std::vector<std::string>& train_columns();
const std::vector<std::string>& phase_columns();  // eps1 .. se_triplet

class Writer {
 public:
  Writer(const std::filesystem::path& path, std::string_view kind, const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& fields);
  void flush();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t columns_;
};

std::vector<std::string> bias_row(const diag::BiasSample& s);
std::vector<std::string> eval_row(const diag::EvalReport& r);

void write_bias(const std::filesystem::path& path, std::span<const diag::BiasSample> samples);
void write_eval(const std::filesystem::path& path, std::span<const diag::EvalReport> reports);

struct Table {
  std::string schema;  // the "# tricritic ..." line, if present
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws std::out_of_range for unknown columns.
  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
};

// Throws std::runtime_error on I/O or malformed rows.
Table read(const std::filesystem::path& path);

}  // namespace tricritic::csv
