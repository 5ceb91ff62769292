#pragma once

// Binary encoding for networks and optimizer state.
//
// All integers are unsigned little-endian, all reals IEEE-754 binary64
// little-endian. A network record is
//   u32 layer width count, u64 widths[count]
//   u8  hidden activation (0 ReLU, 1 Tanh)
//   u8  output activation (0 Identity, 1 TanhScaled), f64 output bound
//   u64 parameter count, f64 values[count]
// A standalone parameter file prepends the magic "TRCMLP01".

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "tricritic/diffcore/adam.hpp"
#include "tricritic/diffcore/mlp.hpp"

namespace tricritic::checkpoint {

void write_u8(std::ostream& out, std::uint8_t v);
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
void write_f64_array(std::ostream& out, const std::vector<double>& values);

// Readers throw std::runtime_error on truncated input.
std::uint8_t read_u8(std::istream& in);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
std::vector<double> read_f64_array(std::istream& in);

void write_network(std::ostream& out, const MlpSpec& spec, const ParamVector& params);
std::pair<MlpSpec, ParamVector> read_network(std::istream& in);

// u64 step, f64 lr, beta1, beta2, epsilon, then both moment arrays.
void write_optimizer(std::ostream& out, const OptimizerState& state);
OptimizerState read_optimizer(std::istream& in);

void save_params(const std::filesystem::path& path, const MlpSpec& spec, const ParamVector& params);
std::pair<MlpSpec, ParamVector> load_params(const std::filesystem::path& path);

}  // namespace tricritic::checkpoint
