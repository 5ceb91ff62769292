#include "tricritic/diffcore/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "tricritic/errors.hpp"

namespace tricritic::checkpoint {
namespace {

constexpr std::array<char, 8> kMagic = {'T', 'R', 'C', 'M', 'L', 'P', '0', '1'};

template <typename U>
void write_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U read_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw std::runtime_error("checkpoint truncated");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }
void write_u32(std::ostream& out, std::uint32_t v) { write_le(out, v); }
void write_u64(std::ostream& out, std::uint64_t v) { write_le(out, v); }
void write_f64(std::ostream& out, double v) { write_le(out, std::bit_cast<std::uint64_t>(v)); }

void write_f64_array(std::ostream& out, const std::vector<double>& values) {
  write_u64(out, values.size());
  for (double v : values) write_f64(out, v);
}

std::uint8_t read_u8(std::istream& in) {
  const int c = in.get();
  if (c == std::char_traits<char>::eof()) throw std::runtime_error("checkpoint truncated");
  return static_cast<std::uint8_t>(c);
}
std::uint32_t read_u32(std::istream& in) { return read_le<std::uint32_t>(in); }
std::uint64_t read_u64(std::istream& in) { return read_le<std::uint64_t>(in); }
double read_f64(std::istream& in) { return std::bit_cast<double>(read_le<std::uint64_t>(in)); }

std::vector<double> read_f64_array(std::istream& in) {
  const std::uint64_t n = read_u64(in);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 24)));
  for (std::uint64_t i = 0; i < n; ++i) values.push_back(read_f64(in));
  return values;
}

void write_network(std::ostream& out, const MlpSpec& spec, const ParamVector& params) {
  write_u32(out, static_cast<std::uint32_t>(spec.widths.size()));
  for (std::size_t w : spec.widths) write_u64(out, w);
  write_u8(out, spec.hidden == HiddenActivation::ReLU ? 0 : 1);
  write_u8(out, spec.output.kind == OutputActivation::Kind::Identity ? 0 : 1);
  write_f64(out, spec.output.bound);
  write_f64_array(out, params.values);
}

std::pair<MlpSpec, ParamVector> read_network(std::istream& in) {
  MlpSpec spec;
  const std::uint32_t count = read_u32(in);
  if (count > 1024) throw std::runtime_error("checkpoint: implausible layer count");
  for (std::uint32_t i = 0; i < count; ++i) spec.widths.push_back(static_cast<std::size_t>(read_u64(in)));
  const std::uint8_t hidden = read_u8(in);
  const std::uint8_t output = read_u8(in);
  if (hidden > 1 || output > 1) throw std::runtime_error("checkpoint: unknown activation code");
  spec.hidden = hidden == 0 ? HiddenActivation::ReLU : HiddenActivation::Tanh;
  spec.output.kind = output == 0 ? OutputActivation::Kind::Identity : OutputActivation::Kind::TanhScaled;
  spec.output.bound = read_f64(in);
  spec.validate();
  ParamVector params(read_f64_array(in));
  if (params.size() != spec.param_count()) throw ShapeError("checkpoint: parameter count does not match widths");
  return {std::move(spec), std::move(params)};
}

void write_optimizer(std::ostream& out, const OptimizerState& state) {
  write_u64(out, state.step_count);
  write_f64(out, state.config.learning_rate);
  write_f64(out, state.config.beta1);
  write_f64(out, state.config.beta2);
  write_f64(out, state.config.epsilon);
  write_f64_array(out, state.first_moment);
  write_f64_array(out, state.second_moment);
}

OptimizerState read_optimizer(std::istream& in) {
  OptimizerState s;
  s.step_count = read_u64(in);
  s.config.learning_rate = read_f64(in);
  s.config.beta1 = read_f64(in);
  s.config.beta2 = read_f64(in);
  s.config.epsilon = read_f64(in);
  s.first_moment = read_f64_array(in);
  s.second_moment = read_f64_array(in);
  if (s.first_moment.size() != s.second_moment.size()) throw ShapeError("checkpoint: moment lengths differ");
  return s;
}

void save_params(const std::filesystem::path& path, const MlpSpec& spec, const ParamVector& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(kMagic.data(), kMagic.size());
  write_network(out, spec, params);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::pair<MlpSpec, ParamVector> load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error(path.string() + " is not a parameter file");
  return read_network(in);
}

}  // namespace tricritic::checkpoint
