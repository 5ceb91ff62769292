#pragma once

// Fixed-topology multilayer perceptrons with exact reverse-mode gradients.
//
// Parameter layout, for each layer l in order (in_l = widths[l], out_l = widths[l+1]):
//   weights W_l, out_l x in_l row-major (W_l[o][i] at offset o * in_l + i)
//   biases  b_l, out_l entries
// Hidden layers apply the hidden activation; the last layer applies the
// output activation (Identity or bound * tanh).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tricritic/matrix.hpp"

namespace tricritic {

enum class HiddenActivation { ReLU, Tanh };

struct OutputActivation {
  enum class Kind { Identity, TanhScaled };
  Kind kind = Kind::Identity;
  double bound = 1.0;  // only read for TanhScaled

  static OutputActivation identity() { return {}; }
  static OutputActivation tanh_scaled(double bound) { return {Kind::TanhScaled, bound}; }

  friend bool operator==(const OutputActivation&, const OutputActivation&) = default;
};

struct MlpSpec {
  std::vector<std::size_t> widths;
  HiddenActivation hidden = HiddenActivation::ReLU;
  OutputActivation output;

  // Throws ConfigError.
  void validate() const;

  std::size_t layer_count() const { return widths.size() - 1; }
  std::size_t input_width() const { return widths.front(); }
  std::size_t output_width() const { return widths.back(); }
  std::size_t param_count() const;
  // Offsets of W_l and b_l inside the flat parameter vector.
  std::size_t weight_offset(std::size_t layer) const;
  std::size_t bias_offset(std::size_t layer) const;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

struct ParamVector {
  std::vector<double> values;

  ParamVector() = default;
  explicit ParamVector(std::size_t n, double fill = 0.0) : values(n, fill) {}
  explicit ParamVector(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double* data() { return values.data(); }
  const double* data() const { return values.data(); }
  bool all_finite() const;

  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
ParamVector mlp_init(const MlpSpec& spec, std::uint64_t seed);

std::vector<double> mlp_forward(const MlpSpec& spec, const ParamVector& params,
                                std::span<const double> input);

struct MlpGradients {
  ParamVector params;
  std::vector<double> input;
};

// Gradients of upstream . output with respect to parameters and input.
MlpGradients mlp_backward(const MlpSpec& spec, const ParamVector& params,
                          std::span<const double> input, std::span<const double> upstream);

// Activations of one batched forward pass, kept for the backward pass.
// Reused across calls; buffers only grow.
class MlpWorkspace {
 public:
  const Matrix& output() const { return activations_.back(); }
  const Matrix& input() const { return activations_.front(); }
  std::size_t batch() const { return activations_.empty() ? 0 : activations_.front().rows(); }

 private:
  friend void mlp_forward_batch(const MlpSpec&, const ParamVector&, const Matrix&, MlpWorkspace&);
  friend void mlp_backward_batch(const MlpSpec&, const ParamVector&, const MlpWorkspace&,
                                 const Matrix&, ParamVector*, Matrix*);
  // activations_[0] is the input, activations_[l+1] the post-activation output of layer l.
  std::vector<Matrix> activations_;
  // Pre-activation tanh values of the output layer for TanhScaled (t = tanh(z)).
  Matrix output_tanh_;
  // Backward scratch.
  mutable Matrix delta_;
  mutable Matrix delta_prev_;
};

// Batched forward: one input per row. Throws ShapeError / NumericError.
void mlp_forward_batch(const MlpSpec& spec, const ParamVector& params, const Matrix& input,
                       MlpWorkspace& ws);

// Batched backward over the last forward pass stored in ws. Parameter
// gradients are summed over rows and ADDED into *param_grads when non-null;
// input gradients (one row per batch element) overwrite *input_grads when
// non-null.
void mlp_backward_batch(const MlpSpec& spec, const ParamVector& params, const MlpWorkspace& ws,
                        const Matrix& upstream, ParamVector* param_grads, Matrix* input_grads);

}  // namespace tricritic
