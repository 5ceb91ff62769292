#include "tricritic/diffcore/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tricritic/errors.hpp"
#include "tricritic/rng.hpp"
#include "tricritic/simd/kernels.hpp"

namespace tricritic {

void MlpSpec::validate() const {
  if (widths.size() < 2) throw ConfigError("mlp spec needs at least an input and an output width");
  for (std::size_t i = 0; i < widths.size(); ++i)
    if (widths[i] < 1) throw ConfigError("mlp width " + std::to_string(i) + " must be >= 1");
  if (output.kind == OutputActivation::Kind::TanhScaled && !(output.bound > 0.0 && std::isfinite(output.bound)))
    throw ConfigError("tanh-scaled output bound must be positive and finite");
}

std::size_t MlpSpec::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) n += widths[l] * widths[l + 1] + widths[l + 1];
  return n;
}

std::size_t MlpSpec::weight_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) off += widths[l] * widths[l + 1] + widths[l + 1];
  return off;
}

std::size_t MlpSpec::bias_offset(std::size_t layer) const {
  return weight_offset(layer) + widths[layer] * widths[layer + 1];
}

bool ParamVector::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

ParamVector mlp_init(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  ParamVector params(spec.param_count());
  Rng rng = make_rng(seed);
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const std::size_t fan_in = spec.widths[l];
    const double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-limit, limit);
    double* w = params.data() + spec.weight_offset(l);
    for (std::size_t i = 0; i < fan_in * spec.widths[l + 1]; ++i) w[i] = dist(rng);
  }
  return params;
}

namespace {

void check_params(const MlpSpec& spec, const ParamVector& params) {
  if (params.size() != spec.param_count())
    throw ShapeError("parameter vector has " + std::to_string(params.size()) + " entries, spec needs " +
                     std::to_string(spec.param_count()));
}

}  // namespace

void mlp_forward_batch(const MlpSpec& spec, const ParamVector& params, const Matrix& input,
                       MlpWorkspace& ws) {
  check_params(spec, params);
  if (input.cols() != spec.input_width())
    throw ShapeError("mlp input width " + std::to_string(input.cols()) + ", expected " +
                     std::to_string(spec.input_width()));
  for (double v : input.storage())
    if (!std::isfinite(v)) throw NumericError("non-finite mlp input");

  const auto& k = simd::kernels();
  const std::size_t batch = input.rows();
  const std::size_t layers = spec.layer_count();
  ws.activations_.resize(layers + 1);
  ws.activations_[0] = input;

  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = spec.widths[l];
    const std::size_t out = spec.widths[l + 1];
    const double* w = params.data() + spec.weight_offset(l);
    const double* b = params.data() + spec.bias_offset(l);
    Matrix& z = ws.activations_[l + 1];
    z.resize(batch, out);
    for (std::size_t r = 0; r < batch; ++r) std::copy(b, b + out, z.row(r).begin());
    k.gemm_nt(batch, out, in, ws.activations_[l].data(), w, z.data(), true);

    auto& vals = z.storage();
    if (l + 1 < layers) {
      if (spec.hidden == HiddenActivation::ReLU) {
        for (double& v : vals) v = v > 0.0 ? v : 0.0;
      } else {
        for (double& v : vals) v = std::tanh(v);
      }
    } else if (spec.output.kind == OutputActivation::Kind::TanhScaled) {
      ws.output_tanh_.resize(batch, out);
      auto& t = ws.output_tanh_.storage();
      for (std::size_t i = 0; i < vals.size(); ++i) {
        t[i] = std::tanh(vals[i]);
        vals[i] = spec.output.bound * t[i];
      }
    }
  }
}

void mlp_backward_batch(const MlpSpec& spec, const ParamVector& params, const MlpWorkspace& ws,
                        const Matrix& upstream, ParamVector* param_grads, Matrix* input_grads) {
  check_params(spec, params);
  const std::size_t layers = spec.layer_count();
  if (ws.activations_.size() != layers + 1) throw UsageError("mlp backward without a matching forward pass");
  const std::size_t batch = ws.batch();
  if (upstream.rows() != batch || upstream.cols() != spec.output_width())
    throw ShapeError("upstream gradient shape does not match the network output");
  if (param_grads && param_grads->size() != spec.param_count())
    throw ShapeError("parameter gradient buffer has the wrong length");

  const auto& k = simd::kernels();
  Matrix& delta = ws.delta_;
  Matrix& prev = ws.delta_prev_;
  delta = upstream;
  if (spec.output.kind == OutputActivation::Kind::TanhScaled) {
    const auto& t = ws.output_tanh_.storage();
    auto& d = delta.storage();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= spec.output.bound * (1.0 - t[i] * t[i]);
  }

  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = spec.widths[l];
    const std::size_t out = spec.widths[l + 1];
    const double* w = params.data() + spec.weight_offset(l);
    const Matrix& act_in = ws.activations_[l];

    if (param_grads) {
      k.gemm_tn_acc(out, in, batch, delta.data(), act_in.data(), param_grads->data() + spec.weight_offset(l));
      double* gb = param_grads->data() + spec.bias_offset(l);
      for (std::size_t r = 0; r < batch; ++r) {
        const auto d = delta.row(r);
        for (std::size_t o = 0; o < out; ++o) gb[o] += d[o];
      }
    }

    if (l == 0 && !input_grads) break;
    prev.resize(batch, in);
    prev.fill(0.0);
    k.gemm_nn_acc(batch, in, out, delta.data(), w, prev.data());

    if (l > 0) {
      auto& p = prev.storage();
      const auto& a = act_in.storage();
      if (spec.hidden == HiddenActivation::ReLU) {
        for (std::size_t i = 0; i < p.size(); ++i)
          if (!(a[i] > 0.0)) p[i] = 0.0;
      } else {
        for (std::size_t i = 0; i < p.size(); ++i) p[i] *= 1.0 - a[i] * a[i];
      }
    }
    std::swap(delta, prev);
  }
  if (input_grads) *input_grads = delta;
}

std::vector<double> mlp_forward(const MlpSpec& spec, const ParamVector& params,
                                std::span<const double> input) {
  if (input.size() != spec.input_width())
    throw ShapeError("mlp input length " + std::to_string(input.size()) + ", expected " +
                     std::to_string(spec.input_width()));
  Matrix x(1, input.size());
  std::copy(input.begin(), input.end(), x.row(0).begin());
  MlpWorkspace ws;
  mlp_forward_batch(spec, params, x, ws);
  return ws.output().storage();
}

MlpGradients mlp_backward(const MlpSpec& spec, const ParamVector& params,
                          std::span<const double> input, std::span<const double> upstream) {
  if (input.size() != spec.input_width()) throw ShapeError("mlp input length mismatch");
  if (upstream.size() != spec.output_width()) throw ShapeError("upstream length mismatch");
  Matrix x(1, input.size());
  std::copy(input.begin(), input.end(), x.row(0).begin());
  Matrix up(1, upstream.size());
  std::copy(upstream.begin(), upstream.end(), up.row(0).begin());
  MlpWorkspace ws;
  mlp_forward_batch(spec, params, x, ws);
  MlpGradients grads{ParamVector(spec.param_count()), {}};
  Matrix gin;
  mlp_backward_batch(spec, params, ws, up, &grads.params, &gin);
  grads.input = gin.storage();
  return grads;
}

}  // namespace tricritic
