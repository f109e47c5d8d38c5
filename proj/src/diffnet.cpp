#include "advrex/diffnet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "advrex/rng.hpp"

namespace advrex {

NetworkParams init_network(std::span<const std::size_t> layer_sizes,
                           std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    throw std::invalid_argument("init_network: need at least 2 layer sizes");
  for (std::size_t s : layer_sizes)
    if (s == 0) throw std::invalid_argument("init_network: layer sizes must be > 0");

  NetworkParams params;
  params.layer_sizes.assign(layer_sizes.begin(), layer_sizes.end());
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const std::size_t fan_in = layer_sizes[l];
    const std::size_t fan_out = layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Matrix w(fan_out, fan_in);
    CounterRng rng(seed, CounterRng::kInit, l);
    for (double& x : w.data) x = rng.uniform(-bound, bound);
    params.weights.push_back(std::move(w));
    params.biases.emplace_back(fan_out, 0.0);
  }
  return params;
}

ForwardTrace forward(const NetworkParams& params, const Matrix& inputs) {
  if (inputs.cols != params.input_dim())
    throw std::invalid_argument("forward: input dim does not match layer_sizes[0]");

  ForwardTrace trace;
  trace.activations.push_back(inputs);
  for (std::size_t l = 0; l < params.n_layers(); ++l) {
    const Matrix& a = trace.activations.back();
    const Matrix& w = params.weights[l];
    Matrix z(a.rows, w.rows);
    gemm(false, true, 1.0, a, w, 0.0, z);
    const std::vector<double>& b = params.biases[l];
    for (std::size_t i = 0; i < z.rows; ++i)
      for (std::size_t j = 0; j < z.cols; ++j) z(i, j) += b[j];
    trace.pre_activations.push_back(z);
    if (l + 1 < params.n_layers()) {
      for (double& x : z.data) x = std::max(x, 0.0);
    }
    trace.activations.push_back(std::move(z));
  }
  return trace;
}

CrossEntropyResult cross_entropy(const Matrix& logits,
                                 std::span<const int> labels) {
  if (logits.rows != labels.size())
    throw std::invalid_argument("cross_entropy: logits/labels count mismatch");

  CrossEntropyResult result;
  result.per_sample.resize(logits.rows);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const int label = labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= logits.cols)
      throw std::invalid_argument("cross_entropy: label out of range");
    const auto row = logits.row(i);
    const double m = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double z : row) sum += std::exp(z - m);
    result.per_sample[i] = m + std::log(sum) - row[label];
  }
  double total = 0.0;
  for (double v : result.per_sample) total += v;
  result.mean = logits.rows ? total / static_cast<double>(logits.rows) : 0.0;
  return result;
}

namespace {

void check_trace(const NetworkParams& params, const ForwardTrace& trace,
                 std::span<const int> labels) {
  if (trace.pre_activations.size() != params.n_layers() ||
      trace.activations.size() != params.n_layers() + 1)
    throw std::invalid_argument("backward: trace does not match params");
  if (trace.activations[0].cols != params.input_dim() ||
      trace.logits().cols != params.n_classes())
    throw std::invalid_argument("backward: trace shapes do not match params");
  if (trace.logits().rows != labels.size())
    throw std::invalid_argument("backward: labels count mismatch");
}

// d(mean CE)/d(logits) = (softmax - onehot) / n
Matrix logits_delta(const Matrix& logits, std::span<const int> labels) {
  Matrix delta(logits.rows, logits.cols);
  const double inv_n = 1.0 / static_cast<double>(logits.rows);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const auto row = logits.row(i);
    const double m = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double z : row) sum += std::exp(z - m);
    for (std::size_t j = 0; j < logits.cols; ++j)
      delta(i, j) = std::exp(row[j] - m) / sum * inv_n;
    delta(i, static_cast<std::size_t>(labels[i])) -= inv_n;
  }
  return delta;
}

// Propagates delta at layer l's pre-activation down to the previous
// activation, applying the ReLU mask (relu'(0) = 0) of the layer below.
Matrix propagate_delta(const NetworkParams& params, const ForwardTrace& trace,
                       const Matrix& delta, std::size_t l) {
  const Matrix& w = params.weights[l];
  Matrix prev(delta.rows, w.cols);
  gemm(false, false, 1.0, delta, w, 0.0, prev);
  if (l > 0) {
    const Matrix& z = trace.pre_activations[l - 1];
    for (std::size_t i = 0; i < prev.size(); ++i)
      if (z.data[i] <= 0.0) prev.data[i] = 0.0;
  }
  return prev;
}

}  // namespace

Gradients backward(const NetworkParams& params, const ForwardTrace& trace,
                   std::span<const int> labels) {
  check_trace(params, trace, labels);

  Gradients grads;
  grads.weight_grads.resize(params.n_layers());
  grads.bias_grads.resize(params.n_layers());

  Matrix delta = logits_delta(trace.logits(), labels);
  for (std::size_t l = params.n_layers(); l-- > 0;) {
    const Matrix& a_prev = trace.activations[l];
    Matrix& wg = grads.weight_grads[l];
    wg = Matrix(params.weights[l].rows, params.weights[l].cols);
    gemm(true, false, 1.0, delta, a_prev, 0.0, wg);
    std::vector<double>& bg = grads.bias_grads[l];
    bg.assign(delta.cols, 0.0);
    for (std::size_t i = 0; i < delta.rows; ++i)
      for (std::size_t j = 0; j < delta.cols; ++j) bg[j] += delta(i, j);
    delta = propagate_delta(params, trace, delta, l);
  }
  grads.input_grads = std::move(delta);
  return grads;
}

Matrix input_gradients(const NetworkParams& params, const ForwardTrace& trace,
                       std::span<const int> labels) {
  check_trace(params, trace, labels);
  Matrix delta = logits_delta(trace.logits(), labels);
  for (std::size_t l = params.n_layers(); l-- > 0;)
    delta = propagate_delta(params, trace, delta, l);
  return delta;
}

std::vector<double> logit_combo_grad(const NetworkParams& params,
                                     std::span<const double> x,
                                     std::span<const double> coeffs) {
  if (coeffs.size() != params.n_classes())
    throw std::invalid_argument("logit_combo_grad: coeffs size mismatch");
  Matrix input(1, x.size());
  std::copy(x.begin(), x.end(), input.data.begin());
  ForwardTrace trace = forward(params, input);
  Matrix delta(1, coeffs.size());
  std::copy(coeffs.begin(), coeffs.end(), delta.data.begin());
  for (std::size_t l = params.n_layers(); l-- > 0;)
    delta = propagate_delta(params, trace, delta, l);
  return delta.data;
}

Matrix backprop_logits_to_inputs(const NetworkParams& params,
                                 const ForwardTrace& trace,
                                 const Matrix& logit_delta) {
  if (logit_delta.rows != trace.logits().rows ||
      logit_delta.cols != params.n_classes())
    throw std::invalid_argument("backprop_logits_to_inputs: delta shape mismatch");
  Matrix delta = logit_delta;
  for (std::size_t l = params.n_layers(); l-- > 0;)
    delta = propagate_delta(params, trace, delta, l);
  return delta;
}

Matrix logit_jacobian(const NetworkParams& params, const ForwardTrace& trace) {
  if (trace.logits().rows != 1)
    throw std::invalid_argument("logit_jacobian: expects a single-sample trace");
  const std::size_t n_classes = params.n_classes();
  Matrix delta(n_classes, n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) delta(c, c) = 1.0;
  for (std::size_t l = params.n_layers(); l-- > 0;) {
    const Matrix& w = params.weights[l];
    Matrix prev(delta.rows, w.cols);
    gemm(false, false, 1.0, delta, w, 0.0, prev);
    if (l > 0) {
      // Single sample: broadcast its ReLU mask over every class row.
      const Matrix& z = trace.pre_activations[l - 1];
      for (std::size_t c = 0; c < prev.rows; ++c)
        for (std::size_t j = 0; j < prev.cols; ++j)
          if (z(0, j) <= 0.0) prev(c, j) = 0.0;
    }
    delta = std::move(prev);
  }
  return delta;
}

std::vector<double> grad_logit(const NetworkParams& params,
                               std::span<const double> x, int class_index) {
  if (class_index < 0 ||
      static_cast<std::size_t>(class_index) >= params.n_classes())
    throw std::invalid_argument("grad_logit: class index out of range");
  std::vector<double> coeffs(params.n_classes(), 0.0);
  coeffs[static_cast<std::size_t>(class_index)] = 1.0;
  return logit_combo_grad(params, x, coeffs);
}

std::vector<int> predict(const Matrix& logits) {
  std::vector<int> preds(logits.rows);
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const auto row = logits.row(i);
    preds[i] = static_cast<int>(
        std::max_element(row.begin(), row.end()) - row.begin());
  }
  return preds;
}

}  // namespace advrex
