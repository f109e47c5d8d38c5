#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "advrex/linalg.hpp"

namespace advrex {

// Dense ReLU multilayer perceptron. Hidden layers use ReLU (subgradient 0 at
// 0), the output layer is linear. All arithmetic is double precision.
struct NetworkParams {
  std::vector<std::size_t> layer_sizes;
  std::vector<Matrix> weights;             // weights[l]: (out x in)
  std::vector<std::vector<double>> biases; // biases[l]: (out)

  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t n_classes() const { return layer_sizes.back(); }
  std::size_t n_layers() const { return weights.size(); }
};

struct Batch {
  Matrix inputs;            // (n_samples x input_dim), entries in [0,1]
  std::vector<int> labels;  // class indices

  std::size_t size() const { return inputs.rows; }
};

// Intermediates of one forward pass. activations[0] is the input;
// activations[l+1] = relu(pre_activations[l]) for hidden layers, and
// activations.back() == pre_activations.back() == logits.
struct ForwardTrace {
  std::vector<Matrix> pre_activations;
  std::vector<Matrix> activations;

  const Matrix& logits() const { return pre_activations.back(); }
};

struct Gradients {
  std::vector<Matrix> weight_grads;
  std::vector<std::vector<double>> bias_grads;
  Matrix input_grads;
};

struct CrossEntropyResult {
  std::vector<double> per_sample;
  double mean = 0.0;
};

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
// Deterministic given seed.
NetworkParams init_network(std::span<const std::size_t> layer_sizes,
                           std::uint64_t seed);

ForwardTrace forward(const NetworkParams& params, const Matrix& inputs);
inline ForwardTrace forward(const NetworkParams& params, const Batch& batch) {
  return forward(params, batch.inputs);
}

// Stabilized softmax cross entropy: loss_i = logsumexp(z_i) - z_i[label_i].
CrossEntropyResult cross_entropy(const Matrix& logits,
                                 std::span<const int> labels);

// Exact gradients of the mean cross entropy w.r.t. every parameter and
// w.r.t. the inputs, from one reverse pass.
Gradients backward(const NetworkParams& params, const ForwardTrace& trace,
                   std::span<const int> labels);

// Gradient of the mean cross entropy w.r.t. the inputs only. Skips the
// weight-gradient products; used by the attack loops.
Matrix input_gradients(const NetworkParams& params, const ForwardTrace& trace,
                       std::span<const int> labels);

// Gradient of the scalar sum_c coeffs[c] * z_c w.r.t. the input x.
std::vector<double> logit_combo_grad(const NetworkParams& params,
                                     std::span<const double> x,
                                     std::span<const double> coeffs);

// Propagates an arbitrary per-sample gradient at the logits down to the
// inputs. logit_delta is (n_samples x n_classes).
Matrix backprop_logits_to_inputs(const NetworkParams& params,
                                 const ForwardTrace& trace,
                                 const Matrix& logit_delta);

// Full Jacobian dz/dx (n_classes x input_dim) of a single-sample trace.
Matrix logit_jacobian(const NetworkParams& params, const ForwardTrace& trace);

// Gradient of the single logit z_{class_index} w.r.t. the input x.
std::vector<double> grad_logit(const NetworkParams& params,
                               std::span<const double> x, int class_index);

// Predicted class per sample: argmax logit, lowest index on ties.
std::vector<int> predict(const Matrix& logits);

}  // namespace advrex
