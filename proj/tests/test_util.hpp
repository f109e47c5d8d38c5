#pragma once

#include <cmath>
#include <vector>

#include "advrex/diffnet.hpp"
#include "advrex/rng.hpp"

namespace advrex::testutil {

inline NetworkParams make_random_net(std::vector<std::size_t> layer_sizes,
                                     std::uint64_t seed) {
  NetworkParams params = init_network(layer_sizes, seed);
  // Randomize biases too so bias gradients are exercised away from zero.
  CounterRng rng(seed, CounterRng::kInit, 0xb1a5);
  for (auto& bias : params.biases)
    for (double& b : bias) b = rng.uniform(-0.3, 0.3);
  return params;
}

inline Batch random_batch(std::size_t n, std::size_t dim, std::size_t n_classes,
                          std::uint64_t seed) {
  Batch batch;
  batch.inputs = Matrix(n, dim);
  batch.labels.resize(n);
  CounterRng rng(seed, CounterRng::kSynthetic, 0xda7a);
  for (double& x : batch.inputs.data) x = rng.uniform01();
  for (int& label : batch.labels)
    label = static_cast<int>(rng.bounded(n_classes));
  return batch;
}

// Relative error with an absolute floor for near-zero references.
inline bool close_rel(double got, double want, double rel_tol,
                      double abs_floor = 1e-7) {
  const double diff = std::fabs(got - want);
  if (diff <= abs_floor) return true;
  return diff <= rel_tol * std::max(std::fabs(got), std::fabs(want));
}

// Central finite difference of mean cross entropy w.r.t. one scalar slot.
template <typename GetSet>
double fd_mean_ce(const NetworkParams& params, const Batch& batch,
                  GetSet&& slot, double h = 1e-5) {
  NetworkParams copy = params;
  const double original = slot(copy);

  auto eval_at = [&](double value) {
    slot(copy) = value;
    ForwardTrace trace = forward(copy, batch.inputs);
    return cross_entropy(trace.logits(), batch.labels).mean;
  };
  const double plus = eval_at(original + h);
  const double minus = eval_at(original - h);
  slot(copy) = original;
  return (plus - minus) / (2.0 * h);
}

// Central finite difference of mean cross entropy w.r.t. one input entry.
inline double fd_input_ce(const NetworkParams& params, const Batch& batch,
                          std::size_t i, std::size_t j, double h = 1e-5) {
  Batch copy = batch;
  auto eval = [&](double v) {
    copy.inputs(i, j) = v;
    ForwardTrace trace = forward(params, copy.inputs);
    return cross_entropy(trace.logits(), copy.labels).mean;
  };
  const double original = batch.inputs(i, j);
  const double result = (eval(original + h) - eval(original - h)) / (2.0 * h);
  return result;
}

// FNV-1a over the raw parameter bytes; detects any mutation.
inline std::uint64_t params_checksum(const NetworkParams& params) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto eat = [&hash](const double* data, std::size_t count) {
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < count * sizeof(double); ++i) {
      hash ^= bytes[i];
      hash *= 0x100000001b3ULL;
    }
  };
  for (const Matrix& w : params.weights) eat(w.data.data(), w.size());
  for (const std::vector<double>& b : params.biases) eat(b.data(), b.size());
  return hash;
}

}  // namespace advrex::testutil
