#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "advrex/diffnet.hpp"
#include "test_util.hpp"

using namespace advrex;
using namespace advrex::testutil;

TEST_CASE("init_network is deterministic and shaped by layer_sizes") {
  const std::vector<std::size_t> sizes{2, 3};
  NetworkParams a = init_network(sizes, 0);
  NetworkParams b = init_network(sizes, 0);
  CHECK(a.weights[0].data == b.weights[0].data);
  CHECK(a.biases[0] == b.biases[0]);

  NetworkParams c = init_network(sizes, 1);
  CHECK(a.weights[0].data != c.weights[0].data);

  const std::vector<std::size_t> mnist{784, 512, 512, 10};
  NetworkParams net = init_network(mnist, 42);
  REQUIRE(net.weights.size() == 3);
  CHECK(net.weights[0].rows == 512);
  CHECK(net.weights[0].cols == 784);
  CHECK(net.weights[1].rows == 512);
  CHECK(net.weights[1].cols == 512);
  CHECK(net.weights[2].rows == 10);
  CHECK(net.weights[2].cols == 512);

  // Scaled-uniform bounds, biases zero.
  const double bound = 1.0 / std::sqrt(784.0);
  for (double w : net.weights[0].data) CHECK(std::fabs(w) <= bound);
  for (double bias : net.biases[0]) CHECK(bias == 0.0);
}

TEST_CASE("init_network rejects degenerate layer lists") {
  CHECK_THROWS_AS(init_network(std::vector<std::size_t>{2}, 0), std::invalid_argument);
  CHECK_THROWS_AS(init_network(std::vector<std::size_t>{}, 0), std::invalid_argument);
  CHECK_THROWS_AS(init_network(std::vector<std::size_t>{2, 0, 3}, 0),
                  std::invalid_argument);
}

TEST_CASE("forward: zero parameters give zero logits") {
  NetworkParams params = init_network(std::vector<std::size_t>{3, 4, 2}, 0);
  for (Matrix& w : params.weights) std::fill(w.data.begin(), w.data.end(), 0.0);
  Batch batch = random_batch(5, 3, 2, 1);
  ForwardTrace trace = forward(params, batch);
  for (double z : trace.logits().data) CHECK(z == 0.0);
}

TEST_CASE("forward: single linear layer with identity weights") {
  NetworkParams params = init_network(std::vector<std::size_t>{2, 2}, 0);
  params.weights[0](0, 0) = 1.0;
  params.weights[0](0, 1) = 0.0;
  params.weights[0](1, 0) = 0.0;
  params.weights[0](1, 1) = 1.0;
  Matrix input(1, 2);
  input(0, 0) = 1.0;
  input(0, 1) = 2.0;
  ForwardTrace trace = forward(params, input);
  CHECK(trace.logits()(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(trace.logits()(0, 1) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("forward matches a hand-rolled matrix-multiply oracle") {
  NetworkParams params = make_random_net({2, 3, 2}, 7);
  Batch batch = random_batch(1, 2, 2, 8);

  // Direct recomputation, scalar loops only.
  std::vector<double> h(3);
  for (std::size_t i = 0; i < 3; ++i) {
    double z = params.biases[0][i];
    for (std::size_t j = 0; j < 2; ++j)
      z += params.weights[0](i, j) * batch.inputs(0, j);
    h[i] = std::max(z, 0.0);
  }
  std::vector<double> logits(2);
  for (std::size_t i = 0; i < 2; ++i) {
    double z = params.biases[1][i];
    for (std::size_t j = 0; j < 3; ++j) z += params.weights[1](i, j) * h[j];
    logits[i] = z;
  }

  ForwardTrace trace = forward(params, batch);
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(std::fabs(trace.logits()(0, i) - logits[i]) < 1e-12);
}

TEST_CASE("forward is pure and the trace replays exactly") {
  NetworkParams params = make_random_net({4, 8, 3}, 3);
  Batch batch = random_batch(6, 4, 3, 4);
  const std::uint64_t before = params_checksum(params);
  ForwardTrace trace = forward(params, batch);
  CHECK(params_checksum(params) == before);

  ForwardTrace again = forward(params, batch);
  CHECK(again.logits().data == trace.logits().data);
}

TEST_CASE("forward rejects shape mismatches") {
  NetworkParams params = init_network(std::vector<std::size_t>{4, 3}, 0);
  Batch batch = random_batch(2, 5, 3, 0);
  CHECK_THROWS_AS(forward(params, batch), std::invalid_argument);
}

TEST_CASE("cross_entropy handles uniform and extreme logits") {
  Matrix logits(1, 2);
  std::vector<int> labels{0};
  CrossEntropyResult uniform = cross_entropy(logits, labels);
  CHECK(uniform.mean == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  logits(0, 0) = 1000.0;
  logits(0, 1) = 0.0;
  CrossEntropyResult extreme = cross_entropy(logits, labels);
  CHECK(std::isfinite(extreme.mean));
  CHECK(extreme.mean == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cross_entropy matches a brute-force softmax oracle") {
  CounterRng rng(11, CounterRng::kSynthetic);
  Matrix logits(4, 5);
  for (double& z : logits.data) z = rng.uniform(-3.0, 3.0);
  std::vector<int> labels{0, 2, 4, 1};

  CrossEntropyResult result = cross_entropy(logits, labels);
  for (std::size_t i = 0; i < 4; ++i) {
    double denom = 0.0;
    for (std::size_t j = 0; j < 5; ++j) denom += std::exp(logits(i, j));
    const double want =
        -std::log(std::exp(logits(i, static_cast<std::size_t>(labels[i]))) / denom);
    CHECK(std::fabs(result.per_sample[i] - want) < 1e-12);
  }
}

TEST_CASE("cross_entropy is shift invariant") {
  CounterRng rng(13, CounterRng::kSynthetic);
  Matrix logits(3, 4);
  for (double& z : logits.data) z = rng.uniform(-2.0, 2.0);
  std::vector<int> labels{1, 3, 0};
  CrossEntropyResult base = cross_entropy(logits, labels);

  for (double shift : {-17.5, 3.25}) {
    Matrix shifted = logits;
    for (double& z : shifted.data) z += shift;
    CrossEntropyResult moved = cross_entropy(shifted, labels);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(std::fabs(moved.per_sample[i] - base.per_sample[i]) < 1e-12);
  }
}

TEST_CASE("cross_entropy rejects out-of-range labels") {
  Matrix logits(1, 3);
  CHECK_THROWS_AS(cross_entropy(logits, std::vector<int>{3}), std::invalid_argument);
  CHECK_THROWS_AS(cross_entropy(logits, std::vector<int>{-1}), std::invalid_argument);
}

TEST_CASE("backward: final-layer bias gradient is mean(softmax - onehot)") {
  NetworkParams params = make_random_net({3, 6, 4}, 21);
  Batch batch = random_batch(5, 3, 4, 22);
  ForwardTrace trace = forward(params, batch);
  Gradients grads = backward(params, trace, batch.labels);

  const Matrix& logits = trace.logits();
  std::vector<double> want(4, 0.0);
  for (std::size_t i = 0; i < 5; ++i) {
    double denom = 0.0;
    for (std::size_t j = 0; j < 4; ++j) denom += std::exp(logits(i, j));
    for (std::size_t j = 0; j < 4; ++j) {
      double p = std::exp(logits(i, j)) / denom;
      if (static_cast<int>(j) == batch.labels[i]) p -= 1.0;
      want[j] += p / 5.0;
    }
  }
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(std::fabs(grads.bias_grads.back()[j] - want[j]) < 1e-12);
}

TEST_CASE("backward: linear model reproduces the closed-form gradient") {
  // One layer: dW = (softmax - onehot)^T x / n, dx = (softmax - onehot) W / n.
  NetworkParams params = make_random_net({3, 4}, 31);
  Batch batch = random_batch(2, 3, 4, 32);
  ForwardTrace trace = forward(params, batch);
  Gradients grads = backward(params, trace, batch.labels);

  const Matrix& logits = trace.logits();
  Matrix delta(2, 4);
  for (std::size_t i = 0; i < 2; ++i) {
    double denom = 0.0;
    for (std::size_t j = 0; j < 4; ++j) denom += std::exp(logits(i, j));
    for (std::size_t j = 0; j < 4; ++j) {
      delta(i, j) = std::exp(logits(i, j)) / denom / 2.0;
      if (static_cast<int>(j) == batch.labels[i]) delta(i, j) -= 0.5;
    }
  }
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 3; ++c) {
      double want = 0.0;
      for (std::size_t i = 0; i < 2; ++i) want += delta(i, r) * batch.inputs(i, c);
      CHECK(std::fabs(grads.weight_grads[0](r, c) - want) < 1e-12);
    }
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t c = 0; c < 3; ++c) {
      double want = 0.0;
      for (std::size_t r = 0; r < 4; ++r) want += delta(i, r) * params.weights[0](r, c);
      CHECK(std::fabs(grads.input_grads(i, c) - want) < 1e-12);
    }
}

TEST_CASE("backward matches central finite differences on random nets") {
  for (std::uint64_t seed : {101, 102, 103}) {
    NetworkParams params = make_random_net({5, 9, 7, 4}, seed);
    Batch batch = random_batch(3, 5, 4, seed + 1000);
    ForwardTrace trace = forward(params, batch);
    Gradients grads = backward(params, trace, batch.labels);

    for (std::size_t l = 0; l < params.n_layers(); ++l) {
      for (std::size_t idx = 0; idx < params.weights[l].size(); idx += 7) {
        const double fd = fd_mean_ce(params, batch, [l, idx](NetworkParams& p) -> double& {
          return p.weights[l].data[idx];
        });
        CHECK_MESSAGE(close_rel(grads.weight_grads[l].data[idx], fd, 1e-4),
                      "weight grad l=" << l << " idx=" << idx);
      }
      for (std::size_t idx = 0; idx < params.biases[l].size(); idx += 3) {
        const double fd = fd_mean_ce(params, batch, [l, idx](NetworkParams& p) -> double& {
          return p.biases[l][idx];
        });
        CHECK(close_rel(grads.bias_grads[l][idx], fd, 1e-4));
      }
    }
    for (std::size_t i = 0; i < batch.size(); ++i)
      for (std::size_t j = 0; j < batch.inputs.cols; ++j) {
        const double fd = fd_input_ce(params, batch, i, j);
        CHECK(close_rel(grads.input_grads(i, j), fd, 1e-4));
      }
  }
}

TEST_CASE("backward input gradients are antisymmetric on a mirrored net") {
  // Hidden weights mirrored across the two input coordinates; the two input
  // partials must be equal in magnitude and opposite in sign. Positive
  // biases keep every ReLU strictly active so finite differences are valid.
  NetworkParams params = init_network(std::vector<std::size_t>{2, 4, 2}, 5);
  for (std::size_t r = 0; r < 4; ++r) {
    params.weights[0](r, 1) = -params.weights[0](r, 0);
    params.biases[0][r] = 0.3 + 0.1 * static_cast<double>(r);
  }
  Batch batch;
  batch.inputs = Matrix(1, 2, 0.5);
  batch.labels = {0};
  ForwardTrace trace = forward(params, batch);
  Gradients grads = backward(params, trace, batch.labels);
  const double fd0 = fd_input_ce(params, batch, 0, 0);
  const double fd1 = fd_input_ce(params, batch, 0, 1);
  CHECK(close_rel(grads.input_grads(0, 0), fd0, 1e-4));
  CHECK(close_rel(grads.input_grads(0, 1), fd1, 1e-4));
  CHECK(close_rel(grads.input_grads(0, 0), -grads.input_grads(0, 1), 1e-9));
}

TEST_CASE("backward validates trace/params consistency") {
  NetworkParams params = make_random_net({3, 4, 2}, 51);
  NetworkParams other = make_random_net({3, 5, 2}, 52);
  Batch batch = random_batch(2, 3, 2, 53);
  ForwardTrace trace = forward(params, batch);
  CHECK_THROWS_AS(backward(other, trace, batch.labels), std::invalid_argument);
}

TEST_CASE("input_gradients agrees with the full backward pass") {
  NetworkParams params = make_random_net({4, 6, 3}, 61);
  Batch batch = random_batch(5, 4, 3, 62);
  ForwardTrace trace = forward(params, batch);
  Gradients full = backward(params, trace, batch.labels);
  Matrix fast = input_gradients(params, trace, batch.labels);
  CHECK(fast.data == full.input_grads.data);
}

TEST_CASE("grad_logit: linear model returns the weight row exactly") {
  NetworkParams params = make_random_net({3, 4}, 71);
  std::vector<double> x{0.2, 0.5, 0.9};
  for (int c = 0; c < 4; ++c) {
    std::vector<double> g = grad_logit(params, x, c);
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(g[j] == params.weights[0](static_cast<std::size_t>(c), j));
  }
}

TEST_CASE("grad_logit matches finite differences and is pure") {
  NetworkParams params = make_random_net({3, 5, 4}, 81);
  std::vector<double> x{0.1, 0.7, 0.4};
  const int c = 2;
  std::vector<double> g = grad_logit(params, x, c);
  std::vector<double> again = grad_logit(params, x, c);
  CHECK(g == again);

  const double h = 1e-5;
  for (std::size_t j = 0; j < 3; ++j) {
    auto logit_at = [&](double v) {
      std::vector<double> probe = x;
      probe[j] = v;
      Matrix input(1, 3);
      std::copy(probe.begin(), probe.end(), input.data.begin());
      return forward(params, input).logits()(0, static_cast<std::size_t>(c));
    };
    const double fd = (logit_at(x[j] + h) - logit_at(x[j] - h)) / (2.0 * h);
    CHECK(close_rel(g[j], fd, 1e-4));
  }

  CHECK_THROWS_AS(grad_logit(params, x, 4), std::invalid_argument);
  CHECK_THROWS_AS(grad_logit(params, x, -1), std::invalid_argument);
}
