#include "advrex/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "advrex/rng.hpp"

namespace advrex {

const char* to_string(Norm norm) {
  switch (norm) {
    case Norm::L1: return "l1";
    case Norm::L2: return "l2";
    case Norm::Linf: return "linf";
  }
  return "?";
}

const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::Clean: return "clean";
    case AttackKind::FGSM: return "fgsm";
    case AttackKind::PGD: return "pgd";
    case AttackKind::DeepFool: return "deepfool";
    case AttackKind::CW2: return "cw2";
    case AttackKind::MSD: return "msd";
  }
  return "?";
}

void Domain::validate() const {
  switch (kind) {
    case AttackKind::Clean:
      return;
    case AttackKind::FGSM:
      if (step_size <= 0.0)
        throw std::invalid_argument("domain '" + name + "': fgsm needs step_size > 0");
      return;
    case AttackKind::PGD:
      if (epsilon <= 0.0 || step_size <= 0.0 || n_iter < 1)
        throw std::invalid_argument("domain '" + name +
                                    "': pgd needs epsilon > 0, step_size > 0, n_iter >= 1");
      return;
    case AttackKind::DeepFool:
      if (epsilon <= 0.0 || n_iter < 1)
        throw std::invalid_argument("domain '" + name +
                                    "': deepfool needs epsilon > 0, n_iter >= 1");
      return;
    case AttackKind::CW2:
      if (cw_max_iterations < 1 || cw_learning_rate <= 0.0 ||
          cw_binary_search_steps < 1)
        throw std::invalid_argument("domain '" + name + "': bad cw2 tuning");
      return;
    case AttackKind::MSD: {
      if (!msd_linf || !msd_l2 || !msd_l1)
        throw std::invalid_argument("domain '" + name +
                                    "': msd needs tunings for all three norms");
      for (const NormTuning* t : {&*msd_linf, &*msd_l2, &*msd_l1})
        if (t->epsilon <= 0.0 || t->step_size <= 0.0)
          throw std::invalid_argument("domain '" + name + "': bad msd norm tuning");
      if (n_iter < 1)
        throw std::invalid_argument("domain '" + name + "': msd needs n_iter >= 1");
      return;
    }
  }
}

namespace {

inline double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

void require_finite(std::span<const double> v, const char* what) {
  if (!all_finite(v)) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

// Sort-based projection onto the L1 ball (simplex projection applied to
// |delta|): threshold tau solves sum_i max(|d_i| - tau, 0) = epsilon.
void project_l1_inplace(std::span<double> delta, double epsilon) {
  double l1 = 0.0;
  for (double x : delta) l1 += std::fabs(x);
  if (l1 <= epsilon) return;

  std::vector<double> mags(delta.size());
  for (std::size_t i = 0; i < delta.size(); ++i) mags[i] = std::fabs(delta[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());

  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    cumulative += mags[j];
    const double candidate = (cumulative - epsilon) / static_cast<double>(j + 1);
    if (j + 1 == mags.size() || mags[j + 1] <= candidate) {
      tau = candidate;
      break;
    }
  }
  for (double& x : delta) {
    const double shrunk = std::max(std::fabs(x) - tau, 0.0);
    x = std::copysign(shrunk, x);
  }
}

}  // namespace

void project_ball_inplace(std::span<double> delta, Norm norm, double epsilon) {
  if (epsilon <= 0.0) throw std::invalid_argument("project_ball: epsilon must be > 0");
  require_finite(delta, "project_ball");
  switch (norm) {
    case Norm::Linf:
      for (double& x : delta) x = std::min(epsilon, std::max(-epsilon, x));
      return;
    case Norm::L2: {
      const double n = norm_l2(delta);
      if (n > epsilon) {
        const double scale = epsilon / n;
        for (double& x : delta) x *= scale;
      }
      return;
    }
    case Norm::L1:
      project_l1_inplace(delta, epsilon);
      return;
  }
}

std::vector<double> project_ball(std::span<const double> delta, Norm norm,
                                 double epsilon) {
  std::vector<double> out(delta.begin(), delta.end());
  project_ball_inplace(out, norm, epsilon);
  return out;
}

std::vector<double> steepest_step(std::span<const double> grad, Norm norm,
                                  double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("steepest_step: alpha must be > 0");
  require_finite(grad, "steepest_step");
  std::vector<double> step(grad.size(), 0.0);
  switch (norm) {
    case Norm::Linf:
      for (std::size_t i = 0; i < grad.size(); ++i)
        step[i] = grad[i] > 0.0 ? alpha : (grad[i] < 0.0 ? -alpha : 0.0);
      return step;
    case Norm::L2: {
      const double n = norm_l2(grad);
      if (n >= 1e-12)
        for (std::size_t i = 0; i < grad.size(); ++i) step[i] = alpha * grad[i] / n;
      return step;
    }
    case Norm::L1: {
      std::size_t best = 0;
      double best_mag = std::fabs(grad.empty() ? 0.0 : grad[0]);
      for (std::size_t i = 1; i < grad.size(); ++i) {
        const double mag = std::fabs(grad[i]);
        if (mag > best_mag) {
          best_mag = mag;
          best = i;
        }
      }
      if (!grad.empty() && grad[best] != 0.0)
        step[best] = std::copysign(alpha, grad[best]);
      return step;
    }
  }
  return step;
}

std::vector<double> sample_ball(Norm norm, double epsilon, std::size_t dim,
                                CounterRng& rng) {
  std::vector<double> delta(dim, 0.0);
  switch (norm) {
    case Norm::Linf:
      for (double& x : delta) x = rng.uniform(-epsilon, epsilon);
      return delta;
    case Norm::L2: {
      // Uniform in the ball: normal direction, radius scaled by u^(1/d).
      double n2 = 0.0;
      for (double& x : delta) {
        x = rng.normal();
        n2 += x * x;
      }
      const double n = std::sqrt(n2);
      const double r =
          epsilon * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim));
      if (n > 0.0)
        for (double& x : delta) x *= r / n;
      return delta;
    }
    case Norm::L1: {
      // Dirichlet(1,...,1) weights with random signs give a uniform point on
      // the L1 sphere; radius scaled by u^(1/d) fills the ball.
      std::vector<double> w(dim);
      double sum = 0.0;
      for (double& x : w) {
        double u = rng.uniform01();
        if (u < 1e-300) u = 1e-300;
        x = -std::log(u);
        sum += x;
      }
      const double r =
          epsilon * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim));
      for (std::size_t i = 0; i < dim; ++i) {
        const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        delta[i] = sign * r * w[i] / sum;
      }
      return delta;
    }
  }
  return delta;
}

namespace {

// Success mask and per-sample loss at the given (already clamped) inputs.
void finalize_result(const NetworkParams& params, const Batch& batch,
                     AttackResult& result) {
  ForwardTrace trace = forward(params, result.adv_inputs);
  CrossEntropyResult ce = cross_entropy(trace.logits(), batch.labels);
  std::vector<int> preds = predict(trace.logits());
  result.per_sample_loss = std::move(ce.per_sample);
  result.success.resize(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    result.success[i] = preds[i] != batch.labels[i] ? 1 : 0;
}

void check_batch(const NetworkParams& params, const Batch& batch, const char* what) {
  if (batch.inputs.cols != params.input_dim())
    throw std::invalid_argument(std::string(what) + ": batch input dim mismatch");
  if (batch.inputs.rows != batch.labels.size())
    throw std::invalid_argument(std::string(what) + ": inputs/labels count mismatch");
}

}  // namespace

AttackResult clean_result(const NetworkParams& params, const Batch& batch) {
  check_batch(params, batch, "clean");
  AttackResult result;
  result.adv_inputs = batch.inputs;
  finalize_result(params, batch, result);
  return result;
}

AttackResult fgsm(const NetworkParams& params, const Batch& batch, double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("fgsm: alpha must be > 0");
  check_batch(params, batch, "fgsm");

  ForwardTrace trace = forward(params, batch.inputs);
  Matrix grads = input_gradients(params, trace, batch.labels);

  AttackResult result;
  result.adv_inputs = batch.inputs;
  for (std::size_t i = 0; i < grads.size(); ++i) {
    const double g = grads.data[i];
    const double sign = g > 0.0 ? 1.0 : (g < 0.0 ? -1.0 : 0.0);
    result.adv_inputs.data[i] = clamp01(result.adv_inputs.data[i] + alpha * sign);
  }
  finalize_result(params, batch, result);
  return result;
}

AttackResult pgd(const NetworkParams& params, const Batch& batch,
                 const Domain& domain, PgdInit init, std::uint64_t seed,
                 std::uint64_t restart, std::size_t sample_offset) {
  if (domain.kind != AttackKind::PGD)
    throw std::invalid_argument("pgd: domain kind must be PGD");
  domain.validate();
  check_batch(params, batch, "pgd");

  const Matrix& x0 = batch.inputs;
  Matrix x = x0;
  if (init == PgdInit::kRandom) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      CounterRng rng(seed, CounterRng::kAttackRestart, sample_offset + i, restart);
      std::vector<double> delta =
          sample_ball(domain.norm, domain.epsilon, x.cols, rng);
      auto row = x.row(i);
      const auto clean = x0.row(i);
      for (std::size_t j = 0; j < x.cols; ++j)
        row[j] = clamp01(clean[j] + delta[j]);
    }
  }

  std::vector<double> delta(x.cols);
  for (int t = 0; t < domain.n_iter; ++t) {
    ForwardTrace trace = forward(params, x);
    Matrix grads = input_gradients(params, trace, batch.labels);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto g = grads.row(i);
      const auto clean = x0.row(i);
      auto row = x.row(i);
      std::vector<double> step = steepest_step(g, domain.norm, domain.step_size);
      for (std::size_t j = 0; j < x.cols; ++j)
        delta[j] = row[j] + step[j] - clean[j];
      project_ball_inplace(delta, domain.norm, domain.epsilon);
      for (std::size_t j = 0; j < x.cols; ++j)
        row[j] = clamp01(clean[j] + delta[j]);
    }
  }

  AttackResult result;
  result.adv_inputs = std::move(x);
  finalize_result(params, batch, result);
  return result;
}

AttackResult deepfool(const NetworkParams& params, const Batch& batch,
                      const Domain& domain) {
  if (domain.kind != AttackKind::DeepFool)
    throw std::invalid_argument("deepfool: domain kind must be DeepFool");
  domain.validate();
  check_batch(params, batch, "deepfool");

  const std::size_t dim = batch.inputs.cols;
  const std::size_t n_classes = params.n_classes();
  AttackResult result;
  result.adv_inputs = batch.inputs;

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto clean = batch.inputs.row(i);
    const int label = batch.labels[i];
    std::vector<double> r_total(dim, 0.0);

    for (int iter = 0; iter < domain.n_iter; ++iter) {
      Matrix x(1, dim);
      for (std::size_t j = 0; j < dim; ++j)
        x(0, j) = clean[j] + (1.0 + domain.df_overshoot) * r_total[j];
      ForwardTrace trace = forward(params, x);
      const Matrix& z = trace.logits();
      if (predict(z)[0] != label) break;

      Matrix jac = logit_jacobian(params, trace);
      // Closest boundary under the L-inf dual: argmin |z_k - z_y| / ||w_k - w_y||_1.
      double best_ratio = 0.0;
      std::size_t best_k = n_classes;
      std::vector<double> best_w(dim);
      for (std::size_t k = 0; k < n_classes; ++k) {
        if (static_cast<int>(k) == label) continue;
        std::vector<double> w(dim);
        for (std::size_t j = 0; j < dim; ++j) w[j] = jac(k, j) - jac(static_cast<std::size_t>(label), j);
        const double w1 = norm_l1(w);
        if (w1 < 1e-12) continue;  // parallel boundary, unreachable
        const double ratio = std::fabs(z(0, k) - z(0, static_cast<std::size_t>(label))) / w1;
        if (best_k == n_classes || ratio < best_ratio) {
          best_ratio = ratio;
          best_k = k;
          best_w = std::move(w);
        }
      }
      if (best_k == n_classes) break;  // all gradients vanish
      // The 1e-4 nudge pushes the iterate just past the linearized boundary.
      const double dist = best_ratio + 1e-4;
      for (std::size_t j = 0; j < dim; ++j) {
        const double s = best_w[j] > 0.0 ? 1.0 : (best_w[j] < 0.0 ? -1.0 : 0.0);
        r_total[j] += dist * s;
      }
    }

    auto out = result.adv_inputs.row(i);
    std::vector<double> final_delta(dim);
    for (std::size_t j = 0; j < dim; ++j)
      final_delta[j] = (1.0 + domain.df_overshoot) * r_total[j];
    project_ball_inplace(final_delta, Norm::Linf, domain.epsilon);
    for (std::size_t j = 0; j < dim; ++j)
      out[j] = clamp01(clean[j] + final_delta[j]);
  }

  finalize_result(params, batch, result);
  return result;
}

namespace {

// One gradient-descent run of the CW objective at fixed trade-off constants
// c (one per sample), batched. Updates best_delta/best_norm in place.
void cw_inner_descent(const NetworkParams& params, const Batch& batch,
                      const Domain& domain, const std::vector<double>& c,
                      Matrix& best_delta, std::vector<double>& best_norm,
                      std::vector<std::uint8_t>& ever_success,
                      std::vector<std::uint8_t>& round_success) {
  const std::size_t n = batch.size();
  const std::size_t dim = batch.inputs.cols;
  const std::size_t n_classes = params.n_classes();
  std::fill(round_success.begin(), round_success.end(), 0);

  // w-space start: atanh of the clean input mapped into (-1, 1).
  Matrix w(n, dim);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double v = std::clamp(2.0 * batch.inputs.data[i] - 1.0, -1.0 + 1e-12, 1.0 - 1e-12);
    w.data[i] = std::atanh(v);
  }

  Matrix x(n, dim);
  Matrix logit_delta(n, n_classes);
  for (int step = 0; step < domain.cw_max_iterations; ++step) {
    for (std::size_t i = 0; i < x.size(); ++i)
      x.data[i] = 0.5 * (std::tanh(w.data[i]) + 1.0);

    ForwardTrace trace = forward(params, x);
    const Matrix& z = trace.logits();
    std::vector<int> preds = predict(z);

    // Track the best (smallest-norm) successful example seen anywhere.
    for (std::size_t i = 0; i < n; ++i) {
      if (preds[i] == batch.labels[i]) continue;
      double n2 = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double d = x(i, j) - batch.inputs(i, j);
        n2 += d * d;
      }
      const double norm = std::sqrt(n2);
      round_success[i] = 1;
      ever_success[i] = 1;
      if (norm < best_norm[i]) {
        best_norm[i] = norm;
        for (std::size_t j = 0; j < dim; ++j)
          best_delta(i, j) = x(i, j) - batch.inputs(i, j);
      }
    }

    // f(x) = max(z_y - max_{k != y} z_k, -kappa); subgradient via the
    // runner-up class when the hinge is active.
    std::fill(logit_delta.data.begin(), logit_delta.data.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const int label = batch.labels[i];
      std::size_t runner_up = n_classes;
      double best_other = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n_classes; ++k) {
        if (static_cast<int>(k) == label) continue;
        if (z(i, k) > best_other) {
          best_other = z(i, k);
          runner_up = k;
        }
      }
      const double margin = z(i, static_cast<std::size_t>(label)) - best_other;
      if (margin > -domain.cw_kappa) {
        logit_delta(i, static_cast<std::size_t>(label)) = c[i];
        logit_delta(i, runner_up) = -c[i];
      }
    }
    Matrix dx = backprop_logits_to_inputs(params, trace, logit_delta);

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        const double grad_x = 2.0 * (x(i, j) - batch.inputs(i, j)) + dx(i, j);
        const double t = std::tanh(w(i, j));
        w(i, j) -= domain.cw_learning_rate * grad_x * 0.5 * (1.0 - t * t);
      }
    }
  }
}

}  // namespace

AttackResult cw2(const NetworkParams& params, const Batch& batch,
                 const Domain& domain) {
  if (domain.kind != AttackKind::CW2)
    throw std::invalid_argument("cw2: domain kind must be CW2");
  domain.validate();
  check_batch(params, batch, "cw2");

  const std::size_t n = batch.size();
  const std::size_t dim = batch.inputs.cols;
  constexpr double kCInit = 1e-2;
  constexpr double kCMax = 1e10;

  std::vector<double> c(n, kCInit), c_lo(n, 0.0), c_hi(n, kCMax);
  Matrix best_delta(n, dim);
  std::vector<double> best_norm(n, std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> ever_success(n, 0), round_success(n, 0);

  for (int round = 0; round < domain.cw_binary_search_steps; ++round) {
    cw_inner_descent(params, batch, domain, c, best_delta, best_norm,
                     ever_success, round_success);
    for (std::size_t i = 0; i < n; ++i) {
      if (round_success[i]) {
        c_hi[i] = c[i];
        c[i] = 0.5 * (c_lo[i] + c_hi[i]);
      } else {
        c_lo[i] = c[i];
        c[i] = c_hi[i] >= kCMax ? c[i] * 10.0 : 0.5 * (c_lo[i] + c_hi[i]);
      }
    }
  }

  AttackResult result;
  result.adv_inputs = batch.inputs;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ever_success[i]) continue;
    auto row = result.adv_inputs.row(i);
    for (std::size_t j = 0; j < dim; ++j)
      row[j] = clamp01(batch.inputs(i, j) + best_delta(i, j));
  }
  finalize_result(params, batch, result);
  return result;
}

AttackResult msd(const NetworkParams& params, const Batch& batch,
                 const Domain& domain, PgdInit init, std::uint64_t seed,
                 std::uint64_t restart, std::size_t sample_offset) {
  if (domain.kind != AttackKind::MSD)
    throw std::invalid_argument("msd: domain kind must be MSD");
  domain.validate();
  check_batch(params, batch, "msd");

  const std::size_t n = batch.size();
  const std::size_t dim = batch.inputs.cols;
  const Matrix& x0 = batch.inputs;

  struct Candidate {
    Norm norm;
    NormTuning tuning;
  };
  // Tie-break order: Linf, then L2, then L1.
  const Candidate candidates[3] = {{Norm::Linf, *domain.msd_linf},
                                   {Norm::L2, *domain.msd_l2},
                                   {Norm::L1, *domain.msd_l1}};

  Matrix x = x0;
  if (init == PgdInit::kRandom) {
    // Restarts draw the init from the L-inf tuning's ball.
    for (std::size_t i = 0; i < n; ++i) {
      CounterRng rng(seed, CounterRng::kAttackRestart, sample_offset + i, restart);
      std::vector<double> delta =
          sample_ball(Norm::Linf, domain.msd_linf->epsilon, dim, rng);
      auto row = x.row(i);
      for (std::size_t j = 0; j < dim; ++j)
        row[j] = clamp01(x0(i, j) + delta[j]);
    }
  }

  std::vector<double> delta(dim);
  Matrix stacked(3 * n, dim);
  std::vector<int> stacked_labels(3 * n);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < n; ++i)
      stacked_labels[k * n + i] = batch.labels[i];

  for (int t = 0; t < domain.n_iter; ++t) {
    ForwardTrace trace = forward(params, x);
    Matrix grads = input_gradients(params, trace, batch.labels);

    // Three candidate iterates from the shared gradient, one per norm.
    for (std::size_t k = 0; k < 3; ++k) {
      const Candidate& cand = candidates[k];
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> step =
            steepest_step(grads.row(i), cand.norm, cand.tuning.step_size);
        for (std::size_t j = 0; j < dim; ++j)
          delta[j] = x(i, j) + step[j] - x0(i, j);
        project_ball_inplace(delta, cand.norm, cand.tuning.epsilon);
        for (std::size_t j = 0; j < dim; ++j)
          stacked(k * n + i, j) = clamp01(x0(i, j) + delta[j]);
      }
    }

    ForwardTrace cand_trace = forward(params, stacked);
    CrossEntropyResult ce = cross_entropy(cand_trace.logits(), stacked_labels);

    // Keep, per sample, the candidate with the highest loss.
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best_k = 0;
      double best_loss = ce.per_sample[i];
      for (std::size_t k = 1; k < 3; ++k) {
        const double loss = ce.per_sample[k * n + i];
        if (loss > best_loss) {
          best_loss = loss;
          best_k = k;
        }
      }
      auto row = x.row(i);
      for (std::size_t j = 0; j < dim; ++j) row[j] = stacked(best_k * n + i, j);
    }
  }

  AttackResult result;
  result.adv_inputs = std::move(x);
  finalize_result(params, batch, result);
  return result;
}

AttackResult run_domain(const NetworkParams& params, const Batch& batch,
                        const Domain& domain, PgdInit init, std::uint64_t seed,
                        std::uint64_t restart, std::size_t sample_offset) {
  switch (domain.kind) {
    case AttackKind::Clean: return clean_result(params, batch);
    case AttackKind::FGSM: return fgsm(params, batch, domain.step_size);
    case AttackKind::PGD: return pgd(params, batch, domain, init, seed, restart, sample_offset);
    case AttackKind::DeepFool: return deepfool(params, batch, domain);
    case AttackKind::CW2: return cw2(params, batch, domain);
    case AttackKind::MSD: return msd(params, batch, domain, init, seed, restart, sample_offset);
  }
  throw std::invalid_argument("run_domain: unknown attack kind");
}

AttackResult perturb_with_restarts(
    const std::function<AttackResult(PgdInit, std::uint64_t)>& run_once,
    int n_restarts) {
  if (n_restarts < 1)
    throw std::invalid_argument("perturb_with_restarts: n_restarts must be >= 1");

  AttackResult best = run_once(PgdInit::kZero, 0);
  std::vector<std::uint8_t> settled(best.success.begin(), best.success.end());

  for (int r = 1; r < n_restarts; ++r) {
    AttackResult attempt = run_once(PgdInit::kRandom, static_cast<std::uint64_t>(r));
    for (std::size_t i = 0; i < settled.size(); ++i) {
      if (settled[i]) continue;  // first misclassifying restart is kept
      const bool take = attempt.success[i] ||
                        attempt.per_sample_loss[i] > best.per_sample_loss[i];
      if (take) {
        auto dst = best.adv_inputs.row(i);
        const auto src = attempt.adv_inputs.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
        best.per_sample_loss[i] = attempt.per_sample_loss[i];
        best.success[i] = attempt.success[i];
        if (attempt.success[i]) settled[i] = 1;
      }
    }
  }
  return best;
}

AttackResult run_domain_with_restarts(const NetworkParams& params,
                                      const Batch& batch, const Domain& domain,
                                      int n_restarts, std::uint64_t seed,
                                      std::size_t sample_offset) {
  if (n_restarts < 1)
    throw std::invalid_argument("run_domain_with_restarts: n_restarts must be >= 1");
  const int effective = domain.is_stochastic() ? n_restarts : 1;
  return perturb_with_restarts(
      [&](PgdInit init, std::uint64_t restart) {
        return run_domain(params, batch, domain, init, seed, restart, sample_offset);
      },
      effective);
}

}  // namespace advrex
