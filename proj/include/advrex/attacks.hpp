#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "advrex/diffnet.hpp"

namespace advrex {

enum class Norm { L1, L2, Linf };
enum class AttackKind { Clean, FGSM, PGD, DeepFool, CW2, MSD };

const char* to_string(Norm norm);
const char* to_string(AttackKind kind);

struct NormTuning {
  double epsilon = 0.0;
  double step_size = 0.0;
};

// A named perturbation generator with its tuning. Only the fields relevant
// to `kind` are read; validate() enforces that they are set.
struct Domain {
  std::string name;
  AttackKind kind = AttackKind::Clean;
  Norm norm = Norm::Linf;
  double epsilon = 0.0;
  double step_size = 0.0;
  int n_iter = 0;

  // CW2
  int cw_max_iterations = 20;
  double cw_learning_rate = 0.1;
  int cw_binary_search_steps = 5;
  double cw_kappa = 0.0;

  // DeepFool
  double df_overshoot = 0.02;

  // MSD: one tuning per norm, all required.
  std::optional<NormTuning> msd_linf;
  std::optional<NormTuning> msd_l2;
  std::optional<NormTuning> msd_l1;

  void validate() const;  // throws std::invalid_argument on bad tuning

  // Attacks without random initialization produce identical results on
  // every restart, so restart loops collapse to a single run.
  bool is_stochastic() const {
    return kind == AttackKind::PGD || kind == AttackKind::MSD;
  }
};

struct AttackResult {
  Matrix adv_inputs;                 // same shape as clean inputs, in [0,1]
  std::vector<std::uint8_t> success; // misclassified after the attack
  std::vector<double> per_sample_loss;
};

// Euclidean projection of delta onto {v : ||v||_norm <= epsilon}.
// Identity when delta is already inside the ball. The L1 case uses the
// sort-based simplex projection (O(d log d)).
std::vector<double> project_ball(std::span<const double> delta, Norm norm,
                                 double epsilon);
void project_ball_inplace(std::span<double> delta, Norm norm, double epsilon);

// Steepest-ascent direction of length alpha under the given norm:
//   Linf: alpha * sign(grad)
//   L2:   alpha * grad / ||grad||2 (zero vector when ||grad||2 < 1e-12)
//   L1:   alpha * sign(grad[i*]) * e_{i*}, i* = argmax |grad_i|
//         (lowest index on ties)
std::vector<double> steepest_step(std::span<const double> grad, Norm norm,
                                  double alpha);

enum class PgdInit { kZero, kRandom };

// Uniform draw from the epsilon ball of the given norm, dimension dim.
std::vector<double> sample_ball(Norm norm, double epsilon, std::size_t dim,
                                class CounterRng& rng);

// Single sign-gradient step from the clean input, clamped to [0,1] (Eq. 1
// style; no ball projection).
AttackResult fgsm(const NetworkParams& params, const Batch& batch, double alpha);

// Iterated steepest ascent with projection onto the epsilon ball around the
// clean input and a [0,1] clamp each iteration. Returns the final iterate.
// seed/restart/sample_offset key the random init; unused for kZero.
AttackResult pgd(const NetworkParams& params, const Batch& batch,
                 const Domain& domain, PgdInit init, std::uint64_t seed = 0,
                 std::uint64_t restart = 0, std::size_t sample_offset = 0);

// L-infinity DeepFool: iterative decision-boundary linearization, stepping
// to the closest class boundary under the L-inf dual metric until
// misclassified or out of iterations. Final perturbation is scaled by
// (1 + overshoot), clipped to the epsilon box and [0,1].
AttackResult deepfool(const NetworkParams& params, const Batch& batch,
                      const Domain& domain);

// Carlini-Wagner L2: minimize ||delta||^2 + c * f(x + delta) over the tanh
// reparameterization, with binary search over c. Returns the smallest-norm
// successful adversarial example per sample, or the clean input.
AttackResult cw2(const NetworkParams& params, const Batch& batch,
                 const Domain& domain);

// Multi-steepest-descent: each iteration builds the L-inf, L2 and L1
// candidate iterates (each with its own tuning) and keeps, per sample, the
// one with the highest loss (ties resolved in the order Linf, L2, L1).
AttackResult msd(const NetworkParams& params, const Batch& batch,
                 const Domain& domain, PgdInit init = PgdInit::kZero,
                 std::uint64_t seed = 0, std::uint64_t restart = 0,
                 std::size_t sample_offset = 0);

// Clean "attack": returns the inputs unchanged.
AttackResult clean_result(const NetworkParams& params, const Batch& batch);

// Dispatch on domain.kind.
AttackResult run_domain(const NetworkParams& params, const Batch& batch,
                        const Domain& domain, PgdInit init = PgdInit::kZero,
                        std::uint64_t seed = 0, std::uint64_t restart = 0,
                        std::size_t sample_offset = 0);

// Runs `run_once(init, restart)` n_restarts times (restart 0 with zero
// init, later restarts with random init). Per sample keeps the first
// restart that misclassifies, else the restart with the highest loss;
// success is the OR across restarts.
AttackResult perturb_with_restarts(
    const std::function<AttackResult(PgdInit, std::uint64_t)>& run_once,
    int n_restarts);

// Restart aggregation for a domain; deterministic kinds run once.
AttackResult run_domain_with_restarts(const NetworkParams& params,
                                      const Batch& batch, const Domain& domain,
                                      int n_restarts, std::uint64_t seed,
                                      std::size_t sample_offset = 0);

}  // namespace advrex
