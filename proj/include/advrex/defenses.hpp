#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "advrex/attacks.hpp"
#include "advrex/diffnet.hpp"

namespace advrex {

enum class DefenseMode { AVG, MAX, MSD, AVG_REX, MSD_REX };

const char* to_string(DefenseMode mode);
DefenseMode defense_mode_from_string(const std::string& s);

struct DefenseConfig {
  std::vector<Domain> seen_domains;
  DefenseMode mode = DefenseMode::AVG;
  double beta = 10.0;
  std::optional<int> rex_activation_epoch;
  // Domains used for the variance term once REx activates; required for
  // MSD_REX (the MSD composite generates a single domain, which leaves the
  // variance undefined).
  std::vector<Domain> rex_domains;

  bool is_rex_mode() const {
    return mode == DefenseMode::AVG_REX || mode == DefenseMode::MSD_REX;
  }
  void validate() const;  // throws std::invalid_argument
};

struct OptimState {
  double initial_lr = 0.01;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::vector<Matrix> w_velocity;
  std::vector<std::vector<double>> b_velocity;
  std::vector<std::pair<int, double>> milestones;  // (epoch, new lr)
};

OptimState make_optim_state(const NetworkParams& params, double lr,
                            double momentum, double weight_decay,
                            std::vector<std::pair<int, double>> milestones = {});

struct EpochStats {
  std::map<std::string, double> per_domain_mean_loss;
  double avg_loss = 0.0;
  double variance_term = 0.0;
  double total_loss = 0.0;
  int epoch = 0;
};

// Epoch aborted mid-way (non-finite gradients and the like).
struct TrainAbortError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adversarial examples for every domain, regenerated against the given
// params (zero-init attacks; training does not use restarts).
std::vector<Matrix> generate_examples(const NetworkParams& params,
                                      const Batch& batch,
                                      std::span<const Domain> domains,
                                      int workers = 1);

struct AvgLoss {
  double mean = 0.0;
  std::vector<double> per_domain;
};

// Mean over domains of the per-domain mean cross entropy (Eq. 3 form).
AvgLoss loss_avg(const NetworkParams& params, const Batch& batch,
                 std::span<const Domain> domains);

// Per sample the max loss across domains, then the batch mean (Eq. 4 form;
// the expectation is outside the max).
double loss_max(const NetworkParams& params, const Batch& batch,
                std::span<const Domain> domains);

struct RexLoss {
  double total = 0.0;
  EpochStats stats;
};

// Average loss plus beta times the population variance (divide by |D|) of
// the per-domain mean losses.
RexLoss loss_rex(const NetworkParams& params, const Batch& batch,
                 std::span<const Domain> domains, double beta);

// Classic momentum update: v <- mu*v + (g + wd*theta); theta <- theta - lr*v.
// Weight decay applies to weights only, not biases.
void sgd_step(OptimState& opt, NetworkParams& params, const Gradients& grads);

// Piecewise-constant learning rate from milestones.
double lr_at(const OptimState& opt, int epoch);

struct TrainerState {
  NetworkParams params;
  OptimState opt;
  DefenseConfig defense;
  std::vector<Domain> active_domains;
  bool rex_active = false;
  int epoch = 0;  // next epoch to run
  std::uint64_t seed = 0;
  int batch_size = 128;
  int workers = 1;
};

TrainerState make_trainer(NetworkParams params, OptimState opt,
                          DefenseConfig defense, std::uint64_t seed,
                          int batch_size = 128, int workers = 1);

// Switches the trainer to the REx loss: zeroes all momentum buffers and,
// for MSD_REX, swaps the seen domains to the configured rex_domains.
void activate_rex(TrainerState& state);

// One pass over the dataset in a seeded shuffle order; per minibatch the
// adversarial examples are regenerated against the current params.
EpochStats train_epoch(TrainerState& state, const Batch& dataset);

}  // namespace advrex
