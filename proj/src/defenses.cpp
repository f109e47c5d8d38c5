#include "advrex/defenses.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "advrex/rng.hpp"

namespace advrex {

const char* to_string(DefenseMode mode) {
  switch (mode) {
    case DefenseMode::AVG: return "avg";
    case DefenseMode::MAX: return "max";
    case DefenseMode::MSD: return "msd";
    case DefenseMode::AVG_REX: return "avg_rex";
    case DefenseMode::MSD_REX: return "msd_rex";
  }
  return "?";
}

DefenseMode defense_mode_from_string(const std::string& s) {
  if (s == "avg") return DefenseMode::AVG;
  if (s == "max") return DefenseMode::MAX;
  if (s == "msd") return DefenseMode::MSD;
  if (s == "avg_rex") return DefenseMode::AVG_REX;
  if (s == "msd_rex") return DefenseMode::MSD_REX;
  throw std::invalid_argument("unknown defense mode: " + s);
}

void DefenseConfig::validate() const {
  for (const Domain& d : seen_domains) d.validate();
  for (const Domain& d : rex_domains) d.validate();
  if (beta < 0.0) throw std::invalid_argument("defense: beta must be >= 0");
  switch (mode) {
    case DefenseMode::AVG:
    case DefenseMode::MAX:
      if (seen_domains.size() < 2)
        throw std::invalid_argument("defense: avg/max need >= 2 seen domains");
      break;
    case DefenseMode::MSD:
      if (seen_domains.size() != 1 || seen_domains[0].kind != AttackKind::MSD)
        throw std::invalid_argument("defense: msd mode needs exactly the MSD domain");
      break;
    case DefenseMode::AVG_REX:
      if (seen_domains.size() < 2)
        throw std::invalid_argument("defense: avg_rex needs >= 2 seen domains");
      if (!rex_activation_epoch)
        throw std::invalid_argument("defense: avg_rex needs rex_activation_epoch");
      break;
    case DefenseMode::MSD_REX:
      if (seen_domains.size() != 1 || seen_domains[0].kind != AttackKind::MSD)
        throw std::invalid_argument("defense: msd_rex starts from the MSD domain");
      if (!rex_activation_epoch)
        throw std::invalid_argument("defense: msd_rex needs rex_activation_epoch");
      if (rex_domains.size() < 2)
        throw std::invalid_argument("defense: msd_rex needs >= 2 rex_domains");
      break;
  }
}

OptimState make_optim_state(const NetworkParams& params, double lr,
                            double momentum, double weight_decay,
                            std::vector<std::pair<int, double>> milestones) {
  if (lr <= 0.0) throw std::invalid_argument("optimizer: learning rate must be > 0");
  OptimState opt;
  opt.initial_lr = lr;
  opt.learning_rate = lr;
  opt.momentum = momentum;
  opt.weight_decay = weight_decay;
  opt.milestones = std::move(milestones);
  std::sort(opt.milestones.begin(), opt.milestones.end());
  for (const Matrix& w : params.weights)
    opt.w_velocity.emplace_back(w.rows, w.cols);
  for (const std::vector<double>& b : params.biases)
    opt.b_velocity.emplace_back(b.size(), 0.0);
  return opt;
}

std::vector<Matrix> generate_examples(const NetworkParams& params,
                                      const Batch& batch,
                                      std::span<const Domain> domains,
                                      int workers) {
  std::vector<Matrix> adv(domains.size());
  auto gen = [&](std::size_t d) {
    adv[d] = run_domain(params, batch, domains[d], PgdInit::kZero).adv_inputs;
  };
  if (workers <= 1 || domains.size() <= 1) {
    for (std::size_t d = 0; d < domains.size(); ++d) gen(d);
  } else {
    // Domains are independent given the frozen params; results land in
    // disjoint slots, so sharding cannot change them.
    std::vector<std::thread> pool;
    const std::size_t parallel =
        std::min<std::size_t>(static_cast<std::size_t>(workers), domains.size());
    std::atomic<std::size_t> cursor{0};
    for (std::size_t t = 0; t < parallel; ++t)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t d = cursor.fetch_add(1);
          if (d >= domains.size()) return;
          gen(d);
        }
      });
    for (std::thread& t : pool) t.join();
  }
  return adv;
}

namespace {

// Per-domain per-sample cross entropies on freshly generated examples.
struct DomainLosses {
  std::vector<Matrix> adv;
  std::vector<CrossEntropyResult> ce;  // one per domain
};

DomainLosses domain_losses(const NetworkParams& params, const Batch& batch,
                           std::span<const Domain> domains, int workers = 1) {
  if (domains.empty())
    throw std::invalid_argument("defense loss: domains must be nonempty");
  DomainLosses out;
  out.adv = generate_examples(params, batch, domains, workers);
  out.ce.reserve(domains.size());
  for (const Matrix& x : out.adv) {
    ForwardTrace trace = forward(params, x);
    out.ce.push_back(cross_entropy(trace.logits(), batch.labels));
  }
  return out;
}

double population_variance(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return var / n;
}

}  // namespace

AvgLoss loss_avg(const NetworkParams& params, const Batch& batch,
                 std::span<const Domain> domains) {
  DomainLosses dl = domain_losses(params, batch, domains);
  AvgLoss out;
  for (const CrossEntropyResult& ce : dl.ce) out.per_domain.push_back(ce.mean);
  out.mean = std::accumulate(out.per_domain.begin(), out.per_domain.end(), 0.0) /
             static_cast<double>(out.per_domain.size());
  return out;
}

double loss_max(const NetworkParams& params, const Batch& batch,
                std::span<const Domain> domains) {
  DomainLosses dl = domain_losses(params, batch, domains);
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    double m = dl.ce[0].per_sample[i];
    for (std::size_t d = 1; d < dl.ce.size(); ++d)
      m = std::max(m, dl.ce[d].per_sample[i]);
    total += m;
  }
  return total / static_cast<double>(batch.size());
}

RexLoss loss_rex(const NetworkParams& params, const Batch& batch,
                 std::span<const Domain> domains, double beta) {
  if (domains.size() < 2)
    throw std::invalid_argument("loss_rex: variance needs >= 2 domains");
  if (beta < 0.0) throw std::invalid_argument("loss_rex: beta must be >= 0");

  DomainLosses dl = domain_losses(params, batch, domains);
  std::vector<double> means;
  RexLoss out;
  for (std::size_t d = 0; d < domains.size(); ++d) {
    means.push_back(dl.ce[d].mean);
    out.stats.per_domain_mean_loss[domains[d].name] = dl.ce[d].mean;
  }
  out.stats.avg_loss = std::accumulate(means.begin(), means.end(), 0.0) /
                       static_cast<double>(means.size());
  out.stats.variance_term = population_variance(means);
  out.stats.total_loss = out.stats.avg_loss + beta * out.stats.variance_term;
  out.total = out.stats.total_loss;
  return out;
}

void sgd_step(OptimState& opt, NetworkParams& params, const Gradients& grads) {
  if (grads.weight_grads.size() != params.weights.size() ||
      grads.bias_grads.size() != params.biases.size())
    throw std::invalid_argument("sgd_step: gradient shapes do not match params");
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    if (!grads.weight_grads[l].same_shape(params.weights[l]) ||
        grads.bias_grads[l].size() != params.biases[l].size())
      throw std::invalid_argument("sgd_step: gradient shapes do not match params");
    if (!all_finite(grads.weight_grads[l]) ||
        !all_finite(std::span<const double>(grads.bias_grads[l])))
      throw TrainAbortError("sgd_step: non-finite gradients");
  }

  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    Matrix& w = params.weights[l];
    Matrix& vw = opt.w_velocity[l];
    const Matrix& gw = grads.weight_grads[l];
    for (std::size_t i = 0; i < w.size(); ++i) {
      vw.data[i] = opt.momentum * vw.data[i] +
                   (gw.data[i] + opt.weight_decay * w.data[i]);
      w.data[i] -= opt.learning_rate * vw.data[i];
    }
    std::vector<double>& b = params.biases[l];
    std::vector<double>& vb = opt.b_velocity[l];
    const std::vector<double>& gb = grads.bias_grads[l];
    for (std::size_t i = 0; i < b.size(); ++i) {
      vb[i] = opt.momentum * vb[i] + gb[i];  // no decay on biases
      b[i] -= opt.learning_rate * vb[i];
    }
  }
}

double lr_at(const OptimState& opt, int epoch) {
  if (epoch < 0) throw std::invalid_argument("lr_at: epoch must be >= 0");
  double lr = opt.initial_lr;
  for (const auto& [milestone, new_lr] : opt.milestones)
    if (epoch >= milestone) lr = new_lr;
  return lr;
}

TrainerState make_trainer(NetworkParams params, OptimState opt,
                          DefenseConfig defense, std::uint64_t seed,
                          int batch_size, int workers) {
  defense.validate();
  if (batch_size < 1) throw std::invalid_argument("trainer: batch_size must be >= 1");
  TrainerState state;
  state.active_domains = defense.seen_domains;
  state.params = std::move(params);
  state.opt = std::move(opt);
  state.defense = std::move(defense);
  state.seed = seed;
  state.batch_size = batch_size;
  state.workers = workers;
  return state;
}

void activate_rex(TrainerState& state) {
  if (!state.defense.is_rex_mode())
    throw std::invalid_argument("activate_rex: defense mode is not a REx mode");
  if (state.rex_active)
    throw std::runtime_error("activate_rex: already active");

  // Reset the optimizer so no momentum accumulated by the baseline leaks
  // into the REx phase.
  for (Matrix& v : state.opt.w_velocity)
    std::fill(v.data.begin(), v.data.end(), 0.0);
  for (std::vector<double>& v : state.opt.b_velocity)
    std::fill(v.begin(), v.end(), 0.0);

  if (state.defense.mode == DefenseMode::MSD_REX)
    state.active_domains = state.defense.rex_domains;
  state.rex_active = true;
}

namespace {

struct MinibatchOutcome {
  std::vector<double> per_domain_mean;  // cross entropy per domain
  double mode_loss = 0.0;               // the loss actually optimized
};

// Computes the minibatch loss and its parameter gradients for the current
// mode and accumulates one optimizer step.
MinibatchOutcome train_minibatch(TrainerState& state, const Batch& minibatch) {
  const std::span<const Domain> domains(state.active_domains);
  std::vector<Matrix> adv =
      generate_examples(state.params, minibatch, domains, state.workers);

  std::vector<ForwardTrace> traces;
  std::vector<CrossEntropyResult> ces;
  traces.reserve(domains.size());
  for (const Matrix& x : adv) {
    traces.push_back(forward(state.params, x));
    ces.push_back(cross_entropy(traces.back().logits(), minibatch.labels));
  }

  MinibatchOutcome outcome;
  for (const CrossEntropyResult& ce : ces) outcome.per_domain_mean.push_back(ce.mean);

  Gradients total;
  total.weight_grads.reserve(state.params.n_layers());
  for (const Matrix& w : state.params.weights)
    total.weight_grads.emplace_back(w.rows, w.cols);
  for (const std::vector<double>& b : state.params.biases)
    total.bias_grads.emplace_back(b.size(), 0.0);

  auto accumulate = [&](const Gradients& g, double scale) {
    for (std::size_t l = 0; l < total.weight_grads.size(); ++l) {
      for (std::size_t i = 0; i < total.weight_grads[l].size(); ++i)
        total.weight_grads[l].data[i] += scale * g.weight_grads[l].data[i];
      for (std::size_t i = 0; i < total.bias_grads[l].size(); ++i)
        total.bias_grads[l][i] += scale * g.bias_grads[l][i];
    }
  };

  if (state.defense.mode == DefenseMode::MAX) {
    // Per sample take the worst domain, then differentiate the mean of the
    // selected losses via a composite batch.
    Matrix composite(minibatch.size(), minibatch.inputs.cols);
    double total_loss = 0.0;
    for (std::size_t i = 0; i < minibatch.size(); ++i) {
      std::size_t best_d = 0;
      double best = ces[0].per_sample[i];
      for (std::size_t d = 1; d < ces.size(); ++d)
        if (ces[d].per_sample[i] > best) {
          best = ces[d].per_sample[i];
          best_d = d;
        }
      total_loss += best;
      const auto src = adv[best_d].row(i);
      std::copy(src.begin(), src.end(), composite.row(i).begin());
    }
    outcome.mode_loss = total_loss / static_cast<double>(minibatch.size());
    ForwardTrace trace = forward(state.params, composite);
    Gradients g = backward(state.params, trace, minibatch.labels);
    accumulate(g, 1.0);
  } else {
    // AVG, MSD and both REx modes share one weighting:
    //   w_d = (1 + 2*beta_eff*(L_d - mean)) / |D|
    // which is the exact gradient of avg + beta_eff * population variance.
    // beta_eff = 0 reproduces the plain average (and the single-domain MSD
    // case, where the variance term vanishes identically).
    const double n = static_cast<double>(domains.size());
    const double beta_eff = state.rex_active ? state.defense.beta : 0.0;
    double mean = 0.0;
    for (double m : outcome.per_domain_mean) mean += m;
    mean /= n;
    double variance = 0.0;
    for (double m : outcome.per_domain_mean)
      variance += (m - mean) * (m - mean);
    variance /= n;
    outcome.mode_loss = mean + beta_eff * variance;

    for (std::size_t d = 0; d < domains.size(); ++d) {
      const double w =
          (1.0 + 2.0 * beta_eff * (outcome.per_domain_mean[d] - mean)) / n;
      Gradients g = backward(state.params, traces[d], minibatch.labels);
      accumulate(g, w);
    }
  }

  sgd_step(state.opt, state.params, total);
  return outcome;
}

}  // namespace

EpochStats train_epoch(TrainerState& state, const Batch& dataset) {
  if (dataset.size() == 0)
    throw std::invalid_argument("train_epoch: dataset must be nonempty");

  state.opt.learning_rate = lr_at(state.opt, state.epoch);

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  CounterRng shuffle_rng(state.seed, CounterRng::kShuffle,
                         static_cast<std::uint64_t>(state.epoch));
  shuffle_rng.shuffle(order);

  const std::size_t n_domains = state.active_domains.size();
  std::vector<double> domain_sums(n_domains, 0.0);
  double mode_sum = 0.0;
  std::size_t seen_samples = 0;

  const std::size_t bs = static_cast<std::size_t>(state.batch_size);
  for (std::size_t start = 0, mb = 0; start < order.size(); start += bs, ++mb) {
    const std::size_t count = std::min(bs, order.size() - start);
    Batch minibatch;
    minibatch.inputs = Matrix(count, dataset.inputs.cols);
    minibatch.labels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t src = order[start + i];
      const auto row = dataset.inputs.row(src);
      std::copy(row.begin(), row.end(), minibatch.inputs.row(i).begin());
      minibatch.labels[i] = dataset.labels[src];
    }
    try {
      MinibatchOutcome outcome = train_minibatch(state, minibatch);
      const double w = static_cast<double>(count);
      for (std::size_t d = 0; d < n_domains; ++d)
        domain_sums[d] += outcome.per_domain_mean[d] * w;
      mode_sum += outcome.mode_loss * w;
      seen_samples += count;
    } catch (const TrainAbortError& e) {
      throw TrainAbortError(std::string(e.what()) + " (minibatch " +
                            std::to_string(mb) + ", epoch " +
                            std::to_string(state.epoch) + ")");
    }
  }

  EpochStats stats;
  stats.epoch = state.epoch;
  std::vector<double> domain_means(n_domains);
  for (std::size_t d = 0; d < n_domains; ++d) {
    domain_means[d] = domain_sums[d] / static_cast<double>(seen_samples);
    stats.per_domain_mean_loss[state.active_domains[d].name] = domain_means[d];
  }
  stats.avg_loss =
      std::accumulate(domain_means.begin(), domain_means.end(), 0.0) /
      static_cast<double>(n_domains);
  if (state.rex_active) {
    stats.variance_term = population_variance(domain_means);
    stats.total_loss = stats.avg_loss + state.defense.beta * stats.variance_term;
  } else {
    stats.variance_term = 0.0;
    stats.total_loss = mode_sum / static_cast<double>(seen_samples);
  }

  state.epoch += 1;
  return stats;
}

}  // namespace advrex
