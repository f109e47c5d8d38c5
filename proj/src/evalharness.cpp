#include "advrex/evalharness.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace advrex {

namespace {

struct DomainOutcome {
  std::vector<std::uint8_t> success;  // misclassified under the attack
  double mean_loss = 0.0;
};

// Restart-aggregated attack over the dataset, sharded across workers.
// Sample-keyed RNG makes the outcome independent of the sharding.
DomainOutcome attack_dataset(const NetworkParams& params, const Batch& dataset,
                             const Domain& domain, int n_restarts,
                             std::uint64_t seed, int workers) {
  const std::size_t n = dataset.size();
  DomainOutcome outcome;
  outcome.success.assign(n, 0);
  std::vector<double> losses(n, 0.0);

  const std::size_t n_shards = std::max(1, workers);
  auto run_shard = [&](std::size_t shard) {
    const std::size_t begin = n * shard / n_shards;
    const std::size_t end = n * (shard + 1) / n_shards;
    if (begin == end) return;
    Batch part;
    part.inputs = Matrix(end - begin, dataset.inputs.cols);
    part.labels.assign(dataset.labels.begin() + static_cast<long>(begin),
                       dataset.labels.begin() + static_cast<long>(end));
    std::copy(dataset.inputs.data.begin() + static_cast<long>(begin * dataset.inputs.cols),
              dataset.inputs.data.begin() + static_cast<long>(end * dataset.inputs.cols),
              part.inputs.data.begin());
    AttackResult result =
        run_domain_with_restarts(params, part, domain, n_restarts, seed, begin);
    for (std::size_t i = 0; i < part.size(); ++i) {
      outcome.success[begin + i] = result.success[i];
      losses[begin + i] = result.per_sample_loss[i];
    }
  };

  if (n_shards == 1) {
    run_shard(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t s = 0; s < n_shards; ++s) pool.emplace_back(run_shard, s);
    for (std::thread& t : pool) t.join();
  }

  outcome.mean_loss = std::accumulate(losses.begin(), losses.end(), 0.0) /
                      static_cast<double>(n);
  return outcome;
}

int effective_restarts(const Domain& domain, int n_restarts) {
  return domain.kind == AttackKind::Clean ? 1 : n_restarts;
}

}  // namespace

double accuracy(const NetworkParams& params, const Batch& dataset,
                const Domain& domain, int n_restarts, std::uint64_t seed,
                int workers) {
  if (dataset.size() == 0)
    throw std::invalid_argument("accuracy: dataset must be nonempty");
  DomainOutcome outcome = attack_dataset(
      params, dataset, domain, effective_restarts(domain, n_restarts), seed, workers);
  std::size_t correct = 0;
  for (std::uint8_t s : outcome.success)
    if (!s) ++correct;
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

double ensemble_accuracy(const NetworkParams& params, const Batch& dataset,
                         const DomainSet& set, std::uint64_t seed,
                         int workers) {
  if (set.domains.empty())
    throw std::invalid_argument("ensemble_accuracy: domain set must be nonempty");
  if (set.n_restarts < 1)
    throw std::invalid_argument("ensemble_accuracy: n_restarts must be >= 1");

  std::vector<std::uint8_t> any_success(dataset.size(), 0);
  for (const Domain& domain : set.domains) {
    DomainOutcome outcome =
        attack_dataset(params, dataset, domain,
                       effective_restarts(domain, set.n_restarts), seed, workers);
    for (std::size_t i = 0; i < any_success.size(); ++i)
      any_success[i] |= outcome.success[i];
  }
  std::size_t correct = 0;
  for (std::uint8_t s : any_success)
    if (!s) ++correct;
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

EvalReport evaluate_report(const NetworkParams& params, const Batch& dataset,
                           std::span<const DomainSet> domain_sets, int epoch,
                           std::uint64_t seed, int workers) {
  if (domain_sets.empty())
    throw std::invalid_argument("evaluate_report: domain_sets must be nonempty");
  if (dataset.size() == 0)
    throw std::invalid_argument("evaluate_report: dataset must be nonempty");

  EvalReport report;
  report.checkpoint_epoch = epoch;
  report.n_samples = static_cast<int>(dataset.size());
  report.seed = seed;

  // One mask per (domain, restarts); every ensemble intersects cached masks.
  std::map<std::pair<std::string, int>, DomainOutcome> masks;
  auto mask_for = [&](const Domain& domain, int restarts) -> const DomainOutcome& {
    const int eff = effective_restarts(domain, restarts);
    const auto key = std::make_pair(domain.name, eff);
    auto it = masks.find(key);
    if (it == masks.end())
      it = masks.emplace(key, attack_dataset(params, dataset, domain, eff, seed, workers))
               .first;
    return it->second;
  };

  for (const DomainSet& set : domain_sets) {
    if (set.domains.empty())
      throw std::invalid_argument("evaluate_report: empty domain set '" + set.name + "'");
    std::vector<std::uint8_t> any_success(dataset.size(), 0);
    for (const Domain& domain : set.domains) {
      const DomainOutcome& outcome = mask_for(domain, set.n_restarts);
      std::size_t correct = 0;
      for (std::size_t i = 0; i < any_success.size(); ++i) {
        any_success[i] |= outcome.success[i];
        if (!outcome.success[i]) ++correct;
      }
      // A domain listed in several sets keeps its first-seen mask's numbers.
      report.per_domain_accuracy.emplace(
          domain.name,
          static_cast<double>(correct) / static_cast<double>(dataset.size()));
      report.per_domain_mean_loss.emplace(domain.name, outcome.mean_loss);
    }
    std::size_t correct = 0;
    for (std::uint8_t s : any_success)
      if (!s) ++correct;
    report.ensemble_accuracy[set.name] =
        static_cast<double>(correct) / static_cast<double>(dataset.size());
  }
  return report;
}

int select_checkpoint(std::span<const EvalReport> history) {
  if (history.empty())
    throw std::invalid_argument("select_checkpoint: history must be nonempty");
  bool found = false;
  double best_acc = 0.0;
  int best_epoch = 0;
  for (const EvalReport& report : history) {
    auto it = report.ensemble_accuracy.find("seen");
    if (it == report.ensemble_accuracy.end())
      throw std::invalid_argument(
          "select_checkpoint: report lacks the 'seen' ensemble");
    const double acc = it->second;
    if (!found || acc > best_acc ||
        (acc == best_acc && report.checkpoint_epoch < best_epoch)) {
      found = true;
      best_acc = acc;
      best_epoch = report.checkpoint_epoch;
    }
  }
  return best_epoch;
}

}  // namespace advrex
