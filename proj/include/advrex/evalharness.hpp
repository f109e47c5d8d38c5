#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "advrex/attacks.hpp"
#include "advrex/diffnet.hpp"

namespace advrex {

struct DomainSet {
  std::string name;  // e.g. "seen", "unseen-by-all", "all"
  std::vector<Domain> domains;
  int n_restarts = 1;
};

struct EvalReport {
  int checkpoint_epoch = 0;
  std::map<std::string, double> per_domain_accuracy;
  std::map<std::string, double> per_domain_mean_loss;
  std::map<std::string, double> ensemble_accuracy;  // keyed by set name
  int n_samples = 0;
  std::uint64_t seed = 0;
};

// Fraction of samples predicted correctly under the restart-aggregated
// attack. Clean domains ignore restarts. `workers` shards samples; results
// are identical for any worker count.
double accuracy(const NetworkParams& params, const Batch& dataset,
                const Domain& domain, int n_restarts, std::uint64_t seed,
                int workers = 1);

// Worst-case ensemble accuracy: a sample counts as correct iff every
// domain's restart-aggregated attack fails to cause misclassification.
double ensemble_accuracy(const NetworkParams& params, const Batch& dataset,
                         const DomainSet& set, std::uint64_t seed,
                         int workers = 1);

// Computes every per-domain success mask once and reuses the masks for all
// ensembles, so adding a domain set costs nothing beyond its members.
EvalReport evaluate_report(const NetworkParams& params, const Batch& dataset,
                           std::span<const DomainSet> domain_sets, int epoch,
                           std::uint64_t seed, int workers = 1);

// Epoch with the highest "seen" ensemble accuracy; earliest epoch on ties.
int select_checkpoint(std::span<const EvalReport> history);

}  // namespace advrex
