#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "advrex/defenses.hpp"
#include "advrex/evalharness.hpp"

namespace advrex {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DatasetSpec {
  std::string type;  // "mnist" | "synthetic"
  // mnist
  std::string images, labels, test_images, test_labels;
  std::size_t n_train = 0, n_val = 0, n_test = 0;
  // synthetic
  std::string kind;
  std::size_t n = 0;
  double noise = 0.0;
};

struct EvalSpec {
  int every = 5;             // epochs between validation evaluations
  int n_restarts = 1;        // restarts for validation evaluations
  int test_n_restarts = 10;  // restarts for the final test evaluation
  // Explicit named sets of domain names. "seen" and "all" are implicit.
  std::vector<std::pair<std::string, std::vector<std::string>>> sets;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "runs/out";
  int epochs = 1;
  int batch_size = 128;
  int workers = 1;
  DatasetSpec dataset;
  std::vector<std::size_t> layer_sizes;
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::vector<std::pair<int, double>> milestones;
  std::string defense_mode = "avg";
  std::vector<std::string> seen_domain_names;
  double beta = 10.0;
  std::optional<int> rex_activation_epoch;
  std::vector<std::string> rex_domain_names;
  std::map<std::string, Domain> domains;
  EvalSpec eval;
};

// Parses a config document; a "preset" key merges the named preset's values
// underneath the document's own keys. Throws ConfigError (all offending
// field paths collected) before any compute.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Canonical serialization; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

// FNV-1a over the canonical serialization, out_dir excluded.
std::uint64_t config_hash(const ExperimentConfig& config);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

// Known presets: "mnist-paper", "desk-small".
std::string preset_text(const std::string& name);

// Resolves domain names into a DefenseConfig.
DefenseConfig build_defense(const ExperimentConfig& config);

// "seen" (the REx-phase training domains for msd_rex, else the seen set),
// every explicit set, then "all" (union of the above).
std::vector<DomainSet> build_eval_sets(const ExperimentConfig& config,
                                       int n_restarts);

struct DatasetSplits {
  Batch train, val, test;
};
DatasetSplits load_dataset(const ExperimentConfig& config);

}  // namespace advrex
