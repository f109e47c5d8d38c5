#pragma once

#include <cstdint>
#include <string>

#include "advrex/defenses.hpp"

namespace advrex {

struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Single-file container: a text manifest (format version, shapes, epoch,
// seed, config hash, REx flag, named array table) followed by the raw
// little-endian 64-bit float payload in declared order. Round trips are
// bit exact.
struct Checkpoint {
  int format_version = 1;
  std::vector<std::size_t> layer_sizes;
  int epoch = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  bool rex_active = false;
  NetworkParams params;
  std::vector<Matrix> w_velocity;
  std::vector<std::vector<double>> b_velocity;
};

void save_checkpoint(const std::string& path, const TrainerState& state,
                     std::uint64_t config_hash);

Checkpoint load_checkpoint(const std::string& path);

// Rebuilds trainer state from a checkpoint; the caller supplies the pieces
// that live in the config (defense, optimizer schedule, batch size).
TrainerState resume_trainer(const Checkpoint& ckpt, OptimState opt,
                            DefenseConfig defense, int batch_size, int workers);

}  // namespace advrex
