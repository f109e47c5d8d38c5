#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "advrex/checkpoint.hpp"
#include "advrex/config.hpp"
#include "advrex/evalharness.hpp"

namespace advrex {

// CSV schema v1. One row per (epoch, domain-or-ensemble); accuracy is empty
// on train rows, mean_loss is empty on ensemble rows.
inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kCsvHeader =
    "epoch,split,domain_or_ensemble,accuracy,mean_loss,n_restarts,seed";

std::string format_csv_double(double value);

class CsvLogger {
 public:
  explicit CsvLogger(const std::string& path);
  void row(int epoch, const std::string& split, const std::string& name,
           const std::string& accuracy, const std::string& mean_loss,
           int n_restarts, std::uint64_t seed);
  void report_rows(const EvalReport& report, const std::string& split,
                   int n_restarts);

 private:
  std::ofstream out_;
};

// ADVREX_WORKERS overrides the config's worker count.
int effective_workers(const ExperimentConfig& config);

struct TrainOutcome {
  int selected_epoch = 0;
  EvalReport test_report;
  std::vector<EvalReport> val_history;
  std::string csv_path;
  std::string selected_ckpt_path;
};

// Runs the training protocol: seeded epochs with fresh attacks per
// minibatch, REx activation at the configured epoch, periodic validation
// evaluation + checkpointing, peak-seen-ensemble checkpoint selection and a
// final test evaluation. Everything lands under config.out_dir.
TrainOutcome run_train(const ExperimentConfig& config,
                       const std::string& resume_path = "",
                       bool force_resume = false);

// Evaluates one checkpoint over the configured domain sets on the test
// split and writes the report CSV to out_csv.
EvalReport run_eval(const ExperimentConfig& config, const std::string& ckpt_path,
                    const std::string& out_csv);

// Runs one domain (with restarts) against the test split; writes the
// adversarial inputs (double IDX) and per-sample outcomes CSV into out_dir.
void run_attack(const ExperimentConfig& config, const std::string& ckpt_path,
                const std::string& domain_name, const std::string& out_dir);

struct SweepOutcome {
  std::vector<std::pair<double, TrainOutcome>> runs;
  std::string summary_csv_path;
};

// Trains once per beta value (same seed), aggregating the selected test
// reports into <out_dir>/sweep_summary.csv.
SweepOutcome run_sweep(const ExperimentConfig& config,
                       const std::vector<double>& betas);

}  // namespace advrex
