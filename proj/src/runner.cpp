#include "advrex/runner.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>

#include "advrex/dataio.hpp"

namespace advrex {

namespace fs = std::filesystem;

std::string format_csv_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  return buffer;
}

CsvLogger::CsvLogger(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error(path + ": cannot open for writing");
  out_ << kCsvHeader << "\n";
}

void CsvLogger::row(int epoch, const std::string& split, const std::string& name,
                    const std::string& accuracy, const std::string& mean_loss,
                    int n_restarts, std::uint64_t seed) {
  out_ << epoch << ',' << split << ',' << name << ',' << accuracy << ','
       << mean_loss << ',' << n_restarts << ',' << seed << "\n";
  out_.flush();
}

void CsvLogger::report_rows(const EvalReport& report, const std::string& split,
                            int n_restarts) {
  for (const auto& [name, acc] : report.per_domain_accuracy) {
    const auto loss = report.per_domain_mean_loss.find(name);
    row(report.checkpoint_epoch, split, name, format_csv_double(acc),
        loss == report.per_domain_mean_loss.end() ? ""
                                                  : format_csv_double(loss->second),
        n_restarts, report.seed);
  }
  for (const auto& [name, acc] : report.ensemble_accuracy)
    row(report.checkpoint_epoch, split, "ensemble:" + name,
        format_csv_double(acc), "", n_restarts, report.seed);
}

int effective_workers(const ExperimentConfig& config) {
  if (const char* env = std::getenv("ADVREX_WORKERS")) {
    const int workers = std::atoi(env);
    if (workers >= 1) return workers;
  }
  return config.workers;
}

namespace {

std::string ckpt_path(const std::string& out_dir, int epoch) {
  return out_dir + "/ckpt_e" + std::to_string(epoch) + ".advx";
}

TrainerState fresh_trainer(const ExperimentConfig& config, int workers) {
  NetworkParams params = init_network(config.layer_sizes, config.seed);
  OptimState opt = make_optim_state(params, config.lr, config.momentum,
                                    config.weight_decay, config.milestones);
  return make_trainer(std::move(params), std::move(opt), build_defense(config),
                      config.seed, config.batch_size, workers);
}

}  // namespace

TrainOutcome run_train(const ExperimentConfig& config,
                       const std::string& resume_path, bool force_resume) {
  const int workers = effective_workers(config);
  const std::uint64_t hash = config_hash(config);
  fs::create_directories(config.out_dir);

  DatasetSplits data = load_dataset(config);

  TrainerState state = [&] {
    if (resume_path.empty()) return fresh_trainer(config, workers);
    Checkpoint ckpt = load_checkpoint(resume_path);
    if (ckpt.config_hash != hash && !force_resume)
      throw LoadError(resume_path +
                      ": config hash mismatch (use --force to resume anyway)");
    if (ckpt.layer_sizes != config.layer_sizes)
      throw LoadError(resume_path + ": layer_sizes do not match config");
    OptimState opt = make_optim_state(ckpt.params, config.lr, config.momentum,
                                      config.weight_decay, config.milestones);
    return resume_trainer(ckpt, std::move(opt), build_defense(config),
                          config.batch_size, workers);
  }();

  TrainOutcome outcome;
  outcome.csv_path = config.out_dir + "/train_log.csv";
  CsvLogger csv(outcome.csv_path);

  const std::vector<DomainSet> val_sets =
      build_eval_sets(config, config.eval.n_restarts);
  const bool rex = state.defense.is_rex_mode();
  const int activation =
      rex && state.defense.rex_activation_epoch ? *state.defense.rex_activation_epoch : -1;

  std::set<int> kept_epochs;
  while (state.epoch < config.epochs) {
    if (rex && !state.rex_active && state.epoch == activation) activate_rex(state);

    EpochStats stats = train_epoch(state, data.train);
    for (const auto& [name, loss] : stats.per_domain_mean_loss)
      csv.row(stats.epoch, "train", name, "", format_csv_double(loss), 0, config.seed);
    csv.row(stats.epoch, "train", "total", "", format_csv_double(stats.total_loss),
            0, config.seed);
    if (state.rex_active)
      csv.row(stats.epoch, "train", "variance", "",
              format_csv_double(stats.variance_term), 0, config.seed);

    const int done = state.epoch;  // epochs completed so far
    const bool eval_now = done % config.eval.every == 0 || done == config.epochs ||
                          (rex && done == activation);
    if (eval_now) {
      EvalReport report = evaluate_report(state.params, data.val, val_sets, done,
                                          config.seed, workers);
      csv.report_rows(report, "val", config.eval.n_restarts);
      outcome.val_history.push_back(std::move(report));
      save_checkpoint(ckpt_path(config.out_dir, done), state, hash);
      kept_epochs.insert(done);
    }
  }

  outcome.selected_epoch = select_checkpoint(outcome.val_history);
  outcome.selected_ckpt_path = ckpt_path(config.out_dir, outcome.selected_epoch);

  Checkpoint best = load_checkpoint(outcome.selected_ckpt_path);
  const std::vector<DomainSet> test_sets =
      build_eval_sets(config, config.eval.test_n_restarts);
  outcome.test_report =
      evaluate_report(best.params, data.test, test_sets, outcome.selected_epoch,
                      config.seed, workers);
  csv.report_rows(outcome.test_report, "test", config.eval.test_n_restarts);

  // Keep the selected and final checkpoints, drop the rest.
  for (int epoch : kept_epochs) {
    if (epoch == outcome.selected_epoch || epoch == state.epoch) continue;
    std::error_code ec;
    fs::remove(ckpt_path(config.out_dir, epoch), ec);
  }
  return outcome;
}

EvalReport run_eval(const ExperimentConfig& config, const std::string& ckpt_path,
                    const std::string& out_csv) {
  const int workers = effective_workers(config);
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  if (ckpt.layer_sizes != config.layer_sizes)
    throw LoadError(ckpt_path + ": layer_sizes do not match config");
  DatasetSplits data = load_dataset(config);
  const std::vector<DomainSet> sets =
      build_eval_sets(config, config.eval.test_n_restarts);
  EvalReport report = evaluate_report(ckpt.params, data.test, sets, ckpt.epoch,
                                      config.seed, workers);
  if (fs::path(out_csv).has_parent_path())
    fs::create_directories(fs::path(out_csv).parent_path());
  CsvLogger csv(out_csv);
  csv.report_rows(report, "test", config.eval.test_n_restarts);
  return report;
}

void run_attack(const ExperimentConfig& config, const std::string& ckpt_path,
                const std::string& domain_name, const std::string& out_dir) {
  const int workers = effective_workers(config);
  (void)workers;
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  if (ckpt.layer_sizes != config.layer_sizes)
    throw LoadError(ckpt_path + ": layer_sizes do not match config");
  const auto it = config.domains.find(domain_name);
  if (it == config.domains.end())
    throw ConfigError("attack: unknown domain '" + domain_name + "'");

  DatasetSplits data = load_dataset(config);
  AttackResult clean = clean_result(ckpt.params, data.test);
  AttackResult result =
      run_domain_with_restarts(ckpt.params, data.test, it->second,
                               config.eval.test_n_restarts, config.seed);

  fs::create_directories(out_dir);
  write_idx_matrix_f64(out_dir + "/adv_inputs.idx", result.adv_inputs);

  std::ofstream out(out_dir + "/outcomes.csv", std::ios::binary);
  if (!out) throw std::runtime_error(out_dir + "/outcomes.csv: cannot open");
  out << "index,label,clean_correct,adv_success,adv_loss\n";
  for (std::size_t i = 0; i < data.test.size(); ++i)
    out << i << ',' << data.test.labels[i] << ',' << (clean.success[i] ? 0 : 1)
        << ',' << (result.success[i] ? 1 : 0) << ','
        << format_csv_double(result.per_sample_loss[i]) << "\n";
}

SweepOutcome run_sweep(const ExperimentConfig& config,
                       const std::vector<double>& betas) {
  if (betas.empty()) throw ConfigError("sweep: need at least one beta value");
  SweepOutcome outcome;
  fs::create_directories(config.out_dir);
  outcome.summary_csv_path = config.out_dir + "/sweep_summary.csv";
  std::ofstream summary(outcome.summary_csv_path, std::ios::binary);
  if (!summary)
    throw std::runtime_error(outcome.summary_csv_path + ": cannot open");
  summary << "beta,selected_epoch,domain_or_ensemble,accuracy,n_restarts,seed\n";

  for (double beta : betas) {
    ExperimentConfig run_config = config;
    run_config.beta = beta;
    run_config.out_dir = config.out_dir + "/beta_" + format_csv_double(beta);
    TrainOutcome result = run_train(run_config);
    for (const auto& [name, acc] : result.test_report.per_domain_accuracy)
      summary << format_csv_double(beta) << ',' << result.selected_epoch << ','
              << name << ',' << format_csv_double(acc) << ','
              << config.eval.test_n_restarts << ',' << config.seed << "\n";
    for (const auto& [name, acc] : result.test_report.ensemble_accuracy)
      summary << format_csv_double(beta) << ',' << result.selected_epoch << ','
              << "ensemble:" << name << ',' << format_csv_double(acc) << ','
              << config.eval.test_n_restarts << ',' << config.seed << "\n";
    summary.flush();
    outcome.runs.emplace_back(beta, std::move(result));
  }
  return outcome;
}

}  // namespace advrex
