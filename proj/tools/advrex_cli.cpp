#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "advrex/runner.hpp"

namespace {

std::vector<double> parse_beta_list(const std::string& text) {
  std::vector<double> betas;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string token = text.substr(pos, comma - pos);
    if (!token.empty()) betas.push_back(std::stod(token));
    pos = comma + 1;
  }
  return betas;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-attack adversarial training lab (Avg/Max/MSD/REx)"};
  app.require_subcommand(1);

  std::string config_path, resume_path, ckpt_path, out_path, domain_name, beta_list;
  bool force = false;

  CLI::App* train = app.add_subcommand("train", "Train a defense from a config");
  train->add_option("--config", config_path, "Config file")->required();
  train->add_option("--resume", resume_path, "Checkpoint to resume from");
  train->add_flag("--force", force, "Resume even on config hash mismatch");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--ckpt", ckpt_path, "Checkpoint file")->required();
  eval->add_option("--config", config_path, "Config file")->required();
  eval->add_option("--out", out_path, "Output CSV")->required();

  CLI::App* attack = app.add_subcommand("attack", "Run one domain, dump outputs");
  attack->add_option("--ckpt", ckpt_path, "Checkpoint file")->required();
  attack->add_option("--config", config_path, "Config file")->required();
  attack->add_option("--domain", domain_name, "Domain name from the config")->required();
  attack->add_option("--out", out_path, "Output directory")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "Train across a beta grid");
  sweep->add_option("--config", config_path, "Config file")->required();
  sweep->add_option("--beta", beta_list, "Comma-separated beta values")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      advrex::ExperimentConfig config = advrex::load_config_file(config_path);
      advrex::TrainOutcome outcome = advrex::run_train(config, resume_path, force);
      std::cout << "selected epoch " << outcome.selected_epoch << "\n";
      for (const auto& [name, acc] : outcome.test_report.ensemble_accuracy)
        std::cout << "test ensemble " << name << ": " << acc << "\n";
      std::cout << "log: " << outcome.csv_path << "\n";
    } else if (eval->parsed()) {
      advrex::ExperimentConfig config = advrex::load_config_file(config_path);
      advrex::EvalReport report = advrex::run_eval(config, ckpt_path, out_path);
      for (const auto& [name, acc] : report.ensemble_accuracy)
        std::cout << "ensemble " << name << ": " << acc << "\n";
    } else if (attack->parsed()) {
      advrex::ExperimentConfig config = advrex::load_config_file(config_path);
      advrex::run_attack(config, ckpt_path, domain_name, out_path);
      std::cout << "wrote " << out_path << "/adv_inputs.idx and outcomes.csv\n";
    } else if (sweep->parsed()) {
      advrex::ExperimentConfig config = advrex::load_config_file(config_path);
      advrex::SweepOutcome outcome = advrex::run_sweep(config, parse_beta_list(beta_list));
      std::cout << "summary: " << outcome.summary_csv_path << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
