#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "stochcat/tools/commands.hpp"

namespace {

using stochcat::tools::RunConfig;

void common_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "Root seed of the sampling stream")->capture_default_str();
  sub->add_option("--out-dir", cfg.out_dir, "Directory for CSV/JSON outputs")->capture_default_str();
}

void statistical_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--samples", cfg.samples, "Draws per sample set (>= 1000)")->capture_default_str();
  sub->add_option("--ks-threshold", cfg.ks_threshold, "Pass threshold for KS statistics")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochcat: composition of stochastic processes, likelihoods and learners"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* demo = app.add_subcommand("compose-demo", "Para vs Copy self-composition of 5 - x + 10 Phi^-1(w)");
  common_flags(demo, cfg);
  statistical_flags(demo, cfg);
  demo->add_option("--x", cfg.x, "Input point (default 42)");

  auto* check = app.add_subcommand("functor-check", "Pushforward, independence and Gaussian closure suites");
  common_flags(check, cfg);
  statistical_flags(check, cfg);

  auto* train = app.add_subcommand("train", "Fit the expectation of a Gaussian chain by square-error descent");
  common_flags(train, cfg);
  train->add_option("--model", cfg.model, "Model JSON")->required()->check(CLI::ExistingFile);
  train->add_option("--data", cfg.data, "Dataset CSV (x0..,y0..)")->required()->check(CLI::ExistingFile);
  train->add_option("--epsilon", cfg.epsilon, "Learning rate")->capture_default_str();
  train->add_option("--iterations", cfg.iterations, "Passes over the data")->capture_default_str();

  auto* lik = app.add_subcommand("likelihood", "Tabulate and check the likelihood of a Gaussian chain");
  common_flags(lik, cfg);
  lik->add_option("--model", cfg.model, "Model JSON")->required()->check(CLI::ExistingFile);
  lik->add_option("--x", cfg.x, "Scalar input point (default 0)");

  auto* synth = app.add_subcommand("synth", "Write the synthetic regression dataset");
  synth->add_option("--seed", cfg.seed, "Root seed")->capture_default_str();
  synth->add_option("--data", cfg.data, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    stochcat::tools::CommandResult r;
    if (*demo) r = stochcat::tools::cmd_compose_demo(cfg);
    else if (*check) r = stochcat::tools::cmd_functor_check(cfg);
    else if (*train) r = stochcat::tools::cmd_train(cfg);
    else if (*lik) r = stochcat::tools::cmd_likelihood(cfg);
    else r = stochcat::tools::cmd_synth(cfg);
    std::cout << r.summary.dump(2) << '\n';
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
