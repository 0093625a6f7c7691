// pairrank CLI: sample, judge, fit, decide, evaluate, scaling, pipeline.
// Exit codes: 0 success (invalid judgments only warn), 1 validation error,
// 2 transport failure, 3 internal error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pairrank/experiment.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget;
  std::optional<std::string> output_dir;
  bool area_control = false;
  std::optional<std::string> judge;
};

void add_common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("--seed", o.seed, "override master_seed");
  cmd->add_option("--budget", o.budget, "override comparison budget M");
  cmd->add_option("--output-dir", o.output_dir, "override output directory");
  cmd->add_flag("--area-control", o.area_control,
                "constrain per-area accepted counts to the human histogram");
  cmd->add_option("--judge", o.judge, "override judge kind")
      ->check(CLI::IsMember({"synthetic", "rating", "endpoint"}));
}

pairrank::ExperimentConfig load_with_overrides(const Overrides& o) {
  pairrank::ExperimentConfig config = pairrank::load_config(o.config_path);
  if (o.seed) config.master_seed = *o.seed;
  if (o.budget) config.budget = *o.budget;
  if (o.output_dir) config.output_dir = *o.output_dir;
  if (o.area_control) config.area_control = true;
  if (o.judge) {
    if (*o.judge == "synthetic") {
      config.judge.kind = pairrank::JudgeKind::synthetic;
    } else if (*o.judge == "rating") {
      config.judge.kind = pairrank::JudgeKind::rating;
    } else {
      config.judge.kind = pairrank::JudgeKind::endpoint;
    }
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pairwise paper ranking: schedule comparisons, aggregate them "
               "into Bradley-Terry scores, derive tier decisions, and "
               "evaluate them"};
  app.require_subcommand(1);

  Overrides o;
  CLI::App* sample = app.add_subcommand("sample", "draw pair assignments");
  CLI::App* judge = app.add_subcommand("judge", "judge sampled assignments");
  CLI::App* fit = app.add_subcommand("fit", "fit Bradley-Terry scores");
  CLI::App* decide = app.add_subcommand("decide", "assign decision tiers");
  CLI::App* evaluate = app.add_subcommand("evaluate", "compute the report");
  CLI::App* scaling =
      app.add_subcommand("scaling", "run the budget-ladder experiment");
  CLI::App* pipeline =
      app.add_subcommand("pipeline", "run sample through evaluate");
  for (CLI::App* cmd :
       {sample, judge, fit, decide, evaluate, scaling, pipeline}) {
    add_common_options(cmd, o);
  }

  CLI11_PARSE(app, argc, argv);

  const pairrank::Diagnostics diag = [](const std::string& msg) {
    std::cerr << msg << '\n';
  };

  try {
    const pairrank::ExperimentConfig config = load_with_overrides(o);
    if (sample->parsed()) {
      pairrank::run_sample(config, diag);
    } else if (judge->parsed()) {
      pairrank::run_judge(config, diag);
    } else if (fit->parsed()) {
      pairrank::run_fit(config, diag);
    } else if (decide->parsed()) {
      pairrank::run_decide(config, diag);
    } else if (evaluate->parsed()) {
      pairrank::run_evaluate(config, diag);
    } else if (scaling->parsed()) {
      pairrank::run_scaling(config, diag);
    } else if (pipeline->parsed()) {
      pairrank::run_pipeline(config, diag);
    }
    return 0;
  } catch (const pairrank::TransportError& e) {
    std::cerr << "transport error: " << e.what() << '\n';
    return 2;
  } catch (const pairrank::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
