// modfix: check, solve, bounds and repro experiments from the command line.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "modfix/modfix.hpp"

namespace {

struct ExperimentArgs {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::string> backend;
};

void add_experiment_flags(CLI::App* cmd, ExperimentArgs& args, bool with_out) {
  cmd->add_option("--config", args.config, "experiment JSON file")->required()->check(CLI::ExistingFile);
  if (with_out) cmd->add_option("--out", args.out, "CSV output path");
  cmd->add_option("--backend", args.backend, "numeric backend (default: MODFIX_BACKEND, then the config)")
      ->check(CLI::IsMember({"exact", "float"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed points of graph contractions on modular spaces"};
  app.require_subcommand(1);

  ExperimentArgs check_args, solve_args, bounds_args;
  auto* check = app.add_subcommand("check", "sample the modular axioms and the contraction conditions");
  add_experiment_flags(check, check_args, false);
  auto* solve = app.add_subcommand("solve", "Picard iteration with a convergence certificate");
  add_experiment_flags(solve, solve_args, true);
  auto* bounds = app.add_subcommand("bounds", "tabulate a-priori bounds against actual gaps");
  add_experiment_flags(bounds, bounds_args, true);

  auto* repro = app.add_subcommand("repro", "replay the worked examples on the exact backend");
  std::string kannan_k = "64/81";
  repro->add_option("--kannan-k", kannan_k, "override k in the Kannan example")->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (repro->parsed()) {
      modfix::ReproOptions opts;
      opts.kannan_k = modfix::parse_rational(kannan_k);
      return modfix::run_repro(std::cout, opts);
    }
    auto run = [](const ExperimentArgs& args, auto&& fn) {
      const auto cfg = modfix::load_config(args.config);
      const auto backend = modfix::resolve_backend(args.backend, std::getenv("MODFIX_BACKEND"), cfg.space.backend);
      return fn(cfg, backend);
    };
    if (check->parsed())
      return run(check_args, [](const auto& cfg, auto backend) { return modfix::run_check(cfg, backend, std::cout); });
    if (solve->parsed())
      return run(solve_args,
                 [&](const auto& cfg, auto backend) { return modfix::run_solve(cfg, backend, solve_args.out, std::cout); });
    return run(bounds_args,
               [&](const auto& cfg, auto backend) { return modfix::run_bounds(cfg, backend, bounds_args.out, std::cout); });
  } catch (const modfix::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return modfix::kExitViolation;
  }
}
