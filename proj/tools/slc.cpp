// slc: compile, run and gradient-check SL scripts.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sl/commands.hpp"
#include "sl/externals.hpp"
#include "sl/runtime.hpp"

int main(int argc, char** argv) {
  sl::CliConfig cfg;
  try {
    cfg.seed = sl::seed_from_env(cfg.seed);
    cfg.h = sl::smoothing_from_env().h;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sl::kExitRuntimeError;
  }

  CLI::App app{"SL adjoint compiler"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  std::string x_text;
  std::vector<std::string> sets;

  auto common = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input, "SL script")->required()->check(CLI::ExistingFile);
    sub->add_flag("--no-pragmas", cfg.no_pragmas, "Ignore all #pragma lines");
  };
  auto execution = [&](CLI::App* sub) {
    sub->add_option("--entry", cfg.entry, "Primal entry subprogram (default: last)");
    sub->add_option("--x", x_text, "Comma-separated input vector");
    sub->add_option("--M", cfg.M, "Passive size parameter")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "PRNG seed (env SL_SEED)");
    sub->add_option("--h", cfg.h, "d_gt0 smoothing half-width (env SL_SMOOTH_H)")->check(CLI::PositiveNumber);
    sub->add_option("--out-len", cfg.out_len, "Length of the output vector")->check(CLI::PositiveNumber);
    sub->add_option("--set", sets, "Passive parameter value NAME=VALUE");
    sub->add_flag("--strict-kinks", cfg.strict_kinks, "Fail on d_gt0 evaluations within h of the kink");
  };

  auto* compile = app.add_subcommand("compile", "Write primal and adjoint target text");
  common(compile);
  compile->add_option("-o", cfg.output_dir, "Output directory");

  auto* run = app.add_subcommand("run", "Execute the primal (or adjoint) entry");
  common(run);
  execution(run);
  run->add_flag("--adjoint", cfg.adjoint, "Print a_x for a_y = e_1");

  auto* grad = app.add_subcommand("gradcheck", "Compare adjoint with central differences");
  common(grad);
  execution(grad);
  grad->add_option("--eps", cfg.eps, "Relative finite-difference step")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
    if (!x_text.empty()) {
      cfg.x.clear();
      for (const auto& item : CLI::detail::split(x_text, ',')) cfg.x.push_back(std::stod(item));
    }
    for (const auto& s : sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected NAME=VALUE");
      cfg.passive[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : sl::kExitRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: invalid --x value (" << e.what() << ")\n";
    return sl::kExitRuntimeError;
  }

  if (compile->parsed()) cfg.command = sl::Command::Compile;
  else if (grad->parsed()) cfg.command = sl::Command::Gradcheck;
  else cfg.command = sl::Command::Run;
  return sl::run_command(cfg, std::cout, std::cerr);
}
