// phe-bench: run bandit experiments, check the regret analysis numerically,
// and time the randomized policies.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "phe/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Perturbed-history exploration bandit experiments"};
  app.require_subcommand(1);

  phe::CommandOptions options;
  std::string config;
  std::string out = ".";
  std::size_t workers = 0;
  std::uint64_t seed = 0;

  auto add_flags = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--config", config, "YAML config file (built-in defaults when omitted)")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory")->capture_default_str();
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    if (with_seed) sub->add_option("--seed", seed, "Master seed, overrides the config");
  };

  CLI::App* run = app.add_subcommand("run", "Simulate every policy on generated problems");
  CLI::App* verify = app.add_subcommand("verify", "Exact checks of the regret-analysis inequalities");
  CLI::App* bench = app.add_subcommand("bench", "Per-round run time of randomized policies");
  add_flags(run, true);
  add_flags(verify, false);
  add_flags(bench, true);

  CLI11_PARSE(app, argc, argv);

  options.config = config;
  options.out_dir = out;
  for (CLI::App* sub : {run, verify, bench}) {
    if (!sub->parsed()) continue;
    if (sub->count("--workers")) options.workers = workers;
    if (sub != verify && sub->count("--seed")) options.seed = seed;
  }

  if (run->parsed()) return phe::cmd_run(options, std::cout, std::cerr);
  if (verify->parsed()) return phe::cmd_verify(options, std::cout, std::cerr);
  return phe::cmd_bench(options, std::cout, std::cerr);
}
