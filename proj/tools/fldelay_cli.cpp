#include <iostream>

#include <CLI11.hpp>

#include "fldelay/commands.hpp"

using fldelay::RunManifest;

namespace {

void common(CLI::App* app, RunManifest& m) {
  app->add_option("--config", m.config_path, "JSON configuration file")->required();
  app->add_option("--out", m.out_dir, "output directory");
  app->add_option("--scheme", m.scheme, "sync or async")->check(CLI::IsMember({"sync", "async"}));
}

void sim_options(CLI::App* app, RunManifest& m) {
  app->add_option("--seed", m.seed, "random seed");
  app->add_option("--trials", m.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  app->add_option("--threads", m.threads, "worker threads (0: all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delay distributions of wireless federated learning rounds"};
  app.require_subcommand(1);
  RunManifest m;
  const char* targets = "user_uplink|system_uplink|sync_downlink|async_downlink|iteration|per_user|overall";

  auto* analyze = app.add_subcommand("analyze", "analytic pmf of a delay target");
  common(analyze, m);
  analyze->add_option("--target", m.target, targets);
  analyze->add_option("--iterations", m.iterations, "round count for the overall target");

  auto* compare = app.add_subcommand("compare", "analytic pmf against Monte Carlo, with a TV verdict");
  common(compare, m);
  sim_options(compare, m);
  compare->add_option("--target", m.target, "user_uplink|system_uplink|iteration|overall");
  compare->add_option("--tv-threshold", m.tv_threshold, "maximum total variation distance");
  compare->add_option("--iterations", m.iterations, "round count for the overall target");
  compare->add_option("--mc-input", m.mc_input, "samples file written by simulate");

  auto* asym = app.add_subcommand("asymptotics", "Gumbel fit, tail bounds over a tau sweep, stochastic order");
  common(asym, m);
  asym->add_option("--tau-min", m.tau_min, "first tau in seconds");
  asym->add_option("--tau-max", m.tau_max, "last tau in seconds");
  asym->add_option("--tau-steps", m.tau_steps, "number of tau values");
  asym->add_option("--n-dist", m.n_dist_path, "round-count distribution file");
  asym->add_option("--iterations", m.iterations, "round count in place of the iteration bound");

  auto* overall = app.add_subcommand("overall", "iteration bound and overall delay pmf");
  common(overall, m);
  overall->add_option("--n-dist", m.n_dist_path, "round-count distribution file");
  overall->add_option("--iterations", m.iterations, "fixed round count in place of the iteration bound");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo samples with a manifest");
  common(sim, m);
  sim_options(sim, m);
  sim->add_option("--target", m.target, "user_uplink|system_uplink|iteration|overall");
  sim->add_option("--iterations", m.iterations, "round count for the overall target");
  sim->add_option("--n-dist", m.n_dist_path, "random round counts for the overall target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fldelay::kExitValidation;
  }

  int (*command)(const RunManifest&, std::ostream&) = nullptr;
  if (*analyze) { m.command = "analyze"; command = fldelay::cmd_analyze; }
  if (*compare) { m.command = "compare"; command = fldelay::cmd_compare; }
  if (*asym) { m.command = "asymptotics"; command = fldelay::cmd_asymptotics; }
  if (*overall) { m.command = "overall"; command = fldelay::cmd_overall; }
  if (*sim) { m.command = "simulate"; command = fldelay::cmd_simulate; }
  return fldelay::run_guarded(command, m, std::cout, std::cerr);
}
