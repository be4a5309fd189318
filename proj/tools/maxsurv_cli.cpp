#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "maxsurv/commands.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<double> tol_group;
  std::optional<double> tol_bisect;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> sweep;
  std::optional<double> horizon;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Scenario seed");
  cmd->add_option("--policy", o.policy, "Policy or comma-separated list: op, lpf, pop");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--format", o.format, "Summary format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--tolerance-group", o.tol_group, "Grouping tolerance (h)");
  cmd->add_option("--tolerance-bisect", o.tol_bisect, "Oracle bisection tolerance (h)");
  cmd->add_option("--samples", o.samples, "Evenly spaced state samples over the horizon");
  cmd->add_option("--sweep", o.sweep, "Number of consecutive seeds (compare)");
  cmd->add_option("--horizon", o.horizon, "Truncation time for the feasibility check (h)");
}

maxsurv::RunConfig resolve(const Overrides& o) {
  maxsurv::RunConfig cfg = maxsurv::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.policy) cfg.policies = maxsurv::parse_policy_list(*o.policy);
  if (o.out) cfg.out_dir = *o.out;
  if (o.format) cfg.format = *o.format == "csv" ? maxsurv::SummaryFormat::Csv : maxsurv::SummaryFormat::Json;
  if (o.tol_group) cfg.tolerances.group = *o.tol_group;
  if (o.tol_bisect) cfg.tolerances.bisect = *o.tol_bisect;
  if (o.samples) cfg.samples = *o.samples;
  if (o.sweep) cfg.sweep = *o.sweep;
  if (o.horizon) cfg.feasible_horizon = *o.horizon;
  if (!(cfg.tolerances.group > 0.0 && cfg.tolerances.bisect > 0.0)) {
    throw maxsurv::ConfigError("tolerances must be strictly positive");
  }
  if (cfg.sweep < 1) throw maxsurv::ConfigError("--sweep must be at least 1");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispatch and survival analysis for fleets of energy-limited resources"};
  app.require_subcommand(1);

  Overrides o;
  auto* simulate = app.add_subcommand("simulate", "Simulate each selected policy and write traces");
  auto* compare = app.add_subcommand("compare", "Compare policies on shared scenarios over a seed sweep");
  auto* feasible = app.add_subcommand("feasible", "Max-flow feasibility check and time to failure");
  auto* gen = app.add_subcommand("gen-scenario", "Write the fleet and reference for one seed");
  for (auto* cmd : {simulate, compare, feasible, gen}) add_common(cmd, o);

  CLI11_PARSE(app, argc, argv);

  maxsurv::RunConfig cfg;
  try {
    cfg = resolve(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  if (simulate->parsed()) return maxsurv::cmd_simulate(cfg, std::cout, std::cerr);
  if (compare->parsed()) return maxsurv::cmd_compare(cfg, std::cout, std::cerr);
  if (feasible->parsed()) return maxsurv::cmd_feasible(cfg, std::cout, std::cerr);
  return maxsurv::cmd_gen_scenario(cfg, std::cout, std::cerr);
}
