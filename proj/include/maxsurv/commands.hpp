#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "maxsurv/config.hpp"
#include "maxsurv/engine.hpp"

namespace maxsurv {

/// Results of every selected policy on one seed's scenario.
struct SeedComparison {
  std::uint64_t seed = 0;
  std::vector<Hours> time_to_failure;  // one per config.policies entry
  std::vector<bool> survived;
  std::vector<KilowattHours> delivered;
  std::vector<std::vector<PowerStep>> available;
};

/// Runs config.sweep consecutive seeds starting at config.seed. Each seed's
/// scenario is drawn once and shared by all policies. Seeds are spread over
/// `workers` threads (0 = hardware concurrency); the result is ordered by seed.
std::vector<SeedComparison> run_comparison(const RunConfig& config, std::size_t workers = 0);

SimulationOptions simulation_options(const RunConfig& config);

// Subcommands. Each returns a process exit code; diagnostics go to `err`.
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_feasible(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_gen_scenario(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace maxsurv
