#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "maxsurv/policies.hpp"
#include "maxsurv/reference.hpp"

namespace maxsurv {

struct Tolerances {
  Hours group = kDefaultGroupTolerance;
  Hours depletion = kDefaultDepletionSnap;
  Hours bisect = 1e-9;
};

struct RandomFleet {
  std::size_t n = 1000;
  Range ttg{0.0, 10.0};
  Range power{0.0, 1.5};
};

struct RandomSignal {
  Kilowatts mean = 200.0;
  Kilowatts std = 80.0;
  Hours step = 1.0;
  Hours horizon = 24.0;
};

enum class SummaryFormat { Json, Csv };

/// Everything a CLI run needs. Exactly one fleet source and one signal source.
struct RunConfig {
  std::variant<Fleet, RandomFleet> fleet;
  std::variant<ReferenceSignal, RandomSignal> signal;
  std::vector<PolicyKind> policies{PolicyKind::Optimal};
  Tolerances tolerances;
  std::uint64_t seed = 0;
  std::size_t sweep = 1;  // number of consecutive seeds for compare
  std::size_t samples = 0;
  std::filesystem::path out_dir = "out";
  SummaryFormat format = SummaryFormat::Json;
  std::optional<Hours> feasible_horizon;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Inline config equivalent to a concrete scenario (what gen-scenario writes).
nlohmann::json scenario_to_json(const Scenario& scenario);

std::vector<PolicyKind> parse_policy_list(const std::string& csv);

/// Materialises the fleet and signal for one seed. Random parts share one
/// sample_scenario() draw, so the fleet does not depend on the signal settings.
Scenario instantiate(const RunConfig& config, std::uint64_t seed);

}  // namespace maxsurv
