#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "maxsurv/fleet.hpp"

namespace maxsurv {

/// Per-device powers for one instant.
struct DispatchDecision {
  std::vector<Kilowatts> powers;
  Kilowatts delivered = 0.0;
  Kilowatts shortfall = 0.0;
};

enum class PolicyKind {
  Optimal,             // fill groups in descending time-to-go order
  LowestPowerFirst,    // fill devices in ascending max-power order
  ProportionOfPower,   // every available device at the same share of its max power
};

std::string_view policy_name(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);
inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::Optimal, PolicyKind::LowestPowerFirst,
                                              PolicyKind::ProportionOfPower};

/// Greedy cascade over the groups: every group above the marginal one runs at
/// full power, the marginal group runs all its members at the common fraction
///   (request - power of the groups above) / (power of the marginal group),
/// and everything below idles. The empty group never runs; any request above
/// the available power shows up as shortfall.
DispatchDecision op_dispatch(const GroupedState& grouped, std::span<const Device> fleet,
                             Kilowatts request);

/// Lowest-power-first. `order` must list device indices by ascending
/// (max_power, id), see lpf_order().
DispatchDecision lpf_dispatch(const FleetState& state, std::span<const Device> fleet,
                              Kilowatts request, std::span<const std::size_t> order);
DispatchDecision lpf_dispatch(const FleetState& state, std::span<const Device> fleet,
                              Kilowatts request);
std::vector<std::size_t> lpf_order(std::span<const Device> fleet);

DispatchDecision pop_dispatch(const FleetState& state, std::span<const Device> fleet,
                              Kilowatts request);

DispatchDecision dispatch(PolicyKind kind, const FleetState& state, std::span<const Device> fleet,
                          Kilowatts request, Hours group_tolerance = kDefaultGroupTolerance);

/// Fills delivered and shortfall from powers.
void finalize(DispatchDecision& decision, Kilowatts request);

}  // namespace maxsurv
