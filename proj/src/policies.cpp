#include "maxsurv/policies.hpp"

#include <algorithm>
#include <numeric>

#include "maxsurv/simd/kernels.hpp"

namespace maxsurv {

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Optimal:
      return "op";
    case PolicyKind::LowestPowerFirst:
      return "lpf";
    case PolicyKind::ProportionOfPower:
      return "pop";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  for (PolicyKind k : kAllPolicies) {
    if (policy_name(k) == name) return k;
  }
  return std::nullopt;
}

void finalize(DispatchDecision& decision, Kilowatts request) {
  decision.delivered = simd::sum(decision.powers);
  decision.shortfall = std::max(0.0, request - decision.delivered);
}

namespace {

void check_request(Kilowatts request) {
  if (!(request >= 0.0)) throw InputError("requested power must be nonnegative");
}

}  // namespace

DispatchDecision op_dispatch(const GroupedState& grouped, std::span<const Device> fleet,
                             Kilowatts request) {
  check_request(request);
  if (grouped.device_count() != fleet.size()) {
    throw InputError("grouped state does not match the fleet");
  }
  DispatchDecision d;
  d.powers.assign(fleet.size(), 0.0);
  Kilowatts above = 0.0;
  for (std::size_t g = 0; g < grouped.group_count(); ++g) {
    const Group& group = grouped.groups[g];
    if (group.ttg <= 0.0 || above >= request) break;
    double fraction = 1.0;
    if (above + group.aggregate_power > request) {
      fraction = std::clamp((request - above) / group.aggregate_power, 0.0, 1.0);
    }
    for (std::size_t i : grouped.members(g)) d.powers[i] = fraction * fleet[i].max_power;
    above += group.aggregate_power;
  }
  finalize(d, request);
  return d;
}

std::vector<std::size_t> lpf_order(std::span<const Device> fleet) {
  std::vector<std::size_t> order(fleet.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (fleet[a].max_power != fleet[b].max_power) return fleet[a].max_power < fleet[b].max_power;
    if (fleet[a].id != fleet[b].id) return fleet[a].id < fleet[b].id;
    return a < b;
  });
  return order;
}

DispatchDecision lpf_dispatch(const FleetState& state, std::span<const Device> fleet,
                              Kilowatts request, std::span<const std::size_t> order) {
  check_request(request);
  if (state.size() != fleet.size() || order.size() != fleet.size()) {
    throw InputError("state, fleet and order sizes differ");
  }
  DispatchDecision d;
  d.powers.assign(fleet.size(), 0.0);
  Kilowatts remaining = request;
  for (std::size_t i : order) {
    if (remaining <= 0.0) break;
    if (state[i] > 0.0) {
      const Kilowatts u = std::min(fleet[i].max_power, remaining);
      d.powers[i] = u;
      remaining -= u;
    }
  }
  finalize(d, request);
  return d;
}

DispatchDecision lpf_dispatch(const FleetState& state, std::span<const Device> fleet,
                              Kilowatts request) {
  return lpf_dispatch(state, fleet, request, lpf_order(fleet));
}

DispatchDecision pop_dispatch(const FleetState& state, std::span<const Device> fleet,
                              Kilowatts request) {
  check_request(request);
  const Kilowatts available = max_available_power(state, fleet);
  DispatchDecision d;
  d.powers.assign(fleet.size(), 0.0);
  if (available > 0.0) {
    const double share = std::min(1.0, request / available);
    for (std::size_t i = 0; i < fleet.size(); ++i) {
      if (state[i] > 0.0) d.powers[i] = share * fleet[i].max_power;
    }
  }
  finalize(d, request);
  return d;
}

DispatchDecision dispatch(PolicyKind kind, const FleetState& state, std::span<const Device> fleet,
                          Kilowatts request, Hours group_tolerance) {
  switch (kind) {
    case PolicyKind::Optimal:
      return op_dispatch(group_state(state, fleet, group_tolerance), fleet, request);
    case PolicyKind::LowestPowerFirst:
      return lpf_dispatch(state, fleet, request);
    case PolicyKind::ProportionOfPower:
      return pop_dispatch(state, fleet, request);
  }
  throw InputError("unknown policy");
}

}  // namespace maxsurv
