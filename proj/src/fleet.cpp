#include "maxsurv/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "maxsurv/simd/kernels.hpp"

namespace maxsurv {

Device Device::from_energy(std::size_t id, Kilowatts max_power, KilowattHours energy) {
  Device d;
  d.id = id;
  d.max_power = max_power;
  d.extractable_energy = energy;
  return d;
}

Device Device::from_stored(std::size_t id, Kilowatts max_power, KilowattHours stored,
                           double efficiency) {
  Device d;
  d.id = id;
  d.max_power = max_power;
  d.efficiency = efficiency;
  d.stored_energy = stored;
  d.extractable_energy = efficiency * stored;
  return d;
}

Device Device::from_time_to_go(std::size_t id, Kilowatts max_power, Hours ttg) {
  return from_energy(id, max_power, ttg * max_power);
}

void validate(std::span<const Device> fleet) {
  for (const Device& d : fleet) {
    const std::string who = "device " + std::to_string(d.id);
    if (!(d.max_power > 0.0) || !std::isfinite(d.max_power)) {
      throw InputError(who + ": max_power must be positive and finite");
    }
    if (!(d.extractable_energy >= 0.0) || !std::isfinite(d.extractable_energy)) {
      throw InputError(who + ": extractable energy must be nonnegative and finite");
    }
    if (!(d.efficiency > 0.0 && d.efficiency <= 1.0)) {
      throw InputError(who + ": efficiency must lie in (0, 1]");
    }
  }
}

Hours time_to_go(const Device& device) { return device.extractable_energy / device.max_power; }

FleetState::FleetState(std::vector<Hours> times_to_go) : x_(std::move(times_to_go)) {
  for (Hours v : x_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InputError("times-to-go must be finite and nonnegative");
    }
  }
}

FleetState FleetState::from_fleet(std::span<const Device> fleet) {
  std::vector<Hours> x;
  x.reserve(fleet.size());
  for (const Device& d : fleet) x.push_back(time_to_go(d));
  return FleetState(std::move(x));
}

namespace {

void check_lengths(const FleetState& state, std::span<const Device> fleet) {
  if (state.size() != fleet.size()) {
    throw InputError("state has " + std::to_string(state.size()) + " entries but fleet has " +
                     std::to_string(fleet.size()) + " devices");
  }
}

// Chains an already descending order into groups. Positive and empty devices
// are never chained together.
void build_groups(const FleetState& state, std::span<const Device> fleet, Hours tolerance,
                  GroupedState& g) {
  g.groups.clear();
  const auto& order = g.order;
  std::size_t begin = 0;
  while (begin < order.size()) {
    std::size_t end = begin + 1;
    double sum_x = state[order[begin]];
    double power = fleet[order[begin]].max_power;
    const bool empty = state[order[begin]] == 0.0;
    while (end < order.size()) {
      const Hours prev = state[order[end - 1]];
      const Hours cur = state[order[end]];
      if ((cur == 0.0) != empty) break;
      if (prev - cur > tolerance) break;
      sum_x += cur;
      power += fleet[order[end]].max_power;
      ++end;
    }
    g.groups.push_back(Group{begin, end, sum_x / static_cast<double>(end - begin), power});
    begin = end;
  }
}

void sort_descending(const FleetState& state, std::vector<std::size_t>& order) {
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (state[a] != state[b]) return state[a] > state[b];
    return a < b;
  });
}

}  // namespace

GroupedState group_state(const FleetState& state, std::span<const Device> fleet, Hours tolerance) {
  check_lengths(state, fleet);
  if (!(tolerance >= 0.0)) throw InputError("grouping tolerance must be nonnegative");
  GroupedState g;
  g.order.resize(state.size());
  std::iota(g.order.begin(), g.order.end(), std::size_t{0});
  sort_descending(state, g.order);
  build_groups(state, fleet, tolerance, g);
  return g;
}

void regroup(const FleetState& state, std::span<const Device> fleet, Hours tolerance,
             GroupedState& grouped) {
  check_lengths(state, fleet);
  auto& order = grouped.order;
  bool still_sorted = order.size() == state.size();
  for (std::size_t k = 1; still_sorted && k < order.size(); ++k) {
    if (state[order[k]] > state[order[k - 1]]) still_sorted = false;
  }
  if (!still_sorted) {
    order.resize(state.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    sort_descending(state, order);
  }
  build_groups(state, fleet, tolerance, grouped);
}

std::vector<Kilowatts> max_powers(std::span<const Device> fleet) {
  std::vector<Kilowatts> p;
  p.reserve(fleet.size());
  for (const Device& d : fleet) p.push_back(d.max_power);
  return p;
}

Kilowatts max_available_power(const FleetState& state, std::span<const Device> fleet) {
  check_lengths(state, fleet);
  const std::vector<Kilowatts> p = max_powers(fleet);
  return simd::masked_sum(state.values(), p);
}

std::vector<std::size_t> support(const FleetState& state) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state[i] > 0.0) out.push_back(i);
  }
  return out;
}

}  // namespace maxsurv
