#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace maxsurv {

// Units are fixed across the library: power in kW, energy in kWh, time in hours.
using Hours = double;
using Kilowatts = double;
using KilowattHours = double;

inline constexpr Hours kDefaultGroupTolerance = 1e-9;
inline constexpr Hours kDefaultDepletionSnap = 1e-12;

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Physical description of one discharge-only resource.
///
/// `extractable_energy` is what can actually be delivered to the grid; when the
/// device is built from stored energy it is `efficiency * stored_energy`.
struct Device {
  std::size_t id = 0;  // 1-based, as used in config files and reports
  Kilowatts max_power = 0.0;
  KilowattHours extractable_energy = 0.0;
  double efficiency = 1.0;
  std::optional<KilowattHours> stored_energy;

  static Device from_energy(std::size_t id, Kilowatts max_power, KilowattHours energy);
  static Device from_stored(std::size_t id, Kilowatts max_power, KilowattHours stored,
                            double efficiency);
  static Device from_time_to_go(std::size_t id, Kilowatts max_power, Hours ttg);
};

using Fleet = std::vector<Device>;

/// Throws InputError if any device breaks the physical invariants.
void validate(std::span<const Device> fleet);

Hours time_to_go(const Device& device);

/// Times-to-go of every device, the simulator's state vector.
class FleetState {
 public:
  FleetState() = default;
  explicit FleetState(std::vector<Hours> times_to_go);

  static FleetState from_fleet(std::span<const Device> fleet);

  std::size_t size() const { return x_.size(); }
  Hours operator[](std::size_t i) const { return x_[i]; }
  std::span<const Hours> values() const { return x_; }
  std::span<Hours> mutable_values() { return x_; }

  friend bool operator==(const FleetState&, const FleetState&) = default;

 private:
  std::vector<Hours> x_;
};

/// A run of devices sharing one time-to-go value. Members are a slice of
/// GroupedState::order.
struct Group {
  std::size_t begin = 0;
  std::size_t end = 0;
  Hours ttg = 0.0;  // mean of the members
  Kilowatts aggregate_power = 0.0;

  std::size_t size() const { return end - begin; }
};

/// Devices partitioned into groups of (numerically) equal time-to-go, sorted by
/// strictly descending value. Empty devices, if any, form the last group and are
/// never merged with non-empty ones.
struct GroupedState {
  std::vector<std::size_t> order;  // 0-based device indices, group by group
  std::vector<Group> groups;

  std::size_t group_count() const { return groups.size(); }
  std::span<const std::size_t> members(std::size_t g) const {
    return std::span<const std::size_t>(order).subspan(groups[g].begin, groups[g].size());
  }
  std::size_t device_count() const { return order.size(); }
};

GroupedState group_state(const FleetState& state, std::span<const Device> fleet,
                         Hours tolerance = kDefaultGroupTolerance);

/// Regroups reusing `grouped.order` as a starting permutation. When the previous
/// order is still descending (within tolerance) this is linear; otherwise it
/// falls back to a full sort.
void regroup(const FleetState& state, std::span<const Device> fleet, Hours tolerance,
             GroupedState& grouped);

Kilowatts max_available_power(const FleetState& state, std::span<const Device> fleet);

/// 0-based indices of non-empty devices, ascending.
std::vector<std::size_t> support(const FleetState& state);

std::vector<Kilowatts> max_powers(std::span<const Device> fleet);

}  // namespace maxsurv
