#pragma once

// Exact simulation of the closed loop  dx_i/dt = -u_i / pmax_i  under a greedy
// dispatch rule and a piecewise-constant request.
//
// Between events the dispatch is constant, so every time-to-go is affine in t
// and the next event time has a closed form:
//   depletion     x_i / (u_i / pmax_i)
//   equalisation  (x_a - x_b) / (rate_a - rate_b) for adjacent groups a > b
//   segment end   the next breakpoint of the request
// The rule is re-evaluated after every event. No time stepping is involved.

#include <memory>
#include <optional>
#include <vector>

#include "maxsurv/fleet.hpp"
#include "maxsurv/policies.hpp"
#include "maxsurv/reference.hpp"

namespace maxsurv {

/// A feedback law u = k(x, request). The engine assumes the result depends on x
/// only through the support, unless grouping() is non-null, in which case it
/// may also change whenever two groups meet.
class DispatchRule {
 public:
  virtual ~DispatchRule() = default;
  virtual DispatchDecision decide(const FleetState& state, Kilowatts request) = 0;
  /// Grouping behind the most recent decide() call.
  virtual const GroupedState* grouping() const { return nullptr; }
};

std::unique_ptr<DispatchRule> make_rule(PolicyKind kind, std::span<const Device> fleet,
                                        Hours group_tolerance = kDefaultGroupTolerance);

enum class EventKind { Depletion, Equalisation, SegmentChange, Failure };

std::string_view event_name(EventKind kind);

struct Event {
  Hours time = 0.0;
  EventKind kind = EventKind::Depletion;
  std::vector<std::size_t> devices;  // emptied or merged devices, 0-based, ascending
  Kilowatts request = 0.0;           // SegmentChange and Failure
  Kilowatts available = 0.0;         // Failure
};

/// State at `time` and the dispatch held from `time` until the next sample.
struct Sample {
  Hours time = 0.0;
  FleetState state;
  DispatchDecision dispatch;
  bool at_event = true;  // false for the extra evenly spaced plotting samples
};

struct SimulationOptions {
  Hours group_tolerance = kDefaultGroupTolerance;
  Hours depletion_snap = kDefaultDepletionSnap;
  // Request above available power by less than this (relative) is not a failure.
  double power_slack = 1e-10;
  // Extra samples at horizon * j / samples, j = 0..samples.
  std::size_t samples = 0;
  bool record_states = true;
};

struct SimulationTrace {
  FleetState initial_state;
  Hours horizon = 0.0;
  std::vector<Event> events;
  std::vector<Sample> samples;
  std::optional<Hours> failure_time;  // empty when the horizon was survived
  Hours end_time = 0.0;
  KilowattHours delivered_energy = 0.0;
  FleetState final_state;

  bool survived() const { return !failure_time.has_value(); }
  std::size_t count(EventKind kind) const;
};

struct AdvanceResult {
  FleetState state;
  Hours elapsed = 0.0;
  std::vector<Event> events;  // stamped with time = elapsed
  DispatchDecision dispatch;
};

/// Holds the policy's dispatch for `request` constant and integrates until the
/// first depletion, equalisation (optimal policy only) or the end of `budget`.
/// Throws InputError when the request cannot be met or budget <= 0.
AdvanceResult advance(const FleetState& state, std::span<const Device> fleet, PolicyKind policy,
                      Kilowatts request, Hours budget,
                      const SimulationOptions& options = SimulationOptions{});

SimulationTrace simulate(std::span<const Device> fleet, const FleetState& initial,
                         const ReferenceSignal& signal, PolicyKind policy,
                         const SimulationOptions& options = SimulationOptions{});

SimulationTrace simulate(std::span<const Device> fleet, const FleetState& initial,
                         const ReferenceSignal& signal, DispatchRule& rule,
                         const SimulationOptions& options = SimulationOptions{});

/// Failure time, or the horizon when the run survives it.
Hours time_to_failure(std::span<const Device> fleet, const FleetState& initial,
                      const ReferenceSignal& signal, PolicyKind policy,
                      const SimulationOptions& options = SimulationOptions{});

struct PowerStep {
  Hours time = 0.0;
  Kilowatts available = 0.0;
};

/// Maximum available power as a step function: one entry at t = 0 and one per
/// depletion event.
std::vector<PowerStep> available_power_trajectory(const SimulationTrace& trace,
                                                  std::span<const Device> fleet);

/// Time-to-go vector at t, reconstructed from the recorded samples
/// (requires record_states). t is clamped to [0, end_time].
FleetState state_at(const SimulationTrace& trace, std::span<const Device> fleet, Hours t);

}  // namespace maxsurv
