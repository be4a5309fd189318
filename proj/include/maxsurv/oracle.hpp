#pragma once

// Independent feasibility check for piecewise-constant requests.
//
// Within one constant segment any admissible time-varying dispatch can be
// replaced by its time average without breaking the power boxes, so a request
// truncated at T is feasible iff the transportation network
//
//   source --E_i--> device i --pmax_i * len_k--> segment k --P_k * len_k--> sink
//
// carries a flow that saturates every segment. Nothing here shares code with
// the event-driven engine.

#include <vector>

#include "maxsurv/fleet.hpp"
#include "maxsurv/reference.hpp"

namespace maxsurv {

struct FlowInstance {
  std::vector<KilowattHours> supplies;                 // per device
  std::vector<KilowattHours> demands;                  // per segment
  std::vector<std::vector<KilowattHours>> capacities;  // [device][segment]
};

struct FlowResult {
  KilowattHours value = 0.0;
  std::vector<std::vector<KilowattHours>> flows;  // [device][segment]
};

FlowResult max_flow(const FlowInstance& instance);

struct SegmentWindow {
  Hours start = 0.0;
  Hours end = 0.0;
  Kilowatts power = 0.0;
};

/// The request on [0, T) cut into its constant pieces.
std::vector<SegmentWindow> windows_until(const ReferenceSignal& signal, Hours t);

FlowInstance build_flow_instance(std::span<const Device> fleet, const FleetState& initial,
                                 std::span<const SegmentWindow> windows);

struct FeasibilityReport {
  bool feasible = false;
  Hours horizon = 0.0;
  KilowattHours demand = 0.0;
  KilowattHours flow = 0.0;
  std::vector<SegmentWindow> windows;
  FlowResult certificate;
  std::vector<KilowattHours> unmet;  // per window, demand minus delivered
};

/// Relative slack allowed between the max flow and the total demand.
inline constexpr double kFlowSlack = 1e-12;

FeasibilityReport check_feasibility(std::span<const Device> fleet, const FleetState& initial,
                                    const ReferenceSignal& signal, Hours t);

bool feasible(std::span<const Device> fleet, const FleetState& initial,
              const ReferenceSignal& signal, Hours t);

/// Supremum of T with the truncated request feasible, found by bisection on
/// [0, horizon] to within `tolerance`. Returns the horizon if the whole signal
/// is feasible.
Hours oracle_time_to_failure(std::span<const Device> fleet, const FleetState& initial,
                             const ReferenceSignal& signal, Hours tolerance = 1e-9);

}  // namespace maxsurv
