#pragma once

#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

#include "maxsurv/fleet.hpp"

namespace maxsurv {

/// Piecewise-constant, right-continuous power request. Segment k covers
/// [breakpoints[k], breakpoints[k+1]) with the last one ending at `horizon`;
/// the request is zero from the horizon onwards.
class ReferenceSignal {
 public:
  ReferenceSignal() = default;
  ReferenceSignal(std::vector<Hours> breakpoints, std::vector<Kilowatts> values, Hours horizon);

  /// Single segment [0, horizon) at `value`.
  static ReferenceSignal constant(Kilowatts value, Hours horizon);

  std::size_t segment_count() const { return values_.size(); }
  std::span<const Hours> breakpoints() const { return breakpoints_; }
  std::span<const Kilowatts> values() const { return values_; }
  Hours horizon() const { return horizon_; }

  Hours segment_start(std::size_t k) const { return breakpoints_[k]; }
  Hours segment_end(std::size_t k) const {
    return k + 1 < breakpoints_.size() ? breakpoints_[k + 1] : horizon_;
  }

  /// Index of the segment active at t (t < horizon).
  std::size_t segment_at(Hours t) const;

  friend bool operator==(const ReferenceSignal&, const ReferenceSignal&) = default;

 private:
  std::vector<Hours> breakpoints_;
  std::vector<Kilowatts> values_;
  Hours horizon_ = 0.0;
};

Kilowatts value_at(const ReferenceSignal& signal, Hours t);

/// The signal on [0, t), zero afterwards.
ReferenceSignal truncate(const ReferenceSignal& signal, Hours t);

/// Integral of the request over [0, t).
KilowattHours requested_energy(const ReferenceSignal& signal, Hours t);

struct Range {
  double low = 0.0;
  double high = 0.0;
};

struct ScenarioSpec {
  std::size_t n = 1000;
  Range ttg{0.0, 10.0};
  Range power{0.0, 1.5};
  Kilowatts reference_mean = 200.0;
  Kilowatts reference_std = 80.0;
  Hours step = 1.0;
  Hours horizon = 24.0;
  std::uint64_t seed = 0;

  static ScenarioSpec high_variance(std::uint64_t seed);
  static ScenarioSpec low_variance(std::uint64_t seed);
};

void validate(const ScenarioSpec& spec);

struct Scenario {
  Fleet fleet;
  ReferenceSignal signal;
};

/// Draws a fleet and an hourly reference from one mt19937_64 stream seeded with
/// `spec.seed`, in this order: n times-to-go, n max powers, then one value per
/// reference step. Uniform and normal variates use the transforms documented in
/// reference.cpp so the output does not depend on the standard library vendor.
Scenario sample_scenario(const ScenarioSpec& spec);

/// CSV with header `t_start,t_end,power_kw`.
void write_signal_csv(std::ostream& out, const ReferenceSignal& signal);

}  // namespace maxsurv
