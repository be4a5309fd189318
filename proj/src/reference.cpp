#include "maxsurv/reference.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>

namespace maxsurv {

ReferenceSignal::ReferenceSignal(std::vector<Hours> breakpoints, std::vector<Kilowatts> values,
                                 Hours horizon)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), horizon_(horizon) {
  if (breakpoints_.empty()) throw InputError("reference signal needs at least one segment");
  if (breakpoints_.size() != values_.size()) {
    throw InputError("reference signal needs one value per breakpoint");
  }
  if (breakpoints_.front() != 0.0) throw InputError("first breakpoint must be 0");
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k] > breakpoints_[k - 1])) {
      throw InputError("breakpoints must be strictly increasing");
    }
  }
  if (!(horizon_ > breakpoints_.back()) || !std::isfinite(horizon_)) {
    throw InputError("horizon must be finite and lie after the last breakpoint");
  }
  for (Kilowatts v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("reference values must be >= 0");
  }
}

ReferenceSignal ReferenceSignal::constant(Kilowatts value, Hours horizon) {
  return ReferenceSignal({0.0}, {value}, horizon);
}

std::size_t ReferenceSignal::segment_at(Hours t) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return static_cast<std::size_t>(std::distance(breakpoints_.begin(), it)) - 1;
}

Kilowatts value_at(const ReferenceSignal& signal, Hours t) {
  if (!(t >= 0.0)) throw InputError("value_at: time must be nonnegative");
  if (t >= signal.horizon()) return 0.0;
  return signal.values()[signal.segment_at(t)];
}

ReferenceSignal truncate(const ReferenceSignal& signal, Hours t) {
  if (!(t >= 0.0)) throw InputError("truncate: time must be nonnegative");
  if (t >= signal.horizon()) return signal;
  if (t == 0.0) return ReferenceSignal({0.0}, {0.0}, signal.horizon());
  const std::size_t last = signal.segment_at(t);
  std::vector<Hours> bp(signal.breakpoints().begin(), signal.breakpoints().begin() + last + 1);
  std::vector<Kilowatts> vals(signal.values().begin(), signal.values().begin() + last + 1);
  // Keep the original horizon so both signals are defined on the same window.
  if (t > bp.back()) {
    bp.push_back(t);
    vals.push_back(0.0);
  } else {
    vals.back() = 0.0;
  }
  return ReferenceSignal(std::move(bp), std::move(vals), signal.horizon());
}

KilowattHours requested_energy(const ReferenceSignal& signal, Hours t) {
  KilowattHours total = 0.0;
  for (std::size_t k = 0; k < signal.segment_count(); ++k) {
    const Hours a = signal.segment_start(k);
    const Hours b = std::min(signal.segment_end(k), t);
    if (b <= a) break;
    total += signal.values()[k] * (b - a);
  }
  return total;
}

ScenarioSpec ScenarioSpec::high_variance(std::uint64_t seed) {
  ScenarioSpec s;
  s.reference_std = 80.0;
  s.seed = seed;
  return s;
}

ScenarioSpec ScenarioSpec::low_variance(std::uint64_t seed) {
  ScenarioSpec s;
  s.reference_std = 20.0;
  s.seed = seed;
  return s;
}

void validate(const ScenarioSpec& spec) {
  if (spec.n < 1) throw InputError("scenario needs at least one device");
  if (!(spec.ttg.low >= 0.0 && spec.ttg.low <= spec.ttg.high)) {
    throw InputError("time-to-go range must satisfy 0 <= low <= high");
  }
  if (!(spec.power.low >= 0.0 && spec.power.low <= spec.power.high && spec.power.high > 0.0)) {
    throw InputError("max-power range must satisfy 0 <= low <= high, high > 0");
  }
  if (!(spec.reference_std >= 0.0)) throw InputError("reference std must be nonnegative");
  if (!(spec.step > 0.0)) throw InputError("reference step must be positive");
  if (!(spec.horizon > 0.0)) throw InputError("horizon must be positive");
  const double steps = spec.horizon / spec.step;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
    throw InputError("horizon must be a whole multiple of the reference step");
  }
}

namespace {

// 53 random mantissa bits: a double in [0, 1).
double unit_closed_open(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller from two uniforms, keeping only the cosine branch; exactly two
// engine draws per variate.
double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - unit_closed_open(rng);  // (0, 1]
  const double u2 = unit_closed_open(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

Scenario sample_scenario(const ScenarioSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);

  std::vector<Hours> ttg(spec.n);
  for (Hours& v : ttg) v = spec.ttg.low + (spec.ttg.high - spec.ttg.low) * unit_closed_open(rng);

  // Max power is drawn on (low, high] so that a zero lower bound never yields a
  // zero-power device.
  std::vector<Kilowatts> power(spec.n);
  for (Kilowatts& v : power) {
    v = spec.power.low + (spec.power.high - spec.power.low) * (1.0 - unit_closed_open(rng));
  }

  Scenario out;
  out.fleet.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    out.fleet.push_back(Device::from_time_to_go(i + 1, power[i], ttg[i]));
  }

  const auto steps = static_cast<std::size_t>(std::llround(spec.horizon / spec.step));
  std::vector<Hours> bp(steps);
  std::vector<Kilowatts> vals(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    bp[k] = static_cast<double>(k) * spec.step;
    vals[k] = std::max(0.0, spec.reference_mean + spec.reference_std * standard_normal(rng));
  }
  out.signal = ReferenceSignal(std::move(bp), std::move(vals), spec.horizon);
  return out;
}

void write_signal_csv(std::ostream& out, const ReferenceSignal& signal) {
  const auto old_precision = out.precision(17);
  out << "t_start,t_end,power_kw\n";
  for (std::size_t k = 0; k < signal.segment_count(); ++k) {
    out << signal.segment_start(k) << ',' << signal.segment_end(k) << ',' << signal.values()[k]
        << '\n';
  }
  out.precision(old_precision);
}

}  // namespace maxsurv
