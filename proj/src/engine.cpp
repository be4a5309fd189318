#include "maxsurv/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "maxsurv/simd/kernels.hpp"

namespace maxsurv {

std::string_view event_name(EventKind kind) {
  switch (kind) {
    case EventKind::Depletion:
      return "depletion";
    case EventKind::Equalisation:
      return "equalisation";
    case EventKind::SegmentChange:
      return "segment_change";
    case EventKind::Failure:
      return "failure";
  }
  return "?";
}

std::size_t SimulationTrace::count(EventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const Event& e) { return e.kind == kind; }));
}

namespace {

class OptimalRule final : public DispatchRule {
 public:
  OptimalRule(std::span<const Device> fleet, Hours tolerance)
      : fleet_(fleet), tolerance_(tolerance) {}

  DispatchDecision decide(const FleetState& state, Kilowatts request) override {
    regroup(state, fleet_, tolerance_, grouped_);
    return op_dispatch(grouped_, fleet_, request);
  }
  const GroupedState* grouping() const override { return &grouped_; }

 private:
  std::span<const Device> fleet_;
  Hours tolerance_;
  GroupedState grouped_;
};

class LowestPowerFirstRule final : public DispatchRule {
 public:
  explicit LowestPowerFirstRule(std::span<const Device> fleet)
      : fleet_(fleet), order_(lpf_order(fleet)) {}

  DispatchDecision decide(const FleetState& state, Kilowatts request) override {
    return lpf_dispatch(state, fleet_, request, order_);
  }

 private:
  std::span<const Device> fleet_;
  std::vector<std::size_t> order_;
};

class ProportionOfPowerRule final : public DispatchRule {
 public:
  explicit ProportionOfPowerRule(std::span<const Device> fleet) : fleet_(fleet) {}

  DispatchDecision decide(const FleetState& state, Kilowatts request) override {
    return pop_dispatch(state, fleet_, request);
  }

 private:
  std::span<const Device> fleet_;
};

// Relative window inside which two candidate event times count as simultaneous.
constexpr double kSimultaneous = 1e-12;

struct StepOutcome {
  Hours dt = 0.0;
  bool hit_budget = false;
  std::vector<std::size_t> depleted;
  std::vector<std::vector<std::size_t>> merged;
};

class Integrator {
 public:
  Integrator(std::span<const Device> fleet, const SimulationOptions& options)
      : fleet_(fleet), options_(options), pmax_(max_powers(fleet)), rates_(fleet.size()) {}

  std::span<const Kilowatts> pmax() const { return pmax_; }
  std::span<const double> rates() const { return rates_; }

  Kilowatts available(const FleetState& x) const { return simd::masked_sum(x.values(), pmax_); }

  StepOutcome step(FleetState& state, const DispatchDecision& d, const GroupedState* grouped,
                   Hours budget) {
    check_admissible(state, d);
    std::span<double> x = state.mutable_values();
    simd::divide(rates_, d.powers, pmax_);

    const Hours dt_deplete = simd::min_ratio(x, rates_);

    // Meeting times of adjacent non-empty groups; only pairs where the upper
    // group drains faster can meet.
    pair_times_.clear();
    Hours dt_equalise = std::numeric_limits<double>::infinity();
    if (grouped != nullptr) {
      for (std::size_t k = 0; k + 1 < grouped->group_count(); ++k) {
        const Group& a = grouped->groups[k];
        const Group& b = grouped->groups[k + 1];
        if (b.ttg <= 0.0) break;
        const double ra = rates_[grouped->order[a.begin]];
        const double rb = rates_[grouped->order[b.begin]];
        if (ra > rb) {
          const Hours t = (a.ttg - b.ttg) / (ra - rb);
          pair_times_.push_back({k, t});
          dt_equalise = std::min(dt_equalise, t);
        }
      }
    }

    StepOutcome out;
    out.dt = std::min({budget, dt_deplete, dt_equalise});
    out.hit_budget = out.dt == budget;
    const Hours dt = out.dt;
    const Hours window = dt * (1.0 + kSimultaneous);

    forced_.clear();
    if (dt_deplete <= window) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (rates_[i] > 0.0 && x[i] / rates_[i] <= window) forced_.push_back(i);
      }
    }

    const std::size_t emptied = simd::advance(x, rates_, dt, options_.depletion_snap);
    for (std::size_t i : forced_) x[i] = 0.0;
    if (emptied > 0 || !forced_.empty()) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (rates_[i] > 0.0 && x[i] == 0.0) out.depleted.push_back(i);
      }
    }

    if (grouped != nullptr && !pair_times_.empty()) merge_groups(x, *grouped, dt, window, out);
    return out;
  }

 private:
  struct PairTime {
    std::size_t upper;
    Hours time;
  };

  void check_admissible(const FleetState& state, const DispatchDecision& d) const {
    if (d.powers.size() != pmax_.size()) throw std::logic_error("dispatch has the wrong length");
    for (std::size_t i = 0; i < pmax_.size(); ++i) {
      const double u = d.powers[i];
      if (!(u >= 0.0) || u > pmax_[i] * (1.0 + 1e-12) || (state[i] == 0.0 && u != 0.0)) {
        throw std::logic_error("dispatch rule produced an inadmissible power for device " +
                               std::to_string(i + 1));
      }
    }
  }

  void merge_groups(std::span<double> x, const GroupedState& grouped, Hours dt, Hours window,
                    StepOutcome& out) {
    const std::size_t g_count = grouped.group_count();
    joins_.assign(g_count, 0);
    for (const PairTime& p : pair_times_) {
      const Group& a = grouped.groups[p.upper];
      const Group& b = grouped.groups[p.upper + 1];
      if (x[grouped.order[a.begin]] == 0.0 || x[grouped.order[b.begin]] == 0.0) continue;
      const double xa = a.ttg - rates_[grouped.order[a.begin]] * dt;
      const double xb = b.ttg - rates_[grouped.order[b.begin]] * dt;
      if (p.time <= window || std::abs(xa - xb) <= options_.group_tolerance) joins_[p.upper] = 1;
    }
    for (std::size_t k = 0; k < g_count; ++k) {
      if (!joins_[k]) continue;
      std::size_t last = k;
      while (last < g_count && joins_[last]) ++last;
      // Groups k..last meet; put them on their power-weighted mean, which
      // keeps the stored energy unchanged.
      const std::size_t begin = grouped.groups[k].begin;
      const std::size_t end = grouped.groups[last].end;
      double energy = 0.0;
      double power = 0.0;
      for (std::size_t m = begin; m < end; ++m) {
        const std::size_t i = grouped.order[m];
        energy += pmax_[i] * x[i];
        power += pmax_[i];
      }
      const double common = energy / power;
      std::vector<std::size_t> devices;
      devices.reserve(end - begin);
      for (std::size_t m = begin; m < end; ++m) {
        const std::size_t i = grouped.order[m];
        x[i] = common;
        devices.push_back(i);
      }
      std::sort(devices.begin(), devices.end());
      out.merged.push_back(std::move(devices));
      k = last;
    }
  }

  std::span<const Device> fleet_;
  SimulationOptions options_;
  std::vector<Kilowatts> pmax_;
  std::vector<double> rates_;
  std::vector<PairTime> pair_times_;
  std::vector<std::size_t> forced_;
  std::vector<char> joins_;
};

FleetState snapped(const FleetState& initial, Hours snap) {
  std::vector<Hours> x(initial.values().begin(), initial.values().end());
  for (Hours& v : x) {
    if (v <= snap) v = 0.0;
  }
  return FleetState(std::move(x));
}

void check_inputs(std::span<const Device> fleet, const FleetState& initial,
                  const SimulationOptions& options) {
  validate(fleet);
  if (initial.size() != fleet.size()) throw InputError("initial state does not match the fleet");
  if (!(options.group_tolerance >= 0.0)) throw InputError("grouping tolerance must be >= 0");
  if (!(options.depletion_snap >= 0.0)) throw InputError("depletion snap must be >= 0");
  if (!(options.power_slack >= 0.0)) throw InputError("power slack must be >= 0");
}

bool is_shortfall(const DispatchDecision& d, Kilowatts request, double slack) {
  return d.shortfall > slack * std::max(1.0, request);
}

void push_step_events(Hours t, StepOutcome& step, std::vector<Event>& events) {
  if (!step.depleted.empty()) {
    events.push_back(Event{t, EventKind::Depletion, std::move(step.depleted), 0.0, 0.0});
  }
  for (auto& merged : step.merged) {
    events.push_back(Event{t, EventKind::Equalisation, std::move(merged), 0.0, 0.0});
  }
}

}  // namespace

std::unique_ptr<DispatchRule> make_rule(PolicyKind kind, std::span<const Device> fleet,
                                        Hours group_tolerance) {
  switch (kind) {
    case PolicyKind::Optimal:
      return std::make_unique<OptimalRule>(fleet, group_tolerance);
    case PolicyKind::LowestPowerFirst:
      return std::make_unique<LowestPowerFirstRule>(fleet);
    case PolicyKind::ProportionOfPower:
      return std::make_unique<ProportionOfPowerRule>(fleet);
  }
  throw InputError("unknown policy");
}

AdvanceResult advance(const FleetState& state, std::span<const Device> fleet, PolicyKind policy,
                      Kilowatts request, Hours budget, const SimulationOptions& options) {
  check_inputs(fleet, state, options);
  if (!(budget > 0.0)) throw InputError("advance: budget must be positive");
  auto rule = make_rule(policy, fleet, options.group_tolerance);
  AdvanceResult out;
  out.state = snapped(state, options.depletion_snap);
  out.dispatch = rule->decide(out.state, request);
  if (is_shortfall(out.dispatch, request, options.power_slack)) {
    throw InputError("advance: request exceeds the available power");
  }
  Integrator integrator(fleet, options);
  StepOutcome step = integrator.step(out.state, out.dispatch, rule->grouping(), budget);
  out.elapsed = step.dt;
  push_step_events(step.dt, step, out.events);
  return out;
}

SimulationTrace simulate(std::span<const Device> fleet, const FleetState& initial,
                         const ReferenceSignal& signal, PolicyKind policy,
                         const SimulationOptions& options) {
  auto rule = make_rule(policy, fleet, options.group_tolerance);
  return simulate(fleet, initial, signal, *rule, options);
}

SimulationTrace simulate(std::span<const Device> fleet, const FleetState& initial,
                         const ReferenceSignal& signal, DispatchRule& rule,
                         const SimulationOptions& options) {
  check_inputs(fleet, initial, options);

  SimulationTrace trace;
  trace.initial_state = snapped(initial, options.depletion_snap);
  trace.horizon = signal.horizon();
  FleetState x = trace.initial_state;
  Integrator integrator(fleet, options);

  const std::size_t n_samples = options.samples;
  std::size_t next_sample = 0;
  auto sample_time = [&](std::size_t j) {
    return signal.horizon() * static_cast<double>(j) / static_cast<double>(n_samples);
  };
  std::vector<Hours> before;

  // Every iteration either ends a segment or fires at least one depletion or
  // equalisation, and there are at most n of each.
  const std::size_t max_iterations = 4 * (fleet.size() + signal.segment_count()) + 16;

  Hours t = 0.0;
  std::size_t segment = 0;
  for (std::size_t iteration = 0;; ++iteration) {
    if (iteration > max_iterations) {
      throw std::runtime_error("simulation made no progress; event count bound exceeded");
    }
    const Kilowatts request = signal.values()[segment];
    const Hours segment_end = signal.segment_end(segment);
    DispatchDecision d = rule.decide(x, request);

    if (is_shortfall(d, request, options.power_slack)) {
      trace.events.push_back(
          Event{t, EventKind::Failure, {}, request, integrator.available(x)});
      trace.failure_time = t;
      if (options.record_states) trace.samples.push_back(Sample{t, x, std::move(d), true});
      break;
    }
    if (options.record_states) trace.samples.push_back(Sample{t, x, d, true});

    const bool sampling = n_samples > 0 && next_sample <= n_samples;
    if (sampling) before.assign(x.values().begin(), x.values().end());

    StepOutcome step = integrator.step(x, d, rule.grouping(), segment_end - t);
    const Hours t_next = step.hit_budget ? segment_end : std::min(t + step.dt, segment_end);

    if (sampling) {
      const auto rates = integrator.rates();
      while (next_sample <= n_samples && sample_time(next_sample) < t_next) {
        const Hours ts = sample_time(next_sample);
        std::vector<Hours> xs(before.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
          xs[i] = std::max(0.0, before[i] - rates[i] * (ts - t));
        }
        trace.samples.push_back(Sample{ts, FleetState(std::move(xs)), d, false});
        ++next_sample;
      }
    }

    trace.delivered_energy += d.delivered * step.dt;
    t = t_next;
    push_step_events(t, step, trace.events);

    if (step.hit_budget) {
      if (segment + 1 < signal.segment_count()) {
        ++segment;
        trace.events.push_back(
            Event{t, EventKind::SegmentChange, {}, signal.values()[segment], 0.0});
      } else {
        break;
      }
    }
  }

  trace.end_time = t;
  trace.final_state = x;
  if (trace.survived()) {
    if (options.record_states) {
      DispatchDecision idle;
      idle.powers.assign(fleet.size(), 0.0);
      trace.samples.push_back(Sample{t, x, std::move(idle), true});
    }
  }
  while (n_samples > 0 && next_sample <= n_samples && sample_time(next_sample) <= t) {
    DispatchDecision idle;
    idle.powers.assign(fleet.size(), 0.0);
    trace.samples.push_back(Sample{sample_time(next_sample), x, std::move(idle), false});
    ++next_sample;
  }
  return trace;
}

Hours time_to_failure(std::span<const Device> fleet, const FleetState& initial,
                      const ReferenceSignal& signal, PolicyKind policy,
                      const SimulationOptions& options) {
  SimulationOptions lean = options;
  lean.record_states = false;
  lean.samples = 0;
  const SimulationTrace trace = simulate(fleet, initial, signal, policy, lean);
  return trace.failure_time.value_or(trace.horizon);
}

std::vector<PowerStep> available_power_trajectory(const SimulationTrace& trace,
                                                  std::span<const Device> fleet) {
  if (trace.initial_state.size() != fleet.size()) {
    throw InputError("trace does not match the fleet");
  }
  std::vector<char> alive(fleet.size());
  for (std::size_t i = 0; i < fleet.size(); ++i) alive[i] = trace.initial_state[i] > 0.0;
  // Summed from scratch at every step so the tail is exactly zero.
  auto total = [&] {
    Kilowatts p = 0.0;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
      if (alive[i]) p += fleet[i].max_power;
    }
    return p;
  };
  std::vector<PowerStep> steps;
  steps.push_back({0.0, total()});
  for (const Event& e : trace.events) {
    if (e.kind != EventKind::Depletion) continue;
    for (std::size_t i : e.devices) alive[i] = 0;
    steps.push_back({e.time, total()});
  }
  return steps;
}

FleetState state_at(const SimulationTrace& trace, std::span<const Device> fleet, Hours t) {
  if (trace.samples.empty()) throw InputError("state_at needs a trace recorded with states");
  t = std::clamp(t, 0.0, trace.end_time);
  auto it = std::upper_bound(trace.samples.begin(), trace.samples.end(), t,
                             [](Hours value, const Sample& s) { return value < s.time; });
  if (it != trace.samples.begin()) --it;
  const Sample& s = *it;
  std::vector<Hours> x(s.state.values().begin(), s.state.values().end());
  const Hours dt = t - s.time;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::max(0.0, x[i] - s.dispatch.powers[i] / fleet[i].max_power * dt);
  }
  return FleetState(std::move(x));
}

}  // namespace maxsurv
