#include "maxsurv/commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "maxsurv/oracle.hpp"
#include "maxsurv/report.hpp"

namespace maxsurv {

using nlohmann::json;

namespace {

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  return f;
}

void write_summary(const RunConfig& config, const std::string& stem, const json& summary) {
  if (config.format == SummaryFormat::Json) {
    open_output(config.out_dir, stem + ".json") << summary.dump(2) << '\n';
  } else {
    auto f = open_output(config.out_dir, stem + ".csv");
    write_summary_csv(f, summary);
  }
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

// Index of the policy whose time to failure beats every other one, if any.
std::optional<std::size_t> strict_winner(std::span<const Hours> ttf) {
  for (std::size_t a = 0; a < ttf.size(); ++a) {
    bool wins = true;
    for (std::size_t b = 0; b < ttf.size() && wins; ++b) {
      if (a != b && !(ttf[a] > ttf[b])) wins = false;
    }
    if (wins) return a;
  }
  return std::nullopt;
}

}  // namespace

SimulationOptions simulation_options(const RunConfig& config) {
  SimulationOptions opt;
  opt.group_tolerance = config.tolerances.group;
  opt.depletion_snap = config.tolerances.depletion;
  opt.samples = config.samples;
  return opt;
}

std::vector<SeedComparison> run_comparison(const RunConfig& config, std::size_t workers) {
  const std::size_t count = config.sweep;
  std::vector<SeedComparison> results(count);
  SimulationOptions opt = simulation_options(config);
  opt.record_states = false;
  opt.samples = 0;

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= count) return;
      try {
        SeedComparison& r = results[idx];
        r.seed = config.seed + idx;
        const Scenario sc = instantiate(config, r.seed);
        const FleetState x0 = FleetState::from_fleet(sc.fleet);
        for (PolicyKind p : config.policies) {
          const SimulationTrace trace = simulate(sc.fleet, x0, sc.signal, p, opt);
          r.time_to_failure.push_back(trace.failure_time.value_or(trace.horizon));
          r.survived.push_back(trace.survived());
          r.delivered.push_back(trace.delivered_energy);
          r.available.push_back(available_power_trajectory(trace, sc.fleet));
        }
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
        return;
      }
    }
  };

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = instantiate(config, config.seed);
    const FleetState x0 = FleetState::from_fleet(sc.fleet);
    const SimulationOptions opt = simulation_options(config);
    {
      auto f = open_output(config.out_dir, "reference.csv");
      write_signal_csv(f, sc.signal);
    }
    for (PolicyKind p : config.policies) {
      const SimulationTrace trace = simulate(sc.fleet, x0, sc.signal, p, opt);
      const std::string name(policy_name(p));
      {
        auto f = open_output(config.out_dir, name + "_events.csv");
        write_events_csv(f, trace);
      }
      {
        auto f = open_output(config.out_dir, name + "_states.csv");
        write_states_csv(f, trace);
      }
      {
        auto f = open_output(config.out_dir, name + "_available.csv");
        write_available_csv(f, available_power_trajectory(trace, sc.fleet));
      }
      const json summary = summary_json(trace, sc.fleet, p);
      write_summary(config, name + "_summary", summary);
      out << name << ": time_to_failure_h=" << format_number(trace.failure_time.value_or(trace.horizon))
          << (trace.survived() ? " (survived horizon)" : "") << " events=" << trace.events.size()
          << '\n';
    }
    return 0;
  });
}

int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (config.policies.size() < 2) {
      throw ConfigError("compare needs at least two policies (e.g. --policy op,lpf,pop)");
    }
    const std::vector<SeedComparison> rows = run_comparison(config);
    const std::size_t np = config.policies.size();

    {
      auto f = open_output(config.out_dir, "comparison.csv");
      f << "seed,policy,time_to_failure_h,survived,delivered_energy_kwh\n";
      for (const SeedComparison& r : rows) {
        for (std::size_t p = 0; p < np; ++p) {
          f << r.seed << ',' << policy_name(config.policies[p]) << ','
            << format_number(r.time_to_failure[p]) << ',' << (r.survived[p] ? 1 : 0) << ','
            << format_number(r.delivered[p]) << '\n';
        }
      }
    }

    // Figure data for the first seed.
    {
      const Scenario sc = instantiate(config, config.seed);
      auto ref = open_output(config.out_dir, "reference.csv");
      write_signal_csv(ref, sc.signal);
      auto f = open_output(config.out_dir, "available_power.csv");
      f << "policy,time,available_kw\n";
      for (std::size_t p = 0; p < np; ++p) {
        for (const PowerStep& s : rows.front().available[p]) {
          f << policy_name(config.policies[p]) << ',' << format_number(s.time) << ','
            << format_number(s.available) << '\n';
        }
      }
    }

    std::vector<std::size_t> wins(np, 0);
    for (const SeedComparison& r : rows) {
      if (auto w = strict_winner(r.time_to_failure)) ++wins[*w];
    }

    json table = json::array();
    {
      auto f = open_output(config.out_dir, "comparison_table.csv");
      f << "policy,seeds,mean_ttf_h,min_ttf_h,max_ttf_h,survived,strictly_greatest_fraction\n";
      for (std::size_t p = 0; p < np; ++p) {
        double sum = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        std::size_t survived = 0;
        for (const SeedComparison& r : rows) {
          sum += r.time_to_failure[p];
          lo = std::min(lo, r.time_to_failure[p]);
          hi = std::max(hi, r.time_to_failure[p]);
          survived += r.survived[p] ? 1 : 0;
        }
        const double mean = sum / static_cast<double>(rows.size());
        const double frac = static_cast<double>(wins[p]) / static_cast<double>(rows.size());
        const std::string name(policy_name(config.policies[p]));
        f << name << ',' << rows.size() << ',' << format_number(mean) << ',' << format_number(lo)
          << ',' << format_number(hi) << ',' << survived << ',' << format_number(frac) << '\n';
        table.push_back({{"policy", name},
                         {"mean_ttf_h", mean},
                         {"min_ttf_h", lo},
                         {"max_ttf_h", hi},
                         {"survived", survived},
                         {"strictly_greatest_fraction", frac}});
        out << name << ": mean=" << format_number(mean) << " min=" << format_number(lo)
            << " max=" << format_number(hi) << " strictly_greatest=" << format_number(frac) << '\n';
      }
    }

    json summary{{"seeds", rows.size()}, {"first_seed", config.seed}, {"policies", table}};
    const auto op = std::find(config.policies.begin(), config.policies.end(), PolicyKind::Optimal);
    if (op != config.policies.end()) {
      const auto op_idx = static_cast<std::size_t>(op - config.policies.begin());
      std::size_t violations = 0;
      for (const SeedComparison& r : rows) {
        for (std::size_t p = 0; p < np; ++p) {
          if (r.time_to_failure[p] > r.time_to_failure[op_idx]) ++violations;
        }
      }
      summary["op_dominance_violations"] = violations;
      out << "op dominance violations: " << violations << '\n';
    }
    write_summary(config, "comparison_summary", summary);
    return 0;
  });
}

int cmd_feasible(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = instantiate(config, config.seed);
    const FleetState x0 = FleetState::from_fleet(sc.fleet);
    const Hours horizon = config.feasible_horizon.value_or(sc.signal.horizon());
    const FeasibilityReport report = check_feasibility(sc.fleet, x0, sc.signal, horizon);
    const Hours ttf = oracle_time_to_failure(sc.fleet, x0, sc.signal, config.tolerances.bisect);
    const json doc = feasibility_json(report, ttf, config.tolerances.bisect);
    open_output(config.out_dir, "feasible.json") << doc.dump(2) << '\n';
    out << "feasible=" << (report.feasible ? "true" : "false")
        << " horizon_h=" << format_number(horizon) << " time_to_failure_h=" << format_number(ttf)
        << '\n';
    return 0;
  });
}

int cmd_gen_scenario(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario sc = instantiate(config, config.seed);
    {
      auto f = open_output(config.out_dir, "fleet.csv");
      f << "id,max_power_kw,energy_kwh,time_to_go_h\n";
      for (const Device& d : sc.fleet) {
        f << d.id << ',' << format_number(d.max_power) << ',' << format_number(d.extractable_energy)
          << ',' << format_number(time_to_go(d)) << '\n';
      }
    }
    {
      auto f = open_output(config.out_dir, "reference.csv");
      write_signal_csv(f, sc.signal);
    }
    open_output(config.out_dir, "scenario.json") << scenario_to_json(sc).dump(2) << '\n';
    out << "wrote " << sc.fleet.size() << " devices and " << sc.signal.segment_count()
        << " reference segments to " << config.out_dir.string() << '\n';
    return 0;
  });
}

}  // namespace maxsurv
