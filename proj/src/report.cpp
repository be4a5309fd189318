#include "maxsurv/report.hpp"

#include <charconv>

namespace maxsurv {

using nlohmann::json;

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string id_list(std::span<const std::size_t> devices) {
  std::string s;
  for (std::size_t k = 0; k < devices.size(); ++k) {
    if (k > 0) s += ';';
    s += std::to_string(devices[k] + 1);
  }
  return s;
}

}  // namespace

void write_events_csv(std::ostream& out, const SimulationTrace& trace) {
  out << "time,kind,payload\n";
  for (const Event& e : trace.events) {
    out << format_number(e.time) << ',' << event_name(e.kind) << ',';
    switch (e.kind) {
      case EventKind::Depletion:
      case EventKind::Equalisation:
        out << "devices=" << id_list(e.devices);
        break;
      case EventKind::SegmentChange:
        out << "request=" << format_number(e.request);
        break;
      case EventKind::Failure:
        out << "request=" << format_number(e.request)
            << ";available=" << format_number(e.available);
        break;
    }
    out << '\n';
  }
}

void write_states_csv(std::ostream& out, const SimulationTrace& trace) {
  const std::size_t n = trace.initial_state.size();
  out << "time,at_event";
  for (std::size_t i = 1; i <= n; ++i) out << ",x_" << i;
  for (std::size_t i = 1; i <= n; ++i) out << ",u_" << i;
  out << '\n';
  for (const Sample& s : trace.samples) {
    out << format_number(s.time) << ',' << (s.at_event ? 1 : 0);
    for (double v : s.state.values()) out << ',' << format_number(v);
    for (double v : s.dispatch.powers) out << ',' << format_number(v);
    out << '\n';
  }
}

void write_available_csv(std::ostream& out, std::span<const PowerStep> steps) {
  out << "time,available_kw\n";
  for (const PowerStep& s : steps) {
    out << format_number(s.time) << ',' << format_number(s.available) << '\n';
  }
}

json summary_json(const SimulationTrace& trace, std::span<const Device> fleet, PolicyKind policy) {
  KilowattHours initial = 0.0;
  KilowattHours remaining = 0.0;
  for (std::size_t i = 0; i < fleet.size(); ++i) {
    initial += fleet[i].max_power * trace.initial_state[i];
    remaining += fleet[i].max_power * trace.final_state[i];
  }
  json j;
  j["policy"] = std::string(policy_name(policy));
  j["n_devices"] = fleet.size();
  j["horizon_h"] = trace.horizon;
  j["survived"] = trace.survived();
  j["failure_time_h"] = trace.failure_time ? json(*trace.failure_time) : json(nullptr);
  j["time_to_failure_h"] = trace.failure_time.value_or(trace.horizon);
  j["end_time_h"] = trace.end_time;
  j["delivered_energy_kwh"] = trace.delivered_energy;
  j["initial_energy_kwh"] = initial;
  j["remaining_energy_kwh"] = remaining;
  j["event_counts"] = {
      {"depletion", trace.count(EventKind::Depletion)},
      {"equalisation", trace.count(EventKind::Equalisation)},
      {"segment_change", trace.count(EventKind::SegmentChange)},
      {"failure", trace.count(EventKind::Failure)},
  };
  return j;
}

void write_summary_csv(std::ostream& out, const json& summary) {
  out << "key,value\n";
  for (const auto& [key, value] : summary.items()) {
    if (value.is_object()) {
      for (const auto& [sub, v] : value.items()) out << key << '.' << sub << ',' << v.dump() << '\n';
    } else {
      out << key << ',' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    }
  }
}

json feasibility_json(const FeasibilityReport& report, Hours time_to_failure, Hours tolerance) {
  json windows = json::array();
  for (std::size_t k = 0; k < report.windows.size(); ++k) {
    const SegmentWindow& w = report.windows[k];
    windows.push_back({{"t_start", w.start},
                       {"t_end", w.end},
                       {"power_kw", w.power},
                       {"unmet_kwh", report.unmet[k]}});
  }
  return json{
      {"feasible", report.feasible},
      {"horizon_h", report.horizon},
      {"demand_kwh", report.demand},
      {"max_flow_kwh", report.flow},
      {"time_to_failure_h", time_to_failure},
      {"bisection_tolerance_h", tolerance},
      {"windows", windows},
      {"certificate_kwh", report.certificate.flows},
  };
}

}  // namespace maxsurv
