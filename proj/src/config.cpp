#include "maxsurv/config.hpp"

#include <fstream>
#include <sstream>

namespace maxsurv {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(where + ": missing \"" + key + "\"");
  }
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

Range range(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(where + ": expected [low, high]");
  return Range{number(v[0], where), number(v[1], where)};
}

std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const json& e : v) out.push_back(number(e, where));
  return out;
}

Device parse_device(const json& d, std::size_t id) {
  const std::string where = "fleet.devices[" + std::to_string(id - 1) + "]";
  if (!d.is_object()) throw ConfigError(where + ": expected an object");
  const double p = number(require(d, "max_power", where), where + ".max_power");
  const int sources = static_cast<int>(d.contains("energy")) +
                      static_cast<int>(d.contains("stored_energy")) +
                      static_cast<int>(d.contains("time_to_go"));
  if (sources != 1) {
    throw ConfigError(where + ": give exactly one of energy, stored_energy, time_to_go");
  }
  if (d.contains("energy")) return Device::from_energy(id, p, number(d["energy"], where));
  if (d.contains("time_to_go")) return Device::from_time_to_go(id, p, number(d["time_to_go"], where));
  const double eff = d.contains("efficiency") ? number(d["efficiency"], where) : 1.0;
  return Device::from_stored(id, p, number(d["stored_energy"], where), eff);
}

std::variant<Fleet, RandomFleet> parse_fleet(const json& f) {
  const bool inline_devices = f.is_object() && f.contains("devices");
  const bool random = f.is_object() && f.contains("random");
  if (inline_devices == random) {
    throw ConfigError("fleet: give exactly one of \"devices\" or \"random\"");
  }
  if (inline_devices) {
    const json& list = f["devices"];
    if (!list.is_array() || list.empty()) throw ConfigError("fleet.devices: needs at least one device");
    Fleet fleet;
    for (std::size_t i = 0; i < list.size(); ++i) fleet.push_back(parse_device(list[i], i + 1));
    try {
      validate(fleet);
    } catch (const InputError& e) {
      throw ConfigError(std::string("fleet: ") + e.what());
    }
    return fleet;
  }
  const json& r = f["random"];
  RandomFleet out;
  const json& n = require(r, "n", "fleet.random");
  if (!n.is_number_integer() || n.get<long long>() < 1) {
    throw ConfigError("fleet.random.n: expected a positive integer");
  }
  out.n = n.get<std::size_t>();
  if (r.contains("time_to_go")) out.ttg = range(r["time_to_go"], "fleet.random.time_to_go");
  if (r.contains("max_power")) out.power = range(r["max_power"], "fleet.random.max_power");
  return out;
}

std::variant<ReferenceSignal, RandomSignal> parse_signal(const json& s) {
  const bool inline_signal = s.is_object() && s.contains("values");
  const bool random = s.is_object() && s.contains("random");
  if (inline_signal == random) {
    throw ConfigError("signal: give exactly one of inline \"values\" or \"random\"");
  }
  if (inline_signal) {
    std::vector<double> values = numbers(s["values"], "signal.values");
    std::vector<double> bp;
    double horizon = 0.0;
    if (s.contains("breakpoints")) {
      bp = numbers(s["breakpoints"], "signal.breakpoints");
      horizon = number(require(s, "horizon", "signal"), "signal.horizon");
    } else {
      const double step = s.contains("step") ? number(s["step"], "signal.step") : 1.0;
      if (!(step > 0.0)) throw ConfigError("signal.step: must be positive");
      for (std::size_t k = 0; k < values.size(); ++k) bp.push_back(step * static_cast<double>(k));
      // Without breakpoints the last value lasts one step unless a horizon is given.
      horizon = s.contains("horizon") ? number(s["horizon"], "signal.horizon")
                                      : step * static_cast<double>(values.size());
    }
    try {
      return ReferenceSignal(std::move(bp), std::move(values), horizon);
    } catch (const InputError& e) {
      throw ConfigError(std::string("signal: ") + e.what());
    }
  }
  const json& r = s["random"];
  RandomSignal out;
  if (r.contains("mean")) out.mean = number(r["mean"], "signal.random.mean");
  if (r.contains("std")) out.std = number(r["std"], "signal.random.std");
  if (r.contains("step")) out.step = number(r["step"], "signal.random.step");
  if (r.contains("horizon")) out.horizon = number(r["horizon"], "signal.random.horizon");
  return out;
}

}  // namespace

std::vector<PolicyKind> parse_policy_list(const std::string& csv) {
  std::vector<PolicyKind> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto kind = parse_policy(item);
    if (!kind) throw ConfigError("unknown policy \"" + item + "\" (expected op, lpf or pop)");
    out.push_back(*kind);
  }
  if (out.empty()) throw ConfigError("policy list is empty");
  return out;
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  RunConfig cfg;
  cfg.fleet = parse_fleet(require(doc, "fleet", "config"));
  cfg.signal = parse_signal(require(doc, "signal", "config"));

  if (doc.contains("policies")) {
    const json& p = doc["policies"];
    if (!p.is_array()) throw ConfigError("policies: expected an array of names");
    cfg.policies.clear();
    for (const json& name : p) {
      if (!name.is_string()) throw ConfigError("policies: expected names");
      const auto kind = parse_policy(name.get<std::string>());
      if (!kind) throw ConfigError("policies: unknown policy \"" + name.get<std::string>() + "\"");
      cfg.policies.push_back(*kind);
    }
    if (cfg.policies.empty()) throw ConfigError("policies: at least one policy is required");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed: expected a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("sweep")) {
    if (!doc["sweep"].is_number_unsigned() || doc["sweep"].get<std::size_t>() < 1) {
      throw ConfigError("sweep: expected a positive integer");
    }
    cfg.sweep = doc["sweep"].get<std::size_t>();
  }
  if (doc.contains("samples")) {
    if (!doc["samples"].is_number_unsigned()) throw ConfigError("samples: expected an integer");
    cfg.samples = doc["samples"].get<std::size_t>();
  }
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (t.contains("group")) cfg.tolerances.group = number(t["group"], "tolerances.group");
    if (t.contains("depletion")) {
      cfg.tolerances.depletion = number(t["depletion"], "tolerances.depletion");
    }
    if (t.contains("bisect")) cfg.tolerances.bisect = number(t["bisect"], "tolerances.bisect");
  }
  if (!(cfg.tolerances.group > 0.0 && cfg.tolerances.depletion > 0.0 &&
        cfg.tolerances.bisect > 0.0)) {
    throw ConfigError("tolerances: all tolerances must be strictly positive");
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    if (o.contains("dir")) cfg.out_dir = o["dir"].get<std::string>();
    if (o.contains("format")) {
      const std::string f = o["format"].get<std::string>();
      if (f == "json") {
        cfg.format = SummaryFormat::Json;
      } else if (f == "csv") {
        cfg.format = SummaryFormat::Csv;
      } else {
        throw ConfigError("output.format: expected csv or json");
      }
    }
  }
  if (doc.contains("feasible_horizon")) {
    cfg.feasible_horizon = number(doc["feasible_horizon"], "feasible_horizon");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  try {
    return parse_config(doc);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
}

json scenario_to_json(const Scenario& scenario) {
  json devices = json::array();
  for (const Device& d : scenario.fleet) {
    devices.push_back({{"max_power", d.max_power}, {"energy", d.extractable_energy}});
  }
  const ReferenceSignal& s = scenario.signal;
  return json{
      {"fleet", {{"devices", devices}}},
      {"signal",
       {{"breakpoints", std::vector<double>(s.breakpoints().begin(), s.breakpoints().end())},
        {"values", std::vector<double>(s.values().begin(), s.values().end())},
        {"horizon", s.horizon()}}},
  };
}

Scenario instantiate(const RunConfig& config, std::uint64_t seed) {
  const auto* random_fleet = std::get_if<RandomFleet>(&config.fleet);
  const auto* random_signal = std::get_if<RandomSignal>(&config.signal);
  Scenario out;
  if (random_fleet != nullptr || random_signal != nullptr) {
    ScenarioSpec spec;
    spec.seed = seed;
    if (random_fleet != nullptr) {
      spec.n = random_fleet->n;
      spec.ttg = random_fleet->ttg;
      spec.power = random_fleet->power;
    } else {
      spec.n = 1;
      spec.ttg = {0.0, 0.0};
      spec.power = {1.0, 1.0};
    }
    if (random_signal != nullptr) {
      spec.reference_mean = random_signal->mean;
      spec.reference_std = random_signal->std;
      spec.step = random_signal->step;
      spec.horizon = random_signal->horizon;
    } else {
      spec.reference_mean = 0.0;
      spec.reference_std = 0.0;
      spec.step = 1.0;
      spec.horizon = 1.0;
    }
    try {
      out = sample_scenario(spec);
    } catch (const InputError& e) {
      throw ConfigError(std::string("scenario: ") + e.what());
    }
  }
  if (random_fleet == nullptr) out.fleet = std::get<Fleet>(config.fleet);
  if (random_signal == nullptr) out.signal = std::get<ReferenceSignal>(config.signal);
  return out;
}

}  // namespace maxsurv
