#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "maxsurv/commands.hpp"

using namespace maxsurv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = MAXSURV_SOURCE_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("maxsurv_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

json two_device() {
  return json::parse(R"({
    "fleet": {"devices": [{"max_power": 1, "time_to_go": 2}, {"max_power": 2, "energy": 2}]},
    "signal": {"breakpoints": [0, 2], "values": [1, 3], "horizon": 10},
    "policies": ["op", "lpf", "pop"]
  })");
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(two_device());
  const Scenario sc = instantiate(c, 0);
  REQUIRE(sc.fleet.size() == 2);
  CHECK(sc.fleet[1].extractable_energy == 2.0);
  CHECK(time_to_go(sc.fleet[1]) == 1.0);
  CHECK(sc.signal == ReferenceSignal({0.0, 2.0}, {1.0, 3.0}, 10.0));
  CHECK(c.policies.size() == 3);

  json stepped = json::parse(R"({"fleet": {"devices": [{"max_power": 1, "energy": 1}]},
                                 "signal": {"values": [1, 2, 3], "step": 0.5}})");
  const Scenario s2 = instantiate(parse_config(stepped), 0);
  CHECK(s2.signal == ReferenceSignal({0.0, 0.5, 1.0}, {1, 2, 3}, 1.5));

  json stored = json::parse(R"({"fleet": {"devices": [{"max_power": 1, "stored_energy": 4, "efficiency": 0.5}]},
                                "signal": {"values": [1], "horizon": 3}})");
  CHECK(instantiate(parse_config(stored), 0).fleet[0].extractable_energy == doctest::Approx(2.0));
}

TEST_CASE("config errors") {
  json empty = two_device();
  empty["fleet"]["devices"] = json::array();
  CHECK_THROWS_AS(parse_config(empty), ConfigError);

  json both = two_device();
  both["fleet"]["devices"][0]["energy"] = 3;
  CHECK_THROWS_AS(parse_config(both), ConfigError);

  json bad_policy = two_device();
  bad_policy["policies"] = {"op", "fastest"};
  CHECK_THROWS_AS(parse_config(bad_policy), ConfigError);
  CHECK_THROWS_AS(parse_policy_list("op,,lpf"), ConfigError);

  json bad_tol = two_device();
  bad_tol["tolerances"] = {{"group", 0}};
  CHECK_THROWS_AS(parse_config(bad_tol), ConfigError);

  CHECK_THROWS_AS(load_config(scratch("missing") / "none.json"), ConfigError);
}

TEST_CASE("simulate writes traces and summaries") {
  RunConfig c = parse_config(two_device());
  c.out_dir = scratch("simulate");
  std::ostringstream out, err;
  REQUIRE(cmd_simulate(c, out, err) == 0);
  for (const char* f : {"reference.csv", "op_events.csv", "op_states.csv", "op_available.csv",
                        "op_summary.json", "lpf_summary.json", "pop_summary.json"}) {
    CHECK(fs::exists(c.out_dir / f));
  }
  const json op = json::parse(slurp(c.out_dir / "op_summary.json"));
  CHECK(op["time_to_failure_h"].get<double>() == doctest::Approx(8.0 / 3.0));
  CHECK(op["survived"] == false);
  CHECK(op["event_counts"]["equalisation"] == 1);
  const json lpf = json::parse(slurp(c.out_dir / "lpf_summary.json"));
  CHECK(lpf["time_to_failure_h"].get<double>() == doctest::Approx(2.0));
  const json pop = json::parse(slurp(c.out_dir / "pop_summary.json"));
  CHECK(pop["time_to_failure_h"].get<double>() == doctest::Approx(7.0 / 3.0));

  CHECK(slurp(c.out_dir / "op_events.csv") == slurp(kSource / "tests/golden/two_device_op_events.csv"));
  CHECK(slurp(c.out_dir / "op_states.csv") == slurp(kSource / "tests/golden/two_device_op_states.csv"));

  c.format = SummaryFormat::Csv;
  c.out_dir = scratch("simulate_csv");
  REQUIRE(cmd_simulate(c, out, err) == 0);
  CHECK(slurp(c.out_dir / "op_summary.csv").rfind("key,value\n", 0) == 0);
}

TEST_CASE("compare needs two policies") {
  RunConfig c = parse_config(two_device());
  c.policies = {PolicyKind::Optimal};
  c.out_dir = scratch("compare_single");
  std::ostringstream out, err;
  CHECK(cmd_compare(c, out, err) == 2);
  CHECK(err.str().find("two policies") != std::string::npos);
}

TEST_CASE("compare output is reproducible") {
  json doc = json::parse(R"({
    "fleet": {"random": {"n": 40, "time_to_go": [0, 10], "max_power": [0, 1.5]}},
    "signal": {"random": {"mean": 8, "std": 3, "step": 1, "horizon": 24}},
    "policies": ["op", "lpf", "pop"], "seed": 5, "sweep": 6
  })");
  RunConfig a = parse_config(doc);
  a.out_dir = scratch("compare_a");
  RunConfig b = a;
  b.out_dir = scratch("compare_b");
  std::ostringstream out, err;
  REQUIRE(cmd_compare(a, out, err) == 0);
  REQUIRE(cmd_compare(b, out, err) == 0);
  for (const char* f : {"comparison.csv", "comparison_table.csv", "comparison_summary.json",
                        "available_power.csv", "reference.csv"}) {
    CHECK(slurp(a.out_dir / f) == slurp(b.out_dir / f));
  }
  const json s = json::parse(slurp(a.out_dir / "comparison_summary.json"));
  CHECK(s["op_dominance_violations"] == 0);
  CHECK(s["seeds"] == 6);

  // Worker count does not change the result.
  const auto one = run_comparison(a, 1);
  const auto many = run_comparison(a, 4);
  REQUIRE(one.size() == many.size());
  for (std::size_t k = 0; k < one.size(); ++k) CHECK(one[k].time_to_failure == many[k].time_to_failure);
}

TEST_CASE("feasible reports the optimal time to failure") {
  RunConfig c = parse_config(two_device());
  c.out_dir = scratch("feasible");
  std::ostringstream out, err;
  REQUIRE(cmd_feasible(c, out, err) == 0);
  json r = json::parse(slurp(c.out_dir / "feasible.json"));
  CHECK(r["feasible"] == false);
  CHECK(r["time_to_failure_h"].get<double>() == doctest::Approx(8.0 / 3.0).epsilon(1e-8));

  json zero = two_device();
  zero["signal"] = {{"values", {0.0}}, {"horizon", 5.0}};
  c = parse_config(zero);
  c.out_dir = scratch("feasible_zero");
  REQUIRE(cmd_feasible(c, out, err) == 0);
  r = json::parse(slurp(c.out_dir / "feasible.json"));
  CHECK(r["feasible"] == true);
  CHECK(r["time_to_failure_h"] == 5.0);

  json over = two_device();
  over["signal"] = {{"values", {4.0, 1.0}}, {"step", 1.0}};
  c = parse_config(over);
  c.out_dir = scratch("feasible_over");
  REQUIRE(cmd_feasible(c, out, err) == 0);
  r = json::parse(slurp(c.out_dir / "feasible.json"));
  CHECK(r["time_to_failure_h"] == 0.0);

  c.feasible_horizon = 0.0;
  REQUIRE(cmd_feasible(c, out, err) == 0);
  CHECK(json::parse(slurp(c.out_dir / "feasible.json"))["feasible"] == true);
}

TEST_CASE("gen-scenario round trips through an inline config") {
  json doc = json::parse(R"({
    "fleet": {"random": {"n": 7, "time_to_go": [0, 10], "max_power": [0, 1.5]}},
    "signal": {"random": {"mean": 5, "std": 2, "step": 1, "horizon": 6}}, "seed": 3
  })");
  RunConfig c = parse_config(doc);
  c.out_dir = scratch("gen");
  std::ostringstream out, err;
  REQUIRE(cmd_gen_scenario(c, out, err) == 0);
  const Scenario original = instantiate(c, 3);
  const Scenario again = instantiate(parse_config(json::parse(slurp(c.out_dir / "scenario.json"))), 0);
  REQUIRE(again.fleet.size() == original.fleet.size());
  for (std::size_t i = 0; i < again.fleet.size(); ++i) {
    CHECK(again.fleet[i].max_power == original.fleet[i].max_power);
    CHECK(again.fleet[i].extractable_energy == original.fleet[i].extractable_energy);
  }
  CHECK(again.signal == original.signal);
  CHECK(slurp(c.out_dir / "fleet.csv").rfind("id,max_power_kw,energy_kwh,time_to_go_h\n", 0) == 0);
}
