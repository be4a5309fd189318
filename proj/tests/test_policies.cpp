#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "maxsurv/policies.hpp"
#include "support/random_instances.hpp"

using namespace maxsurv;

namespace {

constexpr double kTol = 1e-12;

Fleet make_fleet(std::initializer_list<double> powers) {
  Fleet f;
  for (double p : powers) f.push_back(Device::from_energy(f.size() + 1, p, 1.0));
  return f;
}

void check_powers(const DispatchDecision& d, std::initializer_list<double> expected) {
  REQUIRE(d.powers.size() == expected.size());
  std::size_t i = 0;
  for (double e : expected) {
    CHECK(d.powers[i] == doctest::Approx(e).epsilon(kTol));
    ++i;
  }
}

DispatchDecision op(const FleetState& x, const Fleet& f, double request) {
  return op_dispatch(group_state(x, f), f, request);
}

}  // namespace

TEST_CASE("optimal policy examples") {
  SUBCASE("cascade with a fractional marginal group") {
    const auto d = op(FleetState({3, 2, 1}), make_fleet({1, 1, 1}), 1.5);
    check_powers(d, {1.0, 0.5, 0.0});
    CHECK(d.shortfall == 0.0);
  }
  SUBCASE("tied group shares a common fraction") {
    check_powers(op(FleetState({2, 2}), make_fleet({1, 3}), 2.0), {0.5, 1.5});
  }
  SUBCASE("request above available power") {
    const auto d = op(FleetState({1, 1}), make_fleet({1, 1}), 3.0);
    check_powers(d, {1.0, 1.0});
    CHECK(d.delivered == doctest::Approx(2.0).epsilon(kTol));
    CHECK(d.shortfall == doctest::Approx(1.0).epsilon(kTol));
  }
  SUBCASE("empty device is never dispatched") {
    const auto d = op(FleetState({0, 5}), make_fleet({2, 1}), 2.0);
    check_powers(d, {0.0, 1.0});
    CHECK(d.shortfall == doctest::Approx(1.0).epsilon(kTol));
  }
  SUBCASE("zero request") { check_powers(op(FleetState({1, 2}), make_fleet({1, 1}), 0.0), {0, 0}); }
  SUBCASE("negative request") {
    CHECK_THROWS_AS(op(FleetState({1}), make_fleet({1}), -1.0), InputError);
  }
}

TEST_CASE("lowest power first examples") {
  check_powers(lpf_dispatch(FleetState({1, 1}), make_fleet({1, 2}), 2.0), {1.0, 1.0});
  check_powers(lpf_dispatch(FleetState({0, 1}), make_fleet({1, 2}), 2.0), {0.0, 2.0});
  check_powers(lpf_dispatch(FleetState({1, 1, 1}), make_fleet({2, 2, 5}), 3.0), {2.0, 1.0, 0.0});
}

TEST_CASE("proportion of power examples") {
  check_powers(pop_dispatch(FleetState({1, 1}), make_fleet({1, 2}), 1.0), {1.0 / 3, 2.0 / 3});
  const auto over = pop_dispatch(FleetState({1, 1}), make_fleet({1, 2}), 4.0);
  check_powers(over, {1.0, 2.0});
  CHECK(over.shortfall == doctest::Approx(1.0).epsilon(kTol));
  const auto empty = pop_dispatch(FleetState({0, 0}), make_fleet({1, 2}), 1.0);
  check_powers(empty, {0.0, 0.0});
  CHECK(empty.shortfall == 1.0);
}

TEST_CASE("dispatch delegates by policy kind") {
  check_powers(dispatch(PolicyKind::Optimal, FleetState({3, 2, 1}), make_fleet({1, 1, 1}), 1.5),
               {1.0, 0.5, 0.0});
  check_powers(dispatch(PolicyKind::LowestPowerFirst, FleetState({1, 1}), make_fleet({1, 2}), 2.0),
               {1.0, 1.0});
  check_powers(dispatch(PolicyKind::ProportionOfPower, FleetState({1, 1}), make_fleet({1, 2}), 1.0),
               {1.0 / 3, 2.0 / 3});
}

TEST_CASE("policy names round-trip") {
  for (PolicyKind k : kAllPolicies) CHECK(parse_policy(policy_name(k)) == k);
  CHECK_FALSE(parse_policy("best").has_value());
}

TEST_CASE("all policies are box-feasible and meet the request when they can") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto inst = testing::random_small_instance(rng);
    const double available = max_available_power(inst.x0, inst.fleet);
    const double request = testing::uniform(rng, 0.0, 1.5 * available + 0.5);
    for (PolicyKind k : kAllPolicies) {
      const auto d = dispatch(k, inst.x0, inst.fleet, request);
      double total = 0.0;
      for (std::size_t i = 0; i < inst.fleet.size(); ++i) {
        CHECK(d.powers[i] >= 0.0);
        CHECK(d.powers[i] <= inst.fleet[i].max_power * (1 + kTol));
        if (inst.x0[i] == 0.0) CHECK(d.powers[i] == 0.0);
        total += d.powers[i];
      }
      CHECK(d.delivered == doctest::Approx(total).epsilon(kTol));
      const double expected = std::min(request, available);
      CHECK(d.delivered == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("optimal policy: cascade monotonicity, tie symmetry and scale equivariance") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto inst = testing::random_small_instance(rng);
    const double available = max_available_power(inst.x0, inst.fleet);
    const double request = testing::uniform(rng, 0.0, 1.2 * available);
    const auto g = group_state(inst.x0, inst.fleet);
    const auto d = op_dispatch(g, inst.fleet, request);

    std::vector<double> fraction(g.group_count());
    for (std::size_t k = 0; k < g.group_count(); ++k) {
      const auto m = g.members(k);
      fraction[k] = d.powers[m[0]] / inst.fleet[m[0]].max_power;
      for (std::size_t i : m) {
        CHECK(d.powers[i] / inst.fleet[i].max_power == doctest::Approx(fraction[k]).epsilon(kTol));
      }
    }
    for (std::size_t k = 0; k < g.group_count(); ++k) {
      if (fraction[k] > 0.0) {
        for (std::size_t j = 0; j < k; ++j) CHECK(fraction[j] == doctest::Approx(1.0).epsilon(kTol));
      }
    }

    const double c = testing::uniform(rng, 0.1, 10.0);
    Fleet scaled = inst.fleet;
    for (Device& dev : scaled) {
      dev.max_power *= c;
      dev.extractable_energy *= c;
    }
    const auto ds = op_dispatch(group_state(inst.x0, scaled), scaled, c * request);
    for (std::size_t i = 0; i < scaled.size(); ++i) {
      CHECK(ds.powers[i] == doctest::Approx(c * d.powers[i]).epsilon(1e-11).scale(1.0));
    }
  }
}

TEST_CASE("lowest power first does not depend on the order devices are listed in") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 500; ++trial) {
    auto inst = testing::random_small_instance(rng);
    // Force power ties so the id tie-break matters.
    for (std::size_t i = 1; i < inst.fleet.size(); i += 2) {
      inst.fleet[i].max_power = inst.fleet[i - 1].max_power;
    }
    const double request = testing::uniform(rng, 0.0, 5.0);
    const auto base = lpf_dispatch(inst.x0, inst.fleet, request);

    std::vector<std::size_t> perm(inst.fleet.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Fleet shuffled;
    std::vector<double> x;
    for (std::size_t i : perm) {
      shuffled.push_back(inst.fleet[i]);
      x.push_back(inst.x0[i]);
    }
    const auto moved = lpf_dispatch(FleetState(x), shuffled, request);
    for (std::size_t k = 0; k < perm.size(); ++k) CHECK(moved.powers[k] == base.powers[perm[k]]);
  }
}
