#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "gridplan/demand.hpp"
#include "gridplan/error.hpp"

using namespace gridplan;

TEST_CASE("COP reproduction") {
    CHECK(cop(0.45, 50.0, 10.0) == doctest::Approx(3.64).epsilon(0.005 / 3.64));
    CHECK(cop(0.35, 50.0, 10.0) == doctest::Approx(2.83).epsilon(0.005 / 2.83));
    CHECK(cop(0.35, 50.0, 0.0) == doctest::Approx(2.26).epsilon(0.005 / 2.26));
    CHECK_THROWS_AS(cop(0.35, 50.0, 50.0), Error);
}

TEST_CASE("COP series matches the formula and falls with ambient temperature") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> t(-20.0, 30.0), eta(0.2, 0.6), sink(35.0, 65.0);
    for (int k = 0; k < 50; ++k) {
        std::vector<double> amb(24);
        for (double& x : amb) x = t(rng);
        const double e = eta(rng), s = sink(rng);
        const auto air = cop_series(SourceKind::Air, amb, s, e);
        const auto ground = cop_series(SourceKind::Ground, amb, s, e, 8.0);
        for (std::size_t h = 0; h < amb.size(); ++h) {
            const double direct = e * (s + 273.15) / (s - amb[h]);
            CHECK(std::abs(air[h] - direct) <= 1e-12 * direct);
            CHECK(ground[h] == doctest::Approx(e * (s + 273.15) / (s - 8.0)).epsilon(1e-12));
        }
        std::vector<double> sorted = amb;
        std::sort(sorted.begin(), sorted.end());
        const auto c = cop_series(SourceKind::Air, sorted, s, e);
        for (std::size_t h = 1; h < c.size(); ++h)
            if (sorted[h] > sorted[h - 1]) CHECK(c[h] > c[h - 1]);
    }
    std::vector<double> hot{12.0, 55.0};
    CHECK_THROWS_AS(cop_series(SourceKind::Air, hot, 50.0, 0.35), Error);
}

TEST_CASE("heat subsystem reproduces the rollout aggregates") {
    const Scenario s = fixtures::desk();
    const double yf = 336.0 / 8760.0;
    const std::pair<const char*, std::pair<double, double>> cases[] = {
        {"reference", {18.6, 19.6}}, {"government", {74.0, 61.9}}, {"fast", {195.3, 118.5}}};
    for (const auto& [name, expected] : cases) {
        const auto& r = s.rollouts.at(name);
        const HeatSubsystem hs = build_heat_subsystem(s.heat, s.series, r, 6.0, yf);
        CHECK(hs.annual_heat() / 1e6 == doctest::Approx(expected.first).epsilon(0.005));
        CHECK(hs.thermal_capacity() / 1e3 == doctest::Approx(expected.second).epsilon(0.005));
        CHECK(hs.horizon_heat() == doctest::Approx(hs.annual_heat() * yf).epsilon(1e-12));
        CHECK(hs.storage_energy() == doctest::Approx(6.0 * hs.thermal_capacity()).epsilon(1e-12));
        // table shares already reproduce the aggregates within 1%
        CHECK(hs.share_scale == doctest::Approx(1.0).epsilon(0.01));
        double air = 0.0;
        for (const auto& u : hs.units) {
            if (u.kind == SourceKind::Air) air += u.capacity_th;
            CHECK(std::accumulate(u.demand.begin(), u.demand.end(), 0.0) == doctest::Approx(u.annual_heat * yf));
        }
        CHECK(air / hs.thermal_capacity() == doctest::Approx(0.8).epsilon(1e-9));
    }
}

TEST_CASE("doubling archetype shares doubles the unscaled heat") {
    Scenario s = fixtures::desk();
    const auto& r = s.rollouts.at("government");
    const double raw = r.yearly_heat / build_heat_subsystem(s.heat, s.series, r, 6.0, s.year_fraction()).share_scale;
    for (auto& a : s.heat.archetypes)
        for (auto& [name, sh] : a.shares) {
            sh.air *= 2.0;
            sh.ground *= 2.0;
        }
    const double doubled = r.yearly_heat / build_heat_subsystem(s.heat, s.series, r, 6.0, s.year_fraction()).share_scale;
    CHECK(doubled == doctest::Approx(2.0 * raw).epsilon(1e-12));
}

TEST_CASE("inflexible heat pumps need enough capacity") {
    Scenario s = fixtures::desk();
    RolloutSpec r = s.rollouts.at("government");
    r.thermal_capacity = 1000.0;
    CHECK_THROWS_AS(build_heat_subsystem(s.heat, s.series, r, 0.0, s.year_fraction()), Error);
}

TEST_CASE("EV scaling conserves energy") {
    const std::vector<double> flat(8760, 1.0 / 8760.0);
    const auto ev = scale_ev_profile(flat, 36e6);
    CHECK(ev[0] == doctest::Approx(4109.59).epsilon(1e-6));
    CHECK(std::accumulate(ev.begin(), ev.end(), 0.0) == doctest::Approx(36e6).epsilon(1e-12));

    const Scenario s = fixtures::desk();
    const PreparedDemand d = prepare_demand(s);
    CHECK(std::accumulate(d.ev_load.begin(), d.ev_load.end(), 0.0) ==
          doctest::Approx(36e6 * 336.0 / 8760.0).epsilon(1e-9));
    std::vector<double> bad(10, 0.11);
    CHECK_THROWS_AS(scale_ev_profile(bad, 1.0), Error);
}

TEST_CASE("hydrogen bookkeeping") {
    CHECK(h2_electricity_requirement(28e6, 0.71) / 1e6 == doctest::Approx(39.44).epsilon(0.01 / 39.44));
    CHECK(10e3 * 4000.0 * 0.71 / 1e6 == doctest::Approx(28.4).epsilon(0.1 / 28.4));
    const PreparedDemand d = prepare_demand(fixtures::desk());
    CHECK(d.h2_demand == doctest::Approx(28e6 * 336.0 / 8760.0));
    CHECK(d.h2_electricity == doctest::Approx(d.h2_demand / 0.71));
    Scenario s = fixtures::desk();
    s.policy.electrolysis_capacity = 100.0;
    CHECK_THROWS_AS(prepare_demand(s), Error);
}
