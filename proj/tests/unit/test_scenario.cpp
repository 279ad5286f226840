#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "fixtures.hpp"
#include "gridplan/error.hpp"
#include "gridplan/scenario.hpp"

using namespace gridplan;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("gridplan_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no exception");
    return ErrorKind::InvariantViolation;
}

}  // namespace

TEST_CASE("desk config loads with the baseline values") {
    const Scenario s = fixtures::desk();
    CHECK(s.hours() == 336);
    CHECK(s.zones.size() == 3);
    CHECK(s.technologies.size() == 12);
    CHECK(s.focal_zone().id == "DE");
    CHECK(s.policy.ep_ratio_hours == 2.0);
    CHECK(s.policy.gas_price == 50.0);
    CHECK(s.policy.carbon_price == 130.0);
    CHECK(s.rollouts.size() == 4);
    // GW in the file, MW inside
    CHECK(s.find_bound("DE", "wind_onshore")->max == doctest::Approx(115000.0));
    CHECK(s.policy.h2_demand == doctest::Approx(28e6));
}

TEST_CASE("renewable drought zeroes week two in every zone") {
    const Scenario base = fixtures::desk();
    ScenarioOverrides o;
    o.re_drought_week = 2;
    const Scenario s = fixtures::desk(o);
    for (const auto& [key, cf] : s.series.capacity_factor) {
        const auto& orig = base.series.capacity_factor.at(key);
        for (int h = 0; h < 336; ++h) {
            if (h >= 168) {
                CHECK(cf[static_cast<std::size_t>(h)] == 0.0);
            } else {
                CHECK(cf[static_cast<std::size_t>(h)] == orig[static_cast<std::size_t>(h)]);
            }
        }
    }
    CHECK(s.series.load == base.series.load);
}

TEST_CASE("coal phase-out and wind cap overrides touch only the focal zone") {
    ScenarioOverrides o;
    o.coal_phase_out = true;
    o.wind_cap_removed = true;
    const Scenario s = fixtures::desk(o);
    const Scenario base = fixtures::desk();
    CHECK(s.find_bound("DE", "lignite")->max == 0.0);
    CHECK(s.find_bound("DE", "hard_coal")->max == 0.0);
    CHECK(std::isinf(s.find_bound("DE", "wind_onshore")->max));
    CHECK(std::isinf(s.find_bound("DE", "wind_offshore")->max));
    CHECK(*s.find_bound("PL", "lignite") == *base.find_bound("PL", "lignite"));
    CHECK(*s.find_bound("DK", "wind_onshore") == *base.find_bound("DK", "wind_onshore"));
    CHECK(*s.find_bound("DE", "ccgt") == *base.find_bound("DE", "ccgt"));
}

TEST_CASE("save and reload reproduces the scenario") {
    ScenarioOverrides o;
    o.ep_ratio_hours = 24;
    o.rollout = "fast";
    const Scenario s = fixtures::desk(o);
    const fs::path dir = scratch_dir("roundtrip");
    save_scenario(s, dir);
    const Scenario back = load_scenario(dir / "scenario.yaml");
    CHECK(back == s);
}

TEST_CASE("short series raises LengthMismatch") {
    const fs::path dir = scratch_dir("short");
    save_scenario(fixtures::desk(), dir);
    std::ifstream in(dir / "load.csv");
    REQUIRE(in.good());
    std::string all, line;
    int n = 0;
    while (std::getline(in, line) && n < 200) {
        all += line + "\n";
        ++n;
    }
    in.close();
    std::ofstream(dir / "load.csv") << all;
    CHECK(kind_of([&] { load_scenario(dir / "scenario.yaml"); }) == ErrorKind::LengthMismatch);

    Scenario s = fixtures::desk();
    s.series.temperature.pop_back();
    CHECK(kind_of([&] { validate(s); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("validation rejects broken invariants") {
    Scenario s = fixtures::desk();
    s.series.capacity_factor.at("DE.solar_pv")[5] = 1.5;
    CHECK(kind_of([&] { validate(s); }) == ErrorKind::InvariantViolation);

    s = fixtures::desk();
    s.bounds[0].min = s.bounds[0].max + 1.0;
    CHECK_THROWS_AS(validate(s), Error);

    s = fixtures::desk();
    s.rollout = "unknown";
    CHECK_THROWS_AS(validate(s), Error);

    CHECK(kind_of([] { load_scenario("/nonexistent/desk.yaml"); }) != ErrorKind::LengthMismatch);
}

TEST_CASE("annuity factor") {
    // r (1+r)^L / ((1+r)^L - 1), evaluated independently
    auto oracle = [](double r, double l) { return r * std::pow(1 + r, l) / (std::pow(1 + r, l) - 1); };
    CHECK(annuity_factor(0.04, 20) == doctest::Approx(0.0735818).epsilon(1e-6));
    CHECK(annuity_factor(0.0, 20) == doctest::Approx(0.05));
    CHECK(850.0 * annuity_factor(0.04, 20) == doctest::Approx(62.54).epsilon(1e-4));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> rate(0.001, 0.15), life(1.0, 80.0);
    for (int k = 0; k < 200; ++k) {
        const double r = rate(rng), l = life(rng);
        CHECK(annuity_factor(r, l) == doctest::Approx(oracle(r, l)).epsilon(1e-12));
        CHECK(annuity_factor(r * 1.1, l) > annuity_factor(r, l));
        CHECK(annuity_factor(r, l + 1.0) < annuity_factor(r, l));
    }
    CHECK(kind_of([] { annuity_factor(0.04, 0.5); }) == ErrorKind::DomainError);
    CHECK(kind_of([] { annuity_factor(-0.01, 20); }) == ErrorKind::DomainError);
}

TEST_CASE("marginal cost from fuel, carbon and efficiency") {
    const Scenario s = fixtures::desk();
    CHECK(marginal_cost(s.technology("ccgt"), s.policy) == doctest::Approx((50.0 + 0.2 * 130.0) / 0.542));
    CHECK(marginal_cost(s.technology("ccgt"), s.policy) == doctest::Approx(140.22).epsilon(1e-4));
    CHECK(marginal_cost(s.technology("wind_onshore"), s.policy) == 0.0);
    CHECK(marginal_cost(s.technology("lignite"), s.policy) == doctest::Approx(151.32).epsilon(1e-4));
    PolicySettings p = s.policy;
    p.gas_price = 100.0;
    CHECK(marginal_cost(s.technology("ocgt"), p) == doctest::Approx((100.0 + 26.0) / 0.4));
    Technology broken = s.technology("ccgt");
    broken.efficiency = 0.0;
    CHECK(kind_of([&] { marginal_cost(broken, p); }) == ErrorKind::DomainError);
}

TEST_CASE("overrides describe themselves") {
    ScenarioOverrides o;
    CHECK(o.empty());
    o.ep_ratio_hours = 6;
    o.rollout = "fast";
    CHECK_FALSE(o.empty());
    const std::string d = o.describe();
    CHECK(d.find("fast") != std::string::npos);
    CHECK(d.find('6') != std::string::npos);
}
