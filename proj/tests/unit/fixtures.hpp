#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include "gridplan/linear_program.hpp"
#include "gridplan/scenario.hpp"

namespace fixtures {

inline std::filesystem::path desk_config() { return std::filesystem::path(GRIDPLAN_DATA_DIR) / "desk-europe" / "desk.yaml"; }

inline gridplan::Scenario desk(const gridplan::ScenarioOverrides& o = {}) { return gridplan::load_scenario(desk_config(), o); }

// first `hours` hours of every series; the EV profile is renormalized
inline gridplan::Scenario truncate(gridplan::Scenario s, int hours) {
    const auto n = static_cast<std::size_t>(hours);
    auto cut = [&](std::vector<double>& v) { v.resize(n); };
    for (auto& [k, v] : s.series.load) cut(v);
    for (auto& [k, v] : s.series.capacity_factor) cut(v);
    for (auto& [k, v] : s.series.hydro_inflow) cut(v);
    for (auto& [k, v] : s.series.heat_demand) cut(v);
    cut(s.series.temperature);
    cut(s.series.ev_profile);
    double sum = 0.0;
    for (double x : s.series.ev_profile) sum += x;
    for (double& x : s.series.ev_profile) x /= sum;
    sum = 0.0;
    for (std::size_t h = 0; h + 1 < n; ++h) sum += s.series.ev_profile[h];
    s.series.ev_profile[n - 1] = 1.0 - sum;
    s.series.hours = hours;
    gridplan::validate(s);
    return s;
}

// one zone "Z", flat 100 MW load, a gas plant "gas" with free investment
inline gridplan::Scenario tiny(int hours) {
    using namespace gridplan;
    Scenario s;
    s.name = "tiny";
    s.zones = {Zone{"Z", true}};
    Technology gas;
    gas.id = "gas";
    gas.overnight_cost = 400;
    gas.fixed_om = 10;
    gas.lifetime = 25;
    gas.interest_rate = 0.04;
    gas.efficiency = 0.5;
    gas.fuel_cost = 20;
    s.technologies = {gas};
    s.bounds = {CapacityBound{"Z", "gas", 0.0, kInfinity, 0.0, 0.0}};
    const auto n = static_cast<std::size_t>(hours);
    s.series.hours = hours;
    s.series.load["Z"] = std::vector<double>(n, 100.0);
    s.series.ev_profile = std::vector<double>(n, 1.0 / hours);
    s.series.temperature = std::vector<double>(n, 5.0);
    RolloutSpec r;
    r.name = "none";
    r.thermal_capacity = 1.0;
    s.rollouts[r.name] = r;
    s.rollout = r.name;
    s.policy.res_share_target = 0.0;
    s.policy.ep_ratio_hours = 0.0;
    validate(s);
    return s;
}

// tiny plus free PV and one archetype "house" under rollout "hp"
inline gridplan::Scenario tiny_heated(int hours, double ep) {
    using namespace gridplan;
    Scenario s = tiny(hours);
    s.hours_per_year = hours;
    Technology pv;
    pv.id = "pv";
    pv.kind = TechKind::Renewable;
    pv.overnight_cost = 400;
    pv.lifetime = 25;
    pv.interest_rate = 0.04;
    pv.counts_as_res = true;
    s.technologies.push_back(pv);
    s.bounds.push_back(CapacityBound{"Z", "pv", 0.0, kInfinity, 0.0, 0.0});
    std::vector<double> cf(static_cast<std::size_t>(hours)), heat(cf.size()), temp(cf.size());
    for (int h = 0; h < hours; ++h) {
        const auto k = static_cast<std::size_t>(h);
        cf[k] = std::max(0.0, std::sin(3.14159265 * (h % 24 - 6) / 12.0)) * 0.6;
        heat[k] = 1.0 + 0.5 * std::cos(6.2831853 * h / 24.0);
        temp[k] = 2.0 + 4.0 * std::sin(6.2831853 * (h - 9) / 24.0);
    }
    s.series.capacity_factor["Z.pv"] = cf;
    s.series.heat_demand["house"] = heat;
    s.series.temperature = temp;
    Archetype a;
    a.id = "house";
    a.annual_heat_demand = 2000.0;
    RolloutSpec r;
    r.name = "hp";
    r.thermal_capacity = 60.0;
    r.yearly_heat = 500.0;
    a.shares["hp"] = ArchetypeShare{0.2, 0.05};
    a.shares["none"] = ArchetypeShare{0.0, 0.0};
    s.heat.archetypes = {a};
    s.rollouts[r.name] = r;
    s.rollout = "hp";
    s.policy.ep_ratio_hours = ep;
    s.policy.res_share_target = 0.3;
    validate(s);
    return s;
}

}  // namespace fixtures
