#include "gridplan/post.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "gridplan/error.hpp"

namespace gridplan {

namespace {

constexpr double kTera = 1e6;  // MWh per TWh
constexpr double kBillion = 1e9;

const Technology* gas_tech(const Scenario& s, const std::string& id) {
    const Technology* t = s.find_technology(id);
    return t && t->gas_fired && t->kind == TechKind::Thermal ? t : nullptr;
}

}  // namespace

double SolvedRun::value(int column) const {
    if (column < 0) return 0.0;
    return solution.primal.at(static_cast<std::size_t>(column));
}

double SolvedRun::sum(const std::vector<int>& columns) const {
    double total = 0.0;
    for (int c : columns) total += value(c);
    return total;
}

SolvedRun solve_scenario(const Scenario& scenario, const SolveOptions& options) {
    SolvedRun run;
    run.scenario = scenario;
    run.demand = prepare_demand(scenario);
    BuiltModel m = build_lp(scenario, run.demand);
    run.solution = solve(m.lp, options);
    run.index = std::move(m.index);
    run.lp = std::move(m.lp);
    return run;
}

void validate(const SavingsParams& p) {
    auto positive = [](double v, const char* field) {
        if (!(v > 0.0)) throw Error(ErrorKind::InvariantViolation, std::string(field) + " must be positive");
    };
    positive(p.boiler_efficiency, "boiler_efficiency");
    positive(p.hp_lifetime, "hp_lifetime");
    positive(p.emission_factor, "emission_factor");
    positive(p.cost_air_hp, "cost_air_hp");
    positive(p.cost_ground_hp, "cost_ground_hp");
    positive(p.cost_gas_boiler, "cost_gas_boiler");
    if (p.interest_rate < 0.0) throw Error(ErrorKind::InvariantViolation, "interest_rate must not be negative");
    if (p.boiler_efficiency > 1.0) throw Error(ErrorKind::InvariantViolation, "boiler_efficiency above 1");
    for (const auto& [tech, eff] : p.gas_efficiency) {
        if (!(eff > 0.0) || eff > 1.0) throw Error(ErrorKind::InvariantViolation, "gas efficiency of " + tech + " outside (0, 1]");
    }
}

SavingsInputs savings_inputs(const SolvedRun& run) {
    const Scenario& s = run.scenario;
    const double yf = s.year_fraction();
    SavingsInputs in;
    in.hp_heat = run.demand.heat.annual_heat();
    for (const auto& u : run.demand.heat.units) {
        (u.kind == SourceKind::Air ? in.hp_capacity_air : in.hp_capacity_ground) += u.capacity_th;
    }
    for (const auto& a : run.index.assets) {
        if (a.zone != run.index.focal_zone) continue;
        const Technology* t = gas_tech(s, a.tech);
        if (!t) continue;
        in.gas_generation[a.tech] += run.sum(a.gen) / yf;
        in.gas_tech_efficiency[a.tech] = t->efficiency;
    }
    in.power_cost = run.solution.objective / yf;
    in.gas_price = s.policy.gas_price;
    in.carbon_price = s.policy.carbon_price;
    return in;
}

SavingsReport gas_emission_savings(const SavingsInputs& ref, const SavingsInputs& roll, const SavingsParams& p) {
    validate(p);
    if (ref.gas_price != roll.gas_price || ref.carbon_price != roll.carbon_price) {
        throw Error(ErrorKind::MismatchedScenarios, "gas or carbon price differs between the runs");
    }
    SavingsReport r;
    const double dheat = roll.hp_heat - ref.hp_heat;
    r.heat = dheat / kTera;
    const double displaced = -dheat / p.boiler_efficiency;  // MWh_th
    r.gas_displaced = displaced / kTera;

    std::map<std::string, double> eff = ref.gas_tech_efficiency;
    for (const auto& [k, v] : roll.gas_tech_efficiency) eff[k] = v;
    for (const auto& [k, v] : p.gas_efficiency) {
        if (eff.count(k)) eff[k] = v;
    }
    double gas_el = 0.0;
    for (const auto& [tech, e] : eff) {
        auto get = [&](const SavingsInputs& in) {
            const auto it = in.gas_generation.find(tech);
            return it == in.gas_generation.end() ? 0.0 : it->second;
        };
        const double dgen = get(roll) - get(ref);
        r.gas_generation[tech] = dgen / kTera;
        gas_el += dgen / e;
    }
    r.gas_electricity = gas_el / kTera;
    r.total_gas = r.gas_displaced + r.gas_electricity;
    r.emissions = p.emission_factor * r.total_gas;

    const double annuity = annuity_factor(p.interest_rate, p.hp_lifetime) * 1000.0;  // per MW
    const double dair = roll.hp_capacity_air - ref.hp_capacity_air;
    const double dground = roll.hp_capacity_ground - ref.hp_capacity_ground;
    r.power_cost = (roll.power_cost - ref.power_cost) / kBillion;
    r.hp_annuity = (dair * p.cost_air_hp + dground * p.cost_ground_hp) * annuity / kBillion;
    r.boiler_annuity = p.boiler_replacement_counted ? (dair + dground) * p.cost_gas_boiler * annuity / kBillion : 0.0;
    r.fuel_avoided = -displaced * ref.gas_price / kBillion;
    r.carbon_avoided = -displaced * p.emission_factor * ref.carbon_price / kBillion;
    r.system_cost = r.power_cost + r.hp_annuity - r.boiler_annuity - r.fuel_avoided - r.carbon_avoided;
    return r;
}

SavingsReport gas_emission_savings(const SolvedRun& ref, const SolvedRun& roll, const SavingsParams& p) {
    Scenario a = ref.scenario;
    Scenario b = roll.scenario;
    a.rollout.clear();
    b.rollout.clear();
    a.name.clear();
    b.name.clear();
    if (!(a == b)) throw Error(ErrorKind::MismatchedScenarios, "runs differ in more than the heat-pump rollout");
    return gas_emission_savings(savings_inputs(ref), savings_inputs(roll), p);
}

double break_even_storage_cost(double cost_no_storage, double cost_with, double storage_energy, double rate,
                               double lifetime) {
    if (!(storage_energy > 0.0)) throw Error(ErrorKind::DomainError, "storage energy must be positive");
    return (cost_no_storage - cost_with) / storage_energy / annuity_factor(rate, lifetime);
}

double additional_cost_per_heat(double delta_cost, double delta_heat) {
    if (!(delta_heat > 0.0)) throw Error(ErrorKind::DomainError, "additional heat must be positive");
    return 100.0 * delta_cost / delta_heat;
}

double ResidualLoad::peak(const std::string& zone) const {
    const auto& v = duration.at(zone);
    return v.empty() ? 0.0 : v.front();
}

std::vector<double> duration_curve(std::vector<double> hourly) {
    std::sort(hourly.begin(), hourly.end(), std::greater<>());
    return hourly;
}

ResidualLoad residual_load_series(const SolvedRun& run) {
    const Scenario& s = run.scenario;
    const ModelIndex& ix = run.index;
    const auto H = static_cast<std::size_t>(ix.hours);
    ResidualLoad r;
    for (const auto& z : s.zones) {
        std::vector<double> v(s.series.load.at(z.id).begin(), s.series.load.at(z.id).begin() + static_cast<long>(H));
        if (z.id == ix.focal_zone) {
            for (std::size_t h = 0; h < H; ++h) {
                v[h] += run.demand.ev_load[h];
                if (!ix.h2_elec.empty()) v[h] += run.value(ix.h2_elec[h]);
                for (const auto& hc : ix.heat) v[h] += run.value(hc.elec[h]);
            }
        }
        for (const auto& a : ix.assets) {
            if (a.zone != z.id || a.kind != TechKind::Renewable) continue;
            for (std::size_t h = 0; h < H; ++h) v[h] -= run.value(a.gen[h]);
        }
        r.duration[z.id] = duration_curve(v);
        r.hourly[z.id] = std::move(v);
    }
    return r;
}

HpReport hp_operation_report(const SolvedRun& run) {
    const ModelIndex& ix = run.index;
    const auto H = static_cast<std::size_t>(ix.hours);
    const auto& units = run.demand.heat.units;
    if (units.size() != ix.heat.size()) throw Error(ErrorKind::ModelAssemblyError, "heat units do not match the model");
    HpReport r;
    r.total.unit = "total";
    r.total.elec.assign(H, 0.0);
    r.total.heat_out.assign(H, 0.0);
    r.total.demand.assign(H, 0.0);
    const bool stored = !ix.heat.empty() && !ix.heat.front().level.empty();
    if (stored) r.total.level.assign(H, 0.0);
    for (std::size_t k = 0; k < units.size(); ++k) {
        const auto& hc = ix.heat[k];
        HpSeries u;
        u.unit = hc.unit;
        u.demand = units[k].demand;
        for (std::size_t h = 0; h < H; ++h) {
            u.elec.push_back(run.value(hc.elec[h]));
            u.heat_out.push_back(run.value(hc.heat_out[h]));
            if (stored) u.level.push_back(run.value(hc.level[h]));
            r.total.elec[h] += u.elec[h];
            r.total.heat_out[h] += u.heat_out[h];
            r.total.demand[h] += u.demand[h];
            if (stored) r.total.level[h] += u.level[h];
        }
        r.units.push_back(std::move(u));
    }
    return r;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw Error(ErrorKind::LengthMismatch, "correlation needs two equal series");
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

double storage_cycle_residual(const SolvedRun& run) {
    const Scenario& s = run.scenario;
    const ModelIndex& ix = run.index;
    double worst = 0.0;
    for (const auto& a : ix.assets) {
        if (a.kind != TechKind::Storage || a.level.empty()) continue;
        const Technology& t = s.technology(a.tech);
        const double before = run.value(a.level.front()) - t.efficiency_charge * run.value(a.charge.front()) +
                              run.value(a.gen.front()) / t.efficiency;
        worst = std::max(worst, std::abs(before - run.value(a.level.back())));
    }
    const double keep = 1.0 - s.heat.standing_loss;
    for (const auto& hc : ix.heat) {
        if (hc.level.empty()) continue;
        const double before = (run.value(hc.level.front()) - run.value(hc.heat_out.front()) + run.value(hc.out.front())) / keep;
        worst = std::max(worst, std::abs(before - run.value(hc.level.back())));
    }
    return worst;
}

double max_balance_residual(const SolvedRun& run) {
    const Scenario& s = run.scenario;
    double worst = 0.0;
    for (const auto& [zone, rows] : run.index.balance_rows) {
        const auto& load = s.series.load.at(zone);
        for (std::size_t h = 0; h < rows.size(); ++h) {
            double rhs = load[h];
            if (zone == run.index.focal_zone) rhs += run.demand.ev_load[h];
            worst = std::max(worst, std::abs(run.solution.row_activity.at(static_cast<std::size_t>(rows[h])) - rhs));
        }
    }
    return worst;
}

double res_share_slack(const SolvedRun& run) {
    if (run.index.res_share_row < 0) return 0.0;
    return run.solution.row_activity.at(static_cast<std::size_t>(run.index.res_share_row)) - run.index.res_share_rhs;
}

TechTotals tech_totals(const SolvedRun& run) {
    TechTotals t;
    for (const auto& a : run.index.assets) {
        const std::string key = a.zone + "." + a.tech;
        t.capacity[key] = a.capacity_min + run.value(a.inv);
        t.dispatch[key] = run.sum(a.gen);
    }
    return t;
}

}  // namespace gridplan
