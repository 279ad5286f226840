#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "fixtures.hpp"
#include "gridplan/error.hpp"
#include "gridplan/model.hpp"
#include "gridplan/simplex.hpp"

using namespace gridplan;

namespace {

std::string family(const std::string& name) { return name.substr(0, name.find('[')); }

std::map<std::string, int> column_families(const LinearProgram& lp) {
    std::map<std::string, int> out;
    for (const auto& v : lp.variables()) ++out[family(v.name)];
    return out;
}

std::map<std::string, int> row_families(const LinearProgram& lp) {
    std::map<std::string, int> out;
    for (const auto& c : lp.constraints()) ++out[family(c.name)];
    return out;
}

// tiny scenario plus one heated archetype and a PV plant
const Scenario& desk168() {
    static const Scenario s = fixtures::truncate(fixtures::desk(), 168);
    return s;
}

}  // namespace

TEST_CASE("one zone, one technology, two hours") {
    const Scenario s = fixtures::tiny(2);
    const BuiltModel m = build_lp(s, prepare_demand(s));
    const auto cols = column_families(m.lp);
    const auto rows = row_families(m.lp);
    CHECK(cols.at("gen") == 2);
    CHECK(cols.at("inv") == 1);
    CHECK(cols.at("lost_load") == 2);
    CHECK(cols.size() == 3);
    CHECK(rows.at("balance") == 2);
    CHECK(rows.at("cap") == 2);
    CHECK(rows.size() == 2);
    const Solution sol = solve(m.lp);
    REQUIRE(sol.optimal());
    // 100 MW of gas, capacity cost over two hours plus fuel
    const double capex = (annuity_factor(0.04, 25) * 400 + 10) * 1000 * 2.0 / 8760.0;
    CHECK(sol.objective == doctest::Approx(100.0 * capex + 200.0 * 40.0).epsilon(1e-9));
}

TEST_CASE("desk model counts match the closed-form family counts") {
    ScenarioOverrides o;
    o.rollout = "government";
    o.ep_ratio_hours = 2;
    const Scenario s = apply_overrides(desk168(), o);
    const PreparedDemand d = prepare_demand(s);
    const BuiltModel m = build_lp(s, d);
    const long H = s.hours();

    // count from the scenario tables alone
    long cols = 0, rows = 0;
    for (const auto& z : s.zones)
        for (const auto& t : s.technologies) {
            const CapacityBound* b = s.find_bound(z.id, t.id);
            if (!b || t.kind == TechKind::Electrolysis) continue;
            const bool sto = t.kind == TechKind::Storage;
            if (b->max <= 0 && !(sto && b->energy_max > 0)) continue;
            const bool inv = b->min != b->max;
            const bool inv_e = sto && b->energy_min != b->energy_max;
            cols += inv + inv_e;
            switch (t.kind) {
                case TechKind::Thermal: cols += H; rows += inv ? H : 0; break;
                case TechKind::Reservoir: cols += H; rows += 1 + (inv ? H : 0); break;
                case TechKind::Renewable: cols += 2 * H; rows += H; break;
                case TechKind::Storage: cols += 3 * H; rows += H + (inv ? 2 * H : 0) + (inv_e ? H : 0); break;
                default: break;
            }
        }
    long links = 0;
    for (const auto& l : s.trade) links += l.ntc > 0;
    cols += 2 * links * H + static_cast<long>(s.zones.size()) * H;  // flows, lost load
    rows += static_cast<long>(s.zones.size()) * H;                     // balance
    cols += 2 * H;                                                       // h2_elec, h2_prod
    rows += H + 1;
    long units = 0;
    for (const auto& a : s.heat.archetypes) {
        const auto& sh = a.shares.at("government");
        units += (sh.air * a.annual_heat_demand > 0) + (sh.ground * a.annual_heat_demand > 0);
    }
    CHECK(units == 8);
    cols += units * 4 * H;
    rows += units * 2 * H;
    rows += 1;  // renewable share

    CHECK(m.lp.num_variables() == cols);
    CHECK(m.lp.num_constraints() == rows);
    // closed form for this dataset: 87 H + 17 columns, 51 H + 4 rows
    CHECK(cols == 87 * H + 17);
    CHECK(rows == 51 * H + 4);
    CHECK(d.heat.units.size() == 8);
    m.lp.validate();
}

TEST_CASE("no orphan rows or columns") {
    for (double ep : {0.0, 6.0}) {
        ScenarioOverrides o;
        o.ep_ratio_hours = ep;
        const Scenario s = apply_overrides(desk168(), o);
        const BuiltModel m = build_lp(s, prepare_demand(s));
        std::vector<int> uses(static_cast<std::size_t>(m.lp.num_variables()), 0);
        for (const auto& c : m.lp.constraints()) {
            CHECK_MESSAGE(!c.terms.empty(), c.name);
            for (const auto& t : c.terms) ++uses[static_cast<std::size_t>(t.column)];
        }
        int orphans = 0;
        for (std::size_t j = 0; j < uses.size(); ++j) orphans += uses[j] == 0;
        CHECK(orphans == 0);
    }
}

TEST_CASE("serve-all-load-with-lost-load point is feasible") {
    ScenarioOverrides o;
    o.rollout = "fast";
    o.ep_ratio_hours = 6;
    const Scenario s = apply_overrides(desk168(), o);
    const PreparedDemand d = prepare_demand(s);
    const BuiltModel m = build_lp(s, d);
    const ModelIndex& ix = m.index;
    const int H = s.hours();
    std::vector<double> x(static_cast<std::size_t>(m.lp.num_variables()), 0.0);
    auto set = [&](int col, double v) { x[static_cast<std::size_t>(col)] = v; };

    std::map<std::string, std::vector<double>> need;
    for (const auto& z : s.zones) need[z.id] = s.series.load.at(z.id);
    const double h2 = d.h2_electricity / H;
    for (int h = 0; h < H; ++h) {
        const auto k = static_cast<std::size_t>(h);
        need["DE"][k] += d.ev_load[k] + h2;
        set(ix.h2_elec[k], h2);
        set(ix.h2_prod[k], h2 * s.policy.h2_conversion);
    }
    for (std::size_t u = 0; u < ix.heat.size(); ++u) {
        const HeatUnit& unit = d.heat.units[u];
        for (int h = 0; h < H; ++h) {
            const auto k = static_cast<std::size_t>(h);
            set(ix.heat[u].heat_out[k], unit.demand[k]);
            set(ix.heat[u].out[k], unit.demand[k]);
            set(ix.heat[u].elec[k], unit.demand[k] / unit.cop[k]);
            need["DE"][k] += unit.demand[k] / unit.cop[k];
        }
    }
    // renewables at their upper bound (PV at 1 TW), fixed thermal flat out
    std::map<std::string, std::vector<double>> surplus;
    for (const auto& z : s.zones) surplus[z.id].assign(static_cast<std::size_t>(H), 0.0);
    for (const auto& a : ix.assets) {
        const Technology& t = s.technology(a.tech);
        const CapacityBound& b = *s.find_bound(a.zone, a.tech);
        if (a.kind == TechKind::Renewable) {
            const double cap = std::isinf(b.max) ? 1e6 : b.max;
            if (a.inv >= 0) set(a.inv, cap - b.min);
            const auto& cf = s.series.capacity_factor.at(a.zone + "." + a.tech);
            for (int h = 0; h < H; ++h) {
                const auto k = static_cast<std::size_t>(h);
                const double avail = t.availability * cf[k] * cap;
                const double g = std::min(avail, need[a.zone][k]);
                need[a.zone][k] -= g;
                surplus[a.zone][k] += avail - g;
                set(a.gen[k], g);
                set(a.curtail[k], avail - g);
            }
        } else if (a.kind == TechKind::Thermal && a.inv < 0) {
            for (int h = 0; h < H; ++h) {
                const auto k = static_cast<std::size_t>(h);
                const double g = std::min(t.availability * b.min, need[a.zone][k]);
                need[a.zone][k] -= g;
                set(a.gen[k], g);
            }
        }
    }
    // shift focal surplus through a battery into deficit hours
    const ModelIndex::Asset& bat = *ix.find_asset("DE", "battery");
    const Technology& bt = s.technology("battery");
    const double loop = bt.efficiency_charge * bt.efficiency;
    double total_surplus = 0.0, total_deficit = 0.0;
    for (int h = 0; h < H; ++h) {
        total_surplus += surplus["DE"][static_cast<std::size_t>(h)];
        total_deficit += need["DE"][static_cast<std::size_t>(h)];
    }
    const double alpha = std::min(1.0, total_deficit / (loop * total_surplus));
    const double beta = alpha * loop * total_surplus / total_deficit;
    std::vector<double> level(static_cast<std::size_t>(H));
    double lvl = 0.0, low = 0.0, high = 0.0, power = 0.0;
    for (int h = 0; h < H; ++h) {
        const auto k = static_cast<std::size_t>(h);
        double ch = alpha * surplus["DE"][k];
        const double dis = beta * need["DE"][k];
        set(bat.charge[k], ch);
        set(bat.gen[k], dis);
        need["DE"][k] -= dis;
        power = std::max({power, ch, dis});
        lvl += bt.efficiency_charge * ch - dis / bt.efficiency;
        level[k] = lvl;
        low = std::min(low, lvl);
        high = std::max(high, lvl);
        for (const auto& a : ix.assets) {
            if (a.zone != "DE" || a.kind != TechKind::Renewable || ch <= 0.0) continue;
            const double move = std::min(ch, x[static_cast<std::size_t>(a.curtail[k])]);
            x[static_cast<std::size_t>(a.curtail[k])] -= move;
            x[static_cast<std::size_t>(a.gen[k])] += move;
            ch -= move;
        }
    }
    for (int h = 0; h < H; ++h) set(bat.level[static_cast<std::size_t>(h)], level[static_cast<std::size_t>(h)] - low);
    set(bat.inv, power / bt.availability);
    set(bat.inv_energy, high - low);
    for (const auto& [zone, cols] : ix.lost_load)
        for (int h = 0; h < H; ++h) set(cols[static_cast<std::size_t>(h)], need[zone][static_cast<std::size_t>(h)]);

    CHECK(m.lp.max_violation(x) <= 1e-6);
}

TEST_CASE("inflexible heat pumps follow demand exactly") {
    const Scenario s = fixtures::tiny_heated(48, 0.0);
    const PreparedDemand d = prepare_demand(s);
    const BuiltModel m = build_lp(s, d);
    const auto cols = column_families(m.lp);
    CHECK(cols.count("hstor_level") == 0);
    CHECK(cols.count("hstor_out") == 0);
    CHECK(row_families(m.lp).at("heat_bal") == 2 * 48);
    const Solution sol = solve(m.lp);
    INFO(sol.message);
    REQUIRE(sol.optimal());
    for (std::size_t u = 0; u < d.heat.units.size(); ++u)
        for (std::size_t h = 0; h < 48; ++h) {
            const double expect = d.heat.units[u].demand[h] / d.heat.units[u].cop[h];
            CHECK(sol.primal[static_cast<std::size_t>(m.index.heat[u].elec[h])] == doctest::Approx(expect).epsilon(1e-7));
        }
}

TEST_CASE("heat storage relaxes the problem") {
    double prev = kInfinity;
    for (double ep : {0.0, 2.0, 6.0, 24.0}) {
        const Scenario s = fixtures::tiny_heated(48, ep);
        const Solution sol = solve(build_lp(s, prepare_demand(s)).lp);
        REQUIRE(sol.optimal());
        CHECK(sol.objective <= prev * (1 + 1e-9));
        prev = sol.objective;
    }
}

TEST_CASE("objective scales linearly with costs") {
    const Scenario s = fixtures::tiny_heated(48, 6.0);
    const BuiltModel m = build_lp(s, prepare_demand(s));
    LinearProgram scaled = m.lp;
    const double c = 3.7;
    for (int j = 0; j < scaled.num_variables(); ++j) scaled.variable(j).cost *= c;
    scaled.set_objective_offset(m.lp.objective_offset() * c);
    const Solution a = solve(m.lp);
    const Solution b = solve(scaled);
    REQUIRE(a.optimal());
    REQUIRE(b.optimal());
    CHECK(b.objective / a.objective == doctest::Approx(c).epsilon(1e-9));
}

TEST_CASE("renewable share holds at the optimum with additionality") {
    const Scenario s = fixtures::tiny_heated(48, 2.0);
    const PreparedDemand d = prepare_demand(s);
    const BuiltModel m = build_lp(s, d);
    const Solution sol = solve(m.lp);
    REQUIRE(sol.optimal());
    double res = 0.0, base = 0.0, hp = 0.0;
    for (const auto& a : m.index.assets)
        if (s.technology(a.tech).counts_as_res)
            for (int g : a.gen) res += sol.primal[static_cast<std::size_t>(g)];
    for (double l : s.series.load.at("Z")) base += l;
    for (const auto& u : m.index.heat)
        for (int e : u.elec) hp += sol.primal[static_cast<std::size_t>(e)];
    CHECK(hp > 0.0);
    CHECK(res - (0.3 * base + hp) >= -1e-6 * base);
}

TEST_CASE("rollout delta swaps the heat subsystem only") {
    const Scenario ref = fixtures::desk(ScenarioOverrides{.rollout = std::string("reference")});
    const Scenario same = apply_rollout_delta(ref, ref.rollouts.at("reference"));
    CHECK(same == ref);

    const Scenario gov = apply_rollout_delta(ref, ref.rollouts.at("government"));
    CHECK(prepare_demand(ref).heat.annual_heat() / 1e6 == doctest::Approx(18.6).epsilon(0.005));
    CHECK(prepare_demand(gov).heat.annual_heat() / 1e6 == doctest::Approx(74.0).epsilon(0.005));
    Scenario back = gov;
    back.rollout = ref.rollout;
    CHECK(back == ref);

    const Scenario fast = apply_rollout_delta(ref, ref.rollouts.at("fast"));
    CHECK(prepare_demand(fast).heat.thermal_capacity() / 1e3 == doctest::Approx(118.5).epsilon(0.005));
}

TEST_CASE("mismatched demand is rejected") {
    const Scenario s = desk168();
    PreparedDemand d = prepare_demand(s);
    d.ev_load.pop_back();
    try {
        build_lp(s, d);
        FAIL("expected ModelAssemblyError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ModelAssemblyError);
    }
    ScenarioOverrides o;
    o.ep_ratio_hours = 24;
    CHECK_THROWS_AS(build_lp(apply_overrides(s, o), prepare_demand(s)), Error);
}
