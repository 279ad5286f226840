#include "gridplan/model.hpp"

#include <cmath>

#include "gridplan/error.hpp"

namespace gridplan {

namespace {

constexpr double kInf = kInfinity;

std::string name(const std::string& symbol, std::initializer_list<std::string> keys) {
    std::string out = symbol + "[";
    bool first = true;
    for (const auto& k : keys) {
        if (!first) out += ',';
        out += k;
        first = false;
    }
    return out + "]";
}

std::string hour_label(int h) { return std::to_string(h + 1); }

}  // namespace

const ModelIndex::Asset* ModelIndex::find_asset(const std::string& zone, const std::string& tech) const {
    for (const auto& a : assets)
        if (a.zone == zone && a.tech == tech) return &a;
    return nullptr;
}

double capacity_cost(const Technology& tech, double year_fraction, bool energy) {
    const double af = annuity_factor(tech.interest_rate, tech.lifetime);
    const double per_kw = energy ? af * tech.overnight_cost_energy : af * tech.overnight_cost + tech.fixed_om;
    return per_kw * 1000.0 * year_fraction;
}

Scenario apply_rollout_delta(const Scenario& base, const RolloutSpec& rollout) {
    Scenario s = base;
    s.rollouts[rollout.name] = rollout;
    s.rollout = rollout.name;
    validate(s);
    return s;
}

BuiltModel build_lp(const Scenario& s, const PreparedDemand& demand) {
    const int H = s.hours();
    if (static_cast<int>(demand.ev_load.size()) != H) {
        throw Error(ErrorKind::ModelAssemblyError, "EV load has " + std::to_string(demand.ev_load.size()) +
                                                       " hours, scenario horizon is " + std::to_string(H));
    }
    for (const auto& u : demand.heat.units) {
        if (static_cast<int>(u.demand.size()) != H || static_cast<int>(u.cop.size()) != H) {
            throw Error(ErrorKind::ModelAssemblyError, "heat unit " + u.id() + " does not match the horizon");
        }
    }
    if (demand.heat.rollout != s.rollout || demand.heat.ep_ratio != s.policy.ep_ratio_hours) {
        throw Error(ErrorKind::ModelAssemblyError, "prepared demand belongs to rollout " + demand.heat.rollout +
                                                       " / ep " + format_number(demand.heat.ep_ratio) +
                                                       ", scenario has " + s.rollout + " / ep " +
                                                       format_number(s.policy.ep_ratio_hours));
    }

    BuiltModel m;
    LinearProgram& lp = m.lp;
    ModelIndex& ix = m.index;
    ix.hours = H;
    ix.focal_zone = s.focal_zone().id;
    const std::string& focal = ix.focal_zone;
    const double yf = s.year_fraction();
    const auto hz = static_cast<std::size_t>(H);
    double offset = 0.0;

    // per-zone, per-hour terms of the energy balance
    std::map<std::string, std::vector<std::vector<Term>>> balance;
    for (const auto& z : s.zones) balance[z.id].resize(hz);
    std::vector<Term> res_terms;

    for (const auto& z : s.zones) {
        for (const auto& t : s.technologies) {
            if (t.kind == TechKind::Electrolysis) continue;
            const CapacityBound* b = s.find_bound(z.id, t.id);
            if (!b) continue;
            const bool storage = t.kind == TechKind::Storage;
            if (b->max <= 0.0 && (!storage || b->energy_max <= 0.0)) continue;

            ModelIndex::Asset a;
            a.zone = z.id;
            a.tech = t.id;
            a.kind = t.kind;
            a.capacity_min = b->min;
            a.energy_min = b->energy_min;
            offset += t.fixed_om * 1000.0 * yf * b->min;
            if (!b->fixed()) {
                a.inv = lp.add_variable(name("inv", {z.id, t.id}), 0.0, b->max - b->min, capacity_cost(t, yf, false));
            }
            if (storage && !b->energy_fixed()) {
                a.inv_energy = lp.add_variable(name("inv_energy", {z.id, t.id}), 0.0, b->energy_max - b->energy_min,
                                               capacity_cost(t, yf, true));
            }
            const double avail = t.availability;

            if (t.kind == TechKind::Thermal || t.kind == TechKind::Reservoir) {
                const double mc = marginal_cost(t, s.policy);
                const double ub = a.inv < 0 ? avail * b->min : kInf;
                std::vector<Term> budget;
                for (int h = 0; h < H; ++h) {
                    const int g = lp.add_variable(name("gen", {z.id, t.id, hour_label(h)}), 0.0, ub, mc);
                    a.gen.push_back(g);
                    balance[z.id][static_cast<std::size_t>(h)].push_back({g, 1.0});
                    if (a.inv >= 0) {
                        lp.add_constraint(name("cap", {z.id, t.id, hour_label(h)}), Sense::LessEqual, avail * b->min,
                                          {{g, 1.0}, {a.inv, -avail}});
                    }
                    if (z.id == focal && t.counts_as_res) res_terms.push_back({g, 1.0});
                    budget.push_back({g, 1.0});
                }
                if (t.kind == TechKind::Reservoir) {
                    double inflow = 0.0;
                    for (double v : s.series.hydro_inflow.at(z.id)) inflow += v;
                    lp.add_constraint(name("reservoir_budget", {z.id, t.id}), Sense::LessEqual, inflow, budget);
                }
                if (t.kind == TechKind::Thermal && t.counts_as_res && s.policy.bio_energy_budget) {
                    lp.add_constraint(name("bio_budget", {z.id, t.id}), Sense::LessEqual, *s.policy.bio_energy_budget * yf,
                                      budget);
                }
            } else if (t.kind == TechKind::Renewable) {
                const auto& cf = s.series.capacity_factor.at(z.id + "." + t.id);
                for (int h = 0; h < H; ++h) {
                    const double f = avail * cf[static_cast<std::size_t>(h)];
                    const int g = lp.add_variable(name("gen", {z.id, t.id, hour_label(h)}), 0.0, kInf, 0.0);
                    const int c = lp.add_variable(name("curtail", {z.id, t.id, hour_label(h)}), 0.0, kInf, 0.0);
                    a.gen.push_back(g);
                    a.curtail.push_back(c);
                    balance[z.id][static_cast<std::size_t>(h)].push_back({g, 1.0});
                    std::vector<Term> row{{g, 1.0}, {c, 1.0}};
                    if (a.inv >= 0) row.push_back({a.inv, -f});
                    lp.add_constraint(name("res_avail", {z.id, t.id, hour_label(h)}), Sense::Equal, f * b->min, row);
                    if (z.id == focal && t.counts_as_res) res_terms.push_back({g, 1.0});
                }
            } else if (storage) {
                const double p_ub = a.inv < 0 ? avail * b->min : kInf;
                const double e_ub = a.inv_energy < 0 ? b->energy_min : kInf;
                for (int h = 0; h < H; ++h) {
                    const std::string hl = hour_label(h);
                    const int ch = lp.add_variable(name("charge", {z.id, t.id, hl}), 0.0, p_ub, t.marginal_cost_charge);
                    const int dis = lp.add_variable(name("discharge", {z.id, t.id, hl}), 0.0, p_ub, t.marginal_cost_adder);
                    const int lvl = lp.add_variable(name("level", {z.id, t.id, hl}), 0.0, e_ub, 0.0);
                    a.charge.push_back(ch);
                    a.gen.push_back(dis);
                    a.level.push_back(lvl);
                    balance[z.id][static_cast<std::size_t>(h)].push_back({dis, 1.0});
                    balance[z.id][static_cast<std::size_t>(h)].push_back({ch, -1.0});
                    if (a.inv >= 0) {
                        lp.add_constraint(name("charge_cap", {z.id, t.id, hl}), Sense::LessEqual, avail * b->min,
                                          {{ch, 1.0}, {a.inv, -avail}});
                        lp.add_constraint(name("discharge_cap", {z.id, t.id, hl}), Sense::LessEqual, avail * b->min,
                                          {{dis, 1.0}, {a.inv, -avail}});
                    }
                    if (a.inv_energy >= 0) {
                        lp.add_constraint(name("level_cap", {z.id, t.id, hl}), Sense::LessEqual, b->energy_min,
                                          {{lvl, 1.0}, {a.inv_energy, -1.0}});
                    }
                }
                // level_h = level_{h-1} + eta_c charge_h - discharge_h / eta_d, cyclic
                for (int h = 0; h < H; ++h) {
                    const auto hh = static_cast<std::size_t>(h);
                    const int prev = a.level[h == 0 ? hz - 1 : hh - 1];
                    std::vector<Term> row{{a.level[hh], 1.0}, {a.charge[hh], -t.efficiency_charge},
                                          {a.gen[hh], 1.0 / t.efficiency}};
                    if (H > 1) row.push_back({prev, -1.0});
                    lp.add_constraint(name("storage_dyn", {z.id, t.id, hour_label(h)}), Sense::Equal, 0.0, row);
                }
            }
            ix.assets.push_back(std::move(a));
        }
    }

    // trade
    for (const auto& l : s.trade) {
        if (l.ntc <= 0.0) continue;
        for (int dir = 0; dir < 2; ++dir) {
            ModelIndex::Flow f;
            f.from = dir == 0 ? l.from : l.to;
            f.to = dir == 0 ? l.to : l.from;
            for (int h = 0; h < H; ++h) {
                const int c = lp.add_variable(name("flow", {f.from, f.to, hour_label(h)}), 0.0, l.ntc, 0.0);
                f.columns.push_back(c);
                balance[f.from][static_cast<std::size_t>(h)].push_back({c, -1.0});
                balance[f.to][static_cast<std::size_t>(h)].push_back({c, 1.0});
            }
            ix.flows.push_back(std::move(f));
        }
    }

    // lost load
    for (const auto& z : s.zones) {
        auto& cols = ix.lost_load[z.id];
        for (int h = 0; h < H; ++h) {
            const int c = lp.add_variable(name("lost_load", {z.id, hour_label(h)}), 0.0, kInf, s.value_of_lost_load);
            cols.push_back(c);
            balance[z.id][static_cast<std::size_t>(h)].push_back({c, 1.0});
        }
    }

    // hydrogen
    const bool has_h2 = s.policy.electrolysis_capacity > 0.0 || demand.h2_demand > 0.0;
    std::vector<Term> h2_terms;
    if (has_h2) {
        for (int h = 0; h < H; ++h) {
            const std::string hl = hour_label(h);
            const int e = lp.add_variable(name("h2_elec", {focal, hl}), 0.0, s.policy.electrolysis_capacity, 0.0);
            const int p = lp.add_variable(name("h2_prod", {focal, hl}), 0.0, kInf, 0.0);
            ix.h2_elec.push_back(e);
            ix.h2_prod.push_back(p);
            balance[focal][static_cast<std::size_t>(h)].push_back({e, -1.0});
            lp.add_constraint(name("h2_conv", {focal, hl}), Sense::Equal, 0.0, {{p, 1.0}, {e, -s.policy.h2_conversion}});
            h2_terms.push_back({p, 1.0});
            res_terms.push_back({e, -s.policy.res_share_target});
        }
        ix.h2_demand_row = lp.add_constraint(name("h2_demand", {focal}), Sense::Equal, demand.h2_demand, h2_terms);
    }

    // heat pumps and buffer storage
    const bool flexible = s.policy.ep_ratio_hours > 0.0;
    const double keep = 1.0 - s.heat.standing_loss;
    for (const auto& u : demand.heat.units) {
        ModelIndex::Heat hc;
        hc.unit = u.id();
        const std::string kind(to_string(u.kind));
        for (int h = 0; h < H; ++h) {
            const auto hh = static_cast<std::size_t>(h);
            const std::string hl = hour_label(h);
            const int e = lp.add_variable(name("hp_elec", {u.archetype, kind, hl}), 0.0, u.capacity_th / u.cop[hh], 0.0);
            const int q = lp.add_variable(name("hp_heat_out", {u.archetype, kind, hl}), 0.0, u.capacity_th, 0.0);
            hc.elec.push_back(e);
            hc.heat_out.push_back(q);
            balance[focal][hh].push_back({e, -1.0});
            lp.add_constraint(name("hp_conv", {u.archetype, kind, hl}), Sense::Equal, 0.0, {{q, 1.0}, {e, -u.cop[hh]}});
            res_terms.push_back({e, s.policy.hp_additionality ? -1.0 : 0.0});
            if (flexible) {
                hc.level.push_back(lp.add_variable(name("hstor_level", {u.archetype, kind, hl}), 0.0, u.storage_energy, 0.0));
                hc.out.push_back(lp.add_variable(name("hstor_out", {u.archetype, kind, hl}), u.demand[hh], u.demand[hh], 0.0));
            }
        }
        for (int h = 0; h < H; ++h) {
            const auto hh = static_cast<std::size_t>(h);
            const std::string hl = hour_label(h);
            if (flexible) {
                // level_h = keep * level_{h-1} + heat_out_h - out_h, cyclic
                std::vector<Term> row{{hc.level[hh], 1.0}, {hc.heat_out[hh], -1.0}, {hc.out[hh], 1.0}};
                row.push_back({hc.level[h == 0 ? hz - 1 : hh - 1], -keep});
                lp.add_constraint(name("hstor_bal", {u.archetype, kind, hl}), Sense::Equal, 0.0, row);
            } else {
                lp.add_constraint(name("heat_bal", {u.archetype, kind, hl}), Sense::Equal, u.demand[hh],
                                  {{hc.heat_out[hh], 1.0}});
            }
        }
        ix.heat.push_back(std::move(hc));
    }

    // energy balance rows
    for (const auto& z : s.zones) {
        const auto& load = s.series.load.at(z.id);
        auto& rows = ix.balance_rows[z.id];
        for (int h = 0; h < H; ++h) {
            const auto hh = static_cast<std::size_t>(h);
            double rhs = load[hh];
            if (z.id == focal) rhs += demand.ev_load[hh];
            rows.push_back(lp.add_constraint(name("balance", {z.id, hour_label(h)}), Sense::Equal, rhs, balance[z.id][hh]));
        }
    }

    // renewable share in the focal zone
    if (s.policy.res_share_target > 0.0) {
        double base = 0.0;
        const auto& load = s.series.load.at(focal);
        for (int h = 0; h < H; ++h) base += load[static_cast<std::size_t>(h)] + demand.ev_load[static_cast<std::size_t>(h)];
        ix.res_share_rhs = s.policy.res_share_target * base;
        ix.res_share_row = lp.add_constraint(name("res_share", {focal}), Sense::GreaterEqual,
                                             s.policy.res_share_target * base, res_terms);
    }

    lp.set_objective_offset(offset);
    return m;
}

}  // namespace gridplan
