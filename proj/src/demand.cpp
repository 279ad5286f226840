#include "gridplan/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridplan/error.hpp"

namespace gridplan {

std::string_view to_string(SourceKind kind) { return kind == SourceKind::Air ? "air" : "ground"; }

double cop(double eta, double sink, double source) {
    if (!(sink > source)) {
        throw Error(ErrorKind::DomainError, "sink temperature " + format_number(sink) + " must exceed source temperature " +
                                                format_number(source));
    }
    return eta * (sink + 273.15) / (sink - source);
}

std::vector<double> cop_series(SourceKind kind, std::span<const double> ambient, double sink, double eta,
                               double ground_source) {
    std::vector<double> out(ambient.size());
    if (kind == SourceKind::Ground) {
        std::fill(out.begin(), out.end(), cop(eta, sink, ground_source));
        return out;
    }
    for (std::size_t h = 0; h < ambient.size(); ++h) {
        try {
            out[h] = cop(eta, sink, ambient[h]);
        } catch (const Error&) {
            throw Error(ErrorKind::DomainError, "ambient temperature " + format_number(ambient[h]) + " at hour " +
                                                    std::to_string(h + 1) + " is not below the sink temperature");
        }
    }
    return out;
}

double HeatUnit::horizon_heat() const { return std::accumulate(demand.begin(), demand.end(), 0.0); }

double HeatSubsystem::thermal_capacity() const {
    double s = 0.0;
    for (const auto& u : units) s += u.capacity_th;
    return s;
}

double HeatSubsystem::annual_heat() const {
    double s = 0.0;
    for (const auto& u : units) s += u.annual_heat;
    return s;
}

double HeatSubsystem::horizon_heat() const {
    double s = 0.0;
    for (const auto& u : units) s += u.horizon_heat();
    return s;
}

double HeatSubsystem::storage_energy() const {
    double s = 0.0;
    for (const auto& u : units) s += u.storage_energy;
    return s;
}

HeatSubsystem build_heat_subsystem(const HeatSettings& heat, const TimeSeriesSet& series, const RolloutSpec& rollout,
                                   double ep_ratio, double year_fraction) {
    if (!(ep_ratio >= 0.0)) throw Error(ErrorKind::DomainError, "ep_ratio must be >= 0");
    HeatSubsystem hs;
    hs.rollout = rollout.name;
    hs.ep_ratio = ep_ratio;

    struct Part {
        const Archetype* archetype;
        SourceKind kind;
        double share;
        double weight;  // share * stock demand, MWh_th/yr
    };
    std::vector<Part> parts;
    double total_weight = 0.0;
    for (const auto& a : heat.archetypes) {
        auto it = a.shares.find(rollout.name);
        if (it == a.shares.end()) {
            throw Error(ErrorKind::InvariantViolation, "archetype " + a.id + " has no shares for rollout " + rollout.name);
        }
        for (SourceKind kind : {SourceKind::Air, SourceKind::Ground}) {
            const double share = kind == SourceKind::Air ? it->second.air : it->second.ground;
            const double w = share * a.annual_heat_demand;
            if (w <= 0.0) continue;
            parts.push_back({&a, kind, share, w});
            total_weight += w;
        }
    }
    if (total_weight <= 0.0) {
        if (rollout.yearly_heat > 0.0) {
            throw Error(ErrorKind::InvariantViolation, "rollout " + rollout.name + " has heat but no archetype shares");
        }
        return hs;
    }
    // Table-level aggregates are authoritative: rescale the archetype shares
    // so their heat adds up to the rollout's yearly heat.
    hs.share_scale = rollout.yearly_heat / total_weight;

    for (const auto& p : parts) {
        HeatUnit u;
        u.archetype = p.archetype->id;
        u.kind = p.kind;
        u.share = p.share * hs.share_scale;
        u.annual_heat = p.weight * hs.share_scale;
        u.capacity_th = rollout.thermal_capacity * p.weight / total_weight;
        u.storage_energy = ep_ratio * u.capacity_th;
        const auto& profile = series.heat_demand.at(u.archetype);
        const double norm = std::accumulate(profile.begin(), profile.end(), 0.0);
        if (!(norm > 0.0)) {
            throw Error(ErrorKind::InvariantViolation, "heat demand profile of " + u.archetype + " sums to zero");
        }
        const double horizon_heat = u.annual_heat * year_fraction;
        u.demand.resize(profile.size());
        for (std::size_t h = 0; h < profile.size(); ++h) u.demand[h] = horizon_heat * profile[h] / norm;
        u.cop = cop_series(u.kind, series.temperature, heat.sink_temperature,
                           u.kind == SourceKind::Air ? heat.eta_air : heat.eta_ground, heat.ground_source_temperature);
        const double peak = *std::max_element(u.demand.begin(), u.demand.end());
        if (ep_ratio == 0.0 && peak > u.capacity_th * (1.0 + 1e-9)) {
            throw Error(ErrorKind::InvariantViolation, "heat demand of " + u.id() + " peaks at " + format_number(peak) +
                                                           " MW_th above its capacity " + format_number(u.capacity_th));
        }
        if (horizon_heat > u.capacity_th * static_cast<double>(profile.size()) * (1.0 + 1e-9)) {
            throw Error(ErrorKind::InvariantViolation, "heat demand of " + u.id() + " exceeds capacity over the horizon");
        }
        hs.units.push_back(std::move(u));
    }

    const double cap = hs.thermal_capacity();
    if (std::abs(cap - rollout.thermal_capacity) > 0.005 * rollout.thermal_capacity) {
        throw Error(ErrorKind::InvariantViolation, "apportioned thermal capacity " + format_number(cap) +
                                                       " differs from rollout " + format_number(rollout.thermal_capacity));
    }
    const double annual = hs.annual_heat();
    if (std::abs(annual - rollout.yearly_heat) > 0.005 * rollout.yearly_heat) {
        throw Error(ErrorKind::InvariantViolation, "aggregated yearly heat " + format_number(annual) +
                                                       " differs from rollout " + format_number(rollout.yearly_heat));
    }
    return hs;
}

std::vector<double> scale_ev_profile(std::span<const double> profile, double annual_energy) {
    double sum = 0.0;
    for (double p : profile) {
        if (!(p >= 0.0)) throw Error(ErrorKind::SchemaViolation, "EV profile has a negative entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorKind::SchemaViolation, "EV profile sums to " + format_number(sum) + ", expected 1");
    }
    std::vector<double> out(profile.size());
    for (std::size_t h = 0; h < profile.size(); ++h) out[h] = profile[h] * annual_energy;
    return out;
}

double h2_electricity_requirement(double h2_demand, double conversion) {
    if (!(conversion > 0.0)) throw Error(ErrorKind::DomainError, "hydrogen conversion must be > 0");
    return h2_demand / conversion;
}

PreparedDemand prepare_demand(const Scenario& s) {
    PreparedDemand d;
    const double f = s.year_fraction();
    d.heat = build_heat_subsystem(s.heat, s.series, s.active_rollout(), s.policy.ep_ratio_hours, f);
    d.ev_load = scale_ev_profile(s.series.ev_profile, s.policy.ev_annual_energy * f);
    d.h2_demand = s.policy.h2_demand * f;
    d.h2_electricity = h2_electricity_requirement(d.h2_demand, s.policy.h2_conversion);
    if (d.h2_electricity > s.policy.electrolysis_capacity * s.hours() * (1.0 + 1e-12)) {
        throw Error(ErrorKind::InvariantViolation, "hydrogen demand needs " + format_number(d.h2_electricity) +
                                                       " MWh_el, electrolysis can supply at most " +
                                                       format_number(s.policy.electrolysis_capacity * s.hours()));
    }
    return d;
}

}  // namespace gridplan
