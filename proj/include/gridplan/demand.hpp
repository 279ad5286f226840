#pragma once

#include <span>
#include <string>
#include <vector>

#include "gridplan/scenario.hpp"

namespace gridplan {

enum class SourceKind { Air, Ground };

std::string_view to_string(SourceKind kind);

/// eta * (T_sink + 273.15) / (T_sink - T_source)
double cop(double eta, double sink, double source);

/// Hourly COP; ground units ignore `ambient` and use `ground_source`.
std::vector<double> cop_series(SourceKind kind, std::span<const double> ambient, double sink, double eta,
                               double ground_source = 10.0);

/// One heat-pump fleet: the air or ground part of one building archetype,
/// with its own buffer storage.
struct HeatUnit {
    std::string archetype;
    SourceKind kind = SourceKind::Air;
    double share = 0.0;           // rescaled heat-pump share of the archetype stock
    double annual_heat = 0.0;     // MWh_th/yr
    double capacity_th = 0.0;     // MW_th
    double storage_energy = 0.0;  // MWh_th
    std::vector<double> demand;   // MWh_th per horizon hour
    std::vector<double> cop;

    std::string id() const { return archetype + "," + std::string(to_string(kind)); }
    double horizon_heat() const;
};

struct HeatSubsystem {
    std::string rollout;
    double ep_ratio = 0.0;
    double share_scale = 1.0;  // factor applied to the archetype shares
    std::vector<HeatUnit> units;

    double thermal_capacity() const;
    double annual_heat() const;
    double horizon_heat() const;
    double storage_energy() const;
};

HeatSubsystem build_heat_subsystem(const HeatSettings& heat, const TimeSeriesSet& series, const RolloutSpec& rollout,
                                   double ep_ratio, double year_fraction);

/// profile * annual_energy; the profile must be non-negative and sum to 1.
std::vector<double> scale_ev_profile(std::span<const double> profile, double annual_energy);

/// h2_demand / conversion
double h2_electricity_requirement(double h2_demand, double conversion);

struct PreparedDemand {
    HeatSubsystem heat;
    std::vector<double> ev_load;       // MW, focal zone
    double h2_demand = 0.0;            // MWh_H2 over the horizon
    double h2_electricity = 0.0;       // MWh_el over the horizon
};

PreparedDemand prepare_demand(const Scenario& scenario);

}  // namespace gridplan
