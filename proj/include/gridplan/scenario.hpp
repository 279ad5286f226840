#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gridplan {

// Units inside a Scenario: MW, MWh, MWh_th, EUR, t CO2, hours. Config files
// carry GW/TWh where the key name says so; conversion happens in the loader.

enum class TechKind { Thermal, Renewable, Storage, Reservoir, Electrolysis };

std::string_view to_string(TechKind kind);
TechKind tech_kind_from_string(const std::string& text);

struct Zone {
    std::string id;
    bool is_investment_zone = false;

    bool operator==(const Zone&) const = default;
};

struct Technology {
    std::string id;
    TechKind kind = TechKind::Thermal;
    double overnight_cost = 0.0;         // EUR/kW (storage: charge + discharge power)
    double overnight_cost_energy = 0.0;  // EUR/kWh, storage only
    double fixed_om = 0.0;               // EUR/kW/yr
    double lifetime = 1.0;               // years
    double interest_rate = 0.0;
    double efficiency = 1.0;             // generation, or storage discharge leg
    double efficiency_charge = 1.0;      // storage charge leg
    double fuel_cost = 0.0;              // EUR/MWh_th
    double carbon_content = 0.0;         // t/MWh_th
    double availability = 1.0;
    double marginal_cost_adder = 0.0;    // EUR/MWh (storage: per MWh discharged)
    double marginal_cost_charge = 0.0;   // EUR/MWh charged, storage only
    bool gas_fired = false;              // fuel price taken from policy.gas_price
    bool coal_fired = false;             // affected by coal_phase_out
    bool wind = false;                   // affected by wind_cap_removed
    bool counts_as_res = false;          // enters the renewable-share constraint

    bool operator==(const Technology&) const = default;
};

struct CapacityBound {
    std::string zone;
    std::string tech;
    double min = 0.0;  // MW
    double max = 0.0;  // MW, may be +inf
    // storage energy (MWh); unused for other kinds
    double energy_min = 0.0;
    double energy_max = 0.0;

    bool fixed() const { return min == max; }
    bool energy_fixed() const { return energy_min == energy_max; }
    bool operator==(const CapacityBound&) const = default;
};

struct TradeLink {
    std::string from;
    std::string to;
    double ntc = 0.0;  // MW, each direction

    bool operator==(const TradeLink&) const = default;
};

struct TimeSeriesSet {
    int hours = 0;
    std::map<std::string, std::vector<double>> load;             // zone -> MW
    std::map<std::string, std::vector<double>> capacity_factor;  // "zone.tech" -> [0,1]
    std::map<std::string, std::vector<double>> hydro_inflow;     // zone -> MWh
    std::vector<double> ev_profile;                              // focal zone, sums to 1
    std::map<std::string, std::vector<double>> heat_demand;      // archetype -> profile (any positive scale)
    std::vector<double> temperature;                             // focal zone ambient, degC

    bool operator==(const TimeSeriesSet&) const = default;
};

struct ArchetypeShare {
    double air = 0.0;
    double ground = 0.0;

    bool operator==(const ArchetypeShare&) const = default;
};

struct Archetype {
    std::string id;
    double annual_heat_demand = 0.0;  // MWh_th/yr of the whole stock
    std::map<std::string, ArchetypeShare> shares;  // rollout name -> heat-pump shares

    bool operator==(const Archetype&) const = default;
};

struct RolloutSpec {
    std::string name;
    double n_heat_pumps = 0.0;      // millions
    double power_rating_el = 0.0;   // MW_e
    double thermal_capacity = 0.0;  // MW_th
    double share_air = 0.8;
    double share_ground = 0.2;
    double yearly_heat = 0.0;       // MWh_th/yr

    bool operator==(const RolloutSpec&) const = default;
};

struct HeatSettings {
    double sink_temperature = 50.0;
    double ground_source_temperature = 10.0;
    double eta_air = 0.35;
    double eta_ground = 0.45;
    double standing_loss = 0.0;  // fraction of stored heat lost per hour
    std::vector<Archetype> archetypes;

    bool operator==(const HeatSettings&) const = default;
};

struct PolicySettings {
    double res_share_target = 0.8;
    bool hp_additionality = true;
    double gas_price = 50.0;      // EUR/MWh_th
    double carbon_price = 130.0;  // EUR/t
    double ep_ratio_hours = 0.0;
    double electrolysis_capacity = 0.0;  // MW_e
    double h2_demand = 0.0;              // MWh_H2/yr
    double h2_conversion = 0.71;
    double ev_annual_energy = 0.0;       // MWh/yr
    bool coal_phase_out = false;
    bool wind_cap_removed = false;
    std::optional<int> re_drought_week;           // 1-based week of the horizon
    std::optional<double> bio_energy_budget;      // MWh/yr per zone, off by default

    bool operator==(const PolicySettings&) const = default;
};

struct Scenario {
    std::string name;
    int hours_per_year = 8760;
    double value_of_lost_load = 3000.0;  // EUR/MWh
    std::vector<Zone> zones;
    std::vector<Technology> technologies;
    std::vector<CapacityBound> bounds;
    std::vector<TradeLink> trade;
    TimeSeriesSet series;
    HeatSettings heat;
    std::map<std::string, RolloutSpec> rollouts;
    std::string rollout;  // active rollout name
    PolicySettings policy;

    bool operator==(const Scenario&) const = default;

    int hours() const { return series.hours; }
    /// Fraction of a year covered by the horizon; annual quantities
    /// (costs, EV energy, hydrogen demand, yearly heat) are prorated by it.
    double year_fraction() const { return static_cast<double>(series.hours) / hours_per_year; }
    const Zone& focal_zone() const;
    const Technology& technology(const std::string& id) const;
    const Technology* find_technology(const std::string& id) const;
    const CapacityBound* find_bound(const std::string& zone, const std::string& tech) const;
    const RolloutSpec& active_rollout() const;
};

/// Sensitivity switches; empty fields leave the config untouched.
struct ScenarioOverrides {
    std::optional<double> ep_ratio_hours;
    std::optional<std::string> rollout;
    std::optional<double> gas_price;
    std::optional<double> carbon_price;
    std::optional<bool> coal_phase_out;
    std::optional<bool> wind_cap_removed;
    std::optional<int> re_drought_week;
    std::optional<bool> hp_additionality;

    bool empty() const;
    std::string describe() const;
};

/// Reads the YAML config and the CSVs it names, applies the sensitivity
/// switches found in the config (and then `overrides`), validates, returns.
Scenario load_scenario(const std::filesystem::path& config_path, const ScenarioOverrides& overrides = {});

/// Applies overrides to a loaded scenario and re-validates.
Scenario apply_overrides(Scenario scenario, const ScenarioOverrides& overrides);

/// Checks every invariant; throws SchemaViolation / InvariantViolation /
/// LengthMismatch naming the offending field.
void validate(const Scenario& scenario);

/// Writes `dir/scenario.yaml` plus the series CSVs; load_scenario on the
/// result reproduces `scenario` exactly.
void save_scenario(const Scenario& scenario, const std::filesystem::path& dir);

/// r(1+r)^L / ((1+r)^L - 1); 1/L for r = 0.
double annuity_factor(double rate, double lifetime);

/// EUR/MWh_el: (fuel + carbon_content * carbon_price) / efficiency + adder,
/// with gas-fired fuel cost replaced by policy.gas_price.
double marginal_cost(const Technology& tech, const PolicySettings& policy);

// CSV helpers shared with the run directory code.
struct CsvTable {
    std::vector<std::string> header;           // without the leading "hour"
    std::vector<std::vector<double>> columns;  // one per header entry
    int rows = 0;
};

CsvTable read_series_csv(const std::filesystem::path& path);
void write_series_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<const std::vector<double>*>& columns);

/// Shortest round-trip decimal form of a double.
std::string format_number(double value);

}  // namespace gridplan
