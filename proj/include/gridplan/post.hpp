#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridplan/demand.hpp"
#include "gridplan/model.hpp"
#include "gridplan/scenario.hpp"
#include "gridplan/simplex.hpp"

namespace gridplan {

/// Everything the reports read: the scenario, its prepared demand, the model
/// index and the solution. Nothing here touches solver internals.
struct SolvedRun {
    Scenario scenario;
    PreparedDemand demand;
    ModelIndex index;
    LinearProgram lp;
    Solution solution;

    double value(int column) const;
    double sum(const std::vector<int>& columns) const;
};

/// prepare_demand, build_lp, solve.
SolvedRun solve_scenario(const Scenario& scenario, const SolveOptions& options = {});

struct SavingsParams {
    double boiler_efficiency = 0.9;
    std::map<std::string, double> gas_efficiency{{"ocgt", 0.4}, {"ccgt", 0.542}};  // others use the tech value
    double hp_lifetime = 20.0;
    double interest_rate = 0.04;
    double emission_factor = 0.2;     // t CO2eq/MWh_th
    double cost_air_hp = 850.0;       // EUR/kW_th
    double cost_ground_hp = 1400.0;   // EUR/kW_th
    double cost_gas_boiler = 296.0;   // EUR/kW_th
    bool boiler_replacement_counted = true;
};

void validate(const SavingsParams& params);

/// Annual figures of one run that the savings calculus needs.
struct SavingsInputs {
    double hp_heat = 0.0;              // MWh_th/yr
    double hp_capacity_air = 0.0;      // MW_th
    double hp_capacity_ground = 0.0;   // MW_th
    std::map<std::string, double> gas_generation;  // tech -> MWh_el/yr, focal zone
    std::map<std::string, double> gas_tech_efficiency;
    double power_cost = 0.0;           // EUR/yr
    double gas_price = 0.0;            // EUR/MWh_th
    double carbon_price = 0.0;         // EUR/t
};

SavingsInputs savings_inputs(const SolvedRun& run);

/// Signed roll - ref differences; savings are negative.
struct SavingsReport {
    double gas_displaced = 0.0;       // TWh_th
    double gas_electricity = 0.0;     // TWh_th
    double total_gas = 0.0;           // TWh_th
    double emissions = 0.0;           // Mt CO2eq
    double system_cost = 0.0;         // bn EUR
    double power_cost = 0.0;          // bn EUR
    double hp_annuity = 0.0;          // bn EUR
    double boiler_annuity = 0.0;      // bn EUR, avoided (positive reduces cost)
    double fuel_avoided = 0.0;        // bn EUR
    double carbon_avoided = 0.0;      // bn EUR
    double heat = 0.0;                // TWh_th/yr
    std::map<std::string, double> gas_generation;  // TWh_el per gas tech
};

/// Throws MismatchedScenarios when prices differ.
SavingsReport gas_emission_savings(const SavingsInputs& ref, const SavingsInputs& roll, const SavingsParams& p = {});
/// Throws MismatchedScenarios unless the scenarios differ only in the rollout.
SavingsReport gas_emission_savings(const SolvedRun& ref, const SolvedRun& roll, const SavingsParams& p = {});

/// EUR/kWh_th of overnight storage cost that the annual saving pays for.
double break_even_storage_cost(double cost_no_storage, double cost_with, double storage_energy, double rate,
                               double lifetime);

/// ct/kWh_th
double additional_cost_per_heat(double delta_cost, double delta_heat);

struct ResidualLoad {
    std::map<std::string, std::vector<double>> hourly;    // zone -> MW
    std::map<std::string, std::vector<double>> duration;  // sorted descending

    double peak(const std::string& zone) const;
};

/// Load (plus EV, heat-pump and electrolysis draw in the focal zone) minus
/// dispatched wind and solar.
ResidualLoad residual_load_series(const SolvedRun& run);

/// Descending sort.
std::vector<double> duration_curve(std::vector<double> hourly);

struct HpSeries {
    std::string unit;
    std::vector<double> elec;      // MW_el
    std::vector<double> heat_out;  // MW_th
    std::vector<double> level;     // MWh_th, empty without storage
    std::vector<double> demand;    // MW_th
};

struct HpReport {
    std::vector<HpSeries> units;
    HpSeries total;
};

HpReport hp_operation_report(const SolvedRun& run);

double correlation(const std::vector<double>& a, const std::vector<double>& b);

/// Largest |implied level before hour 1 - level at hour H| over electricity
/// and heat stores.
double storage_cycle_residual(const SolvedRun& run);

/// Largest |balance row residual| in MW over all zones and hours.
double max_balance_residual(const SolvedRun& run);

/// Row activity minus rhs of the renewable-share row, 0 without the row.
double res_share_slack(const SolvedRun& run);

struct TechTotals {
    std::map<std::string, double> capacity;  // "zone.tech" -> MW
    std::map<std::string, double> dispatch;  // "zone.tech" -> MWh over the horizon
};

TechTotals tech_totals(const SolvedRun& run);

}  // namespace gridplan
