#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridplan/demand.hpp"
#include "gridplan/linear_program.hpp"
#include "gridplan/scenario.hpp"

namespace gridplan {

/// Column and row handles of a built model, so reports can read a solution
/// without parsing names. Hour vectors have one entry per horizon hour; -1
/// marks an absent column.
struct ModelIndex {
    struct Asset {
        std::string zone;
        std::string tech;
        TechKind kind = TechKind::Thermal;
        double capacity_min = 0.0;  // MW installed before investment
        double energy_min = 0.0;    // MWh, storage
        int inv = -1;               // MW added on top of capacity_min
        int inv_energy = -1;        // MWh added on top of energy_min
        std::vector<int> gen;       // generation, or storage discharge
        std::vector<int> curtail;
        std::vector<int> charge;
        std::vector<int> level;
    };
    struct Flow {
        std::string from;
        std::string to;
        std::vector<int> columns;
    };
    struct Heat {
        std::string unit;  // "archetype,kind"
        std::vector<int> elec;
        std::vector<int> heat_out;
        std::vector<int> level;
        std::vector<int> out;
    };

    int hours = 0;
    std::string focal_zone;
    std::vector<Asset> assets;
    std::vector<Flow> flows;
    std::vector<Heat> heat;
    std::map<std::string, std::vector<int>> lost_load;
    std::map<std::string, std::vector<int>> balance_rows;
    std::vector<int> h2_elec;
    std::vector<int> h2_prod;
    int res_share_row = -1;
    double res_share_rhs = 0.0;
    int h2_demand_row = -1;

    const Asset* find_asset(const std::string& zone, const std::string& tech) const;
};

struct BuiltModel {
    LinearProgram lp;
    ModelIndex index;
};

/// Assembles the investment and dispatch LP (objective in EUR over the
/// horizon; annual cost terms are prorated by Scenario::year_fraction).
BuiltModel build_lp(const Scenario& scenario, const PreparedDemand& demand);

/// Same scenario with the heat-pump rollout replaced.
Scenario apply_rollout_delta(const Scenario& base, const RolloutSpec& rollout);

/// Horizon cost of one MW (or MWh for storage energy) of new capacity:
/// (annuity * overnight + fixed O&M) * 1000 * year_fraction.
double capacity_cost(const Technology& tech, double year_fraction, bool energy);

}  // namespace gridplan
