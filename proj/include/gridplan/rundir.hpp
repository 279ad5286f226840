#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridplan/post.hpp"
#include "gridplan/scenario.hpp"
#include "gridplan/simplex.hpp"

namespace gridplan {

std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::filesystem::path& path);
/// Hash over every file below `dir`, visited in sorted relative-path order.
std::string tree_sha256(const std::filesystem::path& dir);

struct RunRequest {
    std::filesystem::path config;
    ScenarioOverrides overrides;
    SolveOptions solver;
    std::string reference_rollout = "reference";
};

struct RunManifest {
    std::string run_id;
    std::string config;
    std::string config_sha256;
    std::string scenario_sha256;
    std::string overrides;
    std::string output_dir;
    std::string started;
    std::map<std::string, std::string> solver;
};

/// Hash of config, overrides and solver options; identical requests get
/// identical ids.
std::string run_id(const RunRequest& request);

/// Next unused directory: `base/id`, then `base/id.1`, `base/id.2`, ...
std::filesystem::path fresh_run_dir(const std::filesystem::path& base, const std::string& id);

struct LpStats {
    int columns = 0;
    int rows = 0;
    std::size_t nonzeros = 0;
    std::map<std::string, int> column_families;
    std::map<std::string, int> row_families;
};

LpStats lp_stats(const LinearProgram& lp);

/// Writes the scenario snapshot, manifest.json, lp_stats.csv, solution.csv,
/// rows.csv, result.json and the reports. `dir` must not exist yet. With a
/// `reference` run the savings are taken against it (and it is stored under
/// dir/reference), otherwise against the run itself.
void write_run(const std::filesystem::path& dir, const RunRequest& request, const SolvedRun& run,
               const SolvedRun* reference);

/// Report CSVs only (capacity, dispatch, residual_load, rldc, hp_operation,
/// metrics, savings) into an existing directory; refuses to overwrite.
void write_reports(const std::filesystem::path& dir, const SolvedRun& run, const SolvedRun* reference);

/// Rebuilds a SolvedRun from a run directory: scenario snapshot plus the
/// solution dump, re-certified against the rebuilt LP.
SolvedRun load_run(const std::filesystem::path& dir);

struct DeltaRow {
    std::string key;  // "zone.tech"
    double ref = 0.0;
    double roll = 0.0;
};

struct Comparison {
    std::vector<DeltaRow> capacity;  // MW
    std::vector<DeltaRow> dispatch;  // MWh over the horizon
    SavingsReport savings;
    double horizon_heat_delta = 0.0;  // MWh_th
};

/// Throws MismatchedScenarios unless zones and technologies agree.
Comparison compare_runs(const SolvedRun& ref, const SolvedRun& roll, const SavingsParams& p = {});
void write_comparison(const std::filesystem::path& dir, const Comparison& c);

}  // namespace gridplan
