#include "gridplan/rundir.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "gridplan/error.hpp"

namespace gridplan {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// refuses to replace an existing file
std::ofstream create(const fs::path& path) {
    if (fs::exists(path)) throw Error(ErrorKind::InvariantViolation, path.string() + " already exists");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::MissingFile, "cannot write " + path.string());
    return out;
}

// report numbers, with -0 printed as 0
std::string num(double v) { return format_number(v + 0.0); }

std::string family(const std::string& name) { return name.substr(0, name.find('[')); }

std::string csv_label(std::string s) {
    std::replace(s.begin(), s.end(), ',', ':');
    return s;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

std::map<std::string, std::string> solver_fields(const SolveOptions& o) {
    return {{"feasibility_tolerance", num(o.feasibility_tolerance)},
            {"gap_tolerance", num(o.gap_tolerance)},
            {"primal_tolerance", num(o.primal_tolerance)},
            {"dual_tolerance", num(o.dual_tolerance)},
            {"max_iterations", std::to_string(o.max_iterations)},
            {"refactor_interval", std::to_string(o.refactor_interval)},
            {"scale", o.scale ? "true" : "false"},
            {"scale_passes", std::to_string(o.scale_passes)}};
}

std::string status_text(SolveStatus s) { return std::string(to_string(s)); }

SolveStatus status_from(const std::string& s) {
    for (SolveStatus v : {SolveStatus::Optimal, SolveStatus::Infeasible, SolveStatus::Unbounded, SolveStatus::IterationLimit}) {
        if (to_string(v) == s) return v;
    }
    throw Error(ErrorKind::SchemaViolation, "unknown status " + s);
}

void write_savings(const fs::path& path, const SavingsReport& r) {
    auto out = create(path);
    out << "quantity,value,unit\n";
    auto row = [&](const char* q, double v, const char* unit) { out << q << ',' << num(v) << ',' << unit << "\n"; };
    row("heat_pump_heat_delta", r.heat, "TWh_th/yr");
    row("gas_displaced", r.gas_displaced, "TWh_th/yr");
    row("gas_for_electricity", r.gas_electricity, "TWh_th/yr");
    row("total_gas", r.total_gas, "TWh_th/yr");
    row("emissions", r.emissions, "Mt CO2eq/yr");
    row("system_cost", r.system_cost, "bn EUR/yr");
    row("power_sector_cost", r.power_cost, "bn EUR/yr");
    row("heat_pump_annuity", r.hp_annuity, "bn EUR/yr");
    row("boiler_annuity_avoided", r.boiler_annuity, "bn EUR/yr");
    row("fuel_avoided", r.fuel_avoided, "bn EUR/yr");
    row("carbon_avoided", r.carbon_avoided, "bn EUR/yr");
    for (const auto& [tech, v] : r.gas_generation) out << "gas_generation." << tech << ',' << num(v) << ",TWh_el/yr\n";
}

void write_table(const fs::path& path, const std::string& first, const std::vector<std::string>& names,
                 const std::vector<const std::vector<double>*>& cols, int offset) {
    auto out = create(path);
    out << first;
    for (const auto& n : names) out << ',' << csv_label(n);
    out << "\n";
    const std::size_t rows = cols.empty() ? 0 : cols.front()->size();
    for (std::size_t r = 0; r < rows; ++r) {
        out << r + static_cast<std::size_t>(offset);
        for (const auto* c : cols) out << ',' << (r < c->size() ? num((*c)[r]) : "");
        out << "\n";
    }
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::InvariantViolation, "sha256 failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return out.str();
}

std::string file_sha256(const fs::path& path) { return sha256_hex(read_file(path)); }

std::string tree_sha256(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files.push_back(fs::relative(e.path(), dir));
    }
    std::sort(files.begin(), files.end());
    std::string acc;
    for (const auto& f : files) acc += f.generic_string() + "\n" + file_sha256(dir / f) + "\n";
    return sha256_hex(acc);
}

std::string run_id(const RunRequest& request) {
    std::string key = file_sha256(request.config) + "\n" + request.overrides.describe() + "\n" + request.reference_rollout;
    for (const auto& [k, v] : solver_fields(request.solver)) key += "\n" + k + "=" + v;
    return sha256_hex(key).substr(0, 12);
}

fs::path fresh_run_dir(const fs::path& base, const std::string& id) {
    fs::path dir = base / id;
    for (int k = 1; fs::exists(dir); ++k) dir = base / (id + "." + std::to_string(k));
    return dir;
}

LpStats lp_stats(const LinearProgram& lp) {
    LpStats s;
    s.columns = lp.num_variables();
    s.rows = lp.num_constraints();
    s.nonzeros = lp.num_nonzeros();
    for (const auto& v : lp.variables()) ++s.column_families[family(v.name)];
    for (const auto& c : lp.constraints()) ++s.row_families[family(c.name)];
    return s;
}

void write_reports(const fs::path& dir, const SolvedRun& run, const SolvedRun* reference) {
    const Scenario& s = run.scenario;
    const ModelIndex& ix = run.index;
    fs::create_directories(dir);

    {
        auto out = create(dir / "capacity.csv");
        out << "zone,tech,kind,capacity_mw,investment_mw,energy_mwh\n";
        for (const auto& a : ix.assets) {
            const double energy = a.kind == TechKind::Storage ? a.energy_min + run.value(a.inv_energy) : 0.0;
            out << a.zone << ',' << a.tech << ',' << to_string(a.kind) << ',' << num(a.capacity_min + run.value(a.inv))
                << ',' << num(run.value(a.inv)) << ',' << num(energy) << "\n";
        }
    }
    {
        auto out = create(dir / "dispatch.csv");
        out << "zone,tech,generation_mwh,curtailment_mwh,charge_mwh\n";
        for (const auto& a : ix.assets) {
            out << a.zone << ',' << a.tech << ',' << num(run.sum(a.gen)) << ',' << num(run.sum(a.curtail))
                << ',' << num(run.sum(a.charge)) << "\n";
        }
        for (const auto& f : ix.flows) {
            out << f.from << ',' << "flow_to_" << f.to << ',' << num(run.sum(f.columns)) << ",0,0\n";
        }
        for (const auto& [zone, cols] : ix.lost_load) {
            out << zone << ",lost_load," << num(run.sum(cols)) << ",0,0\n";
        }
    }

    const ResidualLoad rl = residual_load_series(run);
    {
        std::vector<std::string> names;
        std::vector<const std::vector<double>*> hourly, curve;
        for (const auto& z : s.zones) {
            names.push_back(z.id);
            hourly.push_back(&rl.hourly.at(z.id));
            curve.push_back(&rl.duration.at(z.id));
        }
        write_table(dir / "residual_load.csv", "hour", names, hourly, 1);
        write_table(dir / "rldc.csv", "rank", names, curve, 1);
    }

    const HpReport hp = hp_operation_report(run);
    {
        std::vector<std::string> names{"total.elec", "total.heat_out", "total.demand"};
        std::vector<const std::vector<double>*> cols{&hp.total.elec, &hp.total.heat_out, &hp.total.demand};
        if (!hp.total.level.empty()) {
            names.push_back("total.level");
            cols.push_back(&hp.total.level);
        }
        for (const auto& u : hp.units) {
            names.push_back(u.unit + ".elec");
            cols.push_back(&u.elec);
            names.push_back(u.unit + ".heat_out");
            cols.push_back(&u.heat_out);
            if (!u.level.empty()) {
                names.push_back(u.unit + ".level");
                cols.push_back(&u.level);
            }
        }
        write_table(dir / "hp_operation.csv", "hour", names, cols, 1);
    }

    {
        auto out = create(dir / "metrics.csv");
        out << "metric,value\n";
        auto row = [&](const std::string& k, const std::string& v) { out << k << ',' << v << "\n"; };
        row("status", status_text(run.solution.status));
        row("objective_eur", num(run.solution.objective));
        row("relative_gap", num(run.solution.relative_gap));
        row("max_relative_residual", num(run.solution.max_relative_residual));
        row("max_balance_residual_mw", num(max_balance_residual(run)));
        row("storage_cycle_residual_mwh", num(storage_cycle_residual(run)));
        row("res_share_slack_mwh", num(res_share_slack(run)));
        double lost = 0.0;
        for (const auto& [zone, cols] : ix.lost_load) lost += run.sum(cols);
        row("lost_load_mwh", num(lost));
        row("peak_residual_load_mw." + ix.focal_zone, num(rl.peak(ix.focal_zone)));
        if (!hp.units.empty()) row("hp_residual_load_correlation", num(correlation(hp.total.elec, rl.hourly.at(ix.focal_zone))));
        row("heat_pump_heat_mwh", num(run.demand.heat.horizon_heat()));
        row("heat_storage_mwh", num(run.demand.heat.storage_energy()));
    }

    write_savings(dir / "savings.csv", gas_emission_savings(reference ? *reference : run, run));
}

void write_run(const fs::path& dir, const RunRequest& request, const SolvedRun& run, const SolvedRun* reference) {
    if (fs::exists(dir)) throw Error(ErrorKind::InvariantViolation, "run directory " + dir.string() + " already exists");
    fs::create_directories(dir);
    save_scenario(run.scenario, dir / "scenario");

    RunManifest m;
    m.run_id = dir.filename().string();
    m.config = request.config.string();
    m.config_sha256 = file_sha256(request.config);
    m.scenario_sha256 = tree_sha256(dir / "scenario");
    m.overrides = request.overrides.describe();
    m.output_dir = dir.string();
    m.started = utc_now();
    m.solver = solver_fields(request.solver);
    {
        json j;
        j["run_id"] = m.run_id;
        j["config"] = m.config;
        j["config_sha256"] = m.config_sha256;
        j["scenario_sha256"] = m.scenario_sha256;
        j["overrides"] = m.overrides;
        j["reference_rollout"] = request.reference_rollout;
        j["output_dir"] = m.output_dir;
        j["written"] = m.started;
        j["solver"] = m.solver;
        create(dir / "manifest.json") << j.dump(2) << "\n";
    }

    const LpStats st = lp_stats(run.lp);
    {
        auto out = create(dir / "lp_stats.csv");
        out << "kind,family,count\n";
        out << "total,columns," << st.columns << "\n";
        out << "total,rows," << st.rows << "\n";
        out << "total,nonzeros," << st.nonzeros << "\n";
        for (const auto& [f, n] : st.column_families) out << "column," << f << ',' << n << "\n";
        for (const auto& [f, n] : st.row_families) out << "row," << f << ',' << n << "\n";
    }
    {
        auto out = create(dir / "solution.csv");
        out << "column,value,reduced_cost\n";
        for (int j = 0; j < run.lp.num_variables(); ++j) {
            const auto jj = static_cast<std::size_t>(j);
            out << run.lp.variable(j).name << ',' << num(run.solution.primal.at(jj)) << ','
                << num(jj < run.solution.reduced_cost.size() ? run.solution.reduced_cost[jj] : 0.0) << "\n";
        }
    }
    {
        auto out = create(dir / "rows.csv");
        out << "row,activity,dual\n";
        for (int i = 0; i < run.lp.num_constraints(); ++i) {
            const auto ii = static_cast<std::size_t>(i);
            out << run.lp.constraint(i).name << ',' << num(run.solution.row_activity.at(ii)) << ','
                << num(ii < run.solution.dual.size() ? run.solution.dual[ii] : 0.0) << "\n";
        }
    }
    {
        json j;
        j["status"] = status_text(run.solution.status);
        j["objective"] = run.solution.objective;
        j["iterations"] = run.solution.iterations;
        j["wall_seconds"] = run.solution.wall_seconds;
        j["message"] = run.solution.message;
        j["finished"] = utc_now();
        create(dir / "result.json") << j.dump(2) << "\n";
    }
    if (reference) {
        RunRequest twin = request;
        twin.overrides.rollout = reference->scenario.rollout;
        write_run(dir / "reference", twin, *reference, nullptr);
    }
    if (run.solution.optimal() && (!reference || reference->solution.optimal())) write_reports(dir, run, reference);
}

SolvedRun load_run(const fs::path& dir) {
    SolvedRun run;
    run.scenario = load_scenario(dir / "scenario" / "scenario.yaml");
    run.demand = prepare_demand(run.scenario);
    BuiltModel m = build_lp(run.scenario, run.demand);
    run.index = std::move(m.index);
    run.lp = std::move(m.lp);

    const auto n = static_cast<std::size_t>(run.lp.num_variables());
    const auto rows = static_cast<std::size_t>(run.lp.num_constraints());
    Solution& sol = run.solution;
    sol.primal.assign(n, 0.0);
    sol.reduced_cost.assign(n, 0.0);
    sol.dual.assign(rows, 0.0);

    auto read_csv = [&](const fs::path& path, auto&& each) {
        std::istringstream in(read_file(path));
        std::string line;
        std::getline(in, line);
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            // names contain commas, the two numbers never do
            const auto b = line.rfind(',');
            const auto a = b == std::string::npos ? b : line.rfind(',', b - 1);
            if (a == std::string::npos) {
                throw Error(ErrorKind::SchemaViolation, path.string() + ":" + std::to_string(line_no) + ": expected three fields");
            }
            each(line.substr(0, a), std::stod(line.substr(a + 1, b - a - 1)), std::stod(line.substr(b + 1)));
        }
    };
    std::map<std::string, int> cols;
    for (int j = 0; j < run.lp.num_variables(); ++j) cols[run.lp.variable(j).name] = j;
    std::size_t seen = 0;
    read_csv(dir / "solution.csv", [&](const std::string& name, double v, double d) {
        const auto it = cols.find(name);
        if (it == cols.end()) throw Error(ErrorKind::UnknownColumn, name + " is not a column of the rebuilt model");
        sol.primal[static_cast<std::size_t>(it->second)] = v;
        sol.reduced_cost[static_cast<std::size_t>(it->second)] = d;
        ++seen;
    });
    if (seen != n) throw Error(ErrorKind::LengthMismatch, "solution.csv has " + std::to_string(seen) + " of " + std::to_string(n) + " columns");
    std::map<std::string, int> row_ix;
    for (int i = 0; i < run.lp.num_constraints(); ++i) row_ix[run.lp.constraint(i).name] = i;
    read_csv(dir / "rows.csv", [&](const std::string& name, double, double y) {
        const auto it = row_ix.find(name);
        if (it == row_ix.end()) throw Error(ErrorKind::UnknownColumn, name + " is not a row of the rebuilt model");
        sol.dual[static_cast<std::size_t>(it->second)] = y;
    });

    const json result = json::parse(read_file(dir / "result.json"));
    sol.status = status_from(result.at("status").get<std::string>());
    sol.iterations = result.at("iterations").get<long>();
    sol.wall_seconds = result.at("wall_seconds").get<double>();
    certify(run.lp, sol);
    return run;
}

Comparison compare_runs(const SolvedRun& ref, const SolvedRun& roll, const SavingsParams& p) {
    if (!(ref.scenario.zones == roll.scenario.zones) || !(ref.scenario.technologies == roll.scenario.technologies)) {
        throw Error(ErrorKind::MismatchedScenarios, "runs have different zones or technologies");
    }
    Comparison c;
    c.savings = gas_emission_savings(ref, roll, p);
    c.horizon_heat_delta = roll.demand.heat.horizon_heat() - ref.demand.heat.horizon_heat();
    const TechTotals a = tech_totals(ref), b = tech_totals(roll);
    std::set<std::string> keys;
    for (const auto& [k, v] : a.capacity) keys.insert(k);
    for (const auto& [k, v] : b.capacity) keys.insert(k);
    auto get = [](const std::map<std::string, double>& m, const std::string& k) {
        const auto it = m.find(k);
        return it == m.end() ? 0.0 : it->second;
    };
    for (const auto& k : keys) {
        c.capacity.push_back({k, get(a.capacity, k), get(b.capacity, k)});
        c.dispatch.push_back({k, get(a.dispatch, k), get(b.dispatch, k)});
    }
    return c;
}

void write_comparison(const fs::path& dir, const Comparison& c) {
    fs::create_directories(dir);
    auto table = [&](const char* file, const std::vector<DeltaRow>& rows, const char* unit) {
        auto out = create(dir / file);
        out << "zone,tech,ref_" << unit << ",roll_" << unit << ",delta_" << unit << "\n";
        for (const auto& r : rows) {
            const auto dot = r.key.find('.');
            out << r.key.substr(0, dot) << ',' << r.key.substr(dot + 1) << ',' << num(r.ref) << ','
                << num(r.roll) << ',' << num(r.roll - r.ref) << "\n";
        }
    };
    table("delta_capacity.csv", c.capacity, "mw");
    table("delta_dispatch.csv", c.dispatch, "mwh");
    write_savings(dir / "savings.csv", c.savings);
    create(dir / "heat.csv") << "quantity,value,unit\nhorizon_heat_delta," << num(c.horizon_heat_delta) << ",MWh_th\n";
}

}  // namespace gridplan
