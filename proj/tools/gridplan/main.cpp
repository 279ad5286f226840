#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gridplan/error.hpp"
#include "gridplan/mps.hpp"
#include "gridplan/post.hpp"
#include "gridplan/rundir.hpp"

using namespace gridplan;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kSolveFailed = 2;

int worker_limit() {
    const char* env = std::getenv("GRIDPLAN_THREADS");
    int n = env ? std::atoi(env) : 0;
    if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return n;
}

struct OverrideArgs {
    double ep = 0.0;
    std::string rollout;
    double gas = 0.0;
    double carbon = 0.0;
    bool coal = false;
    bool wind = false;
    int drought = 0;
    bool no_additionality = false;
    CLI::Option* ep_opt = nullptr;
    CLI::Option* rollout_opt = nullptr;
    CLI::Option* gas_opt = nullptr;
    CLI::Option* carbon_opt = nullptr;
    CLI::Option* drought_opt = nullptr;

    void attach(CLI::App* app) {
        ep_opt = app->add_option("--ep-ratio", ep, "heat storage energy-to-power ratio in hours");
        rollout_opt = app->add_option("--rollout", rollout, "heat-pump rollout name");
        gas_opt = app->add_option("--gas-price", gas, "EUR/MWh_th");
        carbon_opt = app->add_option("--carbon-price", carbon, "EUR/t");
        app->add_flag("--coal-phase-out", coal, "no coal capacity");
        app->add_flag("--wind-cap-removed", wind, "lift the wind investment caps");
        drought_opt = app->add_option("--re-drought-week", drought, "zero wind and solar in this week (1-based)");
        app->add_flag("--no-hp-additionality", no_additionality, "heat-pump electricity leaves the renewable target");
    }

    ScenarioOverrides get() const {
        ScenarioOverrides o;
        if (ep_opt->count()) o.ep_ratio_hours = ep;
        if (rollout_opt->count()) o.rollout = rollout;
        if (gas_opt->count()) o.gas_price = gas;
        if (carbon_opt->count()) o.carbon_price = carbon;
        if (coal) o.coal_phase_out = true;
        if (wind) o.wind_cap_removed = true;
        if (drought_opt->count()) o.re_drought_week = drought;
        if (no_additionality) o.hp_additionality = false;
        return o;
    }
};

SolveOptions solver_options(int workers) {
    SolveOptions o;
    o.threads = workers > 1 ? 1 : 0;
    return o;
}

void warn_lost_load(const SolvedRun& run, const std::string& label) {
    for (const auto& [zone, cols] : run.index.lost_load) {
        const double v = run.sum(cols);
        if (v > 1e-6) std::fprintf(stderr, "WARNING %s: lost load %.3f MWh in zone %s\n", label.c_str(), v, zone.c_str());
    }
}

void print_solution(const SolvedRun& run) {
    const Solution& s = run.solution;
    std::printf("status      %s\n", std::string(to_string(s.status)).c_str());
    std::printf("objective   %.10g EUR\n", s.objective);
    std::printf("iterations  %ld\n", s.iterations);
    std::printf("gap         %.3g\n", s.relative_gap);
    std::printf("residual    %.3g\n", s.max_relative_residual);
    std::printf("seconds     %.2f\n", s.wall_seconds);
    if (!s.message.empty()) std::printf("message     %s\n", s.message.c_str());
}

// runs `jobs` on up to `workers` threads, rethrowing the first failure
void run_parallel(std::vector<std::function<void()>>& jobs, int workers) {
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            try {
                jobs[k]();
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(workers, static_cast<int>(jobs.size()));
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

int cmd_validate(const fs::path& config, const ScenarioOverrides& o) {
    const Scenario s = load_scenario(config, o);
    std::printf("scenario    %s\n", s.name.c_str());
    std::printf("hours       %d of %d\n", s.hours(), s.hours_per_year);
    std::printf("zones       %zu, focal %s\n", s.zones.size(), s.focal_zone().id.c_str());
    std::printf("techs       %zu\n", s.technologies.size());
    std::printf("rollout     %s\n", s.rollout.c_str());
    std::printf("ep ratio    %g h\n", s.policy.ep_ratio_hours);
    std::printf("res target  %g\n", s.policy.res_share_target);
    std::printf("OK\n");
    return kOk;
}

int cmd_inspect_demand(const fs::path& config, const ScenarioOverrides& o, const std::string& out) {
    const Scenario s = load_scenario(config, o);
    const PreparedDemand d = prepare_demand(s);
    const auto& hs = d.heat;
    std::printf("%-24s %12s %12s %12s %8s\n", "unit", "TWh_th/yr", "GW_th", "GWh_th", "mean COP");
    for (const auto& u : hs.units) {
        double c = 0.0;
        for (double v : u.cop) c += v;
        std::printf("%-24s %12.3f %12.3f %12.3f %8.3f\n", u.id().c_str(), u.annual_heat / 1e6, u.capacity_th / 1e3,
                    u.storage_energy / 1e3, c / static_cast<double>(u.cop.size()));
    }
    std::printf("%-24s %12.3f %12.3f %12.3f\n", "total", hs.annual_heat() / 1e6, hs.thermal_capacity() / 1e3, hs.storage_energy() / 1e3);
    std::printf("share scale %.6f\n", hs.share_scale);
    double ev = 0.0;
    for (double v : d.ev_load) ev += v;
    std::printf("EV          %.4f TWh over the horizon\n", ev / 1e6);
    std::printf("H2          %.4f TWh_H2, %.4f TWh_el over the horizon\n", d.h2_demand / 1e6, d.h2_electricity / 1e6);
    if (!out.empty()) {
        std::vector<std::string> header{"ev_mw"};
        std::vector<const std::vector<double>*> cols{&d.ev_load};
        for (const auto& u : hs.units) {
            header.push_back(u.archetype + ":" + std::string(to_string(u.kind)) + ".heat_mw");
            cols.push_back(&u.demand);
            header.push_back(u.archetype + ":" + std::string(to_string(u.kind)) + ".cop");
            cols.push_back(&u.cop);
        }
        if (fs::exists(out)) throw Error(ErrorKind::InvariantViolation, out + " already exists");
        write_series_csv(out, header, cols);
        std::printf("wrote %s\n", out.c_str());
    }
    return kOk;
}

int cmd_dump_model(const fs::path& config, const ScenarioOverrides& o, const std::string& listing) {
    const Scenario s = load_scenario(config, o);
    const BuiltModel m = build_lp(s, prepare_demand(s));
    const LpStats st = lp_stats(m.lp);
    std::printf("columns   %d\nrows      %d\nnonzeros  %zu\n", st.columns, st.rows, st.nonzeros);
    for (const auto& [f, n] : st.column_families) std::printf("  column  %-20s %d\n", f.c_str(), n);
    for (const auto& [f, n] : st.row_families) std::printf("  row     %-20s %d\n", f.c_str(), n);
    if (!listing.empty()) {
        if (fs::exists(listing)) throw Error(ErrorKind::InvariantViolation, listing + " already exists");
        std::ofstream out(listing);
        out << "offset " << format_number(m.lp.objective_offset()) << "\n";
        for (const auto& v : m.lp.variables())
            out << "col " << v.name << " [" << format_number(v.lower) << ", " << format_number(v.upper) << "] cost "
                << format_number(v.cost) << "\n";
        for (const auto& c : m.lp.constraints()) {
            out << "row " << c.name << " :";
            for (const auto& t : c.terms) out << ' ' << format_number(t.coefficient) << ' ' << m.lp.variable(t.column).name;
            out << ' ' << sense_symbol(c.sense) << ' ' << format_number(c.rhs) << "\n";
        }
        std::printf("wrote %s\n", listing.c_str());
    }
    return kOk;
}

int cmd_solve(const fs::path& config, const ScenarioOverrides& o) {
    const Scenario s = load_scenario(config, o);
    const SolvedRun run = solve_scenario(s, solver_options(1));
    print_solution(run);
    warn_lost_load(run, s.name);
    return run.solution.optimal() ? kOk : kSolveFailed;
}

struct Member {
    std::string label;
    ScenarioOverrides overrides;
};

std::vector<Member> expand_sweeps(const ScenarioOverrides& base, const std::vector<std::string>& sweeps) {
    std::vector<Member> members{{"", base}};
    for (const auto& spec : sweeps) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::SchemaViolation, "sweep '" + spec + "' is not key=v1,v2");
        const std::string key = spec.substr(0, eq);
        std::vector<std::string> values;
        std::stringstream ss(spec.substr(eq + 1));
        for (std::string v; std::getline(ss, v, ',');)
            if (!v.empty()) values.push_back(v);
        if (values.empty()) throw Error(ErrorKind::SchemaViolation, "sweep '" + spec + "' has no values");
        std::vector<Member> next;
        for (const auto& m : members) {
            for (const auto& v : values) {
                Member x = m;
                if (key == "ep" || key == "ep_ratio") {
                    x.overrides.ep_ratio_hours = std::stod(v);
                } else if (key == "rollout") {
                    x.overrides.rollout = v;
                } else if (key == "gas_price") {
                    x.overrides.gas_price = std::stod(v);
                } else if (key == "carbon_price") {
                    x.overrides.carbon_price = std::stod(v);
                } else {
                    throw Error(ErrorKind::SchemaViolation, "unknown sweep key " + key);
                }
                x.label += (x.label.empty() ? "" : "_") + key + v;
                next.push_back(std::move(x));
            }
        }
        members = std::move(next);
    }
    return members;
}

int cmd_run(const fs::path& config, const ScenarioOverrides& o, const std::vector<std::string>& sweeps,
            const std::string& out_base, const std::string& run_dir, const std::string& reference_rollout) {
    const int workers = worker_limit();
    RunRequest base;
    base.config = config;
    base.overrides = o;
    base.solver = solver_options(workers);
    base.reference_rollout = reference_rollout;
    // loading up front surfaces input errors before anything is written
    const Scenario probe = load_scenario(config, o);

    const std::vector<Member> members = expand_sweeps(o, sweeps);
    // every member plus the reference twin of each non-reference member
    std::map<std::string, std::size_t> slot;
    std::vector<Scenario> scenarios;
    std::vector<std::size_t> member_slot, twin_slot;
    auto need = [&](const ScenarioOverrides& ov) {
        const std::string key = ov.describe();
        auto it = slot.find(key);
        if (it != slot.end()) return it->second;
        scenarios.push_back(load_scenario(config, ov));
        slot[key] = scenarios.size() - 1;
        return scenarios.size() - 1;
    };
    const bool has_reference = probe.rollouts.count(reference_rollout) > 0;
    if (!has_reference) std::fprintf(stderr, "note: no rollout named %s, savings are taken against the run itself\n", reference_rollout.c_str());
    for (const auto& m : members) {
        member_slot.push_back(need(m.overrides));
        const Scenario& s = scenarios[member_slot.back()];
        if (has_reference && s.rollout != reference_rollout) {
            ScenarioOverrides twin = m.overrides;
            twin.rollout = reference_rollout;
            twin_slot.push_back(need(twin));
        } else {
            twin_slot.push_back(SIZE_MAX);
        }
    }

    std::vector<SolvedRun> solved(scenarios.size());
    std::vector<std::function<void()>> jobs;
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
        jobs.push_back([&, k] {
            solved[k] = solve_scenario(scenarios[k], base.solver);
            std::fprintf(stderr, "solved %s %s ep %g: %s\n", scenarios[k].name.c_str(), scenarios[k].rollout.c_str(),
                         scenarios[k].policy.ep_ratio_hours, std::string(to_string(solved[k].solution.status)).c_str());
        });
    }
    run_parallel(jobs, workers);

    const bool sweep = !sweeps.empty();
    std::string id = run_id(base);
    if (sweep) {
        std::string all;
        for (const auto& s : sweeps) all += s + ";";
        id = sha256_hex(id + all).substr(0, 12);
    }
    const fs::path dir = run_dir.empty() ? fresh_run_dir(out_base, id) : fs::path(run_dir);
    if (fs::exists(dir)) throw Error(ErrorKind::InvariantViolation, "run directory " + dir.string() + " already exists");

    bool all_optimal = true;
    std::ostringstream summary;
    summary << "member,rollout,ep_ratio,status,objective_eur\n";
    for (std::size_t i = 0; i < members.size(); ++i) {
        const SolvedRun& run = solved[member_slot[i]];
        const SolvedRun* ref = twin_slot[i] == SIZE_MAX ? nullptr : &solved[twin_slot[i]];
        RunRequest req = base;
        req.overrides = members[i].overrides;
        const fs::path target = sweep ? dir / members[i].label : dir;
        if (sweep) fs::create_directories(dir);
        write_run(target, req, run, ref);
        warn_lost_load(run, members[i].label.empty() ? run.scenario.rollout : members[i].label);
        all_optimal = all_optimal && run.solution.optimal() && (!ref || ref->solution.optimal());
        summary << (members[i].label.empty() ? "run" : members[i].label) << ',' << run.scenario.rollout << ','
                << format_number(run.scenario.policy.ep_ratio_hours) << ',' << to_string(run.solution.status) << ','
                << format_number(run.solution.objective) << "\n";
        if (!sweep) print_solution(run);
    }
    if (sweep) {
        std::ofstream(dir / "summary.csv") << summary.str();
        std::cout << summary.str();
        // objective should not rise with more storage
        std::map<std::string, std::vector<std::pair<double, double>>> by;
        for (std::size_t i = 0; i < members.size(); ++i) {
            const SolvedRun& r = solved[member_slot[i]];
            ScenarioOverrides rest = members[i].overrides;
            rest.ep_ratio_hours.reset();
            by[rest.describe()].push_back({r.scenario.policy.ep_ratio_hours, r.solution.objective});
        }
        for (auto& [k, v] : by) {
            std::sort(v.begin(), v.end());
            for (std::size_t j = 1; j < v.size(); ++j)
                if (v[j].second > v[j - 1].second * (1.0 + 1e-9))
                    std::fprintf(stderr, "WARNING objective rises from ep %g to ep %g (%s)\n", v[j - 1].first, v[j].first, k.c_str());
        }
    }
    std::printf("run directory %s\n", dir.string().c_str());
    return all_optimal ? kOk : kSolveFailed;
}

int cmd_report(const fs::path& run_dir, const std::string& compare_dir, const std::string& out) {
    const SolvedRun run = load_run(run_dir);
    print_solution(run);
    std::unique_ptr<SolvedRun> ref;
    if (!compare_dir.empty()) ref = std::make_unique<SolvedRun>(load_run(compare_dir));
    const fs::path target = out.empty() ? fresh_run_dir(run_dir, "report") : fs::path(out);
    if (fs::exists(target)) throw Error(ErrorKind::InvariantViolation, target.string() + " already exists");
    write_reports(target, run, ref.get());
    if (ref) write_comparison(target / "compare", compare_runs(*ref, run));
    std::printf("reports in %s\n", target.string().c_str());
    return kOk;
}

int cmd_compare(const fs::path& ref_dir, const fs::path& roll_dir, const std::string& out) {
    const SolvedRun ref = load_run(ref_dir);
    const SolvedRun roll = load_run(roll_dir);
    const Comparison c = compare_runs(ref, roll);
    std::printf("%-28s %14s %14s %14s\n", "capacity MW", "ref", "roll", "delta");
    for (const auto& r : c.capacity) std::printf("%-28s %14.2f %14.2f %14.2f\n", r.key.c_str(), r.ref, r.roll, r.roll - r.ref);
    std::printf("\n%-28s %14s %14s %14s\n", "dispatch MWh", "ref", "roll", "delta");
    for (const auto& r : c.dispatch) std::printf("%-28s %14.1f %14.1f %14.1f\n", r.key.c_str(), r.ref, r.roll, r.roll - r.ref);
    const SavingsReport& s = c.savings;
    std::printf("\nheat delta           %10.4f TWh_th/yr (%.1f MWh_th over the horizon)\n", s.heat, c.horizon_heat_delta);
    std::printf("gas displaced        %10.4f TWh_th/yr\n", s.gas_displaced);
    std::printf("gas for electricity  %10.4f TWh_th/yr\n", s.gas_electricity);
    std::printf("total gas            %10.4f TWh_th/yr\n", s.total_gas);
    std::printf("emissions            %10.4f Mt CO2eq/yr\n", s.emissions);
    std::printf("system cost          %10.4f bn EUR/yr\n", s.system_cost);
    if (!out.empty()) {
        if (fs::exists(out)) throw Error(ErrorKind::InvariantViolation, out + " already exists");
        write_comparison(out, c);
        std::printf("tables in %s\n", out.c_str());
    }
    return kOk;
}

int cmd_export_mps(const fs::path& config, const ScenarioOverrides& o, const std::string& out, const std::string& names,
                   int width) {
    const Scenario s = load_scenario(config, o);
    const BuiltModel m = build_lp(s, prepare_demand(s));
    MpsOptions opt;
    opt.name_width = width;
    const MpsDocument doc = export_mps(m.lp, opt);
    if (fs::exists(out)) throw Error(ErrorKind::InvariantViolation, out + " already exists");
    std::ofstream(out) << doc.text;
    const std::string map_path = names.empty() ? out + ".names" : names;
    write_name_map(doc.names, map_path);
    std::printf("wrote %s (%d columns, %d rows) and %s\n", out.c_str(), m.lp.num_variables(), m.lp.num_constraints(), map_path.c_str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridplan: capacity expansion and dispatch with heat pumps and buffer storage"};
    app.require_subcommand(1);
    app.footer("Exit codes: 0 optimal, 2 infeasible or iteration limit, 1 input error.\n"
               "GRIDPLAN_THREADS caps the number of concurrent solves.");

    std::string config, run_dir, other_dir, out, run_out, names, reference = "reference", listing;
    std::vector<std::string> sweeps;
    int width = 8;

    auto* validate_cmd = app.add_subcommand("validate", "load and check a scenario config");
    OverrideArgs ov_validate;
    validate_cmd->add_option("config", config, "scenario config")->required();
    ov_validate.attach(validate_cmd);

    auto* demand_cmd = app.add_subcommand("inspect-demand", "heat-pump, EV and hydrogen demand of a scenario");
    OverrideArgs ov_demand;
    demand_cmd->add_option("config", config, "scenario config")->required();
    demand_cmd->add_option("--csv", out, "write hourly demand and COP series");
    ov_demand.attach(demand_cmd);

    auto* dump_cmd = app.add_subcommand("dump-model", "LP size by column and row family");
    OverrideArgs ov_dump;
    dump_cmd->add_option("config", config, "scenario config")->required();
    dump_cmd->add_option("--listing", listing, "write every column and row with structured names");
    ov_dump.attach(dump_cmd);

    auto* solve_cmd = app.add_subcommand("solve", "build and solve, print the result");
    OverrideArgs ov_solve;
    solve_cmd->add_option("config", config, "scenario config")->required();
    ov_solve.attach(solve_cmd);

    auto* run_cmd = app.add_subcommand("run", "solve and write a run directory with all reports");
    OverrideArgs ov_run;
    run_cmd->add_option("config", config, "scenario config")->required();
    run_cmd->add_option("--sweep", sweeps, "key=v1,v2,... over ep, rollout, gas_price, carbon_price (repeatable)");
    run_cmd->add_option("--out", run_out, "base directory for run directories")->default_val("runs");
    run_cmd->add_option("--run-dir", run_dir, "exact run directory (must not exist)");
    run_cmd->add_option("--reference-rollout", reference, "rollout used for the savings twin")->default_val("reference");
    ov_run.attach(run_cmd);

    auto* report_cmd = app.add_subcommand("report", "regenerate reports from a run directory");
    report_cmd->add_option("run", run_dir, "run directory")->required();
    report_cmd->add_option("--compare", other_dir, "reference run directory for savings and deltas");
    report_cmd->add_option("--out", out, "output directory (default: a fresh report directory inside the run)");

    auto* compare_cmd = app.add_subcommand("compare", "capacity, dispatch and savings deltas between two runs");
    compare_cmd->add_option("ref", run_dir, "reference run directory")->required();
    compare_cmd->add_option("roll", other_dir, "rollout run directory")->required();
    compare_cmd->add_option("--out", out, "write the tables here");

    auto* mps_cmd = app.add_subcommand("export-mps", "write the LP as fixed-format MPS plus a name map");
    OverrideArgs ov_mps;
    mps_cmd->add_option("config", config, "scenario config")->required();
    mps_cmd->add_option("--out", out, "MPS file")->required();
    mps_cmd->add_option("--names", names, "name map file (default: <out>.names)");
    mps_cmd->add_option("--width", width, "name field width")->default_val(8);
    ov_mps.attach(mps_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate_cmd) return cmd_validate(config, ov_validate.get());
        if (*demand_cmd) return cmd_inspect_demand(config, ov_demand.get(), out);
        if (*dump_cmd) return cmd_dump_model(config, ov_dump.get(), listing);
        if (*solve_cmd) return cmd_solve(config, ov_solve.get());
        if (*run_cmd) return cmd_run(config, ov_run.get(), sweeps, run_out, run_dir, reference);
        if (*report_cmd) return cmd_report(run_dir, other_dir, out);
        if (*compare_cmd) return cmd_compare(run_dir, other_dir, out);
        if (*mps_cmd) return cmd_export_mps(config, ov_mps.get(), out, names, width);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        switch (e.kind()) {
            case ErrorKind::IterationLimit:
            case ErrorKind::NumericalBreakdown: return kSolveFailed;
            default: return kInputError;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInputError;
    }
    return kInputError;
}
