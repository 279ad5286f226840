#include <doctest.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "gridplan/error.hpp"
#include "gridplan/rundir.hpp"

using namespace gridplan;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("gridplan_rundir_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

RunRequest saved_request(const Scenario& s, const fs::path& dir) {
    save_scenario(s, dir);
    RunRequest req;
    req.config = dir / "scenario.yaml";
    return req;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int error_kind(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return static_cast<int>(e.kind());
    }
    return -1;
}

}  // namespace

TEST_CASE("sha256 of known strings") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("run ids follow the request and fresh directories never collide") {
    const fs::path base = scratch("ids");
    RunRequest a = saved_request(fixtures::tiny_heated(24, 2.0), base / "cfg");
    RunRequest b = a;
    CHECK(run_id(a) == run_id(b));
    CHECK(run_id(a).size() == 12);
    b.overrides.ep_ratio_hours = 6.0;
    CHECK(run_id(a) != run_id(b));
    b = a;
    b.solver.feasibility_tolerance = 1e-7;
    CHECK(run_id(a) != run_id(b));

    const fs::path d0 = fresh_run_dir(base, "x");
    CHECK(d0 == base / "x");
    fs::create_directories(d0);
    const fs::path d1 = fresh_run_dir(base, "x");
    CHECK(d1 == base / "x.1");
    fs::create_directories(d1);
    CHECK(fresh_run_dir(base, "x") == base / "x.2");
}

TEST_CASE("a written run loads back with the same solution") {
    const fs::path base = scratch("roundtrip");
    const Scenario s = fixtures::tiny_heated(24, 2.0);
    const RunRequest req = saved_request(s, base / "cfg");
    const SolvedRun run = solve_scenario(s);
    REQUIRE(run.solution.optimal());
    const fs::path dir = base / "run";
    write_run(dir, req, run, nullptr);

    for (const char* f : {"manifest.json", "result.json", "lp_stats.csv", "solution.csv", "rows.csv", "capacity.csv",
                          "dispatch.csv", "residual_load.csv", "rldc.csv", "hp_operation.csv", "metrics.csv", "savings.csv"})
        CHECK_MESSAGE(fs::exists(dir / f), f);

    const SolvedRun back = load_run(dir);
    CHECK(back.scenario == run.scenario);
    CHECK(back.solution.optimal());
    CHECK(back.solution.objective == doctest::Approx(run.solution.objective).epsilon(1e-12));
    REQUIRE(back.solution.primal.size() == run.solution.primal.size());
    for (std::size_t j = 0; j < run.solution.primal.size(); ++j) CHECK(back.solution.primal[j] == run.solution.primal[j]);

    // append-only
    CHECK(error_kind([&] { write_run(dir, req, run, nullptr); }) == static_cast<int>(ErrorKind::InvariantViolation));
    CHECK(error_kind([&] { write_reports(dir, run, nullptr); }) == static_cast<int>(ErrorKind::InvariantViolation));
}

TEST_CASE("two runs of the same request write identical outputs apart from timestamps") {
    const fs::path base = scratch("determinism");
    const Scenario s = fixtures::tiny_heated(24, 6.0);
    const RunRequest req = saved_request(s, base / "cfg");
    const fs::path a = base / "a", b = base / "b";
    write_run(a, req, solve_scenario(s), nullptr);
    write_run(b, req, solve_scenario(s), nullptr);
    int compared = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        const fs::path rel = fs::relative(e.path(), a);
        if (rel == "manifest.json" || rel == "result.json") continue;
        ++compared;
        CHECK_MESSAGE(slurp(e.path()) == slurp(b / rel), rel.string());
    }
    CHECK(compared >= 12);
}

TEST_CASE("comparison needs the same zones and technologies") {
    const SolvedRun heated = solve_scenario(fixtures::tiny_heated(24, 0.0));
    const SolvedRun plain = solve_scenario(fixtures::tiny(24));
    CHECK(error_kind([&] { compare_runs(plain, heated); }) == static_cast<int>(ErrorKind::MismatchedScenarios));

    const Comparison same = compare_runs(heated, heated);
    for (const auto& row : same.capacity) CHECK(row.ref == row.roll);
    CHECK(same.horizon_heat_delta == 0.0);
    CHECK(same.savings.system_cost == 0.0);
}
