// Serial vs OpenMP simplex kernels on the desk LP, plus one full solve.
// GRIDPLAN_THREADS / OMP_NUM_THREADS pick the worker count.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gridplan/demand.hpp"
#include "gridplan/kernels.hpp"
#include "gridplan/model.hpp"
#include "gridplan/scenario.hpp"
#include "gridplan/simplex.hpp"

using namespace gridplan;

namespace {

struct Desk {
    LinearProgram lp;
    SparseMatrix csc, csr;
    std::vector<double> cost, y, x, d, weight;
    std::vector<kernels::Move> move;

    Desk() {
        const Scenario s = load_scenario(GRIDPLAN_DATA_DIR "/desk-europe/desk.yaml");
        lp = build_lp(s, prepare_demand(s)).lp;
        csc = lp.column_major();
        csr = lp.row_major();
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        cost.resize(csc.major);
        x.resize(csc.major);
        d.resize(csc.major);
        weight.resize(csc.major);
        move.resize(csc.major);
        y.resize(csr.major);
        for (auto& v : cost) v = u(rng);
        for (auto& v : x) v = u(rng);
        for (auto& v : d) v = u(rng);
        for (auto& v : weight) v = 1.0 + u(rng) * u(rng);
        for (auto& v : y) v = u(rng);
        for (std::size_t j = 0; j < move.size(); ++j) move[j] = static_cast<kernels::Move>(j % 4 == 0 ? 0 : (j % 2 ? 1 : -1));
    }
};

Desk& desk() {
    static Desk instance;
    return instance;
}

template <bool Parallel>
void BM_reduced_costs(benchmark::State& state) {
    Desk& k = desk();
    std::vector<double> out(k.csc.major);
    for (auto _ : state) {
        if constexpr (Parallel) kernels::parallel::reduced_costs(k.csc, k.cost, k.y, out);
        else kernels::serial::reduced_costs(k.csc, k.cost, k.y, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(k.csc.nonzeros()));
}

template <bool Parallel>
void BM_row_activity(benchmark::State& state) {
    Desk& k = desk();
    std::vector<double> out(k.csr.major);
    for (auto _ : state) {
        if constexpr (Parallel) kernels::parallel::row_activity(k.csr, k.x, out);
        else kernels::serial::row_activity(k.csr, k.x, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(k.csr.nonzeros()));
}

template <bool Parallel>
void BM_select_entering(benchmark::State& state) {
    Desk& k = desk();
    for (auto _ : state) {
        kernels::Candidate c = Parallel ? kernels::parallel::select_entering(k.d, k.weight, k.move, 1e-9)
                                        : kernels::serial::select_entering(k.d, k.weight, k.move, 1e-9);
        benchmark::DoNotOptimize(c);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(k.d.size()));
}

template <bool Parallel>
void BM_max_abs(benchmark::State& state) {
    Desk& k = desk();
    for (auto _ : state) {
        double m = Parallel ? kernels::parallel::max_abs(k.x) : kernels::serial::max_abs(k.x);
        benchmark::DoNotOptimize(m);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(k.x.size()));
}

void BM_solve_desk(benchmark::State& state) {
    Scenario s = load_scenario(GRIDPLAN_DATA_DIR "/desk-europe/desk.yaml");
    const LinearProgram lp = build_lp(s, prepare_demand(s)).lp;
    SolveOptions o;
    o.threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        Solution sol = solve(lp, o);
        benchmark::DoNotOptimize(sol.objective);
        state.counters["iterations"] = static_cast<double>(sol.iterations);
    }
}

}  // namespace

BENCHMARK(BM_reduced_costs<false>)->Name("reduced_costs/serial");
BENCHMARK(BM_reduced_costs<true>)->Name("reduced_costs/parallel");
BENCHMARK(BM_row_activity<false>)->Name("row_activity/serial");
BENCHMARK(BM_row_activity<true>)->Name("row_activity/parallel");
BENCHMARK(BM_select_entering<false>)->Name("select_entering/serial");
BENCHMARK(BM_select_entering<true>)->Name("select_entering/parallel");
BENCHMARK(BM_max_abs<false>)->Name("max_abs/serial");
BENCHMARK(BM_max_abs<true>)->Name("max_abs/parallel");
BENCHMARK(BM_solve_desk)->Name("solve_desk")->Arg(1)->Arg(0)->Iterations(1)->Unit(benchmark::kSecond);

BENCHMARK_MAIN();
