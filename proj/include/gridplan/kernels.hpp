#pragma once

// Data-parallel inner loops of the simplex solver. Each kernel exists in a
// serial reference form and an OpenMP form; both produce bit-identical
// results (every output element is computed by the same sequence of floating
// point operations, and reductions break ties by lowest index).

#include <cstdint>
#include <span>

#include "gridplan/linear_program.hpp"

namespace gridplan::kernels {

/// Pricing eligibility of a column: +1 may increase, -1 may decrease,
/// 2 free in both directions, 0 not a candidate (basic or fixed).
using Move = std::int8_t;

struct Candidate {
    int index = -1;
    double score = 0.0;
};

namespace serial {

/// out[j] = cost[j] - sum_i y[i] * A(i, j) for every column of `csc`.
void reduced_costs(const SparseMatrix& csc, std::span<const double> cost, std::span<const double> y,
                   std::span<double> out);

/// out[i] = sum_j A(i, j) * x[j] for every row of `csr`.
void row_activity(const SparseMatrix& csr, std::span<const double> x, std::span<double> out);

/// Devex-style pricing: argmax of d^2 / weight over eligible columns whose
/// reduced cost has an improving sign beyond `tolerance`.
Candidate select_entering(std::span<const double> d, std::span<const double> weight, std::span<const Move> move,
                          double tolerance);

/// Largest |v[i]|.
double max_abs(std::span<const double> v);

}  // namespace serial

namespace parallel {

void reduced_costs(const SparseMatrix& csc, std::span<const double> cost, std::span<const double> y,
                   std::span<double> out);
void row_activity(const SparseMatrix& csr, std::span<const double> x, std::span<double> out);
Candidate select_entering(std::span<const double> d, std::span<const double> weight, std::span<const Move> move,
                          double tolerance);
double max_abs(std::span<const double> v);

}  // namespace parallel

/// Number of worker threads the parallel kernels use (1 when built without
/// OpenMP).
int available_threads();

/// Dispatches to the serial or parallel form.
struct Backend {
    bool use_parallel = false;

    void reduced_costs(const SparseMatrix& csc, std::span<const double> cost, std::span<const double> y,
                       std::span<double> out) const {
        use_parallel ? parallel::reduced_costs(csc, cost, y, out) : serial::reduced_costs(csc, cost, y, out);
    }
    void row_activity(const SparseMatrix& csr, std::span<const double> x, std::span<double> out) const {
        use_parallel ? parallel::row_activity(csr, x, out) : serial::row_activity(csr, x, out);
    }
    Candidate select_entering(std::span<const double> d, std::span<const double> weight, std::span<const Move> move,
                              double tolerance) const {
        return use_parallel ? parallel::select_entering(d, weight, move, tolerance)
                            : serial::select_entering(d, weight, move, tolerance);
    }
    double max_abs(std::span<const double> v) const {
        return use_parallel ? parallel::max_abs(v) : serial::max_abs(v);
    }
};

}  // namespace gridplan::kernels
