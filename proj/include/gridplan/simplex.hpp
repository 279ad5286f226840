#pragma once

#include <string>
#include <vector>

#include "gridplan/linear_program.hpp"

namespace gridplan {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string_view to_string(SolveStatus status);

struct SolveOptions {
    /// Final certification: largest row/bound violation divided by
    /// max(1, |rhs|) must stay below this for an optimal status.
    double feasibility_tolerance = 1e-6;
    /// Final certification: |primal - dual| / max(1, |primal|).
    double gap_tolerance = 1e-6;
    /// Internal primal tolerance on the scaled problem.
    double primal_tolerance = 1e-9;
    /// Internal reduced-cost tolerance on the scaled problem.
    double dual_tolerance = 1e-9;
    /// Smallest |alpha| accepted as a pivot.
    double pivot_tolerance = 1e-9;
    long max_iterations = 5'000'000;
    int refactor_interval = 100;
    /// Consecutive non-improving pivots before switching to Bland's rule.
    int bland_trigger = 500;
    /// Rejects a pivot when the FTRAN column and the BTRAN row disagree on
    /// the pivot element by more than this (relative).
    double pivot_check_tolerance = 1e-7;
    /// A step whose objective change is below this counts as non-improving.
    double progress_tolerance = 1e-12;
    /// Devex weights are reset to 1 once any exceeds this.
    double devex_reset = 1e8;
    /// Refactor-and-retry attempts after numerical trouble before giving up.
    int max_repairs = 20;
    bool scale = true;
    /// Alternating row/column geometric-mean passes.
    int scale_passes = 8;
    /// 0 picks the OpenMP thread count, 1 forces the serial kernels.
    int threads = 1;
    bool verbose = false;
};

struct Solution {
    SolveStatus status = SolveStatus::IterationLimit;
    double objective = 0.0;
    double dual_objective = 0.0;
    double relative_gap = 0.0;
    std::vector<double> primal;          // by column
    std::vector<double> dual;            // by row
    std::vector<double> reduced_cost;    // by column
    std::vector<double> row_activity;    // by row
    double max_residual = 0.0;           // absolute, rows and bounds
    double max_relative_residual = 0.0;  // row violation / max(1, |rhs|)
    long iterations = 0;
    double wall_seconds = 0.0;
    std::string message;

    bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Bounded-variable primal revised simplex with devex pricing, Harris ratio
/// test, Bland fallback on stalling and geometric-mean equilibration.
/// IterationLimit is reported through the status (with the last iterate);
/// NumericalBreakdown is thrown as an Error naming the offending row/column.
Solution solve(const LinearProgram& lp, const SolveOptions& options = {});

/// Recomputes activities, residuals, objective and (when duals are present)
/// the dual objective and gap of `solution` against `lp`.
void certify(const LinearProgram& lp, Solution& solution);

}  // namespace gridplan
