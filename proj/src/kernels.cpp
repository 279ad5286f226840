#include "gridplan/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gridplan::kernels {

namespace {

inline double column_dot(const SparseMatrix& csc, std::span<const double> y, std::size_t j) {
    double sum = 0.0;
    for (std::size_t k = csc.start[j]; k < csc.start[j + 1]; ++k) {
        sum += y[static_cast<std::size_t>(csc.index[k])] * csc.value[k];
    }
    return sum;
}

inline double score_of(double d, double w, Move move, double tolerance) {
    switch (move) {
        case 1: return d < -tolerance ? d * d / w : -1.0;
        case -1: return d > tolerance ? d * d / w : -1.0;
        case 2: return std::abs(d) > tolerance ? d * d / w : -1.0;
        default: return -1.0;
    }
}

inline bool better(const Candidate& a, const Candidate& b) {
    if (a.index < 0) return false;
    if (b.index < 0) return true;
    if (a.score != b.score) return a.score > b.score;
    return a.index < b.index;
}

}  // namespace

namespace serial {

void reduced_costs(const SparseMatrix& csc, std::span<const double> cost, std::span<const double> y,
                   std::span<double> out) {
    const auto n = static_cast<std::size_t>(csc.major);
    for (std::size_t j = 0; j < n; ++j) out[j] = cost[j] - column_dot(csc, y, j);
}

void row_activity(const SparseMatrix& csr, std::span<const double> x, std::span<double> out) {
    const auto m = static_cast<std::size_t>(csr.major);
    for (std::size_t i = 0; i < m; ++i) out[i] = column_dot(csr, x, i);
}

Candidate select_entering(std::span<const double> d, std::span<const double> weight, std::span<const Move> move,
                          double tolerance) {
    Candidate best;
    for (std::size_t j = 0; j < d.size(); ++j) {
        const double s = score_of(d[j], weight[j], move[j], tolerance);
        if (s < 0.0) continue;
        Candidate c{static_cast<int>(j), s};
        if (better(c, best)) best = c;
    }
    return best;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace serial

namespace parallel {

void reduced_costs(const SparseMatrix& csc, std::span<const double> cost, std::span<const double> y,
                   std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(csc.major);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        out[jj] = cost[jj] - column_dot(csc, y, jj);
    }
}

void row_activity(const SparseMatrix& csr, std::span<const double> x, std::span<double> out) {
    const auto m = static_cast<std::ptrdiff_t>(csr.major);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        out[ii] = column_dot(csr, x, ii);
    }
}

Candidate select_entering(std::span<const double> d, std::span<const double> weight, std::span<const Move> move,
                          double tolerance) {
    const auto n = static_cast<std::ptrdiff_t>(d.size());
    Candidate best;
#pragma omp parallel
    {
        Candidate local;
#pragma omp for schedule(static) nowait
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            const double s = score_of(d[jj], weight[jj], move[jj], tolerance);
            if (s < 0.0) continue;
            Candidate c{static_cast<int>(j), s};
            if (better(c, local)) local = c;
        }
#pragma omp critical(gridplan_select_entering)
        {
            if (better(local, best)) best = local;
        }
    }
    return best;
}

double max_abs(std::span<const double> v) {
    const auto n = static_cast<std::ptrdiff_t>(v.size());
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
    for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(v[static_cast<std::size_t>(i)]));
    return m;
}

}  // namespace parallel

int available_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace gridplan::kernels
