#include "gridplan/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>

#include "gridplan/basis_factor.hpp"
#include "gridplan/error.hpp"
#include "gridplan/kernels.hpp"

namespace gridplan {

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::IterationLimit: return "iteration_limit";
    }
    return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Scaled internal form: columns 0..n-1 structural, n..n+m-1 row logicals
/// with A x - s = 0 and the row bounds moved onto s.
struct ScaledProblem {
    int n = 0;
    int m = 0;
    SparseMatrix csc;
    SparseMatrix csr;
    std::vector<double> lower, upper, cost;
    std::vector<double> col_scale, row_scale;
    double cost_scale = 1.0;
};

double power_of_two(double v) { return std::exp2(std::round(std::log2(v))); }

SparseMatrix transpose(const SparseMatrix& a) {
    SparseMatrix t;
    t.major = a.minor;
    t.minor = a.major;
    t.start.assign(static_cast<std::size_t>(t.major) + 1, 0);
    for (int idx : a.index) ++t.start[static_cast<std::size_t>(idx) + 1];
    for (std::size_t i = 0; i < static_cast<std::size_t>(t.major); ++i) t.start[i + 1] += t.start[i];
    t.index.resize(a.index.size());
    t.value.resize(a.value.size());
    std::vector<std::size_t> fill(t.start.begin(), t.start.end() - 1);
    for (std::size_t j = 0; j < static_cast<std::size_t>(a.major); ++j) {
        for (std::size_t k = a.start[j]; k < a.start[j + 1]; ++k) {
            const std::size_t pos = fill[static_cast<std::size_t>(a.index[k])]++;
            t.index[pos] = static_cast<int>(j);
            t.value[pos] = a.value[k];
        }
    }
    return t;
}

ScaledProblem prepare(const LinearProgram& lp, bool scale, int passes) {
    ScaledProblem p;
    p.n = lp.num_variables();
    p.m = lp.num_constraints();
    p.csc = lp.column_major();
    p.col_scale.assign(static_cast<std::size_t>(p.n), 1.0);
    p.row_scale.assign(static_cast<std::size_t>(p.m), 1.0);

    if (scale && p.csc.nonzeros() > 0) {
        std::vector<double> rmin(static_cast<std::size_t>(p.m)), rmax(static_cast<std::size_t>(p.m));
        for (int pass = 0; pass < passes; ++pass) {
            std::fill(rmin.begin(), rmin.end(), kInf);
            std::fill(rmax.begin(), rmax.end(), 0.0);
            for (std::size_t j = 0; j < static_cast<std::size_t>(p.n); ++j) {
                for (std::size_t k = p.csc.start[j]; k < p.csc.start[j + 1]; ++k) {
                    const auto i = static_cast<std::size_t>(p.csc.index[k]);
                    const double a = std::abs(p.csc.value[k]) * p.col_scale[j];
                    rmin[i] = std::min(rmin[i], a);
                    rmax[i] = std::max(rmax[i], a);
                }
            }
            for (std::size_t i = 0; i < static_cast<std::size_t>(p.m); ++i) {
                if (rmax[i] > 0.0) p.row_scale[i] = 1.0 / std::sqrt(rmin[i] * rmax[i]);
            }
            for (std::size_t j = 0; j < static_cast<std::size_t>(p.n); ++j) {
                double cmin = kInf;
                double cmax = 0.0;
                for (std::size_t k = p.csc.start[j]; k < p.csc.start[j + 1]; ++k) {
                    const double a = std::abs(p.csc.value[k]) * p.row_scale[static_cast<std::size_t>(p.csc.index[k])];
                    cmin = std::min(cmin, a);
                    cmax = std::max(cmax, a);
                }
                if (cmax > 0.0) p.col_scale[j] = 1.0 / std::sqrt(cmin * cmax);
            }
        }
        for (auto& r : p.row_scale) r = power_of_two(r);
        for (auto& s : p.col_scale) s = power_of_two(s);
    }

    for (std::size_t j = 0; j < static_cast<std::size_t>(p.n); ++j) {
        for (std::size_t k = p.csc.start[j]; k < p.csc.start[j + 1]; ++k) {
            p.csc.value[k] *= p.row_scale[static_cast<std::size_t>(p.csc.index[k])] * p.col_scale[j];
        }
    }
    p.csr = transpose(p.csc);

    const std::size_t total = static_cast<std::size_t>(p.n + p.m);
    p.lower.resize(total);
    p.upper.resize(total);
    p.cost.assign(total, 0.0);
    double cmax = 0.0;
    for (std::size_t j = 0; j < static_cast<std::size_t>(p.n); ++j) {
        const auto& v = lp.variable(static_cast<int>(j));
        p.lower[j] = v.lower / p.col_scale[j];
        p.upper[j] = v.upper / p.col_scale[j];
        p.cost[j] = v.cost * p.col_scale[j];
        cmax = std::max(cmax, std::abs(p.cost[j]));
    }
    p.cost_scale = cmax > 0.0 ? cmax : 1.0;
    for (std::size_t j = 0; j < static_cast<std::size_t>(p.n); ++j) p.cost[j] /= p.cost_scale;
    for (std::size_t i = 0; i < static_cast<std::size_t>(p.m); ++i) {
        const auto& row = lp.constraint(static_cast<int>(i));
        const double rhs = row.rhs * p.row_scale[i];
        const std::size_t j = static_cast<std::size_t>(p.n) + i;
        switch (row.sense) {
            case Sense::LessEqual: p.lower[j] = -kInf; p.upper[j] = rhs; break;
            case Sense::GreaterEqual: p.lower[j] = rhs; p.upper[j] = kInf; break;
            case Sense::Equal: p.lower[j] = rhs; p.upper[j] = rhs; break;
        }
    }
    return p;
}

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, AtZero, Fixed };

class PrimalSimplex {
public:
    PrimalSimplex(const ScaledProblem& p, const SolveOptions& o)
        : p_(p), opt_(o), n_(p.n), m_(p.m), total_(p.n + p.m) {
        backend_.use_parallel = o.threads != 1 && kernels::available_threads() > 1;
        const auto t = static_cast<std::size_t>(total_);
        x_.assign(t, 0.0);
        state_.assign(t, VarState::AtLower);
        pos_of_.assign(t, -1);
        head_.resize(static_cast<std::size_t>(m_));
        d_.assign(t, 0.0);
        y_.assign(static_cast<std::size_t>(m_), 0.0);
        weight_.assign(t, 1.0);
        move_.assign(t, 0);
        phase_cost_.assign(t, 0.0);
        row_value_.assign(t, 0.0);
        row_mark_.assign(t, 0);
    }

    SolveStatus run();

    long iterations() const { return iter_; }
    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& y() const { return y_; }
    const std::vector<double>& d() const { return d_; }

private:
    struct Ratio {
        double theta = 0.0;
        int position = -1;
        double bound = 0.0;
        bool flip = false;
        bool unbounded = false;
    };

    void initial_basis();
    void place_nonbasic(int j);
    void refactor();
    void compute_primal();
    double compute_phase_costs();
    void compute_duals(const std::vector<double>& cost);
    void refresh_moves();
    int choose_entering(bool bland);
    void load_column(int j, std::vector<double>& dense) const;
    Ratio ratio_test(int q, int dir, bool bland) const;
    void compute_pivot_row(int r);
    void log(const char* what, int phase, double value) const;

    const ScaledProblem& p_;
    const SolveOptions& opt_;
    int n_, m_, total_;
    kernels::Backend backend_;
    BasisFactor factor_;
    std::vector<double> x_;
    std::vector<VarState> state_;
    std::vector<int> pos_of_;
    std::vector<int> head_;
    std::vector<double> d_;
    std::vector<double> y_;
    std::vector<double> weight_;
    std::vector<kernels::Move> move_;
    std::vector<double> phase_cost_;
    std::vector<double> alpha_;
    std::vector<double> rho_;
    std::vector<double> row_value_;
    std::vector<char> row_mark_;
    std::vector<int> row_touched_;
    long iter_ = 0;
};

void PrimalSimplex::place_nonbasic(int j) {
    const auto jj = static_cast<std::size_t>(j);
    const double l = p_.lower[jj];
    const double u = p_.upper[jj];
    if (l == u) {
        state_[jj] = VarState::Fixed;
        x_[jj] = l;
    } else if (std::isfinite(l) && std::isfinite(u)) {
        // keep the side closest to the current value
        if (std::abs(x_[jj] - u) < std::abs(x_[jj] - l)) {
            state_[jj] = VarState::AtUpper;
            x_[jj] = u;
        } else {
            state_[jj] = VarState::AtLower;
            x_[jj] = l;
        }
    } else if (std::isfinite(l)) {
        state_[jj] = VarState::AtLower;
        x_[jj] = l;
    } else if (std::isfinite(u)) {
        state_[jj] = VarState::AtUpper;
        x_[jj] = u;
    } else {
        state_[jj] = VarState::AtZero;
        x_[jj] = 0.0;
    }
}

void PrimalSimplex::initial_basis() {
    for (int j = 0; j < n_; ++j) {
        x_[static_cast<std::size_t>(j)] = 0.0;
        place_nonbasic(j);
    }
    for (int i = 0; i < m_; ++i) {
        const int j = n_ + i;
        head_[static_cast<std::size_t>(i)] = j;
        pos_of_[static_cast<std::size_t>(j)] = i;
        state_[static_cast<std::size_t>(j)] = VarState::Basic;
    }
}

void PrimalSimplex::load_column(int j, std::vector<double>& dense) const {
    dense.assign(static_cast<std::size_t>(m_), 0.0);
    if (j < n_) {
        const auto jj = static_cast<std::size_t>(j);
        for (std::size_t k = p_.csc.start[jj]; k < p_.csc.start[jj + 1]; ++k) {
            dense[static_cast<std::size_t>(p_.csc.index[k])] = p_.csc.value[k];
        }
    } else {
        dense[static_cast<std::size_t>(j - n_)] = -1.0;
    }
}

void PrimalSimplex::refactor() {
    for (int attempt = 0; attempt < 4; ++attempt) {
        auto deficient = factor_.factorize(m_, [this](int position, std::vector<BasisFactor::Entry>& out) {
            const int j = head_[static_cast<std::size_t>(position)];
            if (j < n_) {
                const auto jj = static_cast<std::size_t>(j);
                for (std::size_t k = p_.csc.start[jj]; k < p_.csc.start[jj + 1]; ++k) {
                    out.push_back({p_.csc.index[k], p_.csc.value[k]});
                }
            } else {
                out.push_back({j - n_, -1.0});
            }
        });
        if (deficient.empty()) return;
        for (const auto& def : deficient) {
            const int leaving = head_[static_cast<std::size_t>(def.position)];
            const int logical = n_ + def.row;
            pos_of_[static_cast<std::size_t>(leaving)] = -1;
            place_nonbasic(leaving);
            head_[static_cast<std::size_t>(def.position)] = logical;
            pos_of_[static_cast<std::size_t>(logical)] = def.position;
            state_[static_cast<std::size_t>(logical)] = VarState::Basic;
        }
        if (opt_.verbose) std::fprintf(stderr, "basis repair: %zu columns replaced\n", deficient.size());
    }
    throw Error(ErrorKind::NumericalBreakdown, "basis remains singular after repair");
}

void PrimalSimplex::compute_primal() {
    std::vector<double> rhs(static_cast<std::size_t>(m_), 0.0);
    for (int j = 0; j < total_; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        if (state_[jj] == VarState::Basic) continue;
        const double v = x_[jj];
        if (v == 0.0) continue;
        if (j < n_) {
            for (std::size_t k = p_.csc.start[jj]; k < p_.csc.start[jj + 1]; ++k) {
                rhs[static_cast<std::size_t>(p_.csc.index[k])] -= p_.csc.value[k] * v;
            }
        } else {
            rhs[static_cast<std::size_t>(j - n_)] += v;
        }
    }
    factor_.ftran(rhs);
    for (int pos = 0; pos < m_; ++pos) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(pos)])] = rhs[static_cast<std::size_t>(pos)];
}

double PrimalSimplex::compute_phase_costs() {
    const double tol = opt_.primal_tolerance;
    double infeasibility = 0.0;
    std::fill(phase_cost_.begin(), phase_cost_.end(), 0.0);
    for (int pos = 0; pos < m_; ++pos) {
        const auto j = static_cast<std::size_t>(head_[static_cast<std::size_t>(pos)]);
        const double v = x_[j];
        if (v < p_.lower[j] - tol) {
            phase_cost_[j] = -1.0;
            infeasibility += p_.lower[j] - v;
        } else if (v > p_.upper[j] + tol) {
            phase_cost_[j] = 1.0;
            infeasibility += v - p_.upper[j];
        } else {
            phase_cost_[j] = 0.0;
        }
    }
    return infeasibility;
}

void PrimalSimplex::compute_duals(const std::vector<double>& cost) {
    std::vector<double> cb(static_cast<std::size_t>(m_));
    for (int pos = 0; pos < m_; ++pos) cb[static_cast<std::size_t>(pos)] = cost[static_cast<std::size_t>(head_[static_cast<std::size_t>(pos)])];
    factor_.btran(cb);
    y_ = std::move(cb);
    backend_.reduced_costs(p_.csc, std::span<const double>(cost.data(), static_cast<std::size_t>(n_)), y_,
                           std::span<double>(d_.data(), static_cast<std::size_t>(n_)));
    for (int i = 0; i < m_; ++i) {
        const auto j = static_cast<std::size_t>(n_ + i);
        d_[j] = cost[j] + y_[static_cast<std::size_t>(i)];
    }
    for (int pos = 0; pos < m_; ++pos) d_[static_cast<std::size_t>(head_[static_cast<std::size_t>(pos)])] = 0.0;
}

void PrimalSimplex::refresh_moves() {
    for (std::size_t j = 0; j < static_cast<std::size_t>(total_); ++j) {
        switch (state_[j]) {
            case VarState::Basic:
            case VarState::Fixed: move_[j] = 0; break;
            case VarState::AtLower: move_[j] = 1; break;
            case VarState::AtUpper: move_[j] = -1; break;
            case VarState::AtZero: move_[j] = 2; break;
        }
    }
}

int PrimalSimplex::choose_entering(bool bland) {
    const double tol = opt_.dual_tolerance;
    if (bland) {
        for (int j = 0; j < total_; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            const double dj = d_[jj];
            switch (move_[jj]) {
                case 1: if (dj < -tol) return j; break;
                case -1: if (dj > tol) return j; break;
                case 2: if (std::abs(dj) > tol) return j; break;
                default: break;
            }
        }
        return -1;
    }
    return backend_.select_entering(d_, weight_, move_, tol).index;
}

PrimalSimplex::Ratio PrimalSimplex::ratio_test(int q, int dir, bool bland) const {
    const double tol = opt_.primal_tolerance;
    const double piv_tol = opt_.pivot_tolerance;
    const auto qq = static_cast<std::size_t>(q);
    const double range = p_.upper[qq] - p_.lower[qq];

    double theta_max = kInf;
    for (int pos = 0; pos < m_; ++pos) {
        const double a = alpha_[static_cast<std::size_t>(pos)];
        if (std::abs(a) <= piv_tol) continue;
        const auto j = static_cast<std::size_t>(head_[static_cast<std::size_t>(pos)]);
        const double g = -dir * a;
        const double v = x_[j];
        double relaxed = kInf;
        if (g < 0.0) {
            if (v > p_.upper[j] + tol) {
                relaxed = (v - p_.upper[j]) / -g;
            } else if (v >= p_.lower[j] - tol && std::isfinite(p_.lower[j])) {
                relaxed = (v - p_.lower[j] + tol) / -g;
            }
        } else {
            if (v < p_.lower[j] - tol) {
                relaxed = (p_.lower[j] - v) / g;
            } else if (v <= p_.upper[j] + tol && std::isfinite(p_.upper[j])) {
                relaxed = (p_.upper[j] - v + tol) / g;
            }
        }
        theta_max = std::min(theta_max, std::max(relaxed, 0.0));
    }

    Ratio result;
    if (std::isfinite(range) && range <= theta_max) {
        result.flip = true;
        result.theta = range;
        return result;
    }
    if (!std::isfinite(theta_max)) {
        result.unbounded = true;
        return result;
    }

    double best_abs = -1.0;
    double best_ratio = kInf;
    int best_var = -1;
    for (int pos = 0; pos < m_; ++pos) {
        const double a = alpha_[static_cast<std::size_t>(pos)];
        if (std::abs(a) <= piv_tol) continue;
        const int var = head_[static_cast<std::size_t>(pos)];
        const auto j = static_cast<std::size_t>(var);
        const double g = -dir * a;
        const double v = x_[j];
        double exact = kInf;
        double bound = 0.0;
        if (g < 0.0) {
            if (v > p_.upper[j] + tol) {
                exact = (v - p_.upper[j]) / -g;
                bound = p_.upper[j];
            } else if (v >= p_.lower[j] - tol && std::isfinite(p_.lower[j])) {
                exact = (v - p_.lower[j]) / -g;
                bound = p_.lower[j];
            }
        } else {
            if (v < p_.lower[j] - tol) {
                exact = (p_.lower[j] - v) / g;
                bound = p_.lower[j];
            } else if (v <= p_.upper[j] + tol && std::isfinite(p_.upper[j])) {
                exact = (p_.upper[j] - v) / g;
                bound = p_.upper[j];
            }
        }
        if (!(exact <= theta_max)) continue;
        exact = std::max(exact, 0.0);
        bool take = false;
        if (bland) {
            take = exact < best_ratio || (exact == best_ratio && var < best_var);
        } else {
            take = std::abs(a) > best_abs || (std::abs(a) == best_abs && var < best_var);
        }
        if (take) {
            best_abs = std::abs(a);
            best_ratio = exact;
            best_var = var;
            result.position = pos;
            result.theta = exact;
            result.bound = bound;
        }
    }
    if (result.position < 0) result.unbounded = true;
    return result;
}

void PrimalSimplex::compute_pivot_row(int r) {
    for (int j : row_touched_) {
        row_value_[static_cast<std::size_t>(j)] = 0.0;
        row_mark_[static_cast<std::size_t>(j)] = 0;
    }
    row_touched_.clear();
    rho_.assign(static_cast<std::size_t>(m_), 0.0);
    rho_[static_cast<std::size_t>(r)] = 1.0;
    factor_.btran(rho_);
    for (int i = 0; i < m_; ++i) {
        const double ri = rho_[static_cast<std::size_t>(i)];
        if (std::abs(ri) <= factor_.drop_tolerance) continue;
        const auto ii = static_cast<std::size_t>(i);
        for (std::size_t k = p_.csr.start[ii]; k < p_.csr.start[ii + 1]; ++k) {
            const auto j = static_cast<std::size_t>(p_.csr.index[k]);
            if (!row_mark_[j]) {
                row_mark_[j] = 1;
                row_touched_.push_back(static_cast<int>(j));
            }
            row_value_[j] += ri * p_.csr.value[k];
        }
        const auto lj = static_cast<std::size_t>(n_ + i);
        row_mark_[lj] = 1;
        row_touched_.push_back(n_ + i);
        row_value_[lj] = -ri;
    }
}

void PrimalSimplex::log(const char* what, int phase, double value) const {
    if (opt_.verbose) std::fprintf(stderr, "[simplex] iter %ld phase %d %s %.10g\n", iter_, phase, what, value);
}

SolveStatus PrimalSimplex::run() {
    initial_basis();
    refactor();
    compute_primal();
    refresh_moves();

    int phase = 0;
    bool duals_fresh = false;
    bool factor_fresh = true;
    int stalled = 0;
    int numerical_retries = 0;

    while (true) {
        if (iter_ >= opt_.max_iterations) return SolveStatus::IterationLimit;
        if (factor_.updates() >= opt_.refactor_interval) {
            refactor();
            compute_primal();
            duals_fresh = false;
            factor_fresh = true;
        }

        const double infeasibility = compute_phase_costs();
        if (infeasibility > 0.0) {
            if (phase != 1) log("enter phase 1, infeasibility", 1, infeasibility);
            phase = 1;
            compute_duals(phase_cost_);
            duals_fresh = true;
        } else if (phase != 2 || !duals_fresh) {
            if (phase != 2) log("enter phase 2", 2, 0.0);
            phase = 2;
            compute_duals(p_.cost);
            duals_fresh = true;
        }

        const bool bland = stalled > opt_.bland_trigger;
        const int q = choose_entering(bland);
        if (q < 0) {
            if (!factor_fresh) {
                refactor();
                compute_primal();
                factor_fresh = true;
                duals_fresh = false;
                continue;
            }
            if (phase == 1) return SolveStatus::Infeasible;
            return SolveStatus::Optimal;
        }

        const auto qq = static_cast<std::size_t>(q);
        load_column(q, alpha_);
        factor_.ftran(alpha_);
        int dir = d_[qq] < 0.0 ? 1 : -1;

        const Ratio ratio = ratio_test(q, dir, bland);
        if (ratio.unbounded) {
            if (phase == 2 && factor_fresh) return SolveStatus::Unbounded;
            if (++numerical_retries > opt_.max_repairs) {
                throw Error(ErrorKind::NumericalBreakdown,
                            "no blocking row for column " + std::to_string(q) + " in phase " + std::to_string(phase));
            }
            refactor();
            compute_primal();
            factor_fresh = true;
            duals_fresh = false;
            continue;
        }

        int leaving = -1;
        double alpha_r = 0.0;
        if (!ratio.flip) {
            alpha_r = alpha_[static_cast<std::size_t>(ratio.position)];
            compute_pivot_row(ratio.position);
            const double row_alpha = row_value_[qq];
            if (std::abs(row_alpha - alpha_r) > opt_.pivot_check_tolerance * (1.0 + std::abs(alpha_r))) {
                if (++numerical_retries > opt_.max_repairs) {
                    throw Error(ErrorKind::NumericalBreakdown,
                                "pivot mismatch at row position " + std::to_string(ratio.position) + ", column " +
                                    std::to_string(q));
                }
                log("pivot mismatch, refactor", phase, row_alpha - alpha_r);
                refactor();
                compute_primal();
                factor_fresh = true;
                duals_fresh = false;
                continue;
            }
            leaving = head_[static_cast<std::size_t>(ratio.position)];
        }

        // primal update
        const double step = dir * ratio.theta;
        if (step != 0.0) {
            x_[qq] += step;
            for (int pos = 0; pos < m_; ++pos) {
                const double a = alpha_[static_cast<std::size_t>(pos)];
                if (a != 0.0) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(pos)])] -= step * a;
            }
        }

        const double progress = std::abs(ratio.theta * d_[qq]);
        stalled = progress > opt_.progress_tolerance ? 0 : stalled + 1;

        if (ratio.flip) {
            state_[qq] = state_[qq] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower;
            x_[qq] = state_[qq] == VarState::AtLower ? p_.lower[qq] : p_.upper[qq];
            move_[qq] = state_[qq] == VarState::AtLower ? 1 : -1;
            ++iter_;
            continue;
        }

        const auto ll = static_cast<std::size_t>(leaving);
        if (phase == 2) {
            const double theta_d = d_[qq] / alpha_r;
            for (int j : row_touched_) {
                const auto jj = static_cast<std::size_t>(j);
                if (state_[jj] == VarState::Basic) continue;
                d_[jj] -= theta_d * row_value_[jj];
            }
            d_[ll] = -theta_d;
            d_[qq] = 0.0;
        }
        // devex reference weights
        const double wq = weight_[qq];
        double wmax = 0.0;
        for (int j : row_touched_) {
            const auto jj = static_cast<std::size_t>(j);
            if (state_[jj] == VarState::Basic || jj == qq) continue;
            const double ratio_j = row_value_[jj] / alpha_r;
            weight_[jj] = std::max(weight_[jj], ratio_j * ratio_j * wq);
            wmax = std::max(wmax, weight_[jj]);
        }
        weight_[ll] = std::max(wq / (alpha_r * alpha_r), 1.0);
        if (wmax > opt_.devex_reset) std::fill(weight_.begin(), weight_.end(), 1.0);

        // basis change
        head_[static_cast<std::size_t>(ratio.position)] = q;
        pos_of_[qq] = ratio.position;
        pos_of_[ll] = -1;
        state_[qq] = VarState::Basic;
        move_[qq] = 0;
        x_[ll] = ratio.bound;
        if (p_.lower[ll] == p_.upper[ll]) {
            state_[ll] = VarState::Fixed;
        } else if (ratio.bound == p_.lower[ll]) {
            state_[ll] = VarState::AtLower;
        } else {
            state_[ll] = VarState::AtUpper;
        }
        switch (state_[ll]) {
            case VarState::AtLower: move_[ll] = 1; break;
            case VarState::AtUpper: move_[ll] = -1; break;
            default: move_[ll] = 0; break;
        }
        factor_.update(ratio.position, alpha_);
        factor_fresh = false;
        ++iter_;

        if (opt_.verbose && iter_ % 1000 == 0) {
            double obj = 0.0;
            for (std::size_t j = 0; j < static_cast<std::size_t>(n_); ++j) obj += p_.cost[j] * x_[j];
            std::fprintf(stderr, "[simplex] iter %ld phase %d infeas %.6g obj %.10g stalled %d etas %d\n", iter_, phase,
                         infeasibility, obj, stalled, factor_.updates());
        }
    }
}

}  // namespace

void certify(const LinearProgram& lp, Solution& s) {
    const int n = lp.num_variables();
    const int m = lp.num_constraints();
    s.row_activity = lp.row_activity(s.primal);
    s.objective = lp.objective_value(s.primal);
    s.max_residual = 0.0;
    s.max_relative_residual = 0.0;
    for (int i = 0; i < m; ++i) {
        const auto& row = lp.constraint(i);
        const double a = s.row_activity[static_cast<std::size_t>(i)];
        double v = 0.0;
        switch (row.sense) {
            case Sense::LessEqual: v = std::max(0.0, a - row.rhs); break;
            case Sense::GreaterEqual: v = std::max(0.0, row.rhs - a); break;
            case Sense::Equal: v = std::abs(a - row.rhs); break;
        }
        s.max_residual = std::max(s.max_residual, v);
        s.max_relative_residual = std::max(s.max_relative_residual, v / std::max(1.0, std::abs(row.rhs)));
    }
    for (int j = 0; j < n; ++j) {
        const auto& var = lp.variable(j);
        const double x = s.primal[static_cast<std::size_t>(j)];
        const double v = std::max({0.0, var.lower - x, x - var.upper});
        s.max_residual = std::max(s.max_residual, v);
        const double scale = std::max({1.0, std::isfinite(var.lower) ? std::abs(var.lower) : 0.0,
                                       std::isfinite(var.upper) ? std::abs(var.upper) : 0.0});
        s.max_relative_residual = std::max(s.max_relative_residual, v / scale);
    }
    if (s.dual.size() != static_cast<std::size_t>(m)) {
        s.dual_objective = s.objective;
        s.relative_gap = 0.0;
        return;
    }
    // Reduced costs from the row duals; the dual objective of the bounded
    // problem is sum_i y_i rhs_i + sum_j (d_j > 0 ? d_j l_j : d_j u_j).
    s.reduced_cost.assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) s.reduced_cost[static_cast<std::size_t>(j)] = lp.variable(j).cost;
    double dual = lp.objective_offset();
    for (int i = 0; i < m; ++i) {
        const auto& row = lp.constraint(i);
        const double yi = s.dual[static_cast<std::size_t>(i)];
        dual += yi * row.rhs;
        for (const Term& t : row.terms) s.reduced_cost[static_cast<std::size_t>(t.column)] -= yi * t.coefficient;
    }
    for (int j = 0; j < n; ++j) {
        const auto& var = lp.variable(j);
        const double dj = s.reduced_cost[static_cast<std::size_t>(j)];
        if (dj > 0.0 && std::isfinite(var.lower)) {
            dual += dj * var.lower;
        } else if (dj < 0.0 && std::isfinite(var.upper)) {
            dual += dj * var.upper;
        } else if (dj != 0.0) {
            // Sign incompatible with an infinite bound: account it at the
            // primal value so the gap reflects the dual infeasibility.
            dual += dj * s.primal[static_cast<std::size_t>(j)];
        }
    }
    s.dual_objective = dual;
    s.relative_gap = std::abs(s.objective - dual) / std::max(1.0, std::abs(s.objective));
}

Solution solve(const LinearProgram& lp, const SolveOptions& options) {
    const auto started = std::chrono::steady_clock::now();
    lp.validate();
    const ScaledProblem problem = prepare(lp, options.scale, options.scale_passes);
    PrimalSimplex simplex(problem, options);
    Solution s;
    s.status = simplex.run();
    s.iterations = simplex.iterations();

    const int n = problem.n;
    const int m = problem.m;
    s.primal.resize(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) s.primal[j] = simplex.x()[j] * problem.col_scale[j];
    if (s.status == SolveStatus::Optimal) {
        s.dual.resize(static_cast<std::size_t>(m));
        for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i) {
            s.dual[i] = simplex.y()[i] * problem.row_scale[i] * problem.cost_scale;
        }
    }
    certify(lp, s);
    s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (s.status == SolveStatus::Optimal) {
        if (s.max_relative_residual > options.feasibility_tolerance || s.relative_gap > options.gap_tolerance) {
            throw Error(ErrorKind::NumericalBreakdown,
                        "optimal basis fails certification: residual " + std::to_string(s.max_relative_residual) +
                            ", gap " + std::to_string(s.relative_gap));
        }
    }
    s.message = std::string(to_string(s.status)) + " after " + std::to_string(s.iterations) + " iterations";
    return s;
}

}  // namespace gridplan
