#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace gridplan {

/// Sparse LU factorization of a simplex basis with product-form updates.
///
/// The basis B has m columns ("positions"); FTRAN solves B x = a with `a`
/// indexed by row and x by position, BTRAN solves B' y = c with `c` indexed
/// by position and y by row. Factorization is right-looking Gaussian
/// elimination with Markowitz pivot selection and threshold partial pivoting.
class BasisFactor {
public:
    struct Entry {
        int index;
        double value;
    };

    /// Callback filling the nonzeros of basis column `position`.
    using ColumnSource = std::function<void(int position, std::vector<Entry>& out)>;

    struct Deficiency {
        int position;  // basis position that could not be pivoted
        int row;       // a row left without a pivot
    };

    /// Factorizes B. On structural or numerical singularity the returned list
    /// pairs every unpivoted position with an unpivoted row; the caller is
    /// expected to substitute the logical of that row and refactorize.
    std::vector<Deficiency> factorize(int m, const ColumnSource& column);

    void ftran(std::vector<double>& rhs) const;
    void btran(std::vector<double>& rhs) const;

    /// Replaces the column at `position` given alpha = B^{-1} a_entering.
    void update(int position, std::span<const double> alpha);

    int dimension() const { return m_; }
    int updates() const { return static_cast<int>(etas_.size()); }
    std::size_t factor_nonzeros() const { return l_index_.size() + u_index_.size(); }

    double pivot_threshold = 0.01;
    double drop_tolerance = 1e-14;
    double singular_tolerance = 1e-11;

private:
    struct Eta {
        int position;
        double pivot;
        std::size_t begin, end;  // range in eta_index_/eta_value_
    };

    int m_ = 0;
    // elimination order: pivot row, pivot position, pivot value
    std::vector<int> pivot_row_;
    std::vector<int> pivot_pos_;
    std::vector<double> pivot_value_;
    // L multipliers per step, U row entries per step (off-diagonal)
    std::vector<std::size_t> l_start_, u_start_;
    std::vector<int> l_index_, u_index_;
    std::vector<double> l_value_, u_value_;
    std::vector<Eta> etas_;
    std::vector<int> eta_index_;
    std::vector<double> eta_value_;
    mutable std::vector<double> work_;
};

}  // namespace gridplan
