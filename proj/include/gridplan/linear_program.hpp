#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace gridplan {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, Equal, GreaterEqual };

char sense_symbol(Sense sense);

struct Term {
    int column;
    double coefficient;
};

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInfinity;
    double cost = 0.0;
};

struct Constraint {
    std::string name;
    Sense sense = Sense::Equal;
    double rhs = 0.0;
    std::vector<Term> terms;  // sorted by column, no duplicates
};

/// Compressed column or row view of the constraint matrix.
struct SparseMatrix {
    int major = 0;  // number of columns (CSC) or rows (CSR)
    int minor = 0;
    std::vector<std::size_t> start;  // size major + 1
    std::vector<int> index;
    std::vector<double> value;

    std::size_t nonzeros() const { return index.size(); }
};

/// Sparse algebraic LP: minimize c'x + offset subject to row senses and
/// column bounds. Variables and rows are addressed by index or by their
/// structured name (e.g. "gen[DE,ccgt,12]").
class LinearProgram {
public:
    int add_variable(std::string name, double lower, double upper, double cost);

    /// Adds a row; duplicate columns in `terms` are merged by summation.
    int add_constraint(std::string name, Sense sense, double rhs, std::span<const Term> terms);
    int add_constraint(std::string name, Sense sense, double rhs, std::initializer_list<Term> terms) {
        return add_constraint(std::move(name), sense, rhs, std::span<const Term>(terms.begin(), terms.size()));
    }

    int num_variables() const { return static_cast<int>(variables_.size()); }
    int num_constraints() const { return static_cast<int>(constraints_.size()); }
    std::size_t num_nonzeros() const;

    const Variable& variable(int j) const { return variables_.at(static_cast<std::size_t>(j)); }
    Variable& variable(int j) { return variables_.at(static_cast<std::size_t>(j)); }
    const Constraint& constraint(int i) const { return constraints_.at(static_cast<std::size_t>(i)); }
    Constraint& constraint(int i) { return constraints_.at(static_cast<std::size_t>(i)); }
    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }

    std::optional<int> find_variable(const std::string& name) const;
    std::optional<int> find_constraint(const std::string& name) const;

    double objective_offset() const { return offset_; }
    void set_objective_offset(double offset) { offset_ = offset; }

    /// c'x + offset
    double objective_value(std::span<const double> x) const;

    /// Row activities a_i'x.
    std::vector<double> row_activity(std::span<const double> x) const;

    /// Largest absolute violation of any row sense or column bound at x.
    double max_violation(std::span<const double> x) const;

    /// Throws InvariantViolation on duplicate names, dangling columns or
    /// crossed bounds.
    void validate() const;

    SparseMatrix column_major() const;
    SparseMatrix row_major() const;

    /// Copy with rows and columns reordered: new column k is old column
    /// column_order[k], new row k is old row row_order[k].
    LinearProgram permuted(std::span<const int> column_order, std::span<const int> row_order) const;

private:
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    std::unordered_map<std::string, int> variable_index_;
    std::unordered_map<std::string, int> constraint_index_;
    double offset_ = 0.0;
};

}  // namespace gridplan
