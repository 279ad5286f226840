#include "gridplan/linear_program.hpp"

#include <algorithm>
#include <cmath>

#include "gridplan/error.hpp"

namespace gridplan {

char sense_symbol(Sense sense) {
    switch (sense) {
        case Sense::LessEqual: return 'L';
        case Sense::Equal: return 'E';
        case Sense::GreaterEqual: return 'G';
    }
    return '?';
}

int LinearProgram::add_variable(std::string name, double lower, double upper, double cost) {
    if (lower > upper) {
        throw Error(ErrorKind::InvariantViolation, "variable " + name + " has lower bound above upper bound");
    }
    const int index = num_variables();
    auto [it, inserted] = variable_index_.emplace(name, index);
    if (!inserted) {
        throw Error(ErrorKind::InvariantViolation, "duplicate variable name " + name);
    }
    variables_.push_back(Variable{std::move(name), lower, upper, cost});
    return index;
}

int LinearProgram::add_constraint(std::string name, Sense sense, double rhs, std::span<const Term> terms) {
    const int index = num_constraints();
    auto [it, inserted] = constraint_index_.emplace(name, index);
    if (!inserted) {
        throw Error(ErrorKind::InvariantViolation, "duplicate constraint name " + name);
    }
    std::vector<Term> merged(terms.begin(), terms.end());
    for (const Term& t : merged) {
        if (t.column < 0 || t.column >= num_variables()) {
            constraint_index_.erase(it);
            throw Error(ErrorKind::InvariantViolation,
                        "constraint " + name + " references unknown column " + std::to_string(t.column));
        }
    }
    std::sort(merged.begin(), merged.end(), [](const Term& a, const Term& b) { return a.column < b.column; });
    std::size_t out = 0;
    for (std::size_t k = 0; k < merged.size(); ++k) {
        if (out > 0 && merged[out - 1].column == merged[k].column) {
            merged[out - 1].coefficient += merged[k].coefficient;
        } else {
            merged[out++] = merged[k];
        }
    }
    merged.resize(out);
    std::erase_if(merged, [](const Term& t) { return t.coefficient == 0.0; });
    constraints_.push_back(Constraint{std::move(name), sense, rhs, std::move(merged)});
    return index;
}

std::size_t LinearProgram::num_nonzeros() const {
    std::size_t total = 0;
    for (const auto& row : constraints_) total += row.terms.size();
    return total;
}

std::optional<int> LinearProgram::find_variable(const std::string& name) const {
    auto it = variable_index_.find(name);
    if (it == variable_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> LinearProgram::find_constraint(const std::string& name) const {
    auto it = constraint_index_.find(name);
    if (it == constraint_index_.end()) return std::nullopt;
    return it->second;
}

double LinearProgram::objective_value(std::span<const double> x) const {
    double total = offset_;
    for (std::size_t j = 0; j < variables_.size(); ++j) total += variables_[j].cost * x[j];
    return total;
}

std::vector<double> LinearProgram::row_activity(std::span<const double> x) const {
    std::vector<double> activity(constraints_.size(), 0.0);
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
        double sum = 0.0;
        for (const Term& t : constraints_[i].terms) sum += t.coefficient * x[static_cast<std::size_t>(t.column)];
        activity[i] = sum;
    }
    return activity;
}

double LinearProgram::max_violation(std::span<const double> x) const {
    double worst = 0.0;
    const auto activity = row_activity(x);
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
        const auto& row = constraints_[i];
        double v = 0.0;
        switch (row.sense) {
            case Sense::LessEqual: v = activity[i] - row.rhs; break;
            case Sense::GreaterEqual: v = row.rhs - activity[i]; break;
            case Sense::Equal: v = std::abs(activity[i] - row.rhs); break;
        }
        worst = std::max(worst, v);
    }
    for (std::size_t j = 0; j < variables_.size(); ++j) {
        worst = std::max(worst, variables_[j].lower - x[j]);
        worst = std::max(worst, x[j] - variables_[j].upper);
    }
    return worst;
}

void LinearProgram::validate() const {
    if (variable_index_.size() != variables_.size() || constraint_index_.size() != constraints_.size()) {
        throw Error(ErrorKind::InvariantViolation, "name registry out of sync");
    }
    for (const auto& v : variables_) {
        if (!(v.lower <= v.upper) || std::isnan(v.cost)) {
            throw Error(ErrorKind::InvariantViolation, "variable " + v.name + " has invalid bounds or cost");
        }
    }
    for (const auto& row : constraints_) {
        if (!std::isfinite(row.rhs)) {
            throw Error(ErrorKind::InvariantViolation, "constraint " + row.name + " has a non-finite rhs");
        }
        for (const Term& t : row.terms) {
            if (t.column < 0 || t.column >= num_variables() || !std::isfinite(t.coefficient)) {
                throw Error(ErrorKind::InvariantViolation, "constraint " + row.name + " has an invalid coefficient");
            }
        }
    }
}

SparseMatrix LinearProgram::column_major() const {
    SparseMatrix m;
    m.major = num_variables();
    m.minor = num_constraints();
    m.start.assign(static_cast<std::size_t>(m.major) + 1, 0);
    for (const auto& row : constraints_) {
        for (const Term& t : row.terms) ++m.start[static_cast<std::size_t>(t.column) + 1];
    }
    for (std::size_t j = 0; j < static_cast<std::size_t>(m.major); ++j) m.start[j + 1] += m.start[j];
    m.index.resize(m.start.back());
    m.value.resize(m.start.back());
    std::vector<std::size_t> fill(m.start.begin(), m.start.end() - 1);
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
        for (const Term& t : constraints_[i].terms) {
            const std::size_t pos = fill[static_cast<std::size_t>(t.column)]++;
            m.index[pos] = static_cast<int>(i);
            m.value[pos] = t.coefficient;
        }
    }
    return m;
}

SparseMatrix LinearProgram::row_major() const {
    SparseMatrix m;
    m.major = num_constraints();
    m.minor = num_variables();
    m.start.assign(static_cast<std::size_t>(m.major) + 1, 0);
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
        m.start[i + 1] = m.start[i] + constraints_[i].terms.size();
    }
    m.index.reserve(m.start.back());
    m.value.reserve(m.start.back());
    for (const auto& row : constraints_) {
        for (const Term& t : row.terms) {
            m.index.push_back(t.column);
            m.value.push_back(t.coefficient);
        }
    }
    return m;
}

LinearProgram LinearProgram::permuted(std::span<const int> column_order, std::span<const int> row_order) const {
    if (column_order.size() != variables_.size() || row_order.size() != constraints_.size()) {
        throw Error(ErrorKind::InvariantViolation, "permutation size mismatch");
    }
    LinearProgram out;
    std::vector<int> new_position(variables_.size(), -1);
    for (std::size_t k = 0; k < column_order.size(); ++k) {
        const auto& v = variables_.at(static_cast<std::size_t>(column_order[k]));
        new_position[static_cast<std::size_t>(column_order[k])] = out.add_variable(v.name, v.lower, v.upper, v.cost);
    }
    for (int old_row : row_order) {
        const auto& row = constraints_.at(static_cast<std::size_t>(old_row));
        std::vector<Term> terms;
        terms.reserve(row.terms.size());
        for (const Term& t : row.terms) terms.push_back({new_position[static_cast<std::size_t>(t.column)], t.coefficient});
        out.add_constraint(row.name, row.sense, row.rhs, terms);
    }
    out.set_objective_offset(offset_);
    return out;
}

}  // namespace gridplan
