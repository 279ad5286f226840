#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gridplan {

enum class ErrorKind {
    MissingFile,
    SchemaViolation,
    InvariantViolation,
    LengthMismatch,
    DomainError,
    ModelAssemblyError,
    IterationLimit,
    NumericalBreakdown,
    NameMapOverflow,
    UnknownColumn,
    ResidualTooLarge,
    MismatchedScenarios,
};

std::string_view to_string(ErrorKind kind);

/// Every failure surfaced by the library carries one of the kinds above so
/// the CLI can map it to an exit code and tests can match on it.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MissingFile: return "MissingFile";
        case ErrorKind::SchemaViolation: return "SchemaViolation";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::ModelAssemblyError: return "ModelAssemblyError";
        case ErrorKind::IterationLimit: return "IterationLimit";
        case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
        case ErrorKind::NameMapOverflow: return "NameMapOverflow";
        case ErrorKind::UnknownColumn: return "UnknownColumn";
        case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
        case ErrorKind::MismatchedScenarios: return "MismatchedScenarios";
    }
    return "Error";
}

}  // namespace gridplan
