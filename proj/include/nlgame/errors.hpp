/**
 * @file errors.hpp
 * @brief Error type shared by every nlgame module.
 */

#ifndef NLGAME_ERRORS_HPP
#define NLGAME_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlgame {

enum class ErrorKind {
    DegenerateLattice,
    OutOfRange,
    NonFiniteInput,
    ContractionViolated,
    NonConvergence,
    ObstacleOrderViolated,
    TerminalOutOfBand,
    InvalidStoppingRule,
    TooLarge,
    ContractInvariantViolated,
    InvalidPenalty,
    InvalidParameters,
    NonFiniteState,
    TooManyPaths,
    ConfigError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DegenerateLattice: return "DegenerateLattice";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::NonFiniteInput: return "NonFiniteInput";
        case ErrorKind::ContractionViolated: return "ContractionViolated";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::ObstacleOrderViolated: return "ObstacleOrderViolated";
        case ErrorKind::TerminalOutOfBand: return "TerminalOutOfBand";
        case ErrorKind::InvalidStoppingRule: return "InvalidStoppingRule";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::ContractInvariantViolated: return "ContractInvariantViolated";
        case ErrorKind::InvalidPenalty: return "InvalidPenalty";
        case ErrorKind::InvalidParameters: return "InvalidParameters";
        case ErrorKind::NonFiniteState: return "NonFiniteState";
        case ErrorKind::TooManyPaths: return "TooManyPaths";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a kind; the message starts
/// with the kind name so CLI users see which invariant broke.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace nlgame

#endif  // NLGAME_ERRORS_HPP
