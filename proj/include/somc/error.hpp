// error.hpp — error kinds shared by every module

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace somc {

enum class ErrorKind {
    DimensionMismatch,
    PositionOutOfRange,
    DegenerateCoupling,
    NoResonantMode,
    MoreThanTwoModes,
    QuadratureNotConverged,
    RootFindingFailed,
    DegenerateRoot,
    EnergyInBand,
    NoGapSolution,
    NoLocalizedState,
    SeparationOutOfRange,
    TooManySpins,
    RamanResonance,
    StepSizeTooLarge,
    SingularCoefficient,
    ParseError,
    ValidationError,
    NonFiniteOutput,
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::PositionOutOfRange: return "PositionOutOfRange";
    case ErrorKind::DegenerateCoupling: return "DegenerateCoupling";
    case ErrorKind::NoResonantMode: return "NoResonantMode";
    case ErrorKind::MoreThanTwoModes: return "MoreThanTwoModes";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::RootFindingFailed: return "RootFindingFailed";
    case ErrorKind::DegenerateRoot: return "DegenerateRoot";
    case ErrorKind::EnergyInBand: return "EnergyInBand";
    case ErrorKind::NoGapSolution: return "NoGapSolution";
    case ErrorKind::NoLocalizedState: return "NoLocalizedState";
    case ErrorKind::SeparationOutOfRange: return "SeparationOutOfRange";
    case ErrorKind::TooManySpins: return "TooManySpins";
    case ErrorKind::RamanResonance: return "RamanResonance";
    case ErrorKind::StepSizeTooLarge: return "StepSizeTooLarge";
    case ErrorKind::SingularCoefficient: return "SingularCoefficient";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::NonFiniteOutput: return "NonFiniteOutput";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

    // config problems vs numerical failures, mapped to CLI exit codes 2 and 3
    bool is_config_error() const noexcept {
        return kind_ == ErrorKind::ParseError || kind_ == ErrorKind::ValidationError;
    }

private:
    ErrorKind kind_;
    std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace somc
