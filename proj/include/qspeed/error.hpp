#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qspeed {

enum class ErrorCode {
    NotHermitian,
    TraceNotOne,
    NotPSD,
    ConvergenceFailure,
    BadFactorization,
    DimensionMismatch,
    NotSorted,
    OutOfRange,
    OutOfBand,
    DegenerateSpectrum,
    ConstraintViolation,
    KKTViolation,
    NoConvergence,
    StructureViolation,
    WrongDimension,
    NotApplicable,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::TraceNotOne: return "TraceNotOne";
        case ErrorCode::NotPSD: return "NotPSD";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::BadFactorization: return "BadFactorization";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotSorted: return "NotSorted";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::OutOfBand: return "OutOfBand";
        case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
        case ErrorCode::ConstraintViolation: return "ConstraintViolation";
        case ErrorCode::KKTViolation: return "KKTViolation";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::StructureViolation: return "StructureViolation";
        case ErrorCode::WrongDimension: return "WrongDimension";
        case ErrorCode::NotApplicable: return "NotApplicable";
    }
    return "Unknown";
}

/// Every failure in the library is reported through this exception. `measured()`
/// carries the offending quantity (a residual, an eigenvalue, a purity...) when one
/// exists, and NaN otherwise.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, double measured = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), measured_(measured) {}

    ErrorCode code() const noexcept { return code_; }
    double measured() const noexcept { return measured_; }

private:
    ErrorCode code_;
    double measured_;
};

}  // namespace qspeed
