#pragma once

#include <stdexcept>
#include <string>

namespace stnets {

enum class ErrorCode {
    NotComparable,
    SpaceMismatch,
    DomainMismatch,
    NotPositive,
    NotDedekindComplete,
    OutsideField,
    UndeterminedMeasure,
    EmptyDelta,
    NotDecreasing,
    NotCofinal,
    NotRepresentable,
    UnknownProperty,
    ParseError,
    InvalidArgument,
};

const char* error_code_name(ErrorCode c);

/// Precondition and domain violations. Checker rejections are not errors;
/// they come back as Verdict values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

} // namespace stnets
