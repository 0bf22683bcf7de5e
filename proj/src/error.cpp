#include "stnets/error.hpp"

namespace stnets {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::NotComparable: return "NotComparable";
        case ErrorCode::SpaceMismatch: return "SpaceMismatch";
        case ErrorCode::DomainMismatch: return "DomainMismatch";
        case ErrorCode::NotPositive: return "NotPositive";
        case ErrorCode::NotDedekindComplete: return "NotDedekindComplete";
        case ErrorCode::OutsideField: return "OutsideField";
        case ErrorCode::UndeterminedMeasure: return "UndeterminedMeasure";
        case ErrorCode::EmptyDelta: return "EmptyDelta";
        case ErrorCode::NotDecreasing: return "NotDecreasing";
        case ErrorCode::NotCofinal: return "NotCofinal";
        case ErrorCode::NotRepresentable: return "NotRepresentable";
        case ErrorCode::UnknownProperty: return "UnknownProperty";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Error";
}

} // namespace stnets
