#include "degen_taxis/error.hpp"

namespace degen_taxis
{

std::string_view to_string(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::NonPositiveField: return "NonPositiveField";
    case ErrorCode::NegativeFieldForFractionalPower: return "NegativeFieldForFractionalPower";
    case ErrorCode::NegativeInitialData: return "NegativeInitialData";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::StepCollapse: return "StepCollapse";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::PositivityFloorViolated: return "PositivityFloorViolated";
    case ErrorCode::PositivityViolated: return "PositivityViolated";
    case ErrorCode::DegenerateRHS: return "DegenerateRHS";
    case ErrorCode::ZeroField: return "ZeroField";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace degen_taxis
