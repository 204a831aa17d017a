#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace degen_taxis
{

enum class ErrorCode
{
    InvalidGrid,
    GridMismatch,
    NonFiniteValue,
    NonPositiveField,
    NegativeFieldForFractionalPower,
    NegativeInitialData,
    RangeError,
    StepCollapse,
    NonFiniteState,
    PositivityFloorViolated,
    PositivityViolated,
    DegenerateRHS,
    ZeroField,
    UnknownPreset,
    ConfigError,
    ParseError,
    UnknownKey,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` is the machine-readable kind.
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace degen_taxis
