#pragma once

#include <stdexcept>
#include <string>

namespace rieszlab {

enum class ErrorCode {
    NonConvergence,
    InvalidRange,
    InvalidArgument,
    DegenerateSample,
    PoleAtZero,
    InvalidExponent,
    NoNegativeJ,
    EtaTooLarge,
    InvalidParams,
    IndexOutOfRange,
    GridMisaligned,
    LevelNotBuilt,
    BudgetExceeded,
    MalformedState,
    ConfigError,
    EmptyE,
    DivisionGuard,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace rieszlab
