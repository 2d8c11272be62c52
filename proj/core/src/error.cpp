// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#include "nearlink/error.hpp"

#include <utility>

namespace nearlink
{

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code)
    {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OverlappingPanels: return "OverlappingPanels";
    case ErrorCode::PlacementInfeasible: return "PlacementInfeasible";
    case ErrorCode::ZeroDistance: return "ZeroDistance";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyAxis: return "EmptyAxis";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code)
{
}

ConfigError::ConfigError(ErrorCode code, std::string field, std::size_t line,
                         const std::string& message)
    : Error(code, message), field_(std::move(field)), line_(line)
{
}

namespace detail
{
void throw_invalid(const std::string& message)
{
    throw Error(ErrorCode::InvalidArgument, message);
}
} // namespace detail

} // namespace nearlink
