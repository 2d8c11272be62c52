// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nearlink
{

enum class ErrorCode
{
    InvalidArgument,
    OverlappingPanels,
    PlacementInfeasible,
    ZeroDistance,
    DimensionMismatch,
    EmptyAxis,
    ConvergenceFailure,
    DegenerateSpectrum,
    ParseError,
    ValidationError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Base exception for everything thrown by the library.
class Error : public std::runtime_error
{
  public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

// Raised by the scenario reader. `line` is 1-based; 0 when the error is not
// tied to a specific line (e.g. a missing required key).
class ConfigError : public Error
{
  public:
    ConfigError(ErrorCode code, std::string field, std::size_t line,
                const std::string& message);

    const std::string& field() const noexcept { return field_; }
    std::size_t line() const noexcept { return line_; }

  private:
    std::string field_;
    std::size_t line_;
};

namespace detail
{
[[noreturn]] void throw_invalid(const std::string& message);
} // namespace detail

} // namespace nearlink
