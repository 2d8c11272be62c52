// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <numbers>

namespace nearlink
{

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Exact nulls are reported at this level instead of -inf.
inline constexpr double kGainFloorDb = -200.0;

constexpr double wavelength_from_frequency(double frequency_hz)
{
    return kSpeedOfLight / frequency_hz;
}

} // namespace nearlink
