// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

#include "nearlink/geometry.hpp"
#include "nearlink/matrix.hpp"

namespace nearlink
{

enum class ChannelModel
{
    FullAmplitude, // lambda / sqrt(4 pi d^2) * exp(-j 2 pi d / lambda)
    PhaseOnly,     // exp(-j 2 pi d / lambda)
};

const char* to_string(ChannelModel model) noexcept;

//---------------------------------------------------------------------------//
/*!
 * Path length held as an exactly representable coarse part plus a small
 * correction.
 *
 * At satellite range d / lambda exceeds 1e8, so the phase is taken as
 * fmod(coarse, lambda) + fine instead of reducing d directly. The coarse part
 * is the largest coordinate difference and the fine part the excess
 * sqrt(a^2 + b^2) - a, evaluated without cancellation.
 */
struct PathLength
{
    double coarse = 0.0;
    double fine = 0.0;

    double value() const { return coarse + fine; }
};

PathLength path_length(Vec3 a, Vec3 b);

// 2 pi d / lambda wrapped to (-pi, pi].
double path_phase(const PathLength& d, double wavelength);
double path_phase(double d, double wavelength);

// 2 pi (d1 - d2) / lambda wrapped to (-pi, pi].
double path_phase_difference(const PathLength& d1, const PathLength& d2, double wavelength);

// Throws ZeroDistance when d == 0.
Complex channel_coeff(double d, double wavelength, ChannelModel model);
Complex channel_coeff(const PathLength& d, double wavelength, ChannelModel model);

// K_rx x K_tx line-of-sight channel.
struct ChannelMatrix
{
    ComplexMatrix entries;
    double wavelength = 0.0;
    ChannelModel model = ChannelModel::PhaseOnly;
};

// Entry (i, j) is the coefficient between rx element i and tx element j.
ChannelMatrix channel_matrix(const ElementLayout& tx, const ElementLayout& rx,
                             double wavelength, ChannelModel model);

// Phase spread of a 2x2 link with effective spacings d cos(phi):
//   2 pi (d_tx cos phi_tx)(d_rx cos phi_rx) / (lambda r)
double phase_spread_2x2(double d_tx, double d_rx, double wavelength, double range,
                        double phi_tx = 0.0, double phi_rx = 0.0);

// CSV with header `i,j,re,im`, 17 significant digits.
void write_channel_csv(std::ostream& os, const ChannelMatrix& h);

} // namespace nearlink
