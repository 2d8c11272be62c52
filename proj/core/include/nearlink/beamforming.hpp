// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "nearlink/geometry.hpp"
#include "nearlink/matrix.hpp"

namespace nearlink
{

// Far-field direction: theta from +z (broadside), phi azimuth from +x.
struct Direction
{
    double theta = 0.0;
    double phi = 0.0;

    Vec3 unit() const;
    friend bool operator==(const Direction&, const Direction&) = default;
};

// Near-field focal point.
struct FocalPoint
{
    Vec3 point;
    friend bool operator==(const FocalPoint&, const FocalPoint&) = default;
};

using Focal = std::variant<Direction, FocalPoint>;

// origin + range * Direction{theta, phi}.unit()
FocalPoint point_at(double range, double theta, double phi = 0.0, Vec3 origin = {});

std::string describe(const Focal& focal);

//---------------------------------------------------------------------------//
// Phase-only weights, one per layout element.
class WeightVector
{
  public:
    // Throws InvalidArgument unless every |w_i| == 1 (to 1e-9).
    WeightVector(std::vector<Complex> weights, Focal focal);

    const std::vector<Complex>& weights() const { return weights_; }
    const Focal& focal() const { return focal_; }
    std::size_t size() const { return weights_.size(); }

    // Every weight multiplied by exp(j phase).
    WeightVector rotated(double phase) const;

  private:
    std::vector<Complex> weights_;
    Focal focal_;
};

/*!
 * Delay-and-sum weights w_i = exp(+j 2 pi d_i / lambda).
 *
 * In Direction mode d_i = -p_i . u is the far-field path offset of element
 * i; in Point mode d_i = |focal - p_i| is the exact spherical path, which
 * focuses the array in range as well as angle. Point mode throws ZeroDistance
 * when the focal point coincides with an element.
 */
WeightVector delay_and_sum_weights(const ElementLayout& layout, const Focal& focal,
                                   double wavelength);

// sum_i w_i a_i(eval), with a_i the unit-modulus response of element i.
Complex array_factor(const ElementLayout& layout, const WeightVector& w, const Focal& eval,
                     double wavelength);

// 10 log10(|AF|^2 / N) + element gain, floored at kGainFloorDb.
double evaluate_gain(const ElementLayout& layout, const WeightVector& w, const Focal& eval,
                     double wavelength);

//---------------------------------------------------------------------------//
struct SweepSpec
{
    std::vector<double> theta; // [rad], ascending; empty means fixed_theta
    std::vector<double> range; // [m], ascending; empty means fixed_range
    double fixed_theta = 0.0;
    double fixed_range = std::numeric_limits<double>::infinity(); // inf: far field
    double phi = 0.0;
    Vec3 origin;
};

// Gain samples laid out theta-major: gain[i_theta * n_range + i_range].
// An empty range axis means far-field (Direction) evaluation.
struct GainGrid
{
    std::vector<double> theta;
    std::vector<double> range;
    std::vector<double> gain_dbi;
    Focal steering;
    double phi = 0.0;
    double wavelength = 0.0;

    std::size_t n_range_samples() const { return range.empty() ? 1 : range.size(); }
    double at(std::size_t i_theta, std::size_t i_range = 0) const
    {
        return gain_dbi[i_theta * n_range_samples() + i_range];
    }
    double peak() const;
};

// Throws EmptyAxis when neither axis is given or an axis is unsorted.
GainGrid gain_pattern_sweep(const ElementLayout& layout, const WeightVector& w,
                            const SweepSpec& sweep, double wavelength);

//---------------------------------------------------------------------------//
// 10 log10(n e^{-delta}) + panel gain
double aggregate_gain_estimate(std::size_t n_panels, double panel_gain_dbi, double delta = 0.0);

struct DishSpec
{
    double diameter = 0.0;   // [m]
    double efficiency = 1.0; // aperture efficiency e_A in (0, 1]
};

// 10 log10((pi D / lambda)^2 e_A)
double dish_gain(const DishSpec& spec, double wavelength);

// Projected-aperture loss: gain + 10 log10(cos theta_off), theta_off from
// broadside. Floored at kGainFloorDb.
double offnadir_effective_gain(double gain_dbi, double theta_off);

//---------------------------------------------------------------------------//
// `#` metadata lines (wavelength, steering, layout hash, any `extra` lines)
// then `theta_rad,range_m,gain_dbi`. range_m is blank for far-field rows.
void write_gain_grid_csv(std::ostream& os, const GainGrid& grid, std::uint64_t layout_hash,
                         const std::vector<std::string>& extra_metadata = {});

} // namespace nearlink
