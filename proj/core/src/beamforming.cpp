// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#include "nearlink/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nearlink/channel.hpp"
#include "nearlink/constants.hpp"
#include "nearlink/error.hpp"

namespace nearlink
{

Vec3 Direction::unit() const
{
    const double st = std::sin(theta);
    return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

FocalPoint point_at(double range, double theta, double phi, Vec3 origin)
{
    if (!(range > 0.0) || !std::isfinite(range))
        detail::throw_invalid("focal range must be finite and > 0");
    return {origin + range * Direction{theta, phi}.unit()};
}

std::string describe(const Focal& focal)
{
    std::ostringstream os;
    os << std::setprecision(17);
    if (const auto* d = std::get_if<Direction>(&focal))
        os << "direction(theta=" << d->theta << ",phi=" << d->phi << ")";
    else
    {
        const Vec3 p = std::get<FocalPoint>(focal).point;
        os << "point(" << p.x << "," << p.y << "," << p.z << ")";
    }
    return os.str();
}

//---------------------------------------------------------------------------//
WeightVector::WeightVector(std::vector<Complex> weights, Focal focal)
    : weights_(std::move(weights)), focal_(focal)
{
    for (const auto& w : weights_)
        if (!(std::abs(std::abs(w) - 1.0) <= 1e-9))
            detail::throw_invalid("beamforming weights must have unit modulus");
}

WeightVector WeightVector::rotated(double phase) const
{
    const Complex r = std::polar(1.0, phase);
    std::vector<Complex> out = weights_;
    for (auto& w : out)
        w *= r;
    return WeightVector(std::move(out), focal_);
}

//---------------------------------------------------------------------------//
namespace
{
// Wrapped phase 2 pi d_i / lambda of element `p` toward `focal`.
struct PathPhase
{
    double wavelength;

    double operator()(Vec3 p, Vec3 u) const
    {
        return path_phase(PathLength{-p.dot(u), 0.0}, wavelength);
    }
    double operator()(Vec3 p, const FocalPoint& f) const
    {
        const PathLength len = path_length(f.point, p);
        if (len.value() == 0.0)
            throw Error(ErrorCode::ZeroDistance, "focal point coincides with an element");
        return path_phase(len, wavelength);
    }
};

template<class F>
void for_each_phase(const ElementLayout& layout, const Focal& focal, double wavelength, F&& f)
{
    if (!(wavelength > 0.0))
        detail::throw_invalid("wavelength must be > 0");
    const PathPhase phase{wavelength};
    const auto elements = layout.elements();
    if (const auto* d = std::get_if<Direction>(&focal))
    {
        const Vec3 u = d->unit();
        for (std::size_t i = 0; i < elements.size(); ++i)
            f(i, phase(elements[i].position, u));
    }
    else
    {
        const auto& point = std::get<FocalPoint>(focal);
        for (std::size_t i = 0; i < elements.size(); ++i)
            f(i, phase(elements[i].position, point));
    }
}
} // namespace

WeightVector delay_and_sum_weights(const ElementLayout& layout, const Focal& focal,
                                   double wavelength)
{
    std::vector<Complex> w(layout.size());
    for_each_phase(layout, focal, wavelength,
                   [&](std::size_t i, double phase) { w[i] = std::polar(1.0, phase); });
    return WeightVector(std::move(w), focal);
}

Complex array_factor(const ElementLayout& layout, const WeightVector& w, const Focal& eval,
                     double wavelength)
{
    if (w.size() != layout.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "weight vector length " + std::to_string(w.size())
                        + " does not match layout size " + std::to_string(layout.size()));
    const auto& weights = w.weights();
    double re = 0.0;
    double im = 0.0;
    for_each_phase(layout, eval, wavelength, [&](std::size_t i, double phase) {
        // w_i * exp(-j phase)
        const double c = std::cos(phase);
        const double s = std::sin(phase);
        re += weights[i].real() * c + weights[i].imag() * s;
        im += weights[i].imag() * c - weights[i].real() * s;
    });
    return {re, im};
}

double evaluate_gain(const ElementLayout& layout, const WeightVector& w, const Focal& eval,
                     double wavelength)
{
    const double power = std::norm(array_factor(layout, w, eval, wavelength))
                         / static_cast<double>(layout.size());
    const double gain = (power > 0.0 ? 10.0 * std::log10(power) : kGainFloorDb)
                        + layout.panel_spec().element_gain_dbi;
    return std::max(gain, kGainFloorDb);
}

//---------------------------------------------------------------------------//
double GainGrid::peak() const
{
    if (gain_dbi.empty())
        throw Error(ErrorCode::EmptyAxis, "empty gain grid");
    return *std::max_element(gain_dbi.begin(), gain_dbi.end());
}

namespace
{
void check_axis(const std::vector<double>& axis, const char* name)
{
    for (double v : axis)
        if (!std::isfinite(v))
            throw Error(ErrorCode::EmptyAxis, std::string(name) + " axis has non-finite samples");
    if (!std::is_sorted(axis.begin(), axis.end()))
        throw Error(ErrorCode::EmptyAxis, std::string(name) + " axis must be ascending");
}
} // namespace

GainGrid gain_pattern_sweep(const ElementLayout& layout, const WeightVector& w,
                            const SweepSpec& sweep, double wavelength)
{
    if (sweep.theta.empty() && sweep.range.empty())
        throw Error(ErrorCode::EmptyAxis, "gain sweep needs a theta or range axis");
    check_axis(sweep.theta, "theta");
    check_axis(sweep.range, "range");
    for (double r : sweep.range)
        if (!(r > 0.0))
            throw Error(ErrorCode::EmptyAxis, "range samples must be > 0");

    GainGrid grid;
    grid.theta = sweep.theta.empty() ? std::vector<double>{sweep.fixed_theta} : sweep.theta;
    if (!sweep.range.empty())
        grid.range = sweep.range;
    else if (std::isfinite(sweep.fixed_range))
        grid.range = {sweep.fixed_range};
    grid.steering = w.focal();
    grid.phi = sweep.phi;
    grid.wavelength = wavelength;
    grid.gain_dbi.reserve(grid.theta.size() * grid.n_range_samples());

    for (double theta : grid.theta)
    {
        if (grid.range.empty())
        {
            grid.gain_dbi.push_back(
                evaluate_gain(layout, w, Direction{theta, sweep.phi}, wavelength));
            continue;
        }
        for (double r : grid.range)
            grid.gain_dbi.push_back(evaluate_gain(
                layout, w, point_at(r, theta, sweep.phi, sweep.origin), wavelength));
    }
    return grid;
}

//---------------------------------------------------------------------------//
double aggregate_gain_estimate(std::size_t n_panels, double panel_gain_dbi, double delta)
{
    if (n_panels < 1)
        detail::throw_invalid("n_panels must be >= 1");
    if (!(delta >= 0.0))
        detail::throw_invalid("phase-misalignment loss must be >= 0");
    return 10.0 * std::log10(static_cast<double>(n_panels) * std::exp(-delta)) + panel_gain_dbi;
}

double dish_gain(const DishSpec& spec, double wavelength)
{
    if (!(spec.diameter > 0.0))
        detail::throw_invalid("dish diameter must be > 0");
    if (!(spec.efficiency > 0.0 && spec.efficiency <= 1.0))
        detail::throw_invalid("dish efficiency must lie in (0, 1]");
    if (!(wavelength > 0.0))
        detail::throw_invalid("wavelength must be > 0");
    const double x = kPi * spec.diameter / wavelength;
    return 10.0 * std::log10(x * x * spec.efficiency);
}

double offnadir_effective_gain(double gain_dbi, double theta_off)
{
    if (!(theta_off >= 0.0 && theta_off <= 0.5 * kPi))
        detail::throw_invalid("off-nadir angle must lie in [0, pi/2]");
    // cos(pi/2) is not exactly zero in double precision.
    if (theta_off >= 0.5 * kPi)
        return kGainFloorDb;
    const double loss = 10.0 * std::log10(std::cos(theta_off));
    return std::max(gain_dbi + loss, kGainFloorDb);
}

//---------------------------------------------------------------------------//
void write_gain_grid_csv(std::ostream& os, const GainGrid& grid, std::uint64_t layout_hash,
                         const std::vector<std::string>& extra_metadata)
{
    os << std::setprecision(17);
    os << "# wavelength_m=" << grid.wavelength << '\n';
    os << "# steering=" << describe(grid.steering) << '\n';
    os << "# phi_rad=" << grid.phi << '\n';
    os << "# layout_hash=" << std::hex << std::setw(16) << std::setfill('0') << layout_hash
       << std::dec << std::setfill(' ') << '\n';
    for (const auto& line : extra_metadata)
        os << "# " << line << '\n';
    os << "theta_rad,range_m,gain_dbi\n";
    for (std::size_t i = 0; i < grid.theta.size(); ++i)
    {
        if (grid.range.empty())
        {
            os << grid.theta[i] << ",," << grid.at(i) << '\n';
            continue;
        }
        for (std::size_t j = 0; j < grid.range.size(); ++j)
            os << grid.theta[i] << ',' << grid.range[j] << ',' << grid.at(i, j) << '\n';
    }
}

} // namespace nearlink
