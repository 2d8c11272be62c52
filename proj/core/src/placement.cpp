// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#include "nearlink/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "nearlink/constants.hpp"
#include "nearlink/error.hpp"

namespace nearlink
{

void PlacementObjective::validate() const
{
    const double half_pi = 0.5 * kPi;
    if (!(exclusion_halfwidth > 0.0))
        detail::throw_invalid("exclusion halfwidth must be > 0");
    if (!(theta_lo >= -half_pi && theta_hi <= half_pi && theta_lo < theta_hi))
        detail::throw_invalid("scan range must satisfy -pi/2 <= theta_lo < theta_hi <= pi/2");
    if (!(steering.theta >= theta_lo && steering.theta <= theta_hi))
        detail::throw_invalid("scan range must contain the steering angle");
    if (n_scan < 100)
        detail::throw_invalid("n_scan must be >= 100");
}

PlacementObjective PlacementObjective::for_aperture(double aperture, double wavelength,
                                                    Direction steering, double theta_lo,
                                                    double theta_hi, std::size_t n_scan)
{
    if (!(aperture > 0.0) || !(wavelength > 0.0))
        detail::throw_invalid("aperture and wavelength must be > 0");
    PlacementObjective obj{steering, 2.0 * wavelength / aperture, theta_lo, theta_hi, n_scan};
    obj.validate();
    return obj;
}

//---------------------------------------------------------------------------//
std::vector<Vec3> uniform_sparse_positions(double aperture, std::size_t n_panels, Vec3 axis)
{
    if (n_panels < 2)
        detail::throw_invalid("uniform sparse placement needs n >= 2");
    if (!(aperture > 0.0))
        detail::throw_invalid("aperture must be > 0");
    const double len = axis.norm();
    if (!(len > 0.0) || !std::isfinite(len))
        detail::throw_invalid("placement axis must be a nonzero vector");
    const Vec3 unit = (1.0 / len) * axis;
    const double pitch = aperture / static_cast<double>(n_panels - 1);

    std::vector<Vec3> out;
    out.reserve(n_panels);
    for (std::size_t i = 0; i < n_panels; ++i)
        out.push_back((-0.5 * aperture + pitch * static_cast<double>(i)) * unit);
    return out;
}

Complex placement_factor(std::span<const Vec3> centers, const Direction& steering,
                         const Direction& eval, double wavelength)
{
    if (!(wavelength > 0.0))
        detail::throw_invalid("wavelength must be > 0");
    const double k = kTwoPi / wavelength;
    const Vec3 du = eval.unit() - steering.unit();
    Complex sum = 0.0;
    for (const Vec3& c : centers)
        sum += std::polar(1.0, k * c.dot(du));
    return sum;
}

//---------------------------------------------------------------------------//
namespace
{
constexpr std::size_t kReseedInterval = 1024;

// Peak sidelobe power |AF|^2, or nullopt once it exceeds `bound`.
std::optional<double> scan_peak_power(std::span<const Vec3> positions, double wavelength,
                                      const PlacementObjective& obj, double bound)
{
    obj.validate();
    if (positions.size() < 2)
        detail::throw_invalid("peak_sidelobe needs at least two positions");
    if (!(wavelength > 0.0))
        detail::throw_invalid("wavelength must be > 0");
    const double z0 = positions.front().z;
    for (const Vec3& p : positions)
        if (p.z != z0)
            detail::throw_invalid("placement scan requires positions sharing one z plane");

    const std::size_t n = positions.size();
    const double k = kTwoPi / wavelength;
    const double cphi = std::cos(obj.steering.phi);
    const double sphi = std::sin(obj.steering.phi);

    // Coordinate along the scan cut; constant z only adds a common phase.
    std::vector<double> along(n);
    for (std::size_t i = 0; i < n; ++i)
        along[i] = positions[i].x * cphi + positions[i].y * sphi;

    const double u_lo = std::sin(obj.theta_lo);
    const double u_hi = std::sin(obj.theta_hi);
    const double u_steer = std::sin(obj.steering.theta);
    const double du = (u_hi - u_lo) / static_cast<double>(obj.n_scan - 1);
    const double half_pi = 0.5 * kPi;
    const double ex_lo = std::sin(std::max(obj.steering.theta - obj.exclusion_halfwidth, -half_pi));
    const double ex_hi = std::sin(std::min(obj.steering.theta + obj.exclusion_halfwidth, half_pi));

    std::vector<double> step_re(n), step_im(n), re(n), im(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        step_re[i] = std::cos(k * along[i] * du);
        step_im[i] = std::sin(k * along[i] * du);
    }

    double peak = 0.0;
    for (std::size_t start = 0; start < obj.n_scan; start += kReseedInterval)
    {
        const double u0 = u_lo + static_cast<double>(start) * du;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double phase = k * along[i] * (u0 - u_steer);
            re[i] = std::cos(phase);
            im[i] = std::sin(phase);
        }
        const std::size_t stop = std::min(obj.n_scan, start + kReseedInterval);
        for (std::size_t s = start; s < stop; ++s)
        {
            const double u = u_lo + static_cast<double>(s) * du;
            if (!(u > ex_lo && u < ex_hi))
            {
                double sr = 0.0;
                double si = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                {
                    sr += re[i];
                    si += im[i];
                }
                const double power = sr * sr + si * si;
                if (power > peak)
                {
                    peak = power;
                    if (peak > bound)
                        return std::nullopt;
                }
            }
            for (std::size_t i = 0; i < n; ++i)
            {
                const double r = re[i] * step_re[i] - im[i] * step_im[i];
                im[i] = re[i] * step_im[i] + im[i] * step_re[i];
                re[i] = r;
            }
        }
    }
    return peak;
}

double power_to_db(double power, std::size_t n)
{
    const double main = static_cast<double>(n) * static_cast<double>(n);
    return power > 0.0 ? 10.0 * std::log10(power / main) : kGainFloorDb;
}

double db_to_power(double db, std::size_t n)
{
    const double main = static_cast<double>(n) * static_cast<double>(n);
    return main * std::pow(10.0, db / 10.0);
}
} // namespace

double peak_sidelobe(std::span<const Vec3> positions, double wavelength,
                     const PlacementObjective& objective)
{
    const auto power = scan_peak_power(positions, wavelength, objective,
                                       std::numeric_limits<double>::infinity());
    return power_to_db(*power, positions.size());
}

std::optional<double> peak_sidelobe_bounded(std::span<const Vec3> positions, double wavelength,
                                            const PlacementObjective& objective,
                                            double abort_above_db)
{
    const auto power = scan_peak_power(positions, wavelength, objective,
                                       db_to_power(abort_above_db, positions.size()));
    if (!power)
        return std::nullopt;
    return power_to_db(*power, positions.size());
}

//---------------------------------------------------------------------------//
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

PlacementResult optimize_placement(double aperture_x, double aperture_y, std::size_t n_panels,
                                   double min_spacing, double wavelength,
                                   const PlacementObjective& objective,
                                   std::size_t n_candidates, std::uint64_t seed)
{
    if (n_candidates < 1)
        detail::throw_invalid("n_candidates must be >= 1");
    objective.validate();

    PlacementResult best;
    best.seed = seed;
    double best_power = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_candidates; ++i)
    {
        const std::uint64_t cand_seed = derive_seed(seed, i);
        auto positions =
            random_panel_positions(aperture_x, aperture_y, n_panels, min_spacing, cand_seed);
        // Abort only strictly above the incumbent so ties resolve to the lower index.
        const auto power = scan_peak_power(positions, wavelength, objective, best_power);
        if (power && *power < best_power)
        {
            best_power = *power;
            best.positions = std::move(positions);
            best.candidate_seed = cand_seed;
            best.candidate_index = i;
        }
    }
    best.candidates_evaluated = n_candidates;
    best.peak_sidelobe_db = power_to_db(best_power, n_panels);
    return best;
}

void write_placement_summary_json(std::ostream& os, const PlacementResult& result,
                                  const PlacementObjective& objective, double wavelength,
                                  std::size_t n_candidates)
{
    nlohmann::ordered_json j;
    j["seed"] = result.seed;
    j["n_candidates"] = n_candidates;
    j["candidates_evaluated"] = result.candidates_evaluated;
    j["candidate_index"] = result.candidate_index;
    j["candidate_seed"] = result.candidate_seed;
    j["peak_sidelobe_db"] = result.peak_sidelobe_db;
    j["n_panels"] = result.positions.size();
    j["wavelength_m"] = wavelength;
    j["scan"] = {
        {"steering_theta_rad", objective.steering.theta},
        {"steering_phi_rad", objective.steering.phi},
        {"theta_lo_rad", objective.theta_lo},
        {"theta_hi_rad", objective.theta_hi},
        {"n_scan", objective.n_scan},
        {"exclusion_halfwidth_rad", objective.exclusion_halfwidth},
    };
    os << j.dump(2) << '\n';
}

} // namespace nearlink
