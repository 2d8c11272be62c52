// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "nearlink/beamforming.hpp"
#include "nearlink/geometry.hpp"

namespace nearlink
{

//---------------------------------------------------------------------------//
/*!
 * Where and how finely to look for sidelobes of the panel-placement factor.
 *
 * The scan runs along the theta cut at azimuth `steering.phi`, sampled
 * uniformly in sin(theta) between sin(theta_lo) and sin(theta_hi); the
 * placement factor is periodic in sin(theta), so this spacing resolves every
 * lobe equally. Samples within `exclusion_halfwidth` of the steering angle
 * belong to the main lobe and are skipped.
 */
struct PlacementObjective
{
    Direction steering;
    double exclusion_halfwidth = 0.0; // [rad]
    double theta_lo = 0.0;            // [rad]
    double theta_hi = 0.0;            // [rad]
    std::size_t n_scan = 0;

    void validate() const;

    // Exclusion halfwidth 2 lambda / D, twice the null-to-null width of a
    // filled aperture of size D.
    static PlacementObjective for_aperture(double aperture, double wavelength,
                                           Direction steering = {}, double theta_lo = -1.0471975511965976,
                                           double theta_hi = 1.0471975511965976,
                                           std::size_t n_scan = 1000001);
};

struct PlacementResult
{
    std::vector<Vec3> positions;
    double peak_sidelobe_db = 0.0;     // relative to the main lobe
    std::uint64_t seed = 0;            // base seed of the search
    std::uint64_t candidate_seed = 0;  // derived seed of the winning draw
    std::size_t candidate_index = 0;
    std::size_t candidates_evaluated = 0;
};

// n collinear positions centered on the origin, pitch aperture / (n - 1).
std::vector<Vec3> uniform_sparse_positions(double aperture, std::size_t n_panels, Vec3 axis);

// Array factor of the panel centers treated as single elements with matched
// weights toward `steering`: sum_k exp(j k c_k . (u_eval - u_steer)).
Complex placement_factor(std::span<const Vec3> centers, const Direction& steering,
                         const Direction& eval, double wavelength);

// Highest sidelobe over the scan grid, 20 log10(|AF| / |AF(steer)|) [dB].
// Positions must share one z coordinate.
double peak_sidelobe(std::span<const Vec3> positions, double wavelength,
                     const PlacementObjective& objective);

// As peak_sidelobe, but gives up (returns nullopt) as soon as the running
// peak exceeds `abort_above_db`. A completed scan returns exactly what
// peak_sidelobe would.
std::optional<double> peak_sidelobe_bounded(std::span<const Vec3> positions, double wavelength,
                                            const PlacementObjective& objective,
                                            double abort_above_db);

// Order-independent per-candidate seed (splitmix64 of seed and index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/*!
 * Best-of-N random search over corner-pinned random placements.
 *
 * Candidate i is random_panel_positions(..., derive_seed(seed, i)); the
 * lowest peak sidelobe wins, ties going to the lower index. The result is
 * a pure function of the arguments.
 */
PlacementResult optimize_placement(double aperture_x, double aperture_y, std::size_t n_panels,
                                   double min_spacing, double wavelength,
                                   const PlacementObjective& objective,
                                   std::size_t n_candidates, std::uint64_t seed);

void write_placement_summary_json(std::ostream& os, const PlacementResult& result,
                                  const PlacementObjective& objective, double wavelength,
                                  std::size_t n_candidates);

} // namespace nearlink
