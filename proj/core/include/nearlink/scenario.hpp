// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "nearlink/channel.hpp"
#include "nearlink/config_text.hpp"
#include "nearlink/geometry.hpp"

namespace nearlink
{

//---------------------------------------------------------------------------//
// Layout descriptions
//---------------------------------------------------------------------------//
struct RandomPlacementSpec
{
    double aperture_x = 0.0;
    double aperture_y = 0.0;
    std::size_t n_panels = 0;
    double min_spacing = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const RandomPlacementSpec&, const RandomPlacementSpec&) = default;
};

struct UpaLayoutSpec
{
    Vec3 center;
    friend bool operator==(const UpaLayoutSpec&, const UpaLayoutSpec&) = default;
};

struct DistributedLayoutSpec
{
    // Exactly one of these is used.
    std::variant<std::vector<Vec3>, RandomPlacementSpec> placement;
    friend bool operator==(const DistributedLayoutSpec&, const DistributedLayoutSpec&) = default;
};

struct LayoutSpec
{
    PanelSpec panel;
    std::variant<UpaLayoutSpec, DistributedLayoutSpec> arrangement;

    ElementLayout build() const;
    friend bool operator==(const LayoutSpec&, const LayoutSpec&) = default;
};

// Satellite array kept parallel to the ground plane and placed at
// `range_m` along (off_nadir_rad, azimuth_rad) from the ground origin.
struct SatelliteSpec
{
    LayoutSpec layout;
    double range_m = 0.0;
    double off_nadir_rad = 0.0;
    double azimuth_rad = 0.0;

    Vec3 position_at(double range) const;
    ElementLayout build_at(double range) const;
    friend bool operator==(const SatelliteSpec&, const SatelliteSpec&) = default;
};

//---------------------------------------------------------------------------//
// Analyses
//---------------------------------------------------------------------------//
// Either explicit samples or `count` samples from start to stop.
struct RangeAxis
{
    std::vector<double> explicit_values;
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 0;
    bool log_spacing = false;

    std::vector<double> values() const;
    friend bool operator==(const RangeAxis&, const RangeAxis&) = default;
};

enum class FocusMode
{
    Point,
    Direction,
};

struct BoundariesAnalysis
{
    // Derived from the ground/satellite aperture extents when absent.
    std::optional<double> d_tx;
    std::optional<double> d_rx;
    double tau = 0.1;
    friend bool operator==(const BoundariesAnalysis&, const BoundariesAnalysis&) = default;
};

struct SvdSweepAnalysis
{
    RangeAxis ranges;
    ChannelModel model = ChannelModel::PhaseOnly;
    double tau = 0.1;
    friend bool operator==(const SvdSweepAnalysis&, const SvdSweepAnalysis&) = default;
};

struct DofSweepAnalysis
{
    RangeAxis ranges;
    ChannelModel model = ChannelModel::PhaseOnly;
    double tau = 0.1;
    friend bool operator==(const DofSweepAnalysis&, const DofSweepAnalysis&) = default;
};

// Theta samples are steer_theta + linspace(-theta_span, theta_span, n_theta).
struct BeamThetaAnalysis
{
    double theta_span = 0.034906585039886591; // 2 degrees
    std::size_t n_theta = 2001;
    FocusMode focus = FocusMode::Point;
    friend bool operator==(const BeamThetaAnalysis&, const BeamThetaAnalysis&) = default;
};

struct BeamRangeAnalysis
{
    RangeAxis ranges;
    FocusMode focus = FocusMode::Point;
    friend bool operator==(const BeamRangeAnalysis&, const BeamRangeAnalysis&) = default;
};

struct Beam2dAnalysis
{
    double theta_span = 0.034906585039886591;
    std::size_t n_theta = 2001;
    RangeAxis ranges;
    FocusMode focus = FocusMode::Point;
    friend bool operator==(const Beam2dAnalysis&, const Beam2dAnalysis&) = default;
};

struct OptimizePlacementAnalysis
{
    RandomPlacementSpec search; // seed is the base seed of the candidate stream
    std::size_t n_candidates = 1;
    double steer_theta = 0.0;
    double steer_phi = 0.0;
    double theta_lo = -1.0471975511965976;
    double theta_hi = 1.0471975511965976;
    std::size_t n_scan = 1000001;
    std::optional<double> exclusion_halfwidth; // default 2 lambda / aperture_x
    friend bool operator==(const OptimizePlacementAnalysis&, const OptimizePlacementAnalysis&) = default;
};

struct DishGainAnalysis
{
    double diameter = 0.0;
    double efficiency = 1.0;
    friend bool operator==(const DishGainAnalysis&, const DishGainAnalysis&) = default;
};

using Analysis = std::variant<BoundariesAnalysis, SvdSweepAnalysis, DofSweepAnalysis,
                              BeamThetaAnalysis, BeamRangeAnalysis, Beam2dAnalysis,
                              OptimizePlacementAnalysis, DishGainAnalysis>;

const char* analysis_kind(const Analysis& a) noexcept;

//---------------------------------------------------------------------------//
struct Scenario
{
    int version = 1;
    double frequency_hz = 0.0;
    std::optional<LayoutSpec> ground;
    std::optional<SatelliteSpec> satellite;
    Analysis analysis;
    std::string output = "out";

    double wavelength() const;
    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Throws ConfigError(ParseError) for syntax problems and unknown keys and
// ConfigError(ValidationError) naming the field for invariant violations.
Scenario parse_scenario(std::string_view text);
Scenario scenario_from_document(const ConfigDocument& doc);

// Applies `key=value` overrides in order (values use config syntax).
void apply_overrides(ConfigDocument& doc, const std::vector<std::string>& overrides);

// Reads `path`, applies `key=value` overrides, then parses.
Scenario load_scenario_file(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides = {});

// Checks cross-field invariants (e.g. analyses that need a satellite).
void validate(const Scenario& s);

// Canonical text form; parse_scenario(serialize(s)) == s.
std::string serialize(const Scenario& s);

std::uint64_t scenario_hash(const Scenario& s);

//---------------------------------------------------------------------------//
struct RunOptions
{
    std::optional<std::filesystem::path> output_dir; // overrides Scenario::output
    bool write_outputs = true;                        // false: compute scalars only
};

struct RunReport
{
    std::uint64_t scenario_hash = 0;
    std::string analysis;
    double wall_seconds = 0.0;
    std::vector<std::filesystem::path> outputs;
    std::map<std::string, double> scalars;

    std::string to_json() const;
};

RunReport run_scenario(const Scenario& s, const RunOptions& options = {});

} // namespace nearlink
