// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace nearlink
{

//---------------------------------------------------------------------------//
// Cartesian position in meters.
//
// Ground arrays live in the z = 0 plane; the satellite sits at positive z,
// so broadside of a ground array points along +z.
struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
    friend constexpr bool operator==(Vec3, Vec3) = default;

    constexpr double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double distance(Vec3 a, Vec3 b) { return (a - b).norm(); }

//---------------------------------------------------------------------------//
// Rectangular panel of identical elements on a uniform grid.
struct PanelSpec
{
    std::size_t rows = 1;
    std::size_t cols = 1;
    double spacing = 0.0;          // element pitch [m]
    double element_gain_dbi = 0.0; // per-element gain [dBi]

    void validate() const;

    std::size_t element_count() const { return rows * cols; }
    // Edge-to-edge span of element positions along x and y.
    double width() const { return static_cast<double>(cols - 1) * spacing; }
    double height() const { return static_cast<double>(rows - 1) * spacing; }
    // Diagonal span of one panel's element grid.
    double extent() const { return std::hypot(width(), height()); }

    friend bool operator==(const PanelSpec&, const PanelSpec&) = default;
};

struct Element
{
    Vec3 position;
    std::size_t panel_id = 0;

    friend bool operator==(const Element&, const Element&) = default;
};

//---------------------------------------------------------------------------//
/*!
 * Immutable set of antenna element positions grouped into panels.
 *
 * Invariants (checked at construction): nonempty, finite coordinates, no two
 * elements at an identical position, and panel ids contiguous from zero.
 */
class ElementLayout
{
  public:
    ElementLayout(std::vector<Element> elements, PanelSpec spec);

    std::span<const Element> elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }
    std::size_t panel_count() const { return panel_count_; }
    const PanelSpec& panel_spec() const { return spec_; }

    std::vector<Vec3> positions() const;
    Vec3 centroid() const;

    // Copy of this layout shifted rigidly by `offset`.
    ElementLayout translated(Vec3 offset) const;

    friend bool operator==(const ElementLayout&, const ElementLayout&) = default;

  private:
    std::vector<Element> elements_;
    PanelSpec spec_;
    std::size_t panel_count_ = 0;
};

ElementLayout make_upa(const PanelSpec& spec, Vec3 center);

// One UPA per center. Throws OverlappingPanels when two centers are not
// farther apart than one panel extent.
ElementLayout make_distributed_panels(const PanelSpec& spec,
                                      std::span<const Vec3> panel_centers);

inline constexpr std::size_t kPlacementAttemptCap = 10000;

/*!
 * Panel centers for a rectangular aperture centered on the origin (z = 0).
 *
 * The first four positions are the aperture corners (fewer if n_panels < 4);
 * the rest are drawn uniformly by rejection sampling with a pairwise distance
 * of at least `min_spacing`. Each point gets kPlacementAttemptCap attempts
 * before PlacementInfeasible is thrown. Pure function of its arguments.
 */
std::vector<Vec3> random_panel_positions(double aperture_x, double aperture_y,
                                         std::size_t n_panels, double min_spacing,
                                         std::uint64_t seed);

// Maximum pairwise Euclidean distance between elements.
double aperture_extent(const ElementLayout& layout);
double aperture_extent(std::span<const Vec3> points);

enum class FieldRegion
{
    ReactiveNear,
    RadiativeNear,
    Far,
};

const char* to_string(FieldRegion region) noexcept;

// 0.62 * sqrt(d^3 / lambda)
double fresnel_distance(double aperture, double wavelength);
// 2 d^2 / lambda
double fraunhofer_distance(double aperture, double wavelength);

FieldRegion field_region(double aperture, double wavelength, double range);

//---------------------------------------------------------------------------//
// Line-oriented layout table: `# nearlink-layout v1` header, then one
// `panel_id x y z` row per element. An optional `# panel_spec ...` comment
// line carries the panel description.
void write_layout(std::ostream& os, const ElementLayout& layout);
ElementLayout read_layout(std::istream& is);

// FNV-1a over panel ids and coordinate bits.
std::uint64_t layout_hash(const ElementLayout& layout);

} // namespace nearlink
