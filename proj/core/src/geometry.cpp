// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#include "nearlink/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>

#include "nearlink/error.hpp"

namespace nearlink
{
namespace
{
struct PositionKey
{
    std::uint64_t x, y, z;
    bool operator==(const PositionKey&) const = default;
};

struct PositionKeyHash
{
    std::size_t operator()(const PositionKey& k) const noexcept
    {
        std::uint64_t h = k.x * 0x9E3779B97F4A7C15ull;
        h ^= k.y + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        h ^= k.z + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

std::uint64_t bits_of(double v)
{
    // +0 and -0 are the same position
    if (v == 0.0)
        v = 0.0;
    return std::bit_cast<std::uint64_t>(v);
}

// Uniform double in [0, 1) from the top 53 bits; stable across standard
// library implementations, unlike std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

//---------------------------------------------------------------------------//
void PanelSpec::validate() const
{
    if (rows < 1 || cols < 1)
        detail::throw_invalid("panel rows and cols must be >= 1");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        detail::throw_invalid("panel element spacing must be > 0");
    if (!std::isfinite(element_gain_dbi))
        detail::throw_invalid("element gain must be finite");
}

//---------------------------------------------------------------------------//
ElementLayout::ElementLayout(std::vector<Element> elements, PanelSpec spec)
    : elements_(std::move(elements)), spec_(spec)
{
    if (elements_.empty())
        detail::throw_invalid("element layout must not be empty");

    std::unordered_set<PositionKey, PositionKeyHash> seen;
    seen.reserve(elements_.size());
    std::vector<bool> used_panels;
    for (const auto& e : elements_)
    {
        if (!e.position.is_finite())
            detail::throw_invalid("element position must be finite");
        PositionKey key{bits_of(e.position.x), bits_of(e.position.y), bits_of(e.position.z)};
        if (!seen.insert(key).second)
            detail::throw_invalid("two elements share an identical position");
        if (e.panel_id >= used_panels.size())
            used_panels.resize(e.panel_id + 1, false);
        used_panels[e.panel_id] = true;
    }
    if (!std::all_of(used_panels.begin(), used_panels.end(), [](bool b) { return b; }))
        detail::throw_invalid("panel ids must be contiguous from 0");
    panel_count_ = used_panels.size();
}

std::vector<Vec3> ElementLayout::positions() const
{
    std::vector<Vec3> out;
    out.reserve(elements_.size());
    for (const auto& e : elements_)
        out.push_back(e.position);
    return out;
}

Vec3 ElementLayout::centroid() const
{
    Vec3 sum;
    for (const auto& e : elements_)
        sum = sum + e.position;
    return (1.0 / static_cast<double>(elements_.size())) * sum;
}

ElementLayout ElementLayout::translated(Vec3 offset) const
{
    std::vector<Element> moved = elements_;
    for (auto& e : moved)
        e.position = e.position + offset;
    return ElementLayout(std::move(moved), spec_);
}

//---------------------------------------------------------------------------//
namespace
{
void append_panel(std::vector<Element>& out, const PanelSpec& spec, Vec3 center,
                  std::size_t panel_id)
{
    const double x0 = 0.5 * static_cast<double>(spec.cols - 1);
    const double y0 = 0.5 * static_cast<double>(spec.rows - 1);
    for (std::size_t r = 0; r < spec.rows; ++r)
    {
        const double dy = (static_cast<double>(r) - y0) * spec.spacing;
        for (std::size_t c = 0; c < spec.cols; ++c)
        {
            const double dx = (static_cast<double>(c) - x0) * spec.spacing;
            out.push_back({{center.x + dx, center.y + dy, center.z}, panel_id});
        }
    }
}
} // namespace

ElementLayout make_upa(const PanelSpec& spec, Vec3 center)
{
    spec.validate();
    if (!center.is_finite())
        detail::throw_invalid("array center must be finite");
    std::vector<Element> elements;
    elements.reserve(spec.element_count());
    append_panel(elements, spec, center, 0);
    return ElementLayout(std::move(elements), spec);
}

ElementLayout make_distributed_panels(const PanelSpec& spec,
                                      std::span<const Vec3> panel_centers)
{
    spec.validate();
    if (panel_centers.empty())
        detail::throw_invalid("at least one panel center is required");

    const double extent = spec.extent();
    for (std::size_t i = 0; i < panel_centers.size(); ++i)
    {
        for (std::size_t j = i + 1; j < panel_centers.size(); ++j)
        {
            if (!(distance(panel_centers[i], panel_centers[j]) > extent))
            {
                std::ostringstream msg;
                msg << "panels " << i << " and " << j
                    << " overlap: center distance "
                    << distance(panel_centers[i], panel_centers[j])
                    << " m <= panel extent " << extent << " m";
                throw Error(ErrorCode::OverlappingPanels, msg.str());
            }
        }
    }

    std::vector<Element> elements;
    elements.reserve(spec.element_count() * panel_centers.size());
    for (std::size_t i = 0; i < panel_centers.size(); ++i)
        append_panel(elements, spec, panel_centers[i], i);
    return ElementLayout(std::move(elements), spec);
}

//---------------------------------------------------------------------------//
std::vector<Vec3> random_panel_positions(double aperture_x, double aperture_y,
                                         std::size_t n_panels, double min_spacing,
                                         std::uint64_t seed)
{
    if (!(aperture_x >= 0.0) || !(aperture_y >= 0.0) || !std::isfinite(aperture_x)
        || !std::isfinite(aperture_y))
        detail::throw_invalid("aperture dimensions must be finite and >= 0");
    if (n_panels < 1)
        detail::throw_invalid("n_panels must be >= 1");
    if (!(min_spacing > 0.0))
        detail::throw_invalid("min_spacing must be > 0");

    const double hx = 0.5 * aperture_x;
    const double hy = 0.5 * aperture_y;
    const double min_sq = min_spacing * min_spacing;

    std::vector<Vec3> out;
    out.reserve(n_panels);
    auto admissible = [&](Vec3 p) {
        return std::all_of(out.begin(), out.end(), [&](Vec3 q) {
            const Vec3 d = p - q;
            return d.dot(d) >= min_sq;
        });
    };

    const Vec3 corners[4] = {{-hx, -hy, 0.0}, {hx, -hy, 0.0}, {-hx, hy, 0.0}, {hx, hy, 0.0}};
    for (std::size_t i = 0; i < std::min<std::size_t>(4, n_panels); ++i)
    {
        if (!admissible(corners[i]))
            throw Error(ErrorCode::PlacementInfeasible,
                        "aperture corners are closer than min_spacing");
        out.push_back(corners[i]);
    }

    std::mt19937_64 rng(seed);
    while (out.size() < n_panels)
    {
        bool placed = false;
        for (std::size_t attempt = 0; attempt < kPlacementAttemptCap; ++attempt)
        {
            const double x = -hx + aperture_x * unit_uniform(rng);
            const double y = -hy + aperture_y * unit_uniform(rng);
            if (admissible({x, y, 0.0}))
            {
                out.push_back({x, y, 0.0});
                placed = true;
                break;
            }
        }
        if (!placed)
        {
            std::ostringstream msg;
            msg << "could not place panel " << out.size() << " of " << n_panels
                << " after " << kPlacementAttemptCap << " attempts";
            throw Error(ErrorCode::PlacementInfeasible, msg.str());
        }
    }
    return out;
}

//---------------------------------------------------------------------------//
double aperture_extent(std::span<const Vec3> points)
{
    if (points.empty())
        detail::throw_invalid("aperture_extent of an empty point set");
    if (points.size() == 1)
        return 0.0;

    Vec3 lo = points.front();
    Vec3 hi = points.front();
    Vec3 sum;
    for (const Vec3& p : points)
    {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
        sum = sum + p;
    }
    const Vec3 mean = (1.0 / static_cast<double>(points.size())) * sum;

    auto sq = [](Vec3 a, Vec3 b) {
        const Vec3 d = a - b;
        return d.dot(d);
    };
    auto farthest_from = [&](Vec3 origin) {
        std::size_t best = 0;
        double best_d = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i)
        {
            const double d = sq(points[i], origin);
            if (d > best_d)
            {
                best_d = d;
                best = i;
            }
        }
        return best;
    };

    // Lower bound from a double sweep, then exact search pruned by the
    // farthest bounding-box corner of each point.
    const std::size_t a = farthest_from(mean);
    const std::size_t b = farthest_from(points[a]);
    double best = sq(points[a], points[b]);

    for (std::size_t i = 0; i < points.size(); ++i)
    {
        const Vec3& p = points[i];
        const double fx = std::max(p.x - lo.x, hi.x - p.x);
        const double fy = std::max(p.y - lo.y, hi.y - p.y);
        const double fz = std::max(p.z - lo.z, hi.z - p.z);
        if (fx * fx + fy * fy + fz * fz <= best)
            continue;
        for (std::size_t j = i + 1; j < points.size(); ++j)
            best = std::max(best, sq(p, points[j]));
    }
    return std::sqrt(best);
}

double aperture_extent(const ElementLayout& layout)
{
    const auto pts = layout.positions();
    return aperture_extent(std::span<const Vec3>(pts));
}

//---------------------------------------------------------------------------//
const char* to_string(FieldRegion region) noexcept
{
    switch (region)
    {
    case FieldRegion::ReactiveNear: return "reactive_near";
    case FieldRegion::RadiativeNear: return "radiative_near";
    case FieldRegion::Far: return "far";
    }
    return "unknown";
}

namespace
{
void check_region_args(double d, double lambda)
{
    if (!(d > 0.0) || !(lambda > 0.0))
        detail::throw_invalid("aperture and wavelength must be > 0");
}
} // namespace

double fresnel_distance(double aperture, double wavelength)
{
    check_region_args(aperture, wavelength);
    return 0.62 * std::sqrt(aperture * aperture * aperture / wavelength);
}

double fraunhofer_distance(double aperture, double wavelength)
{
    check_region_args(aperture, wavelength);
    return 2.0 * aperture * aperture / wavelength;
}

FieldRegion field_region(double aperture, double wavelength, double range)
{
    if (!(range > 0.0))
        detail::throw_invalid("range must be > 0");
    if (range < fresnel_distance(aperture, wavelength))
        return FieldRegion::ReactiveNear;
    if (range > fraunhofer_distance(aperture, wavelength))
        return FieldRegion::Far;
    return FieldRegion::RadiativeNear;
}

//---------------------------------------------------------------------------//
namespace
{
constexpr const char* kLayoutHeader = "# nearlink-layout v1";
constexpr const char* kPanelSpecTag = "# panel_spec";

[[noreturn]] void layout_parse_error(std::size_t line, const std::string& what)
{
    throw ConfigError(ErrorCode::ParseError, "layout", line,
                      "layout line " + std::to_string(line) + ": " + what);
}
} // namespace

void write_layout(std::ostream& os, const ElementLayout& layout)
{
    const auto& spec = layout.panel_spec();
    os << kLayoutHeader << '\n';
    os << std::setprecision(17);
    os << kPanelSpecTag << " rows=" << spec.rows << " cols=" << spec.cols
       << " spacing=" << spec.spacing << " element_gain_dbi=" << spec.element_gain_dbi
       << '\n';
    for (const auto& e : layout.elements())
    {
        os << e.panel_id << ' ' << e.position.x << ' ' << e.position.y << ' '
           << e.position.z << '\n';
    }
}

ElementLayout read_layout(std::istream& is)
{
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    PanelSpec spec{1, 1, 1.0, 0.0};
    std::vector<Element> elements;

    while (std::getline(is, line))
    {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;
        if (!have_header)
        {
            if (line != kLayoutHeader)
                layout_parse_error(lineno, "expected header '" + std::string(kLayoutHeader) + "'");
            have_header = true;
            continue;
        }
        if (line.front() == '#')
        {
            if (line.rfind(kPanelSpecTag, 0) == 0)
            {
                std::istringstream fields(line.substr(std::strlen(kPanelSpecTag)));
                std::string kv;
                while (fields >> kv)
                {
                    const auto eq = kv.find('=');
                    if (eq == std::string::npos)
                        layout_parse_error(lineno, "malformed panel_spec field '" + kv + "'");
                    const std::string key = kv.substr(0, eq);
                    const std::string value = kv.substr(eq + 1);
                    try
                    {
                        if (key == "rows")
                            spec.rows = std::stoul(value);
                        else if (key == "cols")
                            spec.cols = std::stoul(value);
                        else if (key == "spacing")
                            spec.spacing = std::stod(value);
                        else if (key == "element_gain_dbi")
                            spec.element_gain_dbi = std::stod(value);
                        else
                            layout_parse_error(lineno, "unknown panel_spec field '" + key + "'");
                    }
                    catch (const std::logic_error&)
                    {
                        layout_parse_error(lineno, "bad value for '" + key + "'");
                    }
                }
            }
            continue;
        }
        std::istringstream row(line);
        long long id = -1;
        Vec3 p;
        std::string extra;
        if (!(row >> id >> p.x >> p.y >> p.z) || id < 0)
            layout_parse_error(lineno, "expected 'panel_id x y z'");
        if (row >> extra)
            layout_parse_error(lineno, "trailing fields");
        elements.push_back({p, static_cast<std::size_t>(id)});
    }
    if (!have_header)
        layout_parse_error(lineno, "missing header");
    try
    {
        spec.validate();
        return ElementLayout(std::move(elements), spec);
    }
    catch (const Error& e)
    {
        layout_parse_error(lineno, e.what());
    }
}

std::uint64_t layout_hash(const ElementLayout& layout)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i)
        {
            h ^= (v >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& e : layout.elements())
    {
        mix(e.panel_id);
        mix(bits_of(e.position.x));
        mix(bits_of(e.position.y));
        mix(bits_of(e.position.z));
    }
    return h;
}

} // namespace nearlink
