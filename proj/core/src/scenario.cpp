// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#include "nearlink/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nearlink/beamforming.hpp"
#include "nearlink/constants.hpp"
#include "nearlink/error.hpp"
#include "nearlink/mimo.hpp"
#include "nearlink/output.hpp"
#include "nearlink/placement.hpp"

namespace nearlink
{
namespace
{
[[noreturn]] void invalid(const std::string& field, const std::string& what, std::size_t line = 0)
{
    std::string msg = field + ": " + what;
    if (line > 0)
        msg = "line " + std::to_string(line) + ": " + msg;
    throw ConfigError(ErrorCode::ValidationError, field, line, msg);
}

//---------------------------------------------------------------------------//
// Pulls typed values out of a ConfigDocument and remembers which keys were
// consumed so leftovers can be reported as unknown.
class Reader
{
  public:
    explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

    bool has(const std::string& key) const { return doc_.contains(key); }

    const ConfigValue& require(const std::string& key)
    {
        const ConfigValue* v = doc_.find(key);
        if (!v)
            invalid(key, "required key is missing");
        used_.insert(key);
        return *v;
    }

    const ConfigValue* optional(const std::string& key)
    {
        const ConfigValue* v = doc_.find(key);
        if (v)
            used_.insert(key);
        return v;
    }

    static double as_number(const std::string& key, const ConfigValue& v)
    {
        const auto* n = std::get_if<ConfigValue::Number>(&v.data);
        if (!n)
            invalid(key, std::string("expected a number, got ") + v.type_name(), v.line);
        return n->value;
    }

    static std::uint64_t as_unsigned(const std::string& key, const ConfigValue& v)
    {
        const auto* n = std::get_if<ConfigValue::Number>(&v.data);
        if (!n)
            invalid(key, std::string("expected an integer, got ") + v.type_name(), v.line);
        std::uint64_t out = 0;
        const char* first = n->literal.data();
        const char* last = first + n->literal.size();
        auto [ptr, ec] = std::from_chars(first, last, out);
        if (ec != std::errc() || ptr != last)
            invalid(key, "expected a non-negative integer, got '" + n->literal + "'", v.line);
        return out;
    }

    static std::string as_string(const std::string& key, const ConfigValue& v)
    {
        const auto* s = std::get_if<std::string>(&v.data);
        if (!s)
            invalid(key, std::string("expected a string, got ") + v.type_name(), v.line);
        return *s;
    }

    static Vec3 as_vec3(const std::string& key, const ConfigValue& v)
    {
        const auto* a = std::get_if<ConfigValue::Array>(&v.data);
        if (!a || a->size() != 3)
            invalid(key, "expected [x, y, z]", v.line);
        return {as_number(key, (*a)[0]), as_number(key, (*a)[1]), as_number(key, (*a)[2])};
    }

    double number(const std::string& key) { return as_number(key, require(key)); }
    double number_or(const std::string& key, double fallback)
    {
        const ConfigValue* v = optional(key);
        return v ? as_number(key, *v) : fallback;
    }
    std::optional<double> maybe_number(const std::string& key)
    {
        const ConfigValue* v = optional(key);
        if (!v)
            return std::nullopt;
        return as_number(key, *v);
    }
    std::uint64_t integer(const std::string& key) { return as_unsigned(key, require(key)); }
    std::uint64_t integer_or(const std::string& key, std::uint64_t fallback)
    {
        const ConfigValue* v = optional(key);
        return v ? as_unsigned(key, *v) : fallback;
    }
    std::string string(const std::string& key) { return as_string(key, require(key)); }
    std::string string_or(const std::string& key, const std::string& fallback)
    {
        const ConfigValue* v = optional(key);
        return v ? as_string(key, *v) : fallback;
    }

    std::vector<double> number_list(const std::string& key)
    {
        const ConfigValue& v = require(key);
        const auto* a = std::get_if<ConfigValue::Array>(&v.data);
        if (!a)
            invalid(key, "expected an array of numbers", v.line);
        std::vector<double> out;
        for (const auto& item : *a)
            out.push_back(as_number(key, item));
        return out;
    }

    std::vector<Vec3> vec3_list(const std::string& key)
    {
        const ConfigValue& v = require(key);
        const auto* a = std::get_if<ConfigValue::Array>(&v.data);
        if (!a)
            invalid(key, "expected an array of [x, y, z]", v.line);
        std::vector<Vec3> out;
        for (const auto& item : *a)
            out.push_back(as_vec3(key, item));
        return out;
    }

    std::size_t line_of(const std::string& key) const
    {
        const ConfigValue* v = doc_.find(key);
        return v ? v->line : 0;
    }

    void reject_unknown() const
    {
        for (const auto& [key, value] : doc_.entries())
        {
            if (!used_.count(key))
                throw ConfigError(ErrorCode::ParseError, key, value.line,
                                  "line " + std::to_string(value.line) + ": unknown key '" + key
                                      + "'");
        }
    }

  private:
    const ConfigDocument& doc_;
    std::set<std::string> used_;
};

//---------------------------------------------------------------------------//
template<class T>
T pick(const std::string& key, const std::string& value, std::initializer_list<std::pair<const char*, T>> options,
       std::size_t line)
{
    std::string names;
    for (const auto& [name, v] : options)
    {
        if (value == name)
            return v;
        names += names.empty() ? name : std::string(", ") + name;
    }
    invalid(key, "unknown value '" + value + "' (expected one of: " + names + ")", line);
}

ChannelModel read_model(Reader& r, const std::string& key)
{
    const std::string v = r.string_or(key, "phase_only");
    return pick<ChannelModel>(key, v,
                              {{"phase_only", ChannelModel::PhaseOnly},
                               {"full_amplitude", ChannelModel::FullAmplitude}},
                              r.line_of(key));
}

FocusMode read_focus(Reader& r, const std::string& key)
{
    const std::string v = r.string_or(key, "point");
    return pick<FocusMode>(key, v, {{"point", FocusMode::Point}, {"direction", FocusMode::Direction}},
                           r.line_of(key));
}

RangeAxis read_range_axis(Reader& r, const std::string& prefix)
{
    RangeAxis axis;
    const std::string list_key = prefix + "ranges";
    if (r.has(list_key))
    {
        axis.explicit_values = r.number_list(list_key);
        for (const char* k : {"range_start", "range_stop", "n_ranges", "range_spacing"})
            if (r.has(prefix + k))
                invalid(prefix + k, "cannot be combined with '" + list_key + "'", r.line_of(prefix + k));
        return axis;
    }
    axis.start = r.number(prefix + "range_start");
    axis.stop = r.number(prefix + "range_stop");
    axis.count = r.integer(prefix + "n_ranges");
    const std::string spacing_key = prefix + "range_spacing";
    axis.log_spacing = pick<bool>(spacing_key, r.string_or(spacing_key, "linear"),
                                  {{"linear", false}, {"log", true}}, r.line_of(spacing_key));
    return axis;
}

void read_panel(Reader& r, const std::string& p, double wavelength, PanelSpec& panel)
{
    panel.rows = r.integer_or(p + "rows", 1);
    panel.cols = r.integer_or(p + "cols", 1);
    const bool meters = r.has(p + "spacing");
    const bool waves = r.has(p + "spacing_wavelengths");
    if (meters == waves)
        invalid(p + "spacing", "give exactly one of 'spacing' [m] or 'spacing_wavelengths'");
    panel.spacing = meters ? r.number(p + "spacing")
                           : r.number(p + "spacing_wavelengths") * wavelength;
    panel.element_gain_dbi = r.number_or(p + "element_gain_dbi", 0.0);
}

LayoutSpec read_layout_spec(Reader& r, const std::string& section, double wavelength)
{
    const std::string p = section + ".";
    LayoutSpec spec;
    read_panel(r, p, wavelength, spec.panel);
    const std::string kind_key = p + "kind";
    const std::string kind = r.string(kind_key);
    if (kind == "upa")
    {
        UpaLayoutSpec upa;
        if (const ConfigValue* c = r.optional(p + "center"))
            upa.center = Reader::as_vec3(p + "center", *c);
        spec.arrangement = upa;
        return spec;
    }
    if (kind != "distributed")
        invalid(kind_key, "unknown layout kind '" + kind + "' (expected upa or distributed)",
                r.line_of(kind_key));

    DistributedLayoutSpec dist;
    const std::string placement_key = p + "placement";
    const std::string placement = r.string(placement_key);
    if (placement == "explicit")
        dist.placement = r.vec3_list(p + "centers");
    else if (placement == "random")
    {
        RandomPlacementSpec rnd;
        rnd.aperture_x = r.number(p + "aperture_x");
        rnd.aperture_y = r.number(p + "aperture_y");
        rnd.n_panels = r.integer(p + "n_panels");
        rnd.min_spacing = r.number(p + "min_spacing");
        rnd.seed = r.integer(p + "seed");
        dist.placement = rnd;
    }
    else
        invalid(placement_key, "unknown placement '" + placement + "' (expected explicit or random)",
                r.line_of(placement_key));
    spec.arrangement = std::move(dist);
    return spec;
}

Analysis read_analysis(Reader& r)
{
    const std::string p = "analysis.";
    const std::string kind = r.string(p + "kind");
    if (kind == "boundaries")
    {
        BoundariesAnalysis a;
        a.d_tx = r.maybe_number(p + "d_tx");
        a.d_rx = r.maybe_number(p + "d_rx");
        a.tau = r.number_or(p + "tau", 0.1);
        return a;
    }
    if (kind == "svd_sweep")
    {
        SvdSweepAnalysis a;
        a.ranges = read_range_axis(r, p);
        a.model = read_model(r, p + "model");
        a.tau = r.number_or(p + "tau", 0.1);
        return a;
    }
    if (kind == "dof_sweep")
    {
        DofSweepAnalysis a;
        a.ranges = read_range_axis(r, p);
        a.model = read_model(r, p + "model");
        a.tau = r.number_or(p + "tau", 0.1);
        return a;
    }
    if (kind == "beam_theta")
    {
        BeamThetaAnalysis a;
        a.theta_span = r.number_or(p + "theta_span", a.theta_span);
        a.n_theta = r.integer_or(p + "n_theta", a.n_theta);
        a.focus = read_focus(r, p + "focus");
        return a;
    }
    if (kind == "beam_range")
    {
        BeamRangeAnalysis a;
        a.ranges = read_range_axis(r, p);
        a.focus = read_focus(r, p + "focus");
        return a;
    }
    if (kind == "beam_2d")
    {
        Beam2dAnalysis a;
        a.theta_span = r.number_or(p + "theta_span", a.theta_span);
        a.n_theta = r.integer_or(p + "n_theta", a.n_theta);
        a.ranges = read_range_axis(r, p);
        a.focus = read_focus(r, p + "focus");
        return a;
    }
    if (kind == "optimize_placement")
    {
        OptimizePlacementAnalysis a;
        a.search.aperture_x = r.number(p + "aperture_x");
        a.search.aperture_y = r.number(p + "aperture_y");
        a.search.n_panels = r.integer(p + "n_panels");
        a.search.min_spacing = r.number(p + "min_spacing");
        a.search.seed = r.integer(p + "seed");
        a.n_candidates = r.integer(p + "n_candidates");
        a.steer_theta = r.number_or(p + "steer_theta", a.steer_theta);
        a.steer_phi = r.number_or(p + "steer_phi", a.steer_phi);
        a.theta_lo = r.number_or(p + "theta_lo", a.theta_lo);
        a.theta_hi = r.number_or(p + "theta_hi", a.theta_hi);
        a.n_scan = r.integer_or(p + "n_scan", a.n_scan);
        a.exclusion_halfwidth = r.maybe_number(p + "exclusion_halfwidth");
        return a;
    }
    if (kind == "dish_gain")
    {
        DishGainAnalysis a;
        a.diameter = r.number(p + "diameter");
        a.efficiency = r.number(p + "efficiency");
        return a;
    }
    invalid(p + "kind", "unknown analysis kind '" + kind + "'", r.line_of(p + "kind"));
}

bool has_prefix(const ConfigDocument& doc, const std::string& prefix)
{
    const auto it = doc.entries().lower_bound(prefix);
    return it != doc.entries().end() && it->first.rfind(prefix, 0) == 0;
}

//---------------------------------------------------------------------------//
// Field-level validation
void check_positive(const std::string& field, double v)
{
    if (!(v > 0.0) || !std::isfinite(v))
        invalid(field, "must be finite and > 0");
}

void check_tau(const std::string& field, double tau)
{
    if (!(tau > 0.0 && tau < 1.0))
        invalid(field, "must lie in (0, 1)");
}

void validate_range_axis(const std::string& field, const RangeAxis& a)
{
    if (!a.explicit_values.empty())
    {
        for (double v : a.explicit_values)
            check_positive(field, v);
        if (!std::is_sorted(a.explicit_values.begin(), a.explicit_values.end()))
            invalid(field, "ranges must be ascending");
        return;
    }
    check_positive(field + ".range_start", a.start);
    check_positive(field + ".range_stop", a.stop);
    if (a.count < 1)
        invalid(field + ".n_ranges", "must be >= 1");
    if (a.stop < a.start)
        invalid(field + ".range_stop", "must be >= range_start");
}

void validate_layout(const std::string& section, const LayoutSpec& spec)
{
    if (spec.panel.rows < 1)
        invalid(section + ".rows", "must be >= 1");
    if (spec.panel.cols < 1)
        invalid(section + ".cols", "must be >= 1");
    check_positive(section + ".spacing", spec.panel.spacing);
    if (!std::isfinite(spec.panel.element_gain_dbi))
        invalid(section + ".element_gain_dbi", "must be finite");
    if (const auto* d = std::get_if<DistributedLayoutSpec>(&spec.arrangement))
    {
        if (const auto* centers = std::get_if<std::vector<Vec3>>(&d->placement))
        {
            if (centers->empty())
                invalid(section + ".centers", "must list at least one panel center");
        }
        else
        {
            const auto& rnd = std::get<RandomPlacementSpec>(d->placement);
            if (!(rnd.aperture_x >= 0.0) || !(rnd.aperture_y >= 0.0))
                invalid(section + ".aperture_x", "aperture must be >= 0");
            if (rnd.n_panels < 1)
                invalid(section + ".n_panels", "must be >= 1");
            check_positive(section + ".min_spacing", rnd.min_spacing);
        }
    }
    try
    {
        (void)spec.build();
    }
    catch (const ConfigError&)
    {
        throw;
    }
    catch (const Error& e)
    {
        invalid(section, std::string(to_string(e.code())) + ": " + e.what());
    }
}

//---------------------------------------------------------------------------//
// Serialization helpers
std::string vec3_text(Vec3 v)
{
    return "[" + format_number(v.x) + ", " + format_number(v.y) + ", " + format_number(v.z) + "]";
}

void emit(std::ostringstream& os, const std::string& key, double v)
{
    os << key << " = " << format_number(v) << '\n';
}

void emit_int(std::ostringstream& os, const std::string& key, std::uint64_t v)
{
    os << key << " = " << v << '\n';
}

void emit_str(std::ostringstream& os, const std::string& key, const std::string& v)
{
    os << key << " = " << quote_string(v) << '\n';
}

void emit_layout(std::ostringstream& os, const LayoutSpec& spec)
{
    const bool upa = std::holds_alternative<UpaLayoutSpec>(spec.arrangement);
    emit_str(os, "kind", upa ? "upa" : "distributed");
    emit_int(os, "rows", spec.panel.rows);
    emit_int(os, "cols", spec.panel.cols);
    emit(os, "spacing", spec.panel.spacing);
    emit(os, "element_gain_dbi", spec.panel.element_gain_dbi);
    if (upa)
    {
        os << "center = " << vec3_text(std::get<UpaLayoutSpec>(spec.arrangement).center) << '\n';
        return;
    }
    const auto& d = std::get<DistributedLayoutSpec>(spec.arrangement);
    if (const auto* centers = std::get_if<std::vector<Vec3>>(&d.placement))
    {
        emit_str(os, "placement", "explicit");
        os << "centers = [\n";
        for (const Vec3& c : *centers)
            os << "  " << vec3_text(c) << ",\n";
        os << "]\n";
        return;
    }
    const auto& rnd = std::get<RandomPlacementSpec>(d.placement);
    emit_str(os, "placement", "random");
    emit(os, "aperture_x", rnd.aperture_x);
    emit(os, "aperture_y", rnd.aperture_y);
    emit_int(os, "n_panels", rnd.n_panels);
    emit(os, "min_spacing", rnd.min_spacing);
    emit_int(os, "seed", rnd.seed);
}

void emit_axis(std::ostringstream& os, const RangeAxis& a)
{
    if (!a.explicit_values.empty())
    {
        os << "ranges = [";
        for (std::size_t i = 0; i < a.explicit_values.size(); ++i)
            os << (i ? ", " : "") << format_number(a.explicit_values[i]);
        os << "]\n";
        return;
    }
    emit(os, "range_start", a.start);
    emit(os, "range_stop", a.stop);
    emit_int(os, "n_ranges", a.count);
    emit_str(os, "range_spacing", a.log_spacing ? "log" : "linear");
}

const char* focus_name(FocusMode f) { return f == FocusMode::Point ? "point" : "direction"; }

struct AnalysisEmitter
{
    std::ostringstream& os;

    void operator()(const BoundariesAnalysis& a) const
    {
        if (a.d_tx)
            emit(os, "d_tx", *a.d_tx);
        if (a.d_rx)
            emit(os, "d_rx", *a.d_rx);
        emit(os, "tau", a.tau);
    }
    void operator()(const SvdSweepAnalysis& a) const
    {
        emit_axis(os, a.ranges);
        emit_str(os, "model", to_string(a.model));
        emit(os, "tau", a.tau);
    }
    void operator()(const DofSweepAnalysis& a) const
    {
        emit_axis(os, a.ranges);
        emit_str(os, "model", to_string(a.model));
        emit(os, "tau", a.tau);
    }
    void operator()(const BeamThetaAnalysis& a) const
    {
        emit(os, "theta_span", a.theta_span);
        emit_int(os, "n_theta", a.n_theta);
        emit_str(os, "focus", focus_name(a.focus));
    }
    void operator()(const BeamRangeAnalysis& a) const
    {
        emit_axis(os, a.ranges);
        emit_str(os, "focus", focus_name(a.focus));
    }
    void operator()(const Beam2dAnalysis& a) const
    {
        emit(os, "theta_span", a.theta_span);
        emit_int(os, "n_theta", a.n_theta);
        emit_axis(os, a.ranges);
        emit_str(os, "focus", focus_name(a.focus));
    }
    void operator()(const OptimizePlacementAnalysis& a) const
    {
        emit(os, "aperture_x", a.search.aperture_x);
        emit(os, "aperture_y", a.search.aperture_y);
        emit_int(os, "n_panels", a.search.n_panels);
        emit(os, "min_spacing", a.search.min_spacing);
        emit_int(os, "seed", a.search.seed);
        emit_int(os, "n_candidates", a.n_candidates);
        emit(os, "steer_theta", a.steer_theta);
        emit(os, "steer_phi", a.steer_phi);
        emit(os, "theta_lo", a.theta_lo);
        emit(os, "theta_hi", a.theta_hi);
        emit_int(os, "n_scan", a.n_scan);
        if (a.exclusion_halfwidth)
            emit(os, "exclusion_halfwidth", *a.exclusion_halfwidth);
    }
    void operator()(const DishGainAnalysis& a) const
    {
        emit(os, "diameter", a.diameter);
        emit(os, "efficiency", a.efficiency);
    }
};

std::string hex64(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

} // namespace

//---------------------------------------------------------------------------//
ElementLayout LayoutSpec::build() const
{
    if (const auto* upa = std::get_if<UpaLayoutSpec>(&arrangement))
        return make_upa(panel, upa->center);
    const auto& d = std::get<DistributedLayoutSpec>(arrangement);
    if (const auto* centers = std::get_if<std::vector<Vec3>>(&d.placement))
        return make_distributed_panels(panel, *centers);
    const auto& rnd = std::get<RandomPlacementSpec>(d.placement);
    const auto centers = random_panel_positions(rnd.aperture_x, rnd.aperture_y, rnd.n_panels,
                                                rnd.min_spacing, rnd.seed);
    return make_distributed_panels(panel, centers);
}

Vec3 SatelliteSpec::position_at(double range) const
{
    return point_at(range, off_nadir_rad, azimuth_rad).point;
}

ElementLayout SatelliteSpec::build_at(double range) const
{
    const ElementLayout local = layout.build();
    return local.translated(position_at(range) - local.centroid());
}

std::vector<double> RangeAxis::values() const
{
    if (!explicit_values.empty())
        return explicit_values;
    std::vector<double> out(count);
    if (count == 1)
    {
        out[0] = start;
        return out;
    }
    for (std::size_t i = 0; i < count; ++i)
    {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        out[i] = log_spacing ? start * std::pow(stop / start, t) : start + (stop - start) * t;
    }
    out.back() = stop;
    return out;
}

const char* analysis_kind(const Analysis& a) noexcept
{
    static constexpr const char* names[] = {"boundaries", "svd_sweep",  "dof_sweep",
                                            "beam_theta",  "beam_range", "beam_2d",
                                            "optimize_placement", "dish_gain"};
    return names[a.index()];
}

double Scenario::wavelength() const { return wavelength_from_frequency(frequency_hz); }

//---------------------------------------------------------------------------//
Scenario scenario_from_document(const ConfigDocument& doc)
{
    Reader r(doc);
    Scenario s;
    const std::uint64_t version = r.integer("version");
    if (version != 1)
        invalid("version", "unsupported scenario version " + std::to_string(version),
                r.line_of("version"));
    s.version = 1;
    s.frequency_hz = r.number("frequency_hz");
    check_positive("frequency_hz", s.frequency_hz);
    s.output = r.string_or("output", s.output);

    const double lambda = s.wavelength();
    if (has_prefix(doc, "ground."))
        s.ground = read_layout_spec(r, "ground", lambda);
    if (has_prefix(doc, "satellite."))
    {
        SatelliteSpec sat;
        sat.range_m = r.number("satellite.range_m");
        sat.off_nadir_rad = r.number_or("satellite.off_nadir_rad", 0.0);
        sat.azimuth_rad = r.number_or("satellite.azimuth_rad", 0.0);
        sat.layout = read_layout_spec(r, "satellite", lambda);
        s.satellite = std::move(sat);
    }
    s.analysis = read_analysis(r);
    r.reject_unknown();
    validate(s);
    return s;
}

Scenario parse_scenario(std::string_view text)
{
    return scenario_from_document(ConfigDocument::parse(text));
}

Scenario load_scenario_file(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    ConfigDocument doc = ConfigDocument::parse(buf.str());
    apply_overrides(doc, overrides);
    return scenario_from_document(doc);
}

void apply_overrides(ConfigDocument& doc, const std::vector<std::string>& overrides)
{
    for (const auto& o : overrides)
    {
        const auto eq = o.find('=');
        if (eq == std::string::npos)
            throw ConfigError(ErrorCode::ParseError, o, 0,
                              "override '" + o + "' must look like key=value");
        std::string key = o.substr(0, eq);
        key.erase(0, key.find_first_not_of(' '));
        key.erase(key.find_last_not_of(' ') + 1);
        doc.set(key, o.substr(eq + 1));
    }
}

void validate(const Scenario& s)
{
    if (s.version != 1)
        invalid("version", "unsupported scenario version");
    check_positive("frequency_hz", s.frequency_hz);
    if (s.output.empty())
        invalid("output", "must not be empty");
    if (s.ground)
        validate_layout("ground", *s.ground);
    if (s.satellite)
    {
        check_positive("satellite.range_m", s.satellite->range_m);
        if (!(std::abs(s.satellite->off_nadir_rad) < 0.5 * kPi))
            invalid("satellite.off_nadir_rad", "must lie in (-pi/2, pi/2)");
        if (!std::isfinite(s.satellite->azimuth_rad))
            invalid("satellite.azimuth_rad", "must be finite");
        validate_layout("satellite", s.satellite->layout);
    }

    auto need = [&](bool ok, const char* section) {
        if (!ok)
            invalid(section, std::string("analysis '") + analysis_kind(s.analysis)
                                 + "' needs a [" + section + "] block");
    };

    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, BoundariesAnalysis>)
            {
                if (a.d_tx)
                    check_positive("analysis.d_tx", *a.d_tx);
                else
                    need(s.ground.has_value(), "ground");
                if (a.d_rx)
                    check_positive("analysis.d_rx", *a.d_rx);
                else
                    need(s.satellite.has_value(), "satellite");
                check_tau("analysis.tau", a.tau);
            }
            else if constexpr (std::is_same_v<T, SvdSweepAnalysis> || std::is_same_v<T, DofSweepAnalysis>)
            {
                need(s.ground.has_value(), "ground");
                need(s.satellite.has_value(), "satellite");
                validate_range_axis("analysis.ranges", a.ranges);
                check_tau("analysis.tau", a.tau);
            }
            else if constexpr (std::is_same_v<T, BeamThetaAnalysis> || std::is_same_v<T, Beam2dAnalysis>)
            {
                need(s.ground.has_value(), "ground");
                need(s.satellite.has_value(), "satellite");
                if (a.n_theta < 1)
                    invalid("analysis.n_theta", "must be >= 1");
                if (!(a.theta_span >= 0.0) || !std::isfinite(a.theta_span))
                    invalid("analysis.theta_span", "must be finite and >= 0");
                if constexpr (std::is_same_v<T, Beam2dAnalysis>)
                    validate_range_axis("analysis.ranges", a.ranges);
            }
            else if constexpr (std::is_same_v<T, BeamRangeAnalysis>)
            {
                need(s.ground.has_value(), "ground");
                need(s.satellite.has_value(), "satellite");
                validate_range_axis("analysis.ranges", a.ranges);
            }
            else if constexpr (std::is_same_v<T, OptimizePlacementAnalysis>)
            {
                if (!(a.search.aperture_x > 0.0))
                    invalid("analysis.aperture_x", "must be > 0");
                if (!(a.search.aperture_y >= 0.0))
                    invalid("analysis.aperture_y", "must be >= 0");
                if (a.search.n_panels < 2)
                    invalid("analysis.n_panels", "must be >= 2");
                check_positive("analysis.min_spacing", a.search.min_spacing);
                if (a.n_candidates < 1)
                    invalid("analysis.n_candidates", "must be >= 1");
                if (a.exclusion_halfwidth)
                    check_positive("analysis.exclusion_halfwidth", *a.exclusion_halfwidth);
                try
                {
                    PlacementObjective obj{{a.steer_theta, a.steer_phi},
                                           a.exclusion_halfwidth.value_or(1.0),
                                           a.theta_lo, a.theta_hi, a.n_scan};
                    obj.validate();
                }
                catch (const Error& e)
                {
                    invalid("analysis", e.what());
                }
            }
            else if constexpr (std::is_same_v<T, DishGainAnalysis>)
            {
                check_positive("analysis.diameter", a.diameter);
                if (!(a.efficiency > 0.0 && a.efficiency <= 1.0))
                    invalid("analysis.efficiency", "must lie in (0, 1]");
            }
        },
        s.analysis);
}

std::string serialize(const Scenario& s)
{
    std::ostringstream os;
    emit_int(os, "version", static_cast<std::uint64_t>(s.version));
    emit(os, "frequency_hz", s.frequency_hz);
    emit_str(os, "output", s.output);
    if (s.ground)
    {
        os << "\n[ground]\n";
        emit_layout(os, *s.ground);
    }
    if (s.satellite)
    {
        os << "\n[satellite]\n";
        emit(os, "range_m", s.satellite->range_m);
        emit(os, "off_nadir_rad", s.satellite->off_nadir_rad);
        emit(os, "azimuth_rad", s.satellite->azimuth_rad);
        emit_layout(os, s.satellite->layout);
    }
    os << "\n[analysis]\n";
    emit_str(os, "kind", analysis_kind(s.analysis));
    std::visit(AnalysisEmitter{os}, s.analysis);
    return os.str();
}

std::uint64_t scenario_hash(const Scenario& s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : serialize(s))
    {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

//---------------------------------------------------------------------------//
// Runner
//---------------------------------------------------------------------------//
namespace
{
struct RunContext
{
    const Scenario& s;
    std::filesystem::path dir;
    std::string hash;
    RunReport& report;
    bool enabled = true;

    std::vector<std::string> metadata() const
    {
        std::vector<std::string> m;
        m.push_back("scenario_hash=" + hash);
        m.push_back(std::string("analysis=") + analysis_kind(s.analysis));
        m.push_back("frequency_hz=" + format_number(s.frequency_hz));
        m.push_back("wavelength_m=" + format_number(s.wavelength()));
        auto seed_line = [&](const char* who, const std::optional<LayoutSpec>& spec) {
            if (!spec)
                return;
            if (const auto* d = std::get_if<DistributedLayoutSpec>(&spec->arrangement))
                if (const auto* rnd = std::get_if<RandomPlacementSpec>(&d->placement))
                    m.push_back(std::string(who) + "_seed=" + std::to_string(rnd->seed));
        };
        seed_line("ground", s.ground);
        if (s.satellite)
            seed_line("satellite", std::optional<LayoutSpec>(s.satellite->layout));
        return m;
    }

    void write(const std::string& name, const std::string& content)
    {
        const auto path = dir / name;
        if (!enabled)
            return;
        atomic_write_file(path, content);
        report.outputs.push_back(path);
    }
};

void run(RunContext& ctx, const BoundariesAnalysis& a)
{
    const double lambda = ctx.s.wavelength();
    const double d_tx = a.d_tx ? *a.d_tx : aperture_extent(ctx.s.ground->build());
    const double d_rx = a.d_rx ? *a.d_rx : aperture_extent(ctx.s.satellite->layout.build());
    const FeasibilityThreshold tau(a.tau);
    const double lo = r_min(d_tx, d_rx, lambda, tau);
    const double hi = r_max(d_tx, d_rx, lambda, tau);
    const double b = d_tx * d_rx / lambda;

    nlohmann::ordered_json j;
    j["scenario_hash"] = ctx.hash;
    j["wavelength_m"] = lambda;
    j["d_tx_m"] = d_tx;
    j["d_rx_m"] = d_rx;
    j["tau"] = a.tau;
    j["r_min_m"] = lo;
    j["r_max_m"] = hi;
    j["r_max_small_tau_approx_m"] = kPi / (2.0 * a.tau) * b;
    j["region1_end_m"] = b;
    j["region2_end_m"] = 2.0 * b;
    j["fresnel_distance_tx_m"] = fresnel_distance(d_tx, lambda);
    j["fraunhofer_distance_tx_m"] = fraunhofer_distance(d_tx, lambda);
    ctx.write("boundaries.json", j.dump(2) + "\n");

    ctx.report.scalars["d_tx"] = d_tx;
    ctx.report.scalars["d_rx"] = d_rx;
    ctx.report.scalars["r_min"] = lo;
    ctx.report.scalars["r_max"] = hi;
}

template<class A>
void run_spectrum_sweep(RunContext& ctx, const A& a)
{
    const double lambda = ctx.s.wavelength();
    const ElementLayout ground = ctx.s.ground->build();
    const FeasibilityThreshold tau(a.tau);

    std::vector<SpectrumSample> samples;
    for (double r : a.ranges.values())
    {
        const ElementLayout sat = ctx.s.satellite->build_at(r);
        samples.push_back({r, singular_values(channel_matrix(ground, sat, lambda, a.model))});
    }

    std::ostringstream os;
    for (const auto& line : ctx.metadata())
        os << "# " << line << '\n';
    os << "# model=" << to_string(a.model) << '\n';
    os << "# tau=" << format_number(a.tau) << '\n';
    os << "# channel=" << ctx.s.satellite->build_at(ctx.s.satellite->range_m).size() << "x"
       << ground.size() << " (satellite x ground)\n";
    os << "# units: r_meters [m]; sigma [linear]; ratio = sigma_min/sigma_max\n";
    write_spectrum_csv(os, samples, tau);
    ctx.write("spectrum.csv", os.str());

    const ElementLayout ref = ctx.s.satellite->build_at(ctx.s.satellite->range_m);
    const auto spectrum = singular_values(channel_matrix(ground, ref, lambda, a.model));
    ctx.report.scalars["reference_range_m"] = ctx.s.satellite->range_m;
    ctx.report.scalars["dof_at_reference_range"] = static_cast<double>(dof_count(spectrum, tau));
    ctx.report.scalars["ratio_at_reference_range"] = condition_ratio(spectrum);
    if (spectrum.values.size() >= 2)
        ctx.report.scalars["sigma1_over_sigma0_at_reference_range"] = singular_ratio(spectrum, 1);
    std::size_t max_dof = 0;
    for (const auto& smp : samples)
        max_dof = std::max(max_dof, dof_count(smp.spectrum, tau));
    ctx.report.scalars["max_dof"] = static_cast<double>(max_dof);
}

Focal focus_for(const Scenario& s, FocusMode mode)
{
    if (mode == FocusMode::Direction)
        return Direction{s.satellite->off_nadir_rad, s.satellite->azimuth_rad};
    return FocalPoint{s.satellite->position_at(s.satellite->range_m)};
}

std::vector<double> theta_axis(double center, double span, std::size_t n)
{
    std::vector<double> out(n, center);
    if (n == 1)
        return out;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double t = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        out[i] = center + span * t;
    }
    out[(n - 1) / 2] = (n % 2 == 1) ? center : out[(n - 1) / 2];
    return out;
}

void write_grid(RunContext& ctx, const std::string& name, const ElementLayout& ground,
                const GainGrid& grid)
{
    std::ostringstream os;
    write_gain_grid_csv(os, grid, layout_hash(ground), ctx.metadata());
    ctx.write(name, os.str());
    ctx.report.scalars["peak_gain_dbi"] = grid.peak();
}

void run_beam(RunContext& ctx, FocusMode focus_mode, std::vector<double> thetas,
              std::vector<double> ranges, const std::string& name)
{
    const double lambda = ctx.s.wavelength();
    const ElementLayout ground = ctx.s.ground->build();
    const Focal focus = focus_for(ctx.s, focus_mode);
    const WeightVector w = delay_and_sum_weights(ground, focus, lambda);

    SweepSpec sweep;
    sweep.theta = std::move(thetas);
    sweep.range = std::move(ranges);
    sweep.fixed_theta = ctx.s.satellite->off_nadir_rad;
    if (focus_mode == FocusMode::Point)
        sweep.fixed_range = ctx.s.satellite->range_m;
    sweep.phi = ctx.s.satellite->azimuth_rad;
    const GainGrid grid = gain_pattern_sweep(ground, w, sweep, lambda);
    write_grid(ctx, name, ground, grid);
    ctx.report.scalars["gain_at_focus_dbi"] = evaluate_gain(ground, w, focus, lambda);
    ctx.report.scalars["matched_gain_dbi"] =
        10.0 * std::log10(static_cast<double>(ground.size())) + ground.panel_spec().element_gain_dbi;
}

void run(RunContext& ctx, const SvdSweepAnalysis& a) { run_spectrum_sweep(ctx, a); }
void run(RunContext& ctx, const DofSweepAnalysis& a) { run_spectrum_sweep(ctx, a); }

void run(RunContext& ctx, const BeamThetaAnalysis& a)
{
    run_beam(ctx, a.focus, theta_axis(ctx.s.satellite->off_nadir_rad, a.theta_span, a.n_theta), {},
             "gain_theta.csv");
}

void run(RunContext& ctx, const BeamRangeAnalysis& a)
{
    run_beam(ctx, a.focus, {}, a.ranges.values(), "gain_range.csv");
}

void run(RunContext& ctx, const Beam2dAnalysis& a)
{
    run_beam(ctx, a.focus, theta_axis(ctx.s.satellite->off_nadir_rad, a.theta_span, a.n_theta),
             a.ranges.values(), "gain_2d.csv");
}

void run(RunContext& ctx, const OptimizePlacementAnalysis& a)
{
    const double lambda = ctx.s.wavelength();
    PlacementObjective obj{{a.steer_theta, a.steer_phi},
                           a.exclusion_halfwidth.value_or(2.0 * lambda / a.search.aperture_x),
                           a.theta_lo, a.theta_hi, a.n_scan};
    const PlacementResult result =
        optimize_placement(a.search.aperture_x, a.search.aperture_y, a.search.n_panels,
                           a.search.min_spacing, lambda, obj, a.n_candidates, a.search.seed);

    // Panels use the ground panel description when there is one.
    const PanelSpec panel = ctx.s.ground ? ctx.s.ground->panel : PanelSpec{1, 1, lambda / 2, 0.0};
    std::ostringstream layout_text;
    write_layout(layout_text, make_distributed_panels(panel, result.positions));
    ctx.write("placement_layout.txt", layout_text.str());

    std::ostringstream summary;
    write_placement_summary_json(summary, result, obj, lambda, a.n_candidates);
    ctx.write("placement_summary.json", summary.str());

    ctx.report.scalars["peak_sidelobe_db"] = result.peak_sidelobe_db;
    ctx.report.scalars["candidate_index"] = static_cast<double>(result.candidate_index);
}

void run(RunContext& ctx, const DishGainAnalysis& a)
{
    const double lambda = ctx.s.wavelength();
    const double g = dish_gain({a.diameter, a.efficiency}, lambda);
    nlohmann::ordered_json j;
    j["scenario_hash"] = ctx.hash;
    j["wavelength_m"] = lambda;
    j["diameter_m"] = a.diameter;
    j["efficiency"] = a.efficiency;
    j["gain_dbi"] = g;
    ctx.write("dish_gain.json", j.dump(2) + "\n");
    ctx.report.scalars["gain_dbi"] = g;
}
} // namespace

std::string RunReport::to_json() const
{
    nlohmann::ordered_json j;
    j["scenario_hash"] = hex64(scenario_hash);
    j["analysis"] = analysis;
    j["wall_seconds"] = wall_seconds;
    j["outputs"] = nlohmann::json::array();
    for (const auto& p : outputs)
        j["outputs"].push_back(p.string());
    j["scalars"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : scalars)
        j["scalars"][k] = v;
    return j.dump(2);
}

RunReport run_scenario(const Scenario& s, const RunOptions& options)
{
    validate(s);
    const auto t0 = std::chrono::steady_clock::now();

    RunReport report;
    report.scenario_hash = scenario_hash(s);
    report.analysis = analysis_kind(s.analysis);
    RunContext ctx{s, options.output_dir.value_or(std::filesystem::path(s.output)),
                   hex64(report.scenario_hash), report, options.write_outputs};
    std::visit([&](const auto& a) { run(ctx, a); }, s.analysis);

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (options.write_outputs)
        atomic_write_file(ctx.dir / "report.json", report.to_json() + "\n");
    return report;
}

} // namespace nearlink
