// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#include "nearlink_cli/cli.hpp"

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nearlink/config_text.hpp"
#include "nearlink/constants.hpp"
#include "nearlink/error.hpp"
#include "nearlink/scenario.hpp"

namespace nearlink::cli
{
namespace
{
std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s)
    {
        if (c == '"' || c == '\\')
            out += '\\';
        if (c == '\n')
        {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out;
}

// Options shared by every subcommand.
struct Common
{
    std::string scenario;
    std::vector<std::string> sets;
    std::string out;
    std::optional<double> freq;
    std::optional<double> lambda;
};

// Scenario keys set from subcommand flags, applied before --set.
class Overrides
{
  public:
    void number(const std::string& key, const std::optional<double>& v)
    {
        if (v)
            items_.push_back(key + "=" + format_number(*v));
    }
    void integer(const std::string& key, const std::optional<std::uint64_t>& v)
    {
        if (v)
            items_.push_back(key + "=" + std::to_string(*v));
    }
    void text(const std::string& key, const std::string& v)
    {
        if (!v.empty())
            items_.push_back(key + "=" + quote_string(v));
    }
    const std::vector<std::string>& items() const { return items_; }

  private:
    std::vector<std::string> items_;
};

struct RangeFlags
{
    std::optional<double> start;
    std::optional<double> stop;
    std::optional<std::uint64_t> count;
    bool log = false;

    bool any() const { return start || stop || count || log; }
};

void add_common(CLI::App* sub, Common& c, bool scenario_flag, bool frequency_flags)
{
    if (scenario_flag)
        sub->add_option("--scenario", c.scenario, "Scenario file");
    sub->add_option("--set", c.sets, "Override a scenario key, key=value (repeatable)");
    sub->add_option("--out", c.out, "Output directory");
    if (frequency_flags)
    {
        auto* f = sub->add_option("--freq", c.freq, "Carrier frequency [Hz]");
        auto* l = sub->add_option("--lambda", c.lambda, "Wavelength [m]");
        f->excludes(l);
    }
}

void add_range_flags(CLI::App* sub, RangeFlags& r)
{
    sub->add_option("--range-start", r.start, "First range sample [m]");
    sub->add_option("--range-stop", r.stop, "Last range sample [m]");
    sub->add_option("--n-ranges", r.count, "Number of range samples");
    sub->add_flag("--log-spacing", r.log, "Space range samples logarithmically");
}

void apply_range_flags(ConfigDocument& doc, Overrides& o, const RangeFlags& r)
{
    if (!r.any())
        return;
    doc.erase_prefix("analysis.ranges");
    o.number("analysis.range_start", r.start);
    o.number("analysis.range_stop", r.stop);
    o.integer("analysis.n_ranges", r.count);
    if (r.log)
        o.text("analysis.range_spacing", "log");
}

ConfigDocument load_document(const std::string& path)
{
    if (path.empty())
        return ConfigDocument::parse("version = 1\n");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open scenario file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return ConfigDocument::parse(buf.str());
}

std::string current_kind(const ConfigDocument& doc)
{
    const ConfigValue* v = doc.find("analysis.kind");
    if (!v)
        return {};
    const auto* s = std::get_if<std::string>(&v->data);
    return s ? *s : std::string{};
}

// Replaces the analysis block unless it already has the requested kind.
void force_kind(ConfigDocument& doc, const std::string& kind)
{
    const std::string cur = current_kind(doc);
    if (cur == kind)
        return;
    // The two sweep kinds share one key set; anything else starts from scratch.
    const auto sweep = [](const std::string& k) { return k == "svd_sweep" || k == "dof_sweep"; };
    if (!(sweep(cur) && sweep(kind)))
        doc.erase_prefix("analysis.");
    doc.set("analysis.kind", quote_string(kind));
}

void apply_frequency(const Common& c, Overrides& o)
{
    if (c.freq)
        o.number("frequency_hz", *c.freq);
    if (c.lambda)
    {
        if (!(*c.lambda > 0.0))
            throw ConfigError(ErrorCode::ValidationError, "lambda", 0, "lambda: must be > 0");
        o.number("frequency_hz", kSpeedOfLight / *c.lambda);
    }
}

void print_report(std::ostream& out, const RunReport& r)
{
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << r.scenario_hash;
    out << "ok analysis=" << r.analysis << " scenario_hash=" << hash.str();
    out << std::setprecision(10);
    for (const auto& [k, v] : r.scalars)
        out << ' ' << k << '=' << v;
    out << '\n';
    for (const auto& p : r.outputs)
        out << "wrote " << p.string() << '\n';
}

int report_error(std::ostream& err, const char* kind, const std::string& field, std::size_t line,
                 const std::string& msg)
{
    err << "error kind=" << kind;
    if (!field.empty())
        err << " field=" << field;
    if (line > 0)
        err << " line=" << line;
    err << " msg=\"" << escape(msg) << "\"\n";
    return 0;
}

bool is_config_code(ErrorCode c)
{
    return c == ErrorCode::ParseError || c == ErrorCode::ValidationError;
}

} // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"nearlink: near-field LoS MIMO and distributed-array analysis"};
    app.name("nearlink");
    app.require_subcommand(1);

    Common common;

    // run / validate
    std::string positional;
    auto* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("scenario", positional, "Scenario file")->required();
    run->add_option("--set", common.sets, "Override a scenario key, key=value (repeatable)");
    run->add_option("--out", common.out, "Output directory");

    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a scenario; writes nothing");
    validate_cmd->add_option("scenario", positional, "Scenario file")->required();
    validate_cmd->add_option("--set", common.sets, "Override a scenario key, key=value (repeatable)");

    // boundaries
    std::optional<double> dtx, drx, tau;
    auto* boundaries = app.add_subcommand("boundaries", "LoS MIMO range boundaries r_min / r_max");
    add_common(boundaries, common, true, true);
    boundaries->add_option("--dtx", dtx, "Transmit aperture [m]");
    boundaries->add_option("--drx", drx, "Receive aperture [m]");
    boundaries->add_option("--tau", tau, "Feasibility threshold in (0, 1)");

    // svd-sweep / dof-sweep
    RangeFlags ranges;
    std::string model;
    auto* svd = app.add_subcommand("svd-sweep", "Singular values of the channel vs range");
    auto* dof = app.add_subcommand("dof-sweep", "Degrees of freedom vs range");
    for (auto* sub : {svd, dof})
    {
        add_common(sub, common, true, true);
        add_range_flags(sub, ranges);
        sub->add_option("--tau", tau, "Feasibility threshold in (0, 1)");
        sub->add_option("--model", model, "Channel model")
            ->check(CLI::IsMember({"phase_only", "full_amplitude"}));
    }

    // beam-pattern
    std::string mode, focus;
    std::optional<double> theta_span;
    std::optional<std::uint64_t> n_theta;
    auto* beam = app.add_subcommand("beam-pattern", "Delay-and-sum gain pattern sweep");
    add_common(beam, common, true, true);
    add_range_flags(beam, ranges);
    beam->add_option("--mode", mode, "Sweep axis")->check(CLI::IsMember({"theta", "range", "2d"}));
    beam->add_option("--focus", focus, "Focusing mode")->check(CLI::IsMember({"point", "direction"}));
    beam->add_option("--theta-span", theta_span, "Half-width of the theta sweep [rad]");
    beam->add_option("--n-theta", n_theta, "Number of theta samples");

    // optimize-placement
    std::optional<double> ax, ay, min_spacing, steer_theta, exclusion;
    std::optional<std::uint64_t> n_panels, seed, candidates, n_scan;
    auto* opt = app.add_subcommand("optimize-placement", "Random search for low-sidelobe panel placement");
    add_common(opt, common, true, true);
    opt->add_option("--aperture-x", ax, "Aperture along x [m]");
    opt->add_option("--aperture-y", ay, "Aperture along y [m]");
    opt->add_option("--n-panels", n_panels, "Number of panels");
    opt->add_option("--min-spacing", min_spacing, "Minimum center spacing [m]");
    opt->add_option("--seed", seed, "Base seed");
    opt->add_option("--candidates", candidates, "Number of random candidates");
    opt->add_option("--steer-theta", steer_theta, "Steering angle [rad]");
    opt->add_option("--n-scan", n_scan, "Sidelobe scan samples");
    opt->add_option("--exclusion", exclusion, "Main-lobe exclusion half-width [rad]");

    // dish-gain
    std::optional<double> diameter, efficiency;
    auto* dish = app.add_subcommand("dish-gain", "Parabolic dish reference gain");
    add_common(dish, common, true, true);
    dish->add_option("--diameter", diameter, "Dish diameter [m]");
    dish->add_option("--efficiency", efficiency, "Aperture efficiency in (0, 1]");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e, out, err);
    }
    catch (const CLI::CallForAllHelp& e)
    {
        return app.exit(e, out, err);
    }
    catch (const CLI::ParseError& e)
    {
        err << app.help();
        report_error(err, "usage", "", 0, e.what());
        return kExitUsage;
    }

    try
    {
        if (run->parsed() || validate_cmd->parsed())
        {
            const Scenario s = load_scenario_file(positional, common.sets);
            if (validate_cmd->parsed())
            {
                std::ostringstream hash;
                hash << std::hex << std::setw(16) << std::setfill('0') << scenario_hash(s);
                out << "ok analysis=" << analysis_kind(s.analysis) << " scenario_hash=" << hash.str()
                    << '\n';
                return kExitOk;
            }
            RunOptions options;
            if (!common.out.empty())
                options.output_dir = common.out;
            print_report(out, run_scenario(s, options));
            return kExitOk;
        }

        ConfigDocument doc = load_document(common.scenario);
        Overrides o;
        apply_frequency(common, o);

        if (boundaries->parsed())
        {
            force_kind(doc, "boundaries");
            o.number("analysis.d_tx", dtx);
            o.number("analysis.d_rx", drx);
            o.number("analysis.tau", tau);
        }
        else if (svd->parsed() || dof->parsed())
        {
            force_kind(doc, svd->parsed() ? "svd_sweep" : "dof_sweep");
            apply_range_flags(doc, o, ranges);
            o.number("analysis.tau", tau);
            o.text("analysis.model", model);
        }
        else if (beam->parsed())
        {
            std::string kind = current_kind(doc);
            if (!mode.empty())
                kind = mode == "theta" ? "beam_theta" : mode == "range" ? "beam_range" : "beam_2d";
            else if (kind != "beam_theta" && kind != "beam_range" && kind != "beam_2d")
                kind = "beam_theta";
            force_kind(doc, kind);
            apply_range_flags(doc, o, ranges);
            o.text("analysis.focus", focus);
            o.number("analysis.theta_span", theta_span);
            o.integer("analysis.n_theta", n_theta);
        }
        else if (opt->parsed())
        {
            force_kind(doc, "optimize_placement");
            o.number("analysis.aperture_x", ax);
            o.number("analysis.aperture_y", ay);
            o.integer("analysis.n_panels", n_panels);
            o.number("analysis.min_spacing", min_spacing);
            o.integer("analysis.seed", seed);
            o.integer("analysis.n_candidates", candidates);
            o.number("analysis.steer_theta", steer_theta);
            o.integer("analysis.n_scan", n_scan);
            o.number("analysis.exclusion_halfwidth", exclusion);
        }
        else if (dish->parsed())
        {
            force_kind(doc, "dish_gain");
            o.number("analysis.diameter", diameter);
            o.number("analysis.efficiency", efficiency);
        }

        apply_overrides(doc, o.items());
        apply_overrides(doc, common.sets);
        const Scenario s = scenario_from_document(doc);

        RunOptions options;
        if (!common.out.empty())
            options.output_dir = common.out;
        // Flag-only invocations print results without touching the disk.
        options.write_outputs = !common.out.empty() || !common.scenario.empty();
        print_report(out, run_scenario(s, options));
        return kExitOk;
    }
    catch (const ConfigError& e)
    {
        report_error(err, std::string(to_string(e.code())).c_str(), e.field(), e.line(), e.what());
        return kExitValidation;
    }
    catch (const Error& e)
    {
        report_error(err, std::string(to_string(e.code())).c_str(), "", 0, e.what());
        return is_config_code(e.code()) ? kExitValidation : kExitRuntime;
    }
    catch (const std::exception& e)
    {
        report_error(err, "Internal", "", 0, e.what());
        return kExitRuntime;
    }
}

} // namespace nearlink::cli
