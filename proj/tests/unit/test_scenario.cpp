// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "nearlink/constants.hpp"
#include "nearlink/error.hpp"
#include "nearlink/output.hpp"
#include "nearlink/scenario.hpp"

using namespace nearlink;
namespace fs = std::filesystem;

namespace
{
const std::string kMinimal = R"(version = 1
frequency_hz = 28e9

[ground]
kind = "upa"
rows = 1
cols = 1
spacing = 0.005

[analysis]
kind = "dish_gain"
diameter = 1.47
efficiency = 0.48
)";

fs::path scenario_file(const std::string& name) { return fs::path(NEARLINK_SCENARIO_DIR) / name; }

fs::path scratch_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("nearlink_test_" + name);
    fs::remove_all(p);
    return p;
}

ConfigError config_error(const std::string& text)
{
    try
    {
        parse_scenario(text);
    }
    catch (const ConfigError& e)
    {
        return e;
    }
    FAIL("expected ConfigError");
    return ConfigError(ErrorCode::IoError, "", 0, "");
}

std::string replace(std::string s, const std::string& from, const std::string& to)
{
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// CSV body with `#` metadata lines dropped.
std::string csv_body(const fs::path& p)
{
    std::istringstream in(read_file(p));
    std::string line, out;
    while (std::getline(in, line))
        if (line.empty() || line[0] != '#')
            out += line + "\n";
    return out;
}

//---------------------------------------------------------------------------//
// Random scenario generator for the round-trip property.
struct Gen
{
    std::mt19937_64 rng;
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    std::size_t count(std::size_t lo, std::size_t hi)
    {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    }
    bool coin() { return count(0, 1) == 1; }

    RangeAxis axis()
    {
        RangeAxis a;
        if (coin())
        {
            double r = real(1, 100);
            for (std::size_t i = 0, n = count(1, 6); i < n; ++i)
                a.explicit_values.push_back(r += real(0.1, 1000));
        }
        else
        {
            a.start = real(1, 1e3);
            a.stop = a.start + real(0, 1e6);
            a.count = count(1, 500);
            a.log_spacing = coin();
        }
        return a;
    }

    LayoutSpec layout()
    {
        LayoutSpec l;
        l.panel = {count(1, 4), count(1, 4), real(0.001, 0.01), real(-3, 10)};
        const int kind = static_cast<int>(count(0, 2));
        if (kind == 0)
            l.arrangement = UpaLayoutSpec{{real(-5, 5), real(-5, 5), 0.0}};
        else if (kind == 1)
        {
            std::vector<Vec3> centers;
            for (std::size_t i = 0, n = count(1, 4); i < n; ++i)
                centers.push_back({100.0 * i + real(0, 1), real(-1, 1), 0});
            l.arrangement = DistributedLayoutSpec{centers};
        }
        else
            l.arrangement = DistributedLayoutSpec{
                RandomPlacementSpec{real(100, 1000), real(0, 1000), count(1, 8), real(1, 10), rng()}};
        return l;
    }

    Scenario scenario()
    {
        Scenario s;
        s.frequency_hz = real(1e9, 1e11);
        s.output = coin() ? "out" : "runs/\"quoted\" dir";
        s.ground = layout();
        SatelliteSpec sat;
        sat.layout = layout();
        sat.range_m = real(1e3, 1e7);
        sat.off_nadir_rad = real(-1.2, 1.2);
        sat.azimuth_rad = real(-3, 3);
        s.satellite = sat;
        const auto model = coin() ? ChannelModel::PhaseOnly : ChannelModel::FullAmplitude;
        const auto focus = coin() ? FocusMode::Point : FocusMode::Direction;
        switch (count(0, 7))
        {
        case 0:
        {
            BoundariesAnalysis b;
            if (coin())
                b.d_tx = real(0.1, 10);
            if (coin())
                b.d_rx = real(0.1, 10);
            b.tau = real(0.01, 0.99);
            s.analysis = b;
            break;
        }
        case 1: s.analysis = SvdSweepAnalysis{axis(), model, real(0.01, 0.99)}; break;
        case 2: s.analysis = DofSweepAnalysis{axis(), model, real(0.01, 0.99)}; break;
        case 3: s.analysis = BeamThetaAnalysis{real(0, 0.1), count(1, 3000), focus}; break;
        case 4: s.analysis = BeamRangeAnalysis{axis(), focus}; break;
        case 5: s.analysis = Beam2dAnalysis{real(0, 0.1), count(1, 300), axis(), focus}; break;
        case 6:
        {
            OptimizePlacementAnalysis o;
            o.search = {real(100, 2000), real(0, 1000), count(2, 20), real(1, 5), rng()};
            o.n_candidates = count(1, 1000);
            o.steer_theta = real(-0.5, 0.5);
            o.steer_phi = real(-3, 3);
            o.n_scan = count(100, 2000000);
            if (coin())
                o.exclusion_halfwidth = real(1e-6, 1e-3);
            s.analysis = o;
            break;
        }
        default: s.analysis = DishGainAnalysis{real(0.1, 5), real(0.1, 1.0)}; break;
        }
        return s;
    }
};
} // namespace

TEST_SUITE("scenario")
{
TEST_CASE("minimal dish scenario parses")
{
    const Scenario s = parse_scenario(kMinimal);
    CHECK(s.version == 1);
    CHECK(s.frequency_hz == 28e9);
    CHECK(s.ground.has_value());
    CHECK_FALSE(s.satellite.has_value());
    const auto& a = std::get<DishGainAnalysis>(s.analysis);
    CHECK(a.diameter == 1.47);
    CHECK(a.efficiency == 0.48);
    CHECK(std::string(analysis_kind(s.analysis)) == "dish_gain");
}

TEST_CASE("negative frequency names the field")
{
    const auto e = config_error(replace(kMinimal, "28e9", "-28e9"));
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(e.field().find("frequency") != std::string::npos);
}

TEST_CASE("unknown keys are rejected with their line")
{
    const auto e = config_error(replace(kMinimal, "spacing = 0.005", "spacing = 0.005\nspcaing = 1"));
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(e.field() == "ground.spcaing");
    CHECK(e.line() == 9);
}

TEST_CASE("version and required keys")
{
    CHECK(config_error(replace(kMinimal, "version = 1", "version = 2")).field() == "version");
    CHECK(config_error(replace(kMinimal, "version = 1\n", "")).field() == "version");
    CHECK(config_error(replace(kMinimal, "diameter = 1.47\n", "")).field() == "analysis.diameter");
    CHECK(config_error(replace(kMinimal, "kind = \"dish_gain\"", "kind = \"dish\"")).field()
          == "analysis.kind");
    CHECK(config_error(replace(kMinimal, "efficiency = 0.48", "efficiency = 1.5")).field()
          == "analysis.efficiency");
    CHECK(config_error(replace(kMinimal, "rows = 1", "rows = \"one\"")).field() == "ground.rows");
    CHECK(config_error(replace(kMinimal, "rows = 1", "rows = 1.5")).field() == "ground.rows");
    CHECK(config_error(replace(kMinimal, "spacing = 0.005", "spacing = 0.005\nspacing_wavelengths = 0.5"))
              .field()
          == "ground.spacing");
}

TEST_CASE("random placement needs an explicit seed")
{
    const std::string text = R"(version = 1
frequency_hz = 28e9
[ground]
kind = "distributed"
placement = "random"
rows = 2
cols = 2
spacing_wavelengths = 0.5
aperture_x = 100
aperture_y = 100
n_panels = 4
min_spacing = 5
[analysis]
kind = "dish_gain"
diameter = 1
efficiency = 0.5
)";
    const auto e = config_error(text);
    CHECK(e.field() == "ground.seed");
    CHECK_NOTHROW(parse_scenario(replace(text, "min_spacing = 5\n", "min_spacing = 5\nseed = 3\n")));
}

TEST_CASE("analyses check the blocks they need")
{
    const std::string text = replace(kMinimal, "kind = \"dish_gain\"\ndiameter = 1.47\nefficiency = 0.48\n",
                                     "kind = \"svd_sweep\"\nranges = [10, 20]\n");
    CHECK(config_error(text).field() == "satellite");
    const std::string bad_tau =
        replace(kMinimal, "kind = \"dish_gain\"\ndiameter = 1.47\nefficiency = 0.48\n",
                "kind = \"boundaries\"\nd_tx = 1\nd_rx = 1\ntau = 1.5\n");
    CHECK(config_error(bad_tau).field() == "analysis.tau");
}

TEST_CASE("overlapping explicit panels surface as a validation error on the layout")
{
    const std::string text = replace(kMinimal, "kind = \"upa\"\nrows = 1\ncols = 1\n",
                                     "kind = \"distributed\"\nplacement = \"explicit\"\ncenters = [[0,0,0],[0.001,0,0]]\nrows = 2\ncols = 2\n");
    const auto e = config_error(text);
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(e.field() == "ground");
}

TEST_CASE("shipped dof_vs_range scenario has the 16-panel / 4-corner geometry")
{
    const Scenario s = load_scenario_file(scenario_file("dof_vs_range.scenario"));
    const auto ground = s.ground->build();
    CHECK(ground.size() == 16384);
    CHECK(ground.panel_count() == 16);
    CHECK(ground.panel_spec().rows == 32);
    const auto& rnd = std::get<RandomPlacementSpec>(
        std::get<DistributedLayoutSpec>(s.ground->arrangement).placement);
    CHECK(rnd.aperture_x == 1414);
    CHECK(rnd.aperture_y == 1000);
    const auto sat = s.satellite->build_at(1e6);
    CHECK(sat.size() == 4);
    CHECK(aperture_extent(sat) == doctest::Approx(std::hypot(1.414, 1.0)));
    const auto& a = std::get<DofSweepAnalysis>(s.analysis);
    CHECK(a.ranges.values().back() == 3000e3);
    CHECK(a.tau == 0.1);
}

TEST_CASE("every shipped scenario validates and round trips")
{
    int n = 0;
    for (const auto& entry : fs::directory_iterator(NEARLINK_SCENARIO_DIR))
    {
        if (entry.path().extension() != ".scenario")
            continue;
        CAPTURE(entry.path().string());
        const Scenario s = load_scenario_file(entry.path());
        CHECK(parse_scenario(serialize(s)) == s);
        ++n;
    }
    CHECK(n >= 10);
}

TEST_CASE("overrides replace scenario keys")
{
    const Scenario s = load_scenario_file(scenario_file("dish_1p47m.scenario"),
                                          {"analysis.diameter=1.85", "analysis.efficiency = 0.62"});
    CHECK(std::get<DishGainAnalysis>(s.analysis).diameter == 1.85);
    CHECK(std::get<DishGainAnalysis>(s.analysis).efficiency == 0.62);
    CHECK_THROWS_AS(load_scenario_file(scenario_file("dish_1p47m.scenario"), {"nonsense"}), ConfigError);
    CHECK_THROWS_AS(load_scenario_file(scenario_file("dish_1p47m.scenario"), {"analysis.bogus=1"}),
                    ConfigError);
    try
    {
        load_scenario_file("/nonexistent/x.scenario");
        FAIL("expected IoError");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::IoError);
    }
}

TEST_CASE("range axis sampling")
{
    RangeAxis lin{{}, 10, 100, 91, false};
    const auto v = lin.values();
    CHECK(v.size() == 91);
    CHECK(v[0] == 10);
    CHECK(v[1] == doctest::Approx(11));
    CHECK(v.back() == 100);
    RangeAxis lg{{}, 1e3, 1e6, 4, true};
    const auto w = lg.values();
    CHECK(w[1] == doctest::Approx(1e4));
    CHECK(w[2] == doctest::Approx(1e5));
    CHECK(w.back() == 1e6);
    CHECK(RangeAxis{{}, 5, 9, 1, false}.values() == std::vector<double>{5});
}

TEST_CASE("round trip: parse(serialize(s)) == s for random scenarios")
{
    Gen g{std::mt19937_64(2024)};
    for (int i = 0; i < 300; ++i)
    {
        const Scenario s = g.scenario();
        const std::string text = serialize(s);
        CAPTURE(text);
        Scenario back;
        try
        {
            back = parse_scenario(text);
        }
        catch (const ConfigError& e)
        {
            // Random layouts can be geometrically infeasible; those must fail
            // validation, never syntax.
            CHECK(e.code() == ErrorCode::ValidationError);
            continue;
        }
        CHECK(back == s);
        CHECK(scenario_hash(back) == scenario_hash(s));
    }
}

TEST_CASE("run: boundaries report r_max near 63 m")
{
    const auto dir = scratch_dir("boundaries");
    const auto report = run_scenario(load_scenario_file(scenario_file("boundaries_small_array.scenario")),
                                     {dir});
    CHECK(report.scalars.at("r_max") == doctest::Approx(63.0).epsilon(2e-3));
    CHECK(report.scalars.at("r_min") == doctest::Approx(4.27).epsilon(2e-3));
    REQUIRE(report.outputs.size() == 1);
    for (const auto& p : report.outputs)
        CHECK(fs::file_size(p) > 0);
    const auto j = nlohmann::json::parse(read_file(dir / "boundaries.json"));
    CHECK(j["r_max_m"].get<double>() == report.scalars.at("r_max"));
    CHECK(fs::exists(dir / "report.json"));
}

TEST_CASE("run: distributed beam_theta peak gain within 1-2 dB of the UPA")
{
    const auto dir = scratch_dir("beam_theta");
    Scenario s = load_scenario_file(scenario_file("beam_theta_dist.scenario"),
                                    {"analysis.n_theta=201"});
    const auto report = run_scenario(s, {dir});
    CHECK(report.scalars.at("peak_gain_dbi") >= 47.1);
    CHECK(report.scalars.at("peak_gain_dbi") <= 48.2);
    const std::string csv = read_file(dir / "gain_theta.csv");
    CHECK(csv.find("# scenario_hash=") != std::string::npos);
    CHECK(csv.find("# ground_seed=2") != std::string::npos);
}

TEST_CASE("run: dof_vs_range dof at 1800 km is two")
{
    const auto report = run_scenario(load_scenario_file(scenario_file("dof_vs_range.scenario"),
                                                        {"analysis.n_ranges=3"}),
                                     {scratch_dir("dof_vs_range")});
    CHECK(report.scalars.at("reference_range_m") == 1800e3);
    CHECK(report.scalars.at("dof_at_reference_range") == 2);
}

TEST_CASE("run: dry run writes nothing")
{
    const auto dir = scratch_dir("dry");
    RunOptions o;
    o.output_dir = dir;
    o.write_outputs = false;
    const auto report = run_scenario(parse_scenario(kMinimal), o);
    CHECK(report.outputs.empty());
    CHECK_FALSE(fs::exists(dir));
    CHECK(report.scalars.at("gain_dbi") == doctest::Approx(49.5085).epsilon(1e-5));
}

TEST_CASE("run: repeated runs produce byte-identical CSV bodies")
{
    for (const char* name : {"pair_sweep_tx02_rx05.scenario", "beam_range_dist.scenario"})
    {
        Scenario s = load_scenario_file(scenario_file(name), {"analysis.n_ranges=20"});
        const auto a = run_scenario(s, {scratch_dir("det_a")});
        const auto b = run_scenario(s, {scratch_dir("det_b")});
        REQUIRE(a.outputs.size() == b.outputs.size());
        for (std::size_t i = 0; i < a.outputs.size(); ++i)
        {
            CHECK(csv_body(a.outputs[i]) == csv_body(b.outputs[i]));
            CHECK(read_file(a.outputs[i]) == read_file(b.outputs[i]));
        }
    }
}

TEST_CASE("run: placement outputs")
{
    const auto dir = scratch_dir("placement");
    const auto report = run_scenario(load_scenario_file(scenario_file("placement_16_panels.scenario"),
                                                        {"analysis.n_candidates=5", "analysis.n_scan=20001"}),
                                     {dir});
    CHECK(fs::file_size(dir / "placement_layout.txt") > 0);
    const auto j = nlohmann::json::parse(read_file(dir / "placement_summary.json"));
    CHECK(j["peak_sidelobe_db"].get<double>() == report.scalars.at("peak_sidelobe_db"));
    std::ifstream in(dir / "placement_layout.txt");
    CHECK(read_layout(in).panel_count() == 16);
}

TEST_CASE("atomic writes replace files and report io errors")
{
    const auto dir = scratch_dir("atomic");
    atomic_write_file(dir / "a" / "b.txt", "one");
    atomic_write_file(dir / "a" / "b.txt", "two");
    CHECK(read_file(dir / "a" / "b.txt") == "two");
    CHECK_FALSE(fs::exists(dir / "a" / "b.txt.tmp"));
    try
    {
        atomic_write_file("/proc/nearlink/forbidden.txt", "x");
        FAIL("expected IoError");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::IoError);
    }
}
}
