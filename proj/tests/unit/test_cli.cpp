// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "nearlink_cli/cli.hpp"

namespace fs = std::filesystem;
using namespace nearlink::cli;

namespace
{
struct Result
{
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "nearlink");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string scenario(const std::string& name)
{
    return (fs::path(NEARLINK_SCENARIO_DIR) / name).string();
}

double scalar(const std::string& out, const std::string& key)
{
    const auto at = out.find(" " + key + "=");
    REQUIRE(at != std::string::npos);
    return std::stod(out.substr(at + key.size() + 2));
}

std::size_t count_lines(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}
} // namespace

TEST_SUITE("cli")
{
TEST_CASE("boundaries from flags")
{
    const auto r = run({"boundaries", "--dtx", "0.2", "--drx", "0.2", "--lambda", "0.01", "--tau", "0.1"});
    CHECK(r.code == kExitOk);
    CHECK(scalar(r.out, "r_min") == doctest::Approx(4.27).epsilon(1e-3));
    CHECK(scalar(r.out, "r_max") == doctest::Approx(63.0).epsilon(2e-3));
    CHECK(r.out.find("wrote") == std::string::npos);
}

TEST_CASE("validate is a dry run")
{
    const auto before = fs::exists("out/dof_vs_range");
    const auto r = run({"validate", scenario("dof_vs_range.scenario")});
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind("ok analysis=dof_sweep", 0) == 0);
    CHECK(fs::exists("out/dof_vs_range") == before);
}

TEST_CASE("usage errors exit 2 with usage text")
{
    auto r = run({"frobnicate"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(r.err.find("error kind=usage") != std::string::npos);
    r = run({});
    CHECK(r.code == kExitUsage);
    r = run({"boundaries", "--dtx", "abc"});
    CHECK(r.code == kExitUsage);
    r = run({"dish-gain", "--freq", "28e9", "--lambda", "0.01"});
    CHECK(r.code == kExitUsage);
}

TEST_CASE("validation errors exit 3 with one machine-readable line")
{
    auto r = run({"dish-gain", "--diameter", "1.47", "--efficiency", "0.48", "--freq", "-1"});
    CHECK(r.code == kExitValidation);
    CHECK(count_lines(r.err) == 1);
    CHECK(r.err.rfind("error kind=ValidationError field=frequency_hz", 0) == 0);
    r = run({"validate", scenario("dof_vs_range.scenario"), "--set", "analysis.tpyo=1"});
    CHECK(r.code == kExitValidation);
    CHECK(r.err.find("field=analysis.tpyo") != std::string::npos);
    r = run({"boundaries", "--dtx", "0.2", "--lambda", "0.01"});
    CHECK(r.code == kExitValidation);
}

TEST_CASE("runtime errors exit 1")
{
    const auto r = run({"run", "/nonexistent/file.scenario"});
    CHECK(r.code == kExitRuntime);
    CHECK(r.err.rfind("error kind=IoError", 0) == 0);
}

TEST_CASE("dish gain from flags and overrides on a scenario")
{
    auto r = run({"dish-gain", "--diameter", "1.85", "--efficiency", "0.62", "--freq", "28e9"});
    CHECK(r.code == kExitOk);
    CHECK(scalar(r.out, "gain_dbi") == doctest::Approx(52.6).epsilon(2e-3));

    const fs::path out = fs::temp_directory_path() / "nearlink_cli_dish";
    fs::remove_all(out);
    r = run({"run", scenario("dish_1p47m.scenario"), "--set", "analysis.diameter=1.85", "--set",
             "analysis.efficiency=0.62", "--out", out.string()});
    CHECK(r.code == kExitOk);
    CHECK(scalar(r.out, "gain_dbi") == doctest::Approx(52.6).epsilon(2e-3));
    CHECK(fs::exists(out / "dish_gain.json"));
    CHECK(fs::exists(out / "report.json"));
}

TEST_CASE("sweep subcommands honour range flags and switch analysis kinds")
{
    const fs::path out = fs::temp_directory_path() / "nearlink_cli_sweep";
    fs::remove_all(out);
    auto r = run({"svd-sweep", "--scenario", scenario("pair_sweep_tx02_rx02.scenario"), "--range-start", "10",
                  "--range-stop", "20", "--n-ranges", "11", "--out", out.string()});
    CHECK(r.code == kExitOk);
    CHECK(fs::exists(out / "spectrum.csv"));

    r = run({"dof-sweep", "--scenario", scenario("pair_sweep_tx02_rx02.scenario"), "--n-ranges", "5",
             "--tau", "0.2", "--out", out.string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind("ok analysis=dof_sweep", 0) == 0);

    // A beam pattern over a scenario whose analysis block is something else.
    r = run({"beam-pattern", "--scenario", scenario("pair_sweep_tx02_rx02.scenario"), "--mode", "theta",
             "--theta-span", "0.1", "--n-theta", "11", "--out", out.string()});
    CHECK(r.code == kExitOk);
    CHECK(fs::exists(out / "gain_theta.csv"));

    r = run({"boundaries", "--scenario", scenario("pair_sweep_tx05_rx05.scenario"), "--out", out.string()});
    CHECK(r.code == kExitOk);
    CHECK(scalar(r.out, "d_tx") == doctest::Approx(0.5));
}

TEST_CASE("optimize-placement from flags")
{
    const auto r = run({"optimize-placement", "--aperture-x", "200", "--aperture-y", "100",
                        "--n-panels", "8", "--min-spacing", "5", "--seed", "3", "--candidates",
                        "4", "--n-scan", "20001", "--freq", "28e9"});
    CHECK(r.code == kExitOk);
    CHECK(scalar(r.out, "peak_sidelobe_db") <= 0.0);
}
}
