// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "nearlink/constants.hpp"
#include "nearlink/error.hpp"
#include "nearlink/mimo.hpp"
#include "oracles.hpp"

using namespace nearlink;

namespace
{
ComplexMatrix unit_2x2(double t0, double t1, double t2, double t3)
{
    return ComplexMatrix(2, 2, {std::polar(1.0, -t0), std::polar(1.0, -t1), std::polar(1.0, -t2),
                                std::polar(1.0, -t3)});
}

SingularSpectrum spectrum(std::vector<double> v) { return {std::move(v), v.size(), v.size()}; }

ElementLayout pair_x(double d, double z) { return make_upa({1, 2, d, 0.0}, {0, 0, z}); }

double exact_ratio(double d_tx, double d_rx, double lam, double r)
{
    return condition_ratio(singular_values(
        channel_matrix(pair_x(d_tx, 0), pair_x(d_rx, r), lam, ChannelModel::PhaseOnly)));
}
} // namespace

TEST_SUITE("mimo")
{
TEST_CASE("closed-form 2x2 examples")
{
    auto s = svd_closed_form_2x2(0, 0, 0, 0);
    CHECK(s.sigma_max == doctest::Approx(2.0));
    CHECK(s.sigma_min == doctest::Approx(0.0));

    s = svd_closed_form_2x2(kPi, 0, 0, 0);
    CHECK(s.sigma_max == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(s.sigma_min == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    s = svd_closed_form_2x2(kPi / 2, 0, 0, 0);
    CHECK(s.sigma_max == doctest::Approx(1.8478).epsilon(1e-4));
    CHECK(s.sigma_min == doctest::Approx(0.7654).epsilon(1e-4));
    CHECK(s.sigma_min / s.sigma_max == doctest::Approx(0.4142).epsilon(1e-4));
    const auto o = oracle::singular_values(unit_2x2(kPi / 2, 0, 0, 0));
    CHECK(s.sigma_max == doctest::Approx(o[0]).epsilon(1e-14));
    CHECK(s.sigma_min == doctest::Approx(o[1]).epsilon(1e-14));
}

TEST_CASE("theory ratio")
{
    CHECK(theory_ratio(kPi) == doctest::Approx(1.0));
    CHECK(theory_ratio(0.0) == 0.0);
    CHECK(theory_ratio(kPi / 2) == doctest::Approx(std::tan(kPi / 8)).epsilon(1e-15));
    CHECK(theory_ratio(3 * kPi) == doctest::Approx(1.0));
    CHECK(theory_ratio(2 * kPi) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("Gram singular values of small fixed matrices")
{
    auto s = singular_values(ComplexMatrix(2, 2, {1.0, 1.0, 1.0, -1.0}));
    CHECK(s.values[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(s.values[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(condition_ratio(s) == doctest::Approx(1.0));

    s = singular_values(ComplexMatrix(2, 2, Complex(1.0)));
    CHECK(s.values[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(std::abs(s.values[1]) < 1e-15);
    CHECK(condition_ratio(s) == doctest::Approx(0.0));

    s = singular_values(ComplexMatrix(1, 3, {Complex(3, 0), Complex(0, 4), 0.0}));
    REQUIRE(s.values.size() == 1);
    CHECK(s.values[0] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(s.rows == 1);
    CHECK(s.cols == 3);
}

TEST_CASE("tall and wide matrices agree with the Eigen oracle")
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    for (auto [r, c] : {std::pair<std::size_t, std::size_t>{3, 7}, {7, 3}, {5, 5}, {1, 1}, {8, 200}})
    {
        ComplexMatrix m(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                m(i, j) = {g(rng), g(rng)};
        const auto s = singular_values(m);
        const auto o = oracle::singular_values(m);
        REQUIRE(s.values.size() == o.size());
        for (std::size_t k = 0; k < o.size(); ++k)
            CHECK(s.values[k] == doctest::Approx(o[k]).epsilon(1e-12));
        CHECK(std::is_sorted(s.values.rbegin(), s.values.rend()));
    }
}

TEST_CASE("4x16384 satellite channel matches the oracle to 1e-9 relative")
{
    const double lam = kSpeedOfLight / 28e9;
    const auto ground = make_distributed_panels({32, 32, lam / 2, 6.0},
                                                random_panel_positions(1414, 1000, 16, 20, 2));
    const std::vector<Vec3> corners{{-0.707, -0.5, 0}, {0.707, -0.5, 0}, {-0.707, 0.5, 0}, {0.707, 0.5, 0}};
    const auto sat = make_distributed_panels({1, 1, lam / 2, 0.0}, corners).translated({0, 0, 4e5});
    const auto h = channel_matrix(ground, sat, lam, ChannelModel::PhaseOnly);
    const auto s = singular_values(h);
    // Oracle: eigenvalues of H H^H from an independent solver.
    const auto o = oracle::gram_singular_values(h.entries);
    REQUIRE(s.values.size() == 4);
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(std::abs(s.values[k] - o[k]) <= 1e-9 * o[0]);
}

TEST_CASE("hermitian Jacobi eigen-decomposition")
{
    ComplexMatrix a(3, 3);
    a(0, 0) = 2;
    a(1, 1) = 3;
    a(2, 2) = 5;
    a(0, 1) = Complex(1, 1);
    a(1, 0) = Complex(1, -1);
    a(1, 2) = Complex(0, 2);
    a(2, 1) = Complex(0, -2);
    const auto e = hermitian_eigen_jacobi(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(oracle::to_eigen(a));
    auto vals = e.values;
    std::sort(vals.begin(), vals.end());
    for (int i = 0; i < 3; ++i)
        CHECK(vals[i] == doctest::Approx(es.eigenvalues()[i]).epsilon(1e-13));
    // A v = lambda v for every column.
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < 3; ++i)
        {
            Complex av = 0;
            for (std::size_t j = 0; j < 3; ++j)
                av += a(i, j) * e.vectors(j, k);
            CHECK(std::abs(av - e.values[k] * e.vectors(i, k)) < 1e-12);
        }
    CHECK_THROWS_AS(hermitian_eigen_jacobi(ComplexMatrix(2, 3)), Error);
}

TEST_CASE("Jacobi sweep cap raises ConvergenceFailure")
{
    ComplexMatrix a(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            a(i, j) = i == j ? Complex(double(i + 1)) : Complex(0.5, i < j ? 0.25 : -0.25);
    try
    {
        hermitian_eigen_jacobi(a, 0);
        FAIL("expected ConvergenceFailure");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::ConvergenceFailure);
    }
    CHECK(hermitian_eigen_jacobi(a).sweeps <= kJacobiMaxSweeps);
}

TEST_CASE("condition ratio and dof count")
{
    CHECK(condition_ratio(spectrum({std::sqrt(2.0), std::sqrt(2.0)})) == 1.0);
    CHECK(condition_ratio(spectrum({2.0, 0.0})) == 0.0);
    CHECK_THROWS_AS(condition_ratio(spectrum({0.0, 0.0})), Error);
    CHECK_THROWS_AS(dof_count(spectrum({0.0}), FeasibilityThreshold(0.1)), Error);
    CHECK(dof_count(spectrum({2.0, 0.5, 0.15, 0.01}), FeasibilityThreshold(0.1)) == 2);
    CHECK(dof_count(spectrum({3.0, 3.0, 3.0}), FeasibilityThreshold(0.1)) == 3);
    CHECK(dof_count(spectrum({1.0, 0.1}), FeasibilityThreshold(0.1)) == 2);
    CHECK(singular_ratio(spectrum({4.0, 1.0, 0.5}), 1) == 0.25);
    CHECK_THROWS_AS(FeasibilityThreshold(0.0), Error);
    CHECK_THROWS_AS(FeasibilityThreshold(1.0), Error);
}

TEST_CASE("r = 40 m case: ratio is tan(delta / 4)")
{
    const double delta = phase_spread_2x2(0.2, 0.2, 0.01, 40.0);
    CHECK(std::tan(delta / 4) == doctest::Approx(0.1584).epsilon(1e-3));
    CHECK(exact_ratio(0.2, 0.2, 0.01, 40.0) == doctest::Approx(std::tan(delta / 4)).epsilon(1e-3));
}

TEST_CASE("r_min and r_max formulas and limits")
{
    const FeasibilityThreshold tau(0.1);
    CHECK(r_min(0.2, 0.2, 0.01, tau) == doctest::Approx(4.27).epsilon(1e-3));
    CHECK(r_max(0.2, 0.2, 0.01, tau) == doctest::Approx(63.04).epsilon(1e-3));
    CHECK(r_min(2000, 1, 0.01, tau) == doctest::Approx(213.55e3).epsilon(1e-3));
    CHECK(r_max(2000, 1, 0.01, tau) == doctest::Approx(3152e3).epsilon(1e-3));
    const FeasibilityThreshold near_one(1.0 - 1e-12);
    CHECK(r_min(0.2, 0.2, 0.01, near_one) == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(r_max(0.2, 0.2, 0.01, near_one) == doctest::Approx(8.0).epsilon(1e-9));
    for (double t : {0.01, 0.1, 0.3, 0.5, 0.9, 0.99})
    {
        const FeasibilityThreshold ft(t);
        CHECK(r_min(0.3, 0.7, 0.02, ft) < r_max(0.3, 0.7, 0.02, ft));
        // linear in d_tx d_rx / lambda
        CHECK(r_min(0.6, 0.7, 0.01, ft) == doctest::Approx(4 * r_min(0.3, 0.7, 0.02, ft)).epsilon(1e-14));
        CHECK(r_max(0.6, 0.7, 0.01, ft) == doctest::Approx(4 * r_max(0.3, 0.7, 0.02, ft)).epsilon(1e-14));
    }
}

TEST_CASE("r_min and r_max match the first and last tau crossings of the exact ratio")
{
    const double lam = 0.01, d = 0.2, tau = 0.1;
    const double r2 = d * d / lam;
    // Region 2 up-crossing: ratio climbs through tau between r2 and 2 r2.
    double lo = r2, hi = 2 * r2;
    for (int it = 0; it < 60; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        (exact_ratio(d, d, lam, mid) < tau ? lo : hi) = mid;
    }
    CHECK(lo == doctest::Approx(r_min(d, d, lam, FeasibilityThreshold(tau))).epsilon(2e-3));
    lo = 2 * r2;
    hi = 1000 * r2;
    for (int it = 0; it < 60; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        (exact_ratio(d, d, lam, mid) > tau ? lo : hi) = mid;
    }
    CHECK(lo == doctest::Approx(r_max(d, d, lam, FeasibilityThreshold(tau))).epsilon(2e-3));
}

TEST_CASE("exact ratio is monotone inside regions 2 and 3")
{
    const double lam = 0.01, d = 0.2, b = d * d / lam;
    double prev = -1;
    for (int i = 0; i <= 200; ++i)
    {
        const double r = b + b * i / 200.0;
        const double cur = exact_ratio(d, d, lam, r);
        CHECK(cur >= prev - 1e-9);
        prev = cur;
    }
    prev = 2;
    for (int i = 0; i <= 400; ++i)
    {
        const double r = 2 * b * std::pow(100.0, i / 400.0);
        const double cur = exact_ratio(d, d, lam, r);
        CHECK(cur <= prev + 1e-9);
        prev = cur;
    }
}

TEST_CASE("mimo regions")
{
    const double b = 0.2 * 0.2 / 0.01;
    CHECK(mimo_region(0.5 * b, 0.2, 0.2, 0.01) == MimoRegion::Region1);
    CHECK(mimo_region(1.5 * b, 0.2, 0.2, 0.01) == MimoRegion::Region2);
    CHECK(mimo_region(3.0 * b, 0.2, 0.2, 0.01) == MimoRegion::Region3);
    CHECK(std::string(to_string(MimoRegion::Region2)) == "region2");
}

TEST_CASE("theory ratio curve")
{
    const std::vector<double> rs{8.0, 1e9};
    const auto c = theory_ratio_curve(0.2, 0.2, 0.01, rs);
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(c[1] < 1e-7);
    // argmax inside region 2 sits at r = 8 m
    std::vector<double> grid;
    for (int i = 0; i <= 4000; ++i)
        grid.push_back(4.0 + 4.0 * i / 4000.0);
    const auto curve = theory_ratio_curve(0.2, 0.2, 0.01, grid);
    const auto it = std::max_element(curve.begin(), curve.end());
    CHECK(grid[it - curve.begin()] == doctest::Approx(8.0).epsilon(1e-3));
}

TEST_CASE("spectrum CSV")
{
    std::vector<SpectrumSample> samples{{10.0, spectrum({2.0, 0.5})}, {20.0, spectrum({2.0, 0.1})}};
    std::ostringstream os;
    write_spectrum_csv(os, samples, FeasibilityThreshold(0.1));
    CHECK(os.str() == "r_meters,sigma_0,sigma_1,ratio,dof\n10,2,0.5,0.25,2\n20,2,0.10000000000000001,0.050000000000000003,1\n");
}
}
