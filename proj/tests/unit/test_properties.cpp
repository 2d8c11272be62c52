// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

// Randomized invariants spanning several modules.

#include <doctest.h>

#include <random>

#include "nearlink/beamforming.hpp"
#include "nearlink/constants.hpp"
#include "nearlink/mimo.hpp"
#include "nearlink/placement.hpp"
#include "oracles.hpp"

using namespace nearlink;

namespace
{
Complex det2(const ComplexMatrix& h) { return h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0); }

ComplexMatrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, bool unit)
{
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> ph(-kPi, kPi);
    ComplexMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            m(i, j) = unit ? std::polar(1.0, ph(rng)) : Complex(g(rng), g(rng));
    return m;
}
} // namespace

TEST_SUITE("properties")
{
TEST_CASE("closed form equals the Gram path for random unit-modulus 2x2")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ph(-10, 10);
    for (int i = 0; i < 2000; ++i)
    {
        const double t[4] = {ph(rng), ph(rng), ph(rng), ph(rng)};
        ComplexMatrix h(2, 2, {std::polar(1.0, -t[0]), std::polar(1.0, -t[1]), std::polar(1.0, -t[2]),
                               std::polar(1.0, -t[3])});
        const auto cf = svd_closed_form_2x2(t[0], t[1], t[2], t[3]);
        const auto s = singular_values(h);
        CHECK(std::abs(cf.sigma_max - s.values[0]) < 1e-10);
        CHECK(std::abs(cf.sigma_min - s.values[1]) < 1e-10);
        // Determinant identity.
        CHECK(std::abs(s.values[0] * s.values[1] - std::abs(det2(h))) < 1e-10);
        CHECK(std::abs(std::abs(det2(h)) - 2 * std::abs(std::sin(((t[0] + t[3]) - (t[1] + t[2])) / 2)))
              < 1e-10);
    }
}

TEST_CASE("Frobenius identity for random shapes")
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 200; ++i)
    {
        const std::size_t r = 1 + rng() % 6, c = 1 + rng() % 40;
        const auto h = random_matrix(r, c, rng, i % 2 == 0);
        const auto s = singular_values(h);
        double sum = 0;
        for (double v : s.values)
            sum += v * v;
        CHECK(sum == doctest::Approx(h.frobenius_sq()).epsilon(1e-9));
        CHECK(std::is_sorted(s.values.rbegin(), s.values.rend()));
        CHECK(s.values.size() == std::min(r, c));
        for (double v : s.values)
            CHECK(v >= 0.0);
    }
}

TEST_CASE("dof count is invariant under complex scaling")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.01, 100);
    for (int i = 0; i < 200; ++i)
    {
        const auto h = random_matrix(4, 12, rng, false);
        const Complex k = std::polar(u(rng), u(rng));
        const FeasibilityThreshold tau(0.3);
        CHECK(dof_count(singular_values(h), tau) == dof_count(singular_values(h.scaled(k)), tau));
    }
}

TEST_CASE("pattern product: total pattern is panel pattern times placement pattern")
{
    std::mt19937_64 rng(4);
    const double lam = 0.0107;
    for (int trial = 0; trial < 10; ++trial)
    {
        const PanelSpec spec{4, 8, lam / 2, 0};
        const auto centers = random_panel_positions(300, 200, 6, 2, rng());
        const auto total = make_distributed_panels(spec, centers);
        const auto panel = make_upa(spec, {});
        const Direction steer{0.05 * trial - 0.2, 0.3};
        const auto wt = delay_and_sum_weights(total, steer, lam);
        const auto wp = delay_and_sum_weights(panel, steer, lam);
        for (int k = 0; k < 30; ++k)
        {
            const Direction ev{steer.theta + 0.02 * (k - 15), 0.3};
            const double t = std::abs(array_factor(total, wt, ev, lam));
            const double p = std::abs(array_factor(panel, wp, ev, lam));
            const double q = std::abs(placement_factor(centers, steer, ev, lam));
            CHECK(std::abs(t - p * q) <= 1e-9 * std::max(1.0, p * q));
        }
    }
}

TEST_CASE("peak sidelobe ignores a global weight phase")
{
    // Re-expressed on the placement factor: rotating every term by one
    // phase leaves |AF| unchanged at each sample.
    const auto c = random_panel_positions(500, 300, 7, 5, 11);
    const Direction s{0.1, 0.0};
    for (int k = 0; k < 40; ++k)
    {
        const Direction e{-0.5 + 0.025 * k, 0.0};
        const Complex a = placement_factor(c, s, e, 0.0107);
        CHECK(std::abs(a * std::polar(1.0, 1.234)) == doctest::Approx(std::abs(a)).epsilon(1e-14));
    }
}
}
