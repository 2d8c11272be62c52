// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#include "nearlink/mimo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>

#include "nearlink/constants.hpp"
#include "nearlink/error.hpp"

namespace nearlink
{

FeasibilityThreshold::FeasibilityThreshold(double tau) : tau_(tau)
{
    if (!(tau > 0.0 && tau < 1.0))
        detail::throw_invalid("feasibility threshold tau must lie in (0, 1)");
}

//---------------------------------------------------------------------------//
SingularPair svd_closed_form_2x2(double t0, double t1, double t2, double t3)
{
    const double delta = (t0 + t3) - (t1 + t2);
    // |cos(D/2)| == cos(y) with y in [-pi/2, pi/2]
    const double y = std::remainder(0.5 * delta, kPi);
    return {2.0 * std::cos(0.5 * y), 2.0 * std::abs(std::sin(0.5 * y))};
}

double theory_ratio(double delta)
{
    const double y = std::remainder(0.5 * delta, kPi);
    return std::abs(std::tan(0.5 * y));
}

//---------------------------------------------------------------------------//
HermitianEigen hermitian_eigen_jacobi(const ComplexMatrix& input, std::size_t max_sweeps)
{
    const std::size_t n = input.rows();
    if (n == 0 || input.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "Jacobi eigen-solver needs a square matrix");
    for (const auto& v : input.data())
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            detail::throw_invalid("Jacobi eigen-solver input is not finite");

    ComplexMatrix a = input;
    ComplexMatrix v(n, n);
    for (std::size_t i = 0; i < n; ++i)
    {
        v(i, i) = 1.0;
        a(i, i) = a(i, i).real();
    }

    const double scale = a.frobenius_sq();
    auto off_diagonal = [&] {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off += std::norm(a(p, q));
        return off;
    };

    std::size_t sweep = 0;
    for (; sweep <= max_sweeps; ++sweep)
    {
        const double off = off_diagonal();
        if (off == 0.0 || off <= 1e-32 * scale)
            break;
        if (sweep == max_sweeps)
            throw Error(ErrorCode::ConvergenceFailure,
                        "Jacobi eigen-solver did not converge in "
                            + std::to_string(max_sweeps) + " sweeps");

        for (std::size_t p = 0; p < n; ++p)
        {
            for (std::size_t q = p + 1; q < n; ++q)
            {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0)
                    continue;
                // Rotate a real-symmetric problem obtained by phasing column q.
                const Complex unit = apq / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0)
                                 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const Complex uqp = -s * std::conj(unit);
                const Complex uqq = c * std::conj(unit);

                // A <- A U, V <- V U
                for (std::size_t k = 0; k < n; ++k)
                {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = c * akp + uqp * akq;
                    a(k, q) = s * akp + uqq * akq;
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = c * vkp + uqp * vkq;
                    v(k, q) = s * vkp + uqq * vkq;
                }
                // A <- U^H A
                for (std::size_t k = 0; k < n; ++k)
                {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = c * apk + std::conj(uqp) * aqk;
                    a(q, k) = s * apk + std::conj(uqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }

    HermitianEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.values[i] = a(i, i).real();
    out.vectors = std::move(v);
    out.sweeps = sweep;
    return out;
}

ComplexMatrix gram_matrix(const ComplexMatrix& h)
{
    const bool wide = h.rows() <= h.cols();
    const std::size_t n = wide ? h.rows() : h.cols();
    const std::size_t len = wide ? h.cols() : h.rows();
    auto at = [&](std::size_t i, std::size_t k) { return wide ? h(i, k) : h(k, i); };

    ComplexMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = i; j < n; ++j)
        {
            // wide: (H H^H)_ij = sum_k H_ik conj(H_jk)
            // tall: (H^H H)_ij = sum_k conj(H_ki) H_kj
            Complex sum = 0.0;
            for (std::size_t k = 0; k < len; ++k)
                sum += wide ? at(i, k) * std::conj(at(j, k)) : std::conj(at(i, k)) * at(j, k);
            g(i, j) = sum;
            g(j, i) = std::conj(sum);
        }
        g(i, i) = g(i, i).real();
    }
    return g;
}

SingularSpectrum singular_values(const ComplexMatrix& h)
{
    if (h.empty())
        detail::throw_invalid("singular_values of an empty matrix");

    const bool wide = h.rows() <= h.cols();
    const std::size_t n = wide ? h.rows() : h.cols();
    const std::size_t len = wide ? h.cols() : h.rows();
    const HermitianEigen eig = hermitian_eigen_jacobi(gram_matrix(h));

    SingularSpectrum out;
    out.rows = h.rows();
    out.cols = h.cols();
    out.values.resize(n);
    for (std::size_t e = 0; e < n; ++e)
    {
        // wide: ||H^H u||, tall: ||H v||
        double norm_sq = 0.0;
        for (std::size_t k = 0; k < len; ++k)
        {
            Complex acc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                acc += wide ? std::conj(h(i, k)) * eig.vectors(i, e) : h(k, i) * eig.vectors(i, e);
            norm_sq += std::norm(acc);
        }
        out.values[e] = std::sqrt(norm_sq);
    }
    std::sort(out.values.begin(), out.values.end(), std::greater<>());
    return out;
}

SingularSpectrum singular_values(const ChannelMatrix& h)
{
    return singular_values(h.entries);
}

double condition_ratio(const SingularSpectrum& s)
{
    if (s.values.empty())
        detail::throw_invalid("condition_ratio of an empty spectrum");
    if (!(s.values.front() > 0.0))
        throw Error(ErrorCode::DegenerateSpectrum, "largest singular value is zero");
    return s.values.back() / s.values.front();
}

double singular_ratio(const SingularSpectrum& s, std::size_t i)
{
    if (i >= s.values.size())
        detail::throw_invalid("singular_ratio index out of range");
    if (!(s.values.front() > 0.0))
        throw Error(ErrorCode::DegenerateSpectrum, "largest singular value is zero");
    return s.values[i] / s.values.front();
}

std::size_t dof_count(const SingularSpectrum& s, FeasibilityThreshold tau)
{
    if (s.values.empty())
        detail::throw_invalid("dof_count of an empty spectrum");
    if (!(s.values.front() > 0.0))
        throw Error(ErrorCode::DegenerateSpectrum, "largest singular value is zero");
    const double cut = tau.value() * s.values.front();
    return static_cast<std::size_t>(
        std::count_if(s.values.begin(), s.values.end(), [cut](double v) { return v >= cut; }));
}

//---------------------------------------------------------------------------//
namespace
{
double spacing_product(double d_tx, double d_rx, double wavelength)
{
    if (!(d_tx > 0.0) || !(d_rx > 0.0) || !(wavelength > 0.0))
        detail::throw_invalid("spacings and wavelength must be > 0");
    return d_tx * d_rx / wavelength;
}
} // namespace

double r_min(double d_tx, double d_rx, double wavelength, FeasibilityThreshold tau)
{
    return kPi / (2.0 * std::atan(1.0 / tau.value())) * spacing_product(d_tx, d_rx, wavelength);
}

double r_max(double d_tx, double d_rx, double wavelength, FeasibilityThreshold tau)
{
    return kPi / (2.0 * std::atan(tau.value())) * spacing_product(d_tx, d_rx, wavelength);
}

const char* to_string(MimoRegion region) noexcept
{
    switch (region)
    {
    case MimoRegion::Region1: return "region1";
    case MimoRegion::Region2: return "region2";
    case MimoRegion::Region3: return "region3";
    }
    return "unknown";
}

MimoRegion mimo_region(double range, double d_tx, double d_rx, double wavelength)
{
    if (!(range > 0.0))
        detail::throw_invalid("range must be > 0");
    const double b = spacing_product(d_tx, d_rx, wavelength);
    if (range < b)
        return MimoRegion::Region1;
    if (range <= 2.0 * b)
        return MimoRegion::Region2;
    return MimoRegion::Region3;
}

std::vector<double> theory_ratio_curve(double d_tx, double d_rx, double wavelength,
                                       std::span<const double> ranges)
{
    std::vector<double> out;
    out.reserve(ranges.size());
    for (double r : ranges)
        out.push_back(theory_ratio(phase_spread_2x2(d_tx, d_rx, wavelength, r)));
    return out;
}

//---------------------------------------------------------------------------//
void write_spectrum_csv(std::ostream& os, std::span<const SpectrumSample> samples,
                        FeasibilityThreshold tau)
{
    const std::size_t k = samples.empty() ? 0 : samples.front().spectrum.values.size();
    os << "r_meters";
    for (std::size_t i = 0; i < k; ++i)
        os << ",sigma_" << i;
    os << ",ratio,dof\n" << std::setprecision(17);
    for (const auto& s : samples)
    {
        if (s.spectrum.values.size() != k)
            throw Error(ErrorCode::DimensionMismatch, "spectrum rows have different lengths");
        os << s.range;
        for (double v : s.spectrum.values)
            os << ',' << v;
        os << ',' << condition_ratio(s.spectrum) << ',' << dof_count(s.spectrum, tau) << '\n';
    }
}

} // namespace nearlink
