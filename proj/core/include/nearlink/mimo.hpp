// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "nearlink/channel.hpp"
#include "nearlink/matrix.hpp"

namespace nearlink
{

// Singular values sorted descending; one per min(rows, cols).
struct SingularSpectrum
{
    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t cols = 0;
};

// Minimum acceptable sigma_min / sigma_max for a usable spatial stream.
class FeasibilityThreshold
{
  public:
    explicit FeasibilityThreshold(double tau = 0.1);
    double value() const { return tau_; }

  private:
    double tau_;
};

struct SingularPair
{
    double sigma_max = 0.0;
    double sigma_min = 0.0;
};

/*!
 * Singular values of the unit-modulus matrix [[e^{-j t0}, e^{-j t1}],
 * [e^{-j t2}, e^{-j t3}]].
 *
 * With D = (t0 + t3) - (t1 + t2) the values are sqrt(2 +- 2|cos(D/2)|). They
 * are evaluated as 2cos(y/2) and 2|sin(y/2)| with y = D/2 reduced to
 * [-pi/2, pi/2], which keeps full relative accuracy near rank one.
 */
SingularPair svd_closed_form_2x2(double t0, double t1, double t2, double t3);

// Ratio sigma_min / sigma_max of a unit-modulus 2x2 channel with phase
// spread `delta`.
double theory_ratio(double delta);

//---------------------------------------------------------------------------//
// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
// Eigenvectors are the columns of `vectors`, matching `values` order
// (unsorted).
struct HermitianEigen
{
    std::vector<double> values;
    ComplexMatrix vectors;
    std::size_t sweeps = 0;
};

inline constexpr std::size_t kJacobiMaxSweeps = 64;

// Throws ConvergenceFailure if the off-diagonal mass does not vanish within
// `max_sweeps` sweeps.
HermitianEigen hermitian_eigen_jacobi(const ComplexMatrix& a,
                                      std::size_t max_sweeps = kJacobiMaxSweeps);

// H H^H when rows <= cols, otherwise H^H H.
ComplexMatrix gram_matrix(const ComplexMatrix& h);

/*!
 * Singular values from the eigenvectors of the smaller Gram matrix.
 *
 * Each value is recovered as the norm of H^H u_i (or H v_i) rather than the
 * square root of the Gram eigenvalue, so small singular values keep absolute
 * accuracy near machine epsilon instead of sqrt(epsilon).
 */
SingularSpectrum singular_values(const ComplexMatrix& h);
SingularSpectrum singular_values(const ChannelMatrix& h);

// sigma_min / sigma_max. Throws DegenerateSpectrum if sigma_max == 0.
double condition_ratio(const SingularSpectrum& s);

// sigma_i / sigma_0.
double singular_ratio(const SingularSpectrum& s, std::size_t i);

// Number of sigma_i >= tau * sigma_max.
std::size_t dof_count(const SingularSpectrum& s, FeasibilityThreshold tau);

//---------------------------------------------------------------------------//
// Closest range at which a 2x2 link keeps sigma_min / sigma_max >= tau:
//   pi / (2 atan(1/tau)) * d_tx d_rx / lambda
double r_min(double d_tx, double d_rx, double wavelength, FeasibilityThreshold tau);

// Farthest such range, exact arctan form:
//   pi / (2 atan(tau)) * d_tx d_rx / lambda  (~ pi / (2 tau) * ... for small tau)
double r_max(double d_tx, double d_rx, double wavelength, FeasibilityThreshold tau);

enum class MimoRegion
{
    Region1, // r < d_tx d_rx / lambda: ratio oscillates rapidly
    Region2, // up to 2 d_tx d_rx / lambda: ratio climbs to 1
    Region3, // beyond: ratio decays to 0
};

const char* to_string(MimoRegion region) noexcept;

MimoRegion mimo_region(double range, double d_tx, double d_rx, double wavelength);

// Closed-form 2x2 ratio at each range.
std::vector<double> theory_ratio_curve(double d_tx, double d_rx, double wavelength,
                                       std::span<const double> ranges);

//---------------------------------------------------------------------------//
struct SpectrumSample
{
    double range = 0.0;
    SingularSpectrum spectrum;
};

// Header `r_meters,sigma_0,...,sigma_{k-1},ratio,dof`.
void write_spectrum_csv(std::ostream& os, std::span<const SpectrumSample> samples,
                        FeasibilityThreshold tau);

} // namespace nearlink
