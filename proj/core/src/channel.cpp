// Copyright 2026 nearlink contributors
// SPDX-License-Identifier: Apache-2.0

#include "nearlink/channel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <utility>

#include "nearlink/constants.hpp"
#include "nearlink/error.hpp"

namespace nearlink
{

//---------------------------------------------------------------------------//
ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
    : rows_(rows), cols_(cols), data_(std::move(data))
{
    if (data_.size() != rows * cols)
        throw Error(ErrorCode::DimensionMismatch, "matrix data size does not match shape");
}

ComplexMatrix ComplexMatrix::transpose() const
{
    ComplexMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

ComplexMatrix ComplexMatrix::adjoint() const
{
    ComplexMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = std::conj((*this)(i, j));
    return t;
}

ComplexMatrix ComplexMatrix::scaled(Complex s) const
{
    ComplexMatrix out = *this;
    for (auto& v : out.data_)
        v *= s;
    return out;
}

double ComplexMatrix::frobenius_sq() const
{
    double sum = 0.0;
    for (const auto& v : data_)
        sum += std::norm(v);
    return sum;
}

//---------------------------------------------------------------------------//
const char* to_string(ChannelModel model) noexcept
{
    return model == ChannelModel::FullAmplitude ? "full_amplitude" : "phase_only";
}

PathLength path_length(Vec3 a, Vec3 b)
{
    double c[3] = {std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)};
    std::sort(c, c + 3);
    const double major = c[2];
    const double minor_sq = c[0] * c[0] + c[1] * c[1];
    if (major == 0.0)
        return {0.0, 0.0};
    // sqrt(M^2 + m^2) - M == m^2 / (sqrt(M^2 + m^2) + M)
    const double excess = minor_sq / (std::sqrt(major * major + minor_sq) + major);
    return {major, excess};
}

namespace
{
double wrap_cycles(double cycles)
{
    cycles -= std::round(cycles);
    if (cycles <= -0.5)
        cycles += 1.0;
    return kTwoPi * cycles;
}
} // namespace

double path_phase(const PathLength& d, double wavelength)
{
    return wrap_cycles(std::fmod(d.coarse, wavelength) / wavelength + d.fine / wavelength);
}

double path_phase(double d, double wavelength)
{
    return path_phase(PathLength{d, 0.0}, wavelength);
}

double path_phase_difference(const PathLength& d1, const PathLength& d2, double wavelength)
{
    const double coarse = std::fmod(d1.coarse, wavelength) - std::fmod(d2.coarse, wavelength);
    return wrap_cycles((coarse + (d1.fine - d2.fine)) / wavelength);
}

Complex channel_coeff(const PathLength& d, double wavelength, ChannelModel model)
{
    if (!(wavelength > 0.0))
        detail::throw_invalid("wavelength must be > 0");
    const double length = d.value();
    if (length == 0.0)
        throw Error(ErrorCode::ZeroDistance, "channel between coincident points");
    if (!(length > 0.0) || !std::isfinite(length))
        detail::throw_invalid("path length must be finite and > 0");

    const double phase = path_phase(d, wavelength);
    const double magnitude = model == ChannelModel::FullAmplitude
                                 ? wavelength / (std::sqrt(4.0 * kPi) * length)
                                 : 1.0;
    return std::polar(magnitude, -phase);
}

Complex channel_coeff(double d, double wavelength, ChannelModel model)
{
    return channel_coeff(PathLength{d, 0.0}, wavelength, model);
}

ChannelMatrix channel_matrix(const ElementLayout& tx, const ElementLayout& rx,
                             double wavelength, ChannelModel model)
{
    const auto tx_el = tx.elements();
    const auto rx_el = rx.elements();
    ComplexMatrix h(rx_el.size(), tx_el.size());
    for (std::size_t i = 0; i < rx_el.size(); ++i)
    {
        for (std::size_t j = 0; j < tx_el.size(); ++j)
        {
            const PathLength d = path_length(rx_el[i].position, tx_el[j].position);
            if (d.value() == 0.0)
                throw Error(ErrorCode::ZeroDistance,
                            "tx element " + std::to_string(j) + " coincides with rx element "
                                + std::to_string(i));
            h(i, j) = channel_coeff(d, wavelength, model);
        }
    }
    return {std::move(h), wavelength, model};
}

double phase_spread_2x2(double d_tx, double d_rx, double wavelength, double range,
                        double phi_tx, double phi_rx)
{
    if (!(d_tx > 0.0) || !(d_rx > 0.0) || !(wavelength > 0.0) || !(range > 0.0))
        detail::throw_invalid("phase_spread_2x2: lengths must be > 0");
    const double half_pi = 0.5 * kPi;
    if (!(std::abs(phi_tx) < half_pi) || !(std::abs(phi_rx) < half_pi))
        detail::throw_invalid("phase_spread_2x2: angles must lie in (-pi/2, pi/2)");
    return kTwoPi * (d_tx * std::cos(phi_tx)) * (d_rx * std::cos(phi_rx)) / (wavelength * range);
}

void write_channel_csv(std::ostream& os, const ChannelMatrix& h)
{
    os << "i,j,re,im\n" << std::setprecision(17);
    for (std::size_t i = 0; i < h.entries.rows(); ++i)
        for (std::size_t j = 0; j < h.entries.cols(); ++j)
            os << i << ',' << j << ',' << h.entries(i, j).real() << ','
               << h.entries(i, j).imag() << '\n';
}

} // namespace nearlink
