// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef FDBFC_CHANNEL_HPP
#define FDBFC_CHANNEL_HPP

// Frequency-selective mmWave channel generation: clustered desired channels,
// the Rician self-interference channel and the tap-to-subcarrier DFT.

#include "common.hpp"

#include <random>

namespace fdbfc::channel {

/// Unit-norm ULA response, element n = exp(i*pi*n*cos(angle)) / sqrt(N).
/// Angles are measured from the array axis; half-wavelength spacing.
inline CVector ula_response(Eigen::Index num_elements, double angle)
{
    require(num_elements >= 1, ErrorKind::InvalidArgument, "ula_response needs at least one element");
    require(std::isfinite(angle), ErrorKind::InvalidArgument, "ula_response angle is not finite");
    const double scale = 1.0 / std::sqrt(static_cast<double>(num_elements));
    const double step = kPi * std::cos(angle);
    CVector a(num_elements);
    for (Eigen::Index n = 0; n < num_elements; ++n)
        a(n) = std::polar(scale, step * static_cast<double>(n));
    return a;
}

/// Root-raised-cosine impulse response, peak-normalized so that
/// p(0) = 1 + rolloff*(4/pi - 1) and the pulse carries unit energy per symbol.
inline double rrc_pulse(double t, double rolloff, double symbol_period)
{
    const double x = t / symbol_period;
    const double b = rolloff;
    if (std::abs(x) < 1e-12)
        return 1.0 + b * (4.0 / kPi - 1.0);
    if (b > 0.0 && std::abs(std::abs(4.0 * b * x) - 1.0) < 1e-10) {
        const double arg = kPi / (4.0 * b);
        return b / std::sqrt(2.0) *
               ((1.0 + 2.0 / kPi) * std::sin(arg) + (1.0 - 2.0 / kPi) * std::cos(arg));
    }
    const double num = std::sin(kPi * x * (1.0 - b)) + 4.0 * b * x * std::cos(kPi * x * (1.0 + b));
    const double den = kPi * x * (1.0 - (4.0 * b * x) * (4.0 * b * x));
    return num / den;
}

// ---------------------------------------------------------------------------
// Array geometry

struct ArrayGeometry {
    /// Element positions in wavelengths.
    std::vector<Eigen::Vector3d> element_positions;

    Eigen::Index num_elements() const { return static_cast<Eigen::Index>(element_positions.size()); }

    /// Horizontal half-wavelength ULA along x, first element at `origin`.
    static ArrayGeometry horizontal_ula(Eigen::Index num_elements,
                                        const Eigen::Vector3d &origin = Eigen::Vector3d::Zero())
    {
        require(num_elements >= 1, ErrorKind::InvalidArgument, "array needs at least one element");
        ArrayGeometry g;
        g.element_positions.reserve(static_cast<std::size_t>(num_elements));
        for (Eigen::Index n = 0; n < num_elements; ++n)
            g.element_positions.push_back(origin + Eigen::Vector3d(0.5 * static_cast<double>(n), 0.0, 0.0));
        return g;
    }
};

/// Transmit and receive ULAs of a full-duplex node, stacked vertically.
struct FullDuplexArrays {
    ArrayGeometry tx;
    ArrayGeometry rx;
};

inline FullDuplexArrays stacked_arrays(Eigen::Index nt, Eigen::Index nr, double vertical_separation)
{
    return {ArrayGeometry::horizontal_ula(nt),
            ArrayGeometry::horizontal_ula(nr, Eigen::Vector3d(0.0, 0.0, vertical_separation))};
}

// ---------------------------------------------------------------------------
// Clustered (Saleh-Valenzuela style) tap-domain channel

/// How a ray's pulse is sampled onto the D taps.
enum class DelayWrap {
    /// Pulse tails wrap around the D-tap span (circular convolution).
    Cyclic,
    /// Pulse sampled as p(d*Ts - tau) with no wrap-around.
    Linear,
};

struct ClusterParams {
    int n_clust = 1;
    int n_rays = 1;
    double angle_spread_std = 0.2;  // radians, Laplacian
    int delay_span_taps = 1;        // D
    double sampling_rate = 2e9;     // 1/Ts
    double rolloff = 1.0;
    DelayWrap delay_wrap = DelayWrap::Cyclic;

    double symbol_period() const { return 1.0 / sampling_rate; }

    void validate() const
    {
        require(n_clust >= 1 && n_rays >= 1, ErrorKind::InvalidArgument, "cluster and ray counts must be >= 1");
        require(delay_span_taps >= 1, ErrorKind::InvalidArgument, "delay span must be >= 1 tap");
        require(sampling_rate > 0.0 && std::isfinite(sampling_rate), ErrorKind::InvalidArgument,
                "sampling rate must be positive");
        require(rolloff >= 0.0 && rolloff <= 1.0, ErrorKind::InvalidArgument, "rolloff must lie in [0, 1]");
        require(angle_spread_std >= 0.0, ErrorKind::InvalidArgument, "angle spread must be >= 0");
    }
};

struct Ray {
    cdouble gain;
    double aoa;    // radians
    double aod;    // radians
    double delay;  // seconds
};

/// Time-domain MIMO impulse response, one Nr x Nt matrix per tap.
struct ChannelTaps {
    MatrixList taps;

    Eigen::Index num_taps() const { return static_cast<Eigen::Index>(taps.size()); }
    Eigen::Index rows() const { return taps.front().rows(); }
    Eigen::Index cols() const { return taps.front().cols(); }
};

/// Per-subcarrier frequency response, one Nr x Nt matrix per subcarrier.
struct SubcarrierChannels {
    MatrixList subchannels;

    Eigen::Index num_subcarriers() const { return static_cast<Eigen::Index>(subchannels.size()); }
    const CMatrix &operator[](std::size_t u) const { return subchannels[u]; }
};

/// Pulse weight of a ray with delay `delay` on tap `d`.
inline double tap_weight(int d, double delay, const ClusterParams &params)
{
    const double ts = params.symbol_period();
    const double t = static_cast<double>(d) * ts - delay;
    if (params.delay_wrap == DelayWrap::Linear)
        return rrc_pulse(t, params.rolloff, ts);

    // Periodized pulse. The tail beyond +-kWrapSymbols contributes O(1/kWrapSymbols).
    constexpr double kWrapSymbols = 256.0;
    const double period = static_cast<double>(params.delay_span_taps) * ts;
    const double reach = kWrapSymbols * ts;
    double sum = 0.0;
    const auto k_lo = static_cast<long>(std::ceil((-reach - t) / period));
    const auto k_hi = static_cast<long>(std::floor((reach - t) / period));
    for (long k = k_lo; k <= k_hi; ++k)
        sum += rrc_pulse(t + static_cast<double>(k) * period, params.rolloff, ts);
    return sum;
}

/// Builds the D taps from an explicit ray list:
/// H[d] = alpha * sum_rays gain * p(d*Ts - tau) * a_r(aoa) * a_t(aod)^*,
/// alpha = sqrt(Nt*Nr / number_of_rays).
inline ChannelTaps taps_from_rays(const std::vector<Ray> &rays, Eigen::Index nr, Eigen::Index nt,
                                  const ClusterParams &params)
{
    params.validate();
    require(nr >= 1 && nt >= 1, ErrorKind::InvalidArgument, "channel dimensions must be >= 1");
    require(!rays.empty(), ErrorKind::InvalidArgument, "ray list is empty");
    const int num_taps = params.delay_span_taps;
    const double alpha =
        std::sqrt(static_cast<double>(nt * nr) / static_cast<double>(rays.size()));

    ChannelTaps out;
    out.taps.assign(static_cast<std::size_t>(num_taps), CMatrix::Zero(nr, nt));
    for (const Ray &ray : rays) {
        const CVector ar = ula_response(nr, ray.aoa);
        const CVector at = ula_response(nt, ray.aod);
        const CMatrix outer = ar * at.adjoint();
        for (int d = 0; d < num_taps; ++d) {
            const double w = tap_weight(d, ray.delay, params);
            out.taps[static_cast<std::size_t>(d)] += (alpha * w * ray.gain) * outer;
        }
    }
    return out;
}

/// Zero-mean Laplacian draw with the given standard deviation.
template <class Rng>
double draw_laplacian(Rng &rng, double stddev)
{
    std::uniform_real_distribution<double> uni(-0.5, 0.5);
    const double u = uni(rng);
    const double b = stddev / std::sqrt(2.0);
    const double mag = -b * std::log(1.0 - 2.0 * std::abs(u));
    return u < 0.0 ? -mag : mag;
}

/// Draws the rays of one clustered channel realization. Cluster mean angles
/// are uniform on [0, pi], ray angles Laplacian about them, gains CN(0, 1)
/// and delays uniform on [0, D*Ts).
template <class Rng>
std::vector<Ray> draw_rays(const ClusterParams &params, Rng &rng)
{
    params.validate();
    std::uniform_real_distribution<double> mean_angle(0.0, kPi);
    std::uniform_real_distribution<double> delay(0.0, static_cast<double>(params.delay_span_taps) *
                                                          params.symbol_period());
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));

    std::vector<Ray> rays;
    rays.reserve(static_cast<std::size_t>(params.n_clust * params.n_rays));
    for (int c = 0; c < params.n_clust; ++c) {
        const double mean_aoa = mean_angle(rng);
        const double mean_aod = mean_angle(rng);
        for (int r = 0; r < params.n_rays; ++r) {
            Ray ray{};
            ray.aoa = mean_aoa + draw_laplacian(rng, params.angle_spread_std);
            ray.aod = mean_aod + draw_laplacian(rng, params.angle_spread_std);
            const double re = normal(rng);
            const double im = normal(rng);
            ray.gain = {re, im};
            ray.delay = delay(rng);
            rays.push_back(ray);
        }
    }
    return rays;
}

template <class Rng>
ChannelTaps gen_clustered_taps(const ClusterParams &params, Eigen::Index nr, Eigen::Index nt, Rng &rng)
{
    return taps_from_rays(draw_rays(params, rng), nr, nt, params);
}

// ---------------------------------------------------------------------------
// Self-interference channel

/// Near-field spherical-wave LOS matrix between the transmit and receive
/// arrays of one node. Entry (n, m) = rho * exp(-i*2*pi*r) / r with r the
/// distance in wavelengths from tx element m to rx element n; rho makes
/// ||H||_F^2 = Nt*Nr.
inline CMatrix gen_si_los(const ArrayGeometry &geometry_tx, const ArrayGeometry &geometry_rx)
{
    const Eigen::Index nt = geometry_tx.num_elements();
    const Eigen::Index nr = geometry_rx.num_elements();
    require(nt >= 1 && nr >= 1, ErrorKind::InvalidArgument, "arrays must have elements");

    CMatrix h(nr, nt);
    for (Eigen::Index n = 0; n < nr; ++n) {
        for (Eigen::Index m = 0; m < nt; ++m) {
            const auto &ptx = geometry_tx.element_positions[static_cast<std::size_t>(m)];
            const auto &prx = geometry_rx.element_positions[static_cast<std::size_t>(n)];
            require(ptx.allFinite() && prx.allFinite(), ErrorKind::InvalidArgument,
                    "element positions must be finite");
            const double r = (prx - ptx).norm();
            require(r > 0.0, ErrorKind::InvalidGeometry, "transmit and receive elements coincide");
            h(n, m) = std::polar(1.0 / r, -2.0 * kPi * r);
        }
    }
    const double rho = std::sqrt(static_cast<double>(nt * nr)) / h.norm();
    return rho * h;
}

struct SiChannelParams {
    double rician_kappa = 10.0;  // linear
    ClusterParams nlos_params;
    ArrayGeometry geometry_tx;
    ArrayGeometry geometry_rx;
};

/// Rician SI channel. The frequency-flat LOS term enters tap 0 only, so it
/// contributes identically to every subcarrier.
template <class Rng>
ChannelTaps gen_si_taps(const SiChannelParams &params, Rng &rng)
{
    require(params.rician_kappa >= 0.0 && !std::isnan(params.rician_kappa), ErrorKind::InvalidArgument,
            "Rician factor must be >= 0");
    const CMatrix los = gen_si_los(params.geometry_tx, params.geometry_rx);
    ChannelTaps taps = gen_clustered_taps(params.nlos_params, los.rows(), los.cols(), rng);

    const double kappa = params.rician_kappa;
    const double w_los = std::isinf(kappa) ? 1.0 : std::sqrt(kappa / (kappa + 1.0));
    const double w_nlos = std::isinf(kappa) ? 0.0 : std::sqrt(1.0 / (kappa + 1.0));
    for (auto &tap : taps.taps)
        tap *= w_nlos;
    taps.taps.front() += w_los * los;
    return taps;
}

// ---------------------------------------------------------------------------
// OFDM

/// U-point DFT across taps: H[u] = sum_d H[d] exp(-i*2*pi*u*d/U).
inline SubcarrierChannels taps_to_subcarriers(const ChannelTaps &taps, Eigen::Index num_subcarriers)
{
    require_same_shape(taps.taps, "channel taps");
    const Eigen::Index num_taps = taps.num_taps();
    require(num_subcarriers >= num_taps, ErrorKind::InvalidArgument,
            "number of subcarriers must be >= number of taps (cyclic prefix assumption)");

    SubcarrierChannels out;
    out.subchannels.assign(static_cast<std::size_t>(num_subcarriers),
                           CMatrix::Zero(taps.rows(), taps.cols()));
    for (Eigen::Index u = 0; u < num_subcarriers; ++u) {
        CMatrix &hu = out.subchannels[static_cast<std::size_t>(u)];
        for (Eigen::Index d = 0; d < num_taps; ++d) {
            // reduce u*d mod U first so the phase argument stays small
            const auto k = static_cast<double>((u * d) % num_subcarriers);
            const cdouble twiddle =
                std::polar(1.0, -2.0 * kPi * k / static_cast<double>(num_subcarriers));
            hu += twiddle * taps.taps[static_cast<std::size_t>(d)];
        }
    }
    return out;
}

} // namespace fdbfc::channel

#endif // FDBFC_CHANNEL_HPP
