// SPDX-License-Identifier: Apache-2.0
//
// nyucsim - drop-based statistical channel simulator for 0.5-150 GHz
// Copyright (C) 2026 the nyucsim authors
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
//
// MIMO channel matrix from a realization, long-term beamformed components
// and received power spectral density over subbands.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "nyucsim/antenna.hpp"
#include "nyucsim/common.hpp"
#include "nyucsim/small_scale.hpp"

namespace nyucsim {

/// Per-subpath U x S coefficient blocks plus the delay/Doppler taps.
struct ChannelMatrix {
    int rx_elements = 0; // U
    int tx_elements = 0; // S
    double wavelength_m = 0.0;
    std::vector<std::vector<std::vector<std::complex<double>>>> h; // [m][u][s]
    std::vector<double> delay_ns;
    std::vector<double> doppler_hz;

    std::size_t subpath_count() const { return h.size(); }
};

/// Per-subband power spectral density on a uniform grid across the RF
/// bandwidth; offsets are relative to the carrier.
struct SpectralDensity {
    std::vector<double> offset_hz;
    std::vector<double> value_w_per_hz;
};

/// Flat transmit PSD over the RF bandwidth with the given total power.
inline SpectralDensity flat_tx_psd(double rf_bandwidth_hz, int subbands, double total_power_w = 1.0)
{
    if (subbands < 1)
        throw std::invalid_argument("flat_tx_psd: need at least one subband");
    SpectralDensity psd;
    psd.offset_hz.resize(static_cast<std::size_t>(subbands));
    psd.value_w_per_hz.assign(static_cast<std::size_t>(subbands), total_power_w / rf_bandwidth_hz);
    const double step = rf_bandwidth_hz / subbands;
    for (int i = 0; i < subbands; ++i)
        psd.offset_hz[static_cast<std::size_t>(i)] = -rf_bandwidth_hz / 2.0 + (i + 0.5) * step;
    return psd;
}

/// Channel coefficients per subpath and element pair:
/// amplitude times the polarization-matrix field product and the two array
/// phase factors exp(j 2 pi r_hat . d / lambda).
inline ChannelMatrix build_channel_matrix(const ChannelRealization& realization,
                                          const AntennaArray& tx_array,
                                          const AntennaArray& rx_array)
{
    ChannelMatrix mat;
    mat.rx_elements = rx_array.num_elements();
    mat.tx_elements = tx_array.num_elements();
    if (mat.rx_elements < 1 || mat.tx_elements < 1)
        throw std::invalid_argument("build_channel_matrix: arrays must have elements");
    mat.wavelength_m = speed_of_light_m_s / (realization.frequency_ghz * 1e9);

    const std::size_t n_sub = realization.resolvable.size();
    mat.h.resize(n_sub);
    mat.delay_ns.resize(n_sub);
    mat.doppler_hz.resize(n_sub);

    for (std::size_t m = 0; m < n_sub; ++m)
    {
        const Subpath& sp = realization.resolvable[m];
        mat.delay_ns[m] = sp.delay_ns;
        mat.doppler_hz[m] = sp.doppler_hz;

        const auto [f_rx_theta, f_rx_phi] = rx_array.field_pattern(sp.zoa_deg, sp.aoa_az_gcs_deg);
        const auto [f_tx_theta, f_tx_phi] = tx_array.field_pattern(sp.zod_deg, sp.aod_az_gcs_deg);

        // 2x2 polarization matrix: unit theta-theta entry, cross and
        // phi-phi entries scaled by 1/sqrt(K).
        const std::complex<double> p_tt = std::polar(1.0, sp.phase_rad[0]);
        const std::complex<double> p_tp =
            std::polar(std::sqrt(1.0 / sp.xpd_linear[0]), sp.phase_rad[1]);
        const std::complex<double> p_pt =
            std::polar(std::sqrt(1.0 / sp.xpd_linear[1]), sp.phase_rad[2]);
        const std::complex<double> p_pp =
            std::polar(std::sqrt(1.0 / sp.xpd_linear[2]), sp.phase_rad[3]);

        const std::complex<double> field = f_rx_theta * (p_tt * f_tx_theta + p_tp * f_tx_phi) +
                                           f_rx_phi * (p_pt * f_tx_theta + p_pp * f_tx_phi);

        const Vec3 r_rx = gcs_unit_vector(sp.aoa_az_gcs_deg, sp.zoa_deg);
        const Vec3 r_tx = gcs_unit_vector(sp.aod_az_gcs_deg, sp.zod_deg);
        const double amp = sp.amplitude();

        auto& block = mat.h[m];
        block.resize(static_cast<std::size_t>(mat.rx_elements));
        for (int u = 0; u < mat.rx_elements; ++u)
        {
            auto& row = block[static_cast<std::size_t>(u)];
            row.resize(static_cast<std::size_t>(mat.tx_elements));
            const double rx_phase =
                2.0 * pi * r_rx.dot(rx_array.element_position(u, mat.wavelength_m)) /
                mat.wavelength_m;
            for (int s = 0; s < mat.tx_elements; ++s)
            {
                const double tx_phase =
                    2.0 * pi * r_tx.dot(tx_array.element_position(s, mat.wavelength_m)) /
                    mat.wavelength_m;
                row[static_cast<std::size_t>(s)] =
                    amp * field * std::polar(1.0, rx_phase) * std::polar(1.0, tx_phase);
            }
        }
    }
    return mat;
}

namespace detail {

inline void check_weights(const ChannelMatrix& mat, const std::vector<std::complex<double>>& w_tx,
                          const std::vector<std::complex<double>>& w_rx)
{
    if (static_cast<int>(w_tx.size()) != mat.tx_elements ||
        static_cast<int>(w_rx.size()) != mat.rx_elements)
        throw std::invalid_argument("beamforming weights do not match the array dimensions");
    auto norm2 = [](const std::vector<std::complex<double>>& w) {
        double s = 0.0;
        for (const auto& v : w)
            s += std::norm(v);
        return s;
    };
    if (std::abs(norm2(w_tx) - 1.0) > 1e-6 || std::abs(norm2(w_rx) - 1.0) > 1e-6)
        throw std::invalid_argument("beamforming weights must have unit norm");
}

} // namespace detail

/// Long-term component per subpath: L_m = sum_u sum_s w_rx,u H_{u,s,m} w_tx,s.
inline std::vector<std::complex<double>> long_term(const ChannelMatrix& mat,
                                                   const std::vector<std::complex<double>>& w_tx,
                                                   const std::vector<std::complex<double>>& w_rx)
{
    detail::check_weights(mat, w_tx, w_rx);
    std::vector<std::complex<double>> lt(mat.subpath_count());
    for (std::size_t m = 0; m < mat.subpath_count(); ++m)
    {
        std::complex<double> acc(0.0, 0.0);
        for (int u = 0; u < mat.rx_elements; ++u)
        {
            std::complex<double> inner(0.0, 0.0);
            for (int s = 0; s < mat.tx_elements; ++s)
                inner += mat.h[m][static_cast<std::size_t>(u)][static_cast<std::size_t>(s)] *
                         w_tx[static_cast<std::size_t>(s)];
            acc += w_rx[static_cast<std::size_t>(u)] * inner;
        }
        lt[m] = acc;
    }
    return lt;
}

/// Received PSD per subband at time t:
/// S_rx(f_i) = S_tx(f_i) |sum_m L_m e^{j 2 pi nu_m t} e^{-j 2 pi tau_m f_i}|^2.
/// The delay exponent sign is fixed to negative.
inline SpectralDensity rx_psd(const SpectralDensity& tx_psd, const ChannelMatrix& mat,
                              const std::vector<std::complex<double>>& w_tx,
                              const std::vector<std::complex<double>>& w_rx, double t_s)
{
    if (tx_psd.offset_hz.size() != tx_psd.value_w_per_hz.size())
        throw std::invalid_argument("rx_psd: malformed transmit PSD grid");
    const std::vector<std::complex<double>> lt = long_term(mat, w_tx, w_rx);

    SpectralDensity out;
    out.offset_hz = tx_psd.offset_hz;
    out.value_w_per_hz.resize(tx_psd.offset_hz.size());
    for (std::size_t i = 0; i < tx_psd.offset_hz.size(); ++i)
    {
        const double f = tx_psd.offset_hz[i];
        std::complex<double> sum(0.0, 0.0);
        for (std::size_t m = 0; m < lt.size(); ++m)
        {
            const double tau_s = mat.delay_ns[m] * 1e-9;
            const double phase = 2.0 * pi * (mat.doppler_hz[m] * t_s - tau_s * f);
            sum += lt[m] * std::polar(1.0, phase);
        }
        out.value_w_per_hz[i] = tx_psd.value_w_per_hz[i] * std::norm(sum);
    }
    return out;
}

/// Wideband beamforming gain in dB with conjugate steering toward the given
/// departure/arrival directions: 10 log10(sum S_rx / sum S_tx).
inline double beamforming_gain(const ChannelMatrix& mat, const AntennaArray& tx_array,
                               const AntennaArray& rx_array, double steer_zod_deg,
                               double steer_aod_az_deg, double steer_zoa_deg,
                               double steer_aoa_az_deg, double rf_bandwidth_hz, int subbands,
                               double t_s = 0.0)
{
    const auto w_tx = tx_array.steering_weights(steer_zod_deg, steer_aod_az_deg, mat.wavelength_m);
    const auto w_rx = rx_array.steering_weights(steer_zoa_deg, steer_aoa_az_deg, mat.wavelength_m);
    const SpectralDensity tx = flat_tx_psd(rf_bandwidth_hz, subbands);
    const SpectralDensity rx = rx_psd(tx, mat, w_tx, w_rx, t_s);
    double tx_sum = 0.0, rx_sum = 0.0;
    for (std::size_t i = 0; i < tx.value_w_per_hz.size(); ++i)
    {
        tx_sum += tx.value_w_per_hz[i];
        rx_sum += rx.value_w_per_hz[i];
    }
    return linear_to_db(rx_sum / tx_sum);
}

} // namespace nyucsim
