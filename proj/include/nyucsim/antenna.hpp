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

#pragma once

#include <cmath>
#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

#include "nyucsim/common.hpp"
#include "nyucsim/geometry.hpp"
#include "nyucsim/small_scale.hpp"

namespace nyucsim {

enum class ElementPattern { Isotropic, Directional3gpp };

inline ElementPattern element_pattern_from_string(const std::string& s)
{
    if (s == "iso" || s == "isotropic") return ElementPattern::Isotropic;
    if (s == "3gpp" || s == "directional") return ElementPattern::Directional3gpp;
    throw ConfigError("unknown element pattern '" + s + "' (expected iso or 3gpp)");
}

/// Field pattern (F_theta, F_phi) of a single vertically polarized element
/// at global zenith/azimuth, boresight along +x. The directional pattern is
/// the standard sectored element: 65 degree half-power beamwidths in both
/// cuts, 30 dB floor, 8 dBi peak gain.
inline std::pair<double, double> element_field_pattern(ElementPattern pattern, double zenith_deg,
                                                       double azimuth_deg)
{
    if (!(zenith_deg >= 0.0 && zenith_deg <= 180.0))
        throw std::invalid_argument("element_field_pattern: zenith outside [0, 180]");
    if (!(azimuth_deg >= 0.0 && azimuth_deg < 360.0))
        throw std::invalid_argument("element_field_pattern: azimuth outside [0, 360)");
    if (pattern == ElementPattern::Isotropic)
        return {1.0, 0.0};

    constexpr double beamwidth_deg = 65.0;
    constexpr double floor_db = 30.0;
    constexpr double peak_gain_dbi = 8.0;
    const double az = wrap_pm180(azimuth_deg); // boresight at azimuth 0
    const double a_v = -std::min(12.0 * std::pow((zenith_deg - 90.0) / beamwidth_deg, 2.0), floor_db);
    const double a_h = -std::min(12.0 * std::pow(az / beamwidth_deg, 2.0), floor_db);
    const double a_db = -std::min(-(a_v + a_h), floor_db);
    const double gain_db = a_db + peak_gain_dbi;
    return {std::sqrt(db_to_linear(gain_db)), 0.0};
}

/// Uniform planar array in the y-z plane with boresight +x, optionally
/// rotated by a bearing about z and a downtilt about the (rotated) y-axis.
struct AntennaArray {
    int rows = 1;
    int cols = 1;
    double spacing_wavelengths = 0.5;
    ElementPattern pattern = ElementPattern::Isotropic;
    double bearing_deg = 0.0;
    double downtilt_deg = 0.0;

    int num_elements() const { return rows * cols; }

    /// Element position in meters for a given carrier wavelength.
    Vec3 element_position(int index, double wavelength_m) const
    {
        if (index < 0 || index >= num_elements())
            throw std::invalid_argument("element index out of range");
        const int r = index / cols;
        const int c = index % cols;
        const double d = spacing_wavelengths * wavelength_m;
        const Vec3 local{0.0, static_cast<double>(c) * d, static_cast<double>(r) * d};
        return rotate(local);
    }

    /// Field pattern toward a global direction, evaluated in the element's
    /// local frame.
    std::pair<double, double> field_pattern(double zenith_deg, double azimuth_deg) const
    {
        if (pattern == ElementPattern::Isotropic)
            return {1.0, 0.0};
        const Vec3 dir = gcs_unit_vector(azimuth_deg, zenith_deg);
        const Vec3 local = rotate_inverse(dir);
        const double zen_local = rad2deg(std::acos(std::clamp(local.z, -1.0, 1.0)));
        const double az_local = wrap_360(rad2deg(std::atan2(local.y, local.x)));
        return element_field_pattern(pattern, zen_local, az_local);
    }

    /// Conjugate steering weights toward a direction, normalized to unit norm.
    std::vector<std::complex<double>> steering_weights(double zenith_deg, double azimuth_deg,
                                                       double wavelength_m) const
    {
        const Vec3 dir = gcs_unit_vector(azimuth_deg, zenith_deg);
        const int n = num_elements();
        std::vector<std::complex<double>> w(static_cast<std::size_t>(n));
        const double norm = 1.0 / std::sqrt(static_cast<double>(n));
        for (int i = 0; i < n; ++i)
        {
            const double phase = 2.0 * pi * dir.dot(element_position(i, wavelength_m)) / wavelength_m;
            w[static_cast<std::size_t>(i)] = std::polar(norm, -phase);
        }
        return w;
    }

private:
    Vec3 rotate(const Vec3& v) const
    {
        const double a = deg2rad(bearing_deg);
        const double t = deg2rad(downtilt_deg);
        // downtilt about y (boresight +x dips toward -z), then bearing about z
        const Vec3 tilted{v.x * std::cos(t) + v.z * std::sin(t), v.y,
                          -v.x * std::sin(t) + v.z * std::cos(t)};
        return {tilted.x * std::cos(a) - tilted.y * std::sin(a),
                tilted.x * std::sin(a) + tilted.y * std::cos(a), tilted.z};
    }

    Vec3 rotate_inverse(const Vec3& v) const
    {
        const double a = -deg2rad(bearing_deg);
        const Vec3 unbear{v.x * std::cos(a) - v.y * std::sin(a),
                          v.x * std::sin(a) + v.y * std::cos(a), v.z};
        const double t = -deg2rad(downtilt_deg);
        return {unbear.x * std::cos(t) + unbear.z * std::sin(t), unbear.y,
                -unbear.x * std::sin(t) + unbear.z * std::cos(t)};
    }
};

} // namespace nyucsim
