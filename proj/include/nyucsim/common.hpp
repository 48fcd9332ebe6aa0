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
#include <numbers>
#include <stdexcept>
#include <string>

namespace nyucsim {

inline constexpr double speed_of_light_m_s = 299792458.0;
inline constexpr double pi = std::numbers::pi_v<double>;

/// Wraps an angle in degrees to [0, 360).
inline double wrap_360(double deg)
{
    double w = std::fmod(deg, 360.0);
    if (w < 0.0)
        w += 360.0;
    // fmod of a negative number close to a multiple of 360 can round up to 360 exactly
    return (w == 360.0) ? 0.0 : w;
}

/// Wraps an angle in degrees to (-180, 180]; used for minimal-rotation deltas.
inline double wrap_pm180(double deg)
{
    double w = wrap_360(deg);
    return (w > 180.0) ? w - 360.0 : w;
}

/// Reflects an elevation angle in degrees back into [-90, 90] (mirror at the poles).
inline double reflect_elevation(double deg)
{
    while (deg > 90.0 || deg < -90.0)
    {
        if (deg > 90.0)
            deg = 180.0 - deg;
        else
            deg = -180.0 - deg;
    }
    return deg;
}

inline double deg2rad(double deg) { return deg * (pi / 180.0); }
inline double rad2deg(double rad) { return rad * (180.0 / pi); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

/// Thrown when a configuration value or input file violates its contract.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace nyucsim
