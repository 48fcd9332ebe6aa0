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
#include <stdexcept>

#include "nyucsim/common.hpp"

namespace nyucsim {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

/// Tx/Rx placement for one link, with the derived quantities every model
/// stage needs. Bearing is measured from the x-axis, counterclockwise, in
/// [0, 360); elevation is from the horizon, positive when the Rx sits above
/// the Tx.
struct LinkGeometry {
    Vec3 tx_position;
    Vec3 rx_position;
    Vec3 ue_velocity; // m/s

    double d2d_m = 0.0;
    double d3d_m = 0.0;
    double bearing_deg = 0.0;   // azimuth of Tx->Rx, from x-axis, CCW
    double elevation_deg = 0.0; // elevation of Tx->Rx above the horizon
};

inline LinkGeometry link_geometry(const Vec3& tx, const Vec3& rx, const Vec3& velocity = {})
{
    for (double v : {tx.x, tx.y, tx.z, rx.x, rx.y, rx.z, velocity.x, velocity.y, velocity.z})
        if (!std::isfinite(v))
            throw std::invalid_argument("link_geometry: non-finite coordinate");

    LinkGeometry g;
    g.tx_position = tx;
    g.rx_position = rx;
    g.ue_velocity = velocity;

    const double dx = rx.x - tx.x;
    const double dy = rx.y - tx.y;
    const double dz = rx.z - tx.z;
    g.d2d_m = std::hypot(dx, dy);
    g.d3d_m = std::sqrt(g.d2d_m * g.d2d_m + dz * dz);
    g.bearing_deg = (g.d2d_m > 0.0) ? wrap_360(rad2deg(std::atan2(dy, dx))) : 0.0;
    g.elevation_deg = (g.d3d_m > 0.0) ? rad2deg(std::atan2(dz, g.d2d_m)) : 0.0;
    return g;
}

inline double ue_height_m(const LinkGeometry& g)
{
    return std::min(g.tx_position.z, g.rx_position.z);
}

inline double bs_height_m(const LinkGeometry& g)
{
    return std::max(g.tx_position.z, g.rx_position.z);
}

} // namespace nyucsim
