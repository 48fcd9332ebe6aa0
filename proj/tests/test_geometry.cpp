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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nyucsim/geometry.hpp"

using namespace nyucsim;

TEST_CASE("link geometry derived quantities")
{
    SECTION("axis-aligned rooftop to street link")
    {
        const LinkGeometry g = link_geometry({0, 0, 10}, {100, 0, 1.5});
        REQUIRE(g.d2d_m == 100.0);
        REQUIRE(g.elevation_deg < 0.0);
        REQUIRE(g.bearing_deg == 0.0);
    }
    SECTION("3-4-5 triangle in the plane")
    {
        const LinkGeometry g = link_geometry({0, 0, 0}, {3, 4, 0});
        REQUIRE(g.d2d_m == 5.0);
        REQUIRE(g.d3d_m == 5.0);
        REQUIRE(g.elevation_deg == 0.0);
    }
    SECTION("3D distance includes the height difference")
    {
        const LinkGeometry g = link_geometry({0, 0, 35}, {0, 50, 1.5});
        REQUIRE_THAT(g.d3d_m,
                     Catch::Matchers::WithinAbs(std::sqrt(50.0 * 50.0 + 33.5 * 33.5), 1e-12));
        REQUIRE(g.bearing_deg == 90.0);
    }
    SECTION("d3d is never below d2d and satisfies Pythagoras")
    {
        const LinkGeometry g = link_geometry({1, 2, 3}, {-4, 7, 9});
        REQUIRE(g.d3d_m >= g.d2d_m);
        REQUIRE_THAT(g.d3d_m * g.d3d_m,
                     Catch::Matchers::WithinRel(g.d2d_m * g.d2d_m + 36.0, 1e-12));
    }
    SECTION("bearing wraps into [0, 360)")
    {
        const LinkGeometry g = link_geometry({0, 0, 0}, {-1, -1, 0});
        REQUIRE(g.bearing_deg >= 0.0);
        REQUIRE(g.bearing_deg < 360.0);
        REQUIRE_THAT(g.bearing_deg, Catch::Matchers::WithinAbs(225.0, 1e-9));
    }
    SECTION("elevation is positive when the Rx is above the Tx")
    {
        REQUIRE(link_geometry({0, 0, 0}, {10, 0, 5}).elevation_deg > 0.0);
    }
    SECTION("non-finite coordinates are rejected")
    {
        REQUIRE_THROWS_AS(link_geometry({std::nan(""), 0, 0}, {1, 1, 1}), std::invalid_argument);
    }
}
