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

#include "nyucsim/large_scale.hpp"

using namespace nyucsim;

namespace {

const ParamTable& table()
{
    static ParamTable t = ParamTable::load(default_params_path());
    return t;
}

LinkGeometry flat_link(double d2d)
{
    return link_geometry({0, 0, 1.5}, {d2d, 0, 1.5});
}

} // namespace

TEST_CASE("free space reference loss")
{
    REQUIRE_THAT(fspl_1m(1.0), Catch::Matchers::WithinAbs(32.45, 0.01));
    REQUIRE_THAT(fspl_1m(28.0),
                 Catch::Matchers::WithinAbs(32.4478 + 20.0 * std::log10(28.0), 2e-4));
    REQUIRE_THAT(fspl_1m(142.0),
                 Catch::Matchers::WithinAbs(32.4478 + 20.0 * std::log10(142.0), 2e-4));
    REQUIRE_THROWS_AS(fspl_1m(0.0), std::invalid_argument);
}

TEST_CASE("close-in path loss")
{
    const ScenarioParams umi_los = table().params_for(Scenario::UMi, ChannelCondition::Los, 28.0);
    SECTION("distance term vanishes at the 1 m reference")
    {
        REQUIRE_THAT(ci_path_loss(umi_los, flat_link(1.0), 28.0),
                     Catch::Matchers::WithinAbs(fspl_1m(28.0), 1e-12));
    }
    SECTION("UMi LOS at 142 GHz and 100 m")
    {
        const ScenarioParams p = table().params_for(Scenario::UMi, ChannelCondition::Los, 142.0);
        REQUIRE_THAT(ci_path_loss(p, flat_link(100.0), 142.0),
                     Catch::Matchers::WithinAbs(fspl_1m(142.0) + 40.0, 1e-12));
    }
    SECTION("InH NLOS at 140 GHz and 10 m adds 27 dB")
    {
        const ScenarioParams p = table().params_for(Scenario::InH, ChannelCondition::Nlos, 140.0);
        REQUIRE_THAT(ci_path_loss(p, flat_link(10.0), 140.0),
                     Catch::Matchers::WithinAbs(fspl_1m(140.0) + 27.0, 1e-12));
    }
    SECTION("reference distance violation is rejected")
    {
        REQUIRE_THROWS_AS(ci_path_loss(umi_los, flat_link(0.5), 28.0), std::invalid_argument);
    }
    SECTION("RMa has no PLE and must use the height-dependent model")
    {
        const ScenarioParams rma = table().params_for(Scenario::RMa, ChannelCondition::Los, 28.0);
        REQUIRE_THROWS_AS(ci_path_loss(rma, flat_link(100.0), 28.0), std::invalid_argument);
    }
}

TEST_CASE("height-dependent rural path loss")
{
    SECTION("35 m base station gives the nominal slopes")
    {
        REQUIRE_THAT(cih_path_loss(flat_link(100.0), 28.0, ChannelCondition::Los, 35.0),
                     Catch::Matchers::WithinAbs(fspl_1m(28.0) + 46.2, 1e-12));
        REQUIRE_THAT(cih_path_loss(flat_link(10.0), 28.0, ChannelCondition::Nlos, 35.0),
                     Catch::Matchers::WithinAbs(fspl_1m(28.0) + 30.7, 1e-12));
    }
    SECTION("taller base station flattens the LOS slope")
    {
        REQUIRE_THAT(cih_path_loss(flat_link(100.0), 28.0, ChannelCondition::Los, 70.0),
                     Catch::Matchers::WithinAbs(fspl_1m(28.0) + 23.1 * 0.97 * 2.0, 1e-12));
    }
    SECTION("non-positive heights are rejected")
    {
        REQUIRE_THROWS_AS(cih_path_loss(flat_link(100.0), 28.0, ChannelCondition::Los, 0.0),
                          std::invalid_argument);
    }
}

TEST_CASE("building penetration loss")
{
    RngStream rng(21);
    SECTION("disabled mode contributes exactly zero")
    {
        REQUIRE(o2i_loss(O2iMode::None, 28.0, table(), rng) == 0.0);
    }
    SECTION("low-loss mean stays below high-loss mean across the band")
    {
        for (double f = 0.5; f <= 150.0; f += 7.3)
        {
            const O2iModelParams& lo = table().o2i_params(false);
            const O2iModelParams& hi = table().o2i_params(true);
            REQUIRE(10.0 * std::log10(lo.a + lo.b * f * f) <
                    10.0 * std::log10(hi.a + hi.b * f * f));
        }
    }
    SECTION("sample mean converges to the parabolic mean at 28 GHz")
    {
        const O2iModelParams& lo = table().o2i_params(false);
        const double expected = 10.0 * std::log10(lo.a + lo.b * 28.0 * 28.0);
        double sum = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i)
            sum += o2i_loss(O2iMode::LowLoss, 28.0, table(), rng);
        REQUIRE_THAT(sum / n, Catch::Matchers::WithinAbs(expected, 0.1));
    }
    SECTION("never negative")
    {
        for (int i = 0; i < 1000; ++i)
            REQUIRE(o2i_loss(O2iMode::HighLoss, 0.5, table(), rng) >= 0.0);
    }
}

TEST_CASE("foliage loss is a plain product")
{
    AttenuationConfig cfg;
    REQUIRE(foliage_loss(cfg) == 0.0);
    cfg.foliage_db_per_m = 0.4;
    cfg.foliage_depth_m = 10.0;
    REQUIRE_THAT(foliage_loss(cfg), Catch::Matchers::WithinAbs(4.0, 1e-12));
    cfg.foliage_db_per_m = 1.0;
    cfg.foliage_depth_m = 0.0;
    REQUIRE(foliage_loss(cfg) == 0.0);
    cfg.foliage_depth_m = -1.0;
    REQUIRE_THROWS_AS(foliage_loss(cfg), std::invalid_argument);
}

TEST_CASE("atmospheric attenuation lookup")
{
    const AtmosphereTable t = AtmosphereTable::load(default_atmosphere_path());
    SECTION("zero distance gives zero loss")
    {
        REQUIRE(atmospheric_attenuation(60.0, 0.0, t) == 0.0);
    }
    SECTION("linear in distance")
    {
        const double a = atmospheric_attenuation(60.0, 500.0, t);
        REQUIRE_THAT(atmospheric_attenuation(60.0, 1000.0, t),
                     Catch::Matchers::WithinRel(2.0 * a, 1e-12));
    }
    SECTION("interpolation hits the table exactly at the knots")
    {
        REQUIRE_THAT(atmospheric_attenuation(60.0, 1000.0, t),
                     Catch::Matchers::WithinAbs(15.0, 1e-12));
        REQUIRE_THAT(atmospheric_attenuation(28.0, 1000.0, t),
                     Catch::Matchers::WithinAbs(0.095, 1e-12));
    }
    SECTION("frequencies outside the table coverage are rejected")
    {
        REQUIRE_THROWS_AS(atmospheric_attenuation(0.4, 100.0, t), ConfigError);
        REQUIRE_THROWS_AS(atmospheric_attenuation(151.0, 100.0, t), ConfigError);
    }
    SECTION("malformed tables are rejected")
    {
        REQUIRE_THROWS_AS(AtmosphereTable::from_samples({1.0, 1.0}, {0.1, 0.1}), ConfigError);
        REQUIRE_THROWS_AS(AtmosphereTable::from_samples({1.0}, {0.1}), ConfigError);
    }
}

TEST_CASE("shadow fading")
{
    ScenarioParams p = table().params_for(Scenario::UMi, ChannelCondition::Los, 28.0);
    SECTION("zero sigma always returns zero")
    {
        p.shadow_sigma_db = 0.0;
        ShadowingState st;
        RngStream rng(31);
        for (int i = 0; i < 100; ++i)
            REQUIRE(shadowing(p, st, flat_link(50.0 + i), rng) == 0.0);
    }
    SECTION("zero displacement repeats the previous value exactly")
    {
        ShadowingState st;
        RngStream rng(32);
        const LinkGeometry g = flat_link(80.0);
        const double first = shadowing(p, st, g, rng);
        REQUIRE(shadowing(p, st, g, rng) == first);
    }
    SECTION("distant re-draw matches the configured standard deviation")
    {
        RngStream rng(33);
        const int n = 100000;
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < n; ++i)
        {
            ShadowingState st;
            const double v = shadowing(p, st, flat_link(60.0), rng);
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / n;
        const double sd = std::sqrt(sum_sq / n - mean * mean);
        REQUIRE_THAT(sd, Catch::Matchers::WithinRel(p.shadow_sigma_db, 0.02));
    }
    SECTION("exponential autocorrelation at fractions of the correlation distance")
    {
        RngStream rng(34);
        for (double frac : {0.5, 1.0, 2.0})
        {
            const double dd = frac * p.shadow_corr_distance_m;
            const int n = 100000;
            double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
            for (int i = 0; i < n; ++i)
            {
                ShadowingState st;
                const double x = shadowing(p, st, flat_link(60.0), rng);
                const double y = shadowing(p, st, flat_link(60.0 + dd), rng);
                sx += x;
                sy += y;
                sxx += x * x;
                syy += y * y;
                sxy += x * y;
            }
            const double corr = (sxy / n - sx / n * sy / n) /
                                std::sqrt((sxx / n - sx / n * sx / n) *
                                          (syy / n - sy / n * sy / n));
            REQUIRE_THAT(corr, Catch::Matchers::WithinAbs(std::exp(-frac), 0.05));
        }
    }
}

TEST_CASE("total path loss composition")
{
    const double f = 142.0;
    AttenuationConfig cfg;
    cfg.shadowing_enabled = false;
    SECTION("with every optional term off, the total is the mean path loss")
    {
        const ScenarioParams p = table().params_for(Scenario::UMi, ChannelCondition::Los, f);
        ShadowingState st;
        RngStream rng(41);
        const PathLossBreakdown b =
            total_path_loss(p, flat_link(100.0), f, cfg, table(), st, rng);
        REQUIRE_THAT(b.total_db(),
                     Catch::Matchers::WithinAbs(fspl_1m(f) + 40.0, 1e-12));
        REQUIRE(b.o2i_db == 0.0);
        REQUIRE(b.shadowing_db == 0.0);
    }
    SECTION("a flat 1 dB/km atmosphere adds a tenth of a dB at 100 m")
    {
        AttenuationConfig with_at = cfg;
        with_at.atmospheric_enabled = true;
        with_at.atmosphere = AtmosphereTable::from_samples({0.5, 150.0}, {1.0, 1.0});
        const ScenarioParams p = table().params_for(Scenario::UMi, ChannelCondition::Los, f);
        ShadowingState st;
        RngStream rng(42);
        const PathLossBreakdown b =
            total_path_loss(p, flat_link(100.0), f, with_at, table(), st, rng);
        REQUIRE_THAT(b.total_db(),
                     Catch::Matchers::WithinAbs(fspl_1m(f) + 40.0 + 0.1, 1e-12));
    }
    SECTION("rural dispatch uses the height-dependent model")
    {
        const ScenarioParams p = table().params_for(Scenario::RMa, ChannelCondition::Los, f);
        ShadowingState st;
        RngStream rng(43);
        const PathLossBreakdown b =
            total_path_loss(p, flat_link(100.0), f, cfg, table(), st, rng, 35.0);
        REQUIRE_THAT(b.distance_term_db, Catch::Matchers::WithinAbs(46.2, 1e-12));
    }
    SECTION("breakdown components sum to the total exactly")
    {
        AttenuationConfig full;
        full.shadowing_enabled = true;
        full.o2i_mode = O2iMode::LowLoss;
        full.foliage_db_per_m = 0.4;
        full.foliage_depth_m = 7.0;
        full.atmospheric_enabled = true;
        full.atmosphere = AtmosphereTable::load(default_atmosphere_path());
        const ScenarioParams p = table().params_for(Scenario::UMa, ChannelCondition::Nlos, 73.0);
        RngStream rng(44);
        for (int i = 0; i < 100; ++i)
        {
            ShadowingState st;
            const PathLossBreakdown b =
                total_path_loss(p, flat_link(20.0 + 3.0 * i), 73.0, full, table(), st, rng);
            const double sum = b.fspl_1m_db + b.distance_term_db + b.atmospheric_db + b.o2i_db +
                               b.foliage_db + b.shadowing_db;
            REQUIRE(b.total_db() == sum);
            REQUIRE(b.o2i_db >= 0.0);
            REQUIRE(b.foliage_db >= 0.0);
            REQUIRE(b.atmospheric_db >= 0.0);
        }
    }
    SECTION("mean path loss is strictly increasing in distance")
    {
        const ScenarioParams p = table().params_for(Scenario::InF, ChannelCondition::Nlos, 140.0);
        double prev = 0.0;
        for (double d = 1.0; d <= 500.0; d *= 1.5)
        {
            ShadowingState st;
            RngStream rng(45);
            const PathLossBreakdown b = total_path_loss(p, flat_link(d), 140.0, cfg, table(), st, rng);
            REQUIRE(b.total_db() > prev);
            prev = b.total_db();
        }
    }
    SECTION("empirical shadowing spread matches the interpolated sigma")
    {
        const ScenarioParams p = table().params_for(Scenario::UMa, ChannelCondition::Nlos, 84.0);
        AttenuationConfig with_shadow;
        with_shadow.shadowing_enabled = true;
        RngStream rng(46);
        const int n = 10000;
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < n; ++i)
        {
            ShadowingState st;
            const PathLossBreakdown b =
                total_path_loss(p, flat_link(150.0), 84.0, with_shadow, table(), st, rng);
            const double dev = b.total_db() - b.mean_db();
            sum += dev;
            sum_sq += dev * dev;
        }
        const double sd = std::sqrt(sum_sq / n - (sum / n) * (sum / n));
        REQUIRE_THAT(sd, Catch::Matchers::WithinRel(7.6, 0.03));
    }
}
