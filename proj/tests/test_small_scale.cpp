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
#include <numeric>

#include "nyucsim/small_scale.hpp"
#include "nyucsim/stats.hpp"

using namespace nyucsim;

namespace {

const ParamTable& table()
{
    static ParamTable t = ParamTable::load(default_params_path());
    return t;
}

ScenarioParams params(Scenario s, ChannelCondition c, double f)
{
    return table().params_for(s, c, f);
}

LinkGeometry test_link(double d2d = 60.0, double h_bs = 10.0)
{
    return link_geometry({0, 0, h_bs}, {d2d, 0, 1.5});
}

PathLossBreakdown fixed_loss(double total_db)
{
    PathLossBreakdown b;
    b.fspl_1m_db = total_db;
    return b;
}

} // namespace

TEST_CASE("number of time clusters")
{
    RngStream rng(101);
    SECTION("rural always produces a single cluster")
    {
        const ScenarioParams p = params(Scenario::RMa, ChannelCondition::Los, 28.0);
        for (int i = 0; i < 1000; ++i)
            REQUIRE(gen_num_time_clusters(p, rng) == 1);
    }
    SECTION("urban 28 GHz counts are uniform on 1..6")
    {
        const ScenarioParams p = params(Scenario::UMi, ChannelCondition::Los, 28.0);
        const int n = 100000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
        {
            const int c = gen_num_time_clusters(p, rng);
            REQUIRE(c >= 1);
            REQUIRE(c <= 6);
            sum += c;
        }
        REQUIRE_THAT(sum / n, Catch::Matchers::WithinAbs(3.5, 0.05));
    }
    SECTION("indoor 140 GHz counts are shifted Poisson")
    {
        const ScenarioParams p = params(Scenario::InH, ChannelCondition::Los, 140.0);
        const int n = 100000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            sum += gen_num_time_clusters(p, rng);
        REQUIRE_THAT(sum / n, Catch::Matchers::WithinAbs(1.9, 0.05));
    }
}

TEST_CASE("number of subpaths per cluster")
{
    RngStream rng(102);
    SECTION("rural draws one or two")
    {
        const ScenarioParams p = params(Scenario::RMa, ChannelCondition::Nlos, 140.0);
        bool saw1 = false, saw2 = false;
        for (int i = 0; i < 1000; ++i)
        {
            const int m = gen_num_subpaths(p, rng);
            REQUIRE((m == 1 || m == 2));
            saw1 |= (m == 1);
            saw2 |= (m == 2);
        }
        REQUIRE(saw1);
        REQUIRE(saw2);
    }
    SECTION("urban 28 GHz support is exactly 1..30")
    {
        const ScenarioParams p = params(Scenario::UMi, ChannelCondition::Nlos, 28.0);
        int lo = 100, hi = 0;
        for (int i = 0; i < 100000; ++i)
        {
            const int m = gen_num_subpaths(p, rng);
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        REQUIRE(lo == 1);
        REQUIRE(hi == 30);
    }
    SECTION("indoor 140 GHz with beta = 1 follows the discrete exponential")
    {
        const ScenarioParams p = params(Scenario::InH, ChannelCondition::Los, 140.0);
        std::vector<long> draws;
        for (int i = 0; i < 100000; ++i)
            draws.push_back(gen_num_subpaths(p, rng));
        const GofResult g = chi2_integer_test(
            draws, [&](long k) { return discrete_exponential_pmf(k, p.subpath_mean); }, 30,
            "inh_140_subpaths");
        REQUIRE(g.p_value > 0.01);
    }
    SECTION("urban high band uses the discrete exponential with minimum one")
    {
        const ScenarioParams p = params(Scenario::UMi, ChannelCondition::Nlos, 140.0);
        std::vector<long> draws;
        for (int i = 0; i < 100000; ++i)
        {
            draws.push_back(gen_num_subpaths(p, rng));
            REQUIRE(draws.back() >= 1);
        }
        const GofResult g = chi2_integer_test(
            draws, [&](long k) { return discrete_exponential_pmf(k, p.subpath_mean); }, 40,
            "umi_140_subpaths");
        REQUIRE(g.p_value > 0.01);
    }
}

TEST_CASE("intra-cluster delays")
{
    RngStream rng(103);
    SECTION("first subpath always defines the cluster start")
    {
        for (Scenario sce : all_scenarios)
        {
            const double f = (sce == Scenario::InF) ? 140.0 : 28.0;
            const ScenarioParams p = params(sce, ChannelCondition::Nlos, f);
            const IntraClusterDelays d = gen_intra_cluster_delays(p, 400e6, 5, rng);
            REQUIRE(d.rho_ns.front() == 0.0);
            REQUIRE(std::is_sorted(d.rho_ns.begin(), d.rho_ns.end()));
        }
    }
    SECTION("sub-100 GHz formula value")
    {
        // third subpath with an 800 MHz baseband and exponent 0.2
        REQUIRE_THAT(intra_cluster_delay_formula_ns(3, 800e6, 0.2),
                     Catch::Matchers::WithinAbs(std::pow(2.5, 1.2), 1e-12));
        REQUIRE(intra_cluster_delay_formula_ns(1, 800e6, 0.2) == 0.0);
    }
    SECTION("drawn exponent stays within the configured bound")
    {
        const ScenarioParams p = params(Scenario::UMi, ChannelCondition::Los, 28.0);
        for (int i = 0; i < 1000; ++i)
        {
            const IntraClusterDelays d = gen_intra_cluster_delays(p, 400e6, 3, rng);
            REQUIRE(d.exponent >= 0.0);
            REQUIRE(d.exponent <= p.intra_delay_exponent_max);
        }
    }
    SECTION("factory delays have the gamma mean")
    {
        const ScenarioParams p = params(Scenario::InF, ChannelCondition::Los, 140.0);
        const IntraClusterDelays d = gen_intra_cluster_delays(p, 400e6, 100000, rng);
        const double mean =
            std::accumulate(d.rho_ns.begin(), d.rho_ns.end(), 0.0) / d.rho_ns.size();
        REQUIRE_THAT(mean, Catch::Matchers::WithinRel(1.2 * 16.3, 0.02));
    }
}

TEST_CASE("cluster excess delays")
{
    RngStream rng(104);
    SECTION("single cluster sits at least one inter-cluster interval out")
    {
        const ScenarioParams p = params(Scenario::UMi, ChannelCondition::Los, 28.0);
        std::vector<IntraClusterDelays> intra(1);
        intra[0].rho_ns = {0.0};
        for (int i = 0; i < 1000; ++i)
        {
            const std::vector<double> tau = gen_cluster_delays(p, intra, rng);
            REQUIRE(tau.size() == 1);
            REQUIRE(tau[0] >= p.mti_ns);
        }
    }
    SECTION("adjacent clusters keep the minimum gap after the previous tail")
    {
        const ScenarioParams p = params(Scenario::InH, ChannelCondition::Nlos, 28.0);
        for (int i = 0; i < 200; ++i)
        {
            std::vector<IntraClusterDelays> intra(4);
            for (auto& d : intra)
                d = gen_intra_cluster_delays(p, 400e6, 3, rng);
            const std::vector<double> tau = gen_cluster_delays(p, intra, rng);
            for (std::size_t n = 1; n < tau.size(); ++n)
                REQUIRE(tau[n] - (tau[n - 1] + intra[n - 1].rho_ns.back()) >= p.mti_ns - 1e-12);
        }
    }
    SECTION("urban 140 GHz increments average 80 ns")
    {
        const ScenarioParams p = params(Scenario::UMi, ChannelCondition::Los, 140.0);
        std::vector<IntraClusterDelays> intra(1);
        intra[0].rho_ns = {0.0};
        const int n = 100000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            sum += gen_cluster_delays(p, intra, rng)[0] - p.mti_ns;
        REQUIRE_THAT(sum / n, Catch::Matchers::WithinRel(80.0, 0.02));
    }
    SECTION("factory increments follow the gamma law")
    {
        const ScenarioParams p = params(Scenario::InF, ChannelCondition::Nlos, 140.0);
        std::vector<IntraClusterDelays> intra(1);
        intra[0].rho_ns = {0.0};
        const int n = 100000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            sum += gen_cluster_delays(p, intra, rng)[0] - p.mti_ns;
        REQUIRE_THAT(sum / n, Catch::Matchers::WithinRel(0.8 * 13.9, 0.02));
    }
    SECTION("indoor lognormal switch keeps the configured mean")
    {
        const ScenarioParams p = params(Scenario::InH, ChannelCondition::Los, 28.0);
        SmallScaleConfig cfg;
        cfg.inh_cluster_delay_lognormal = true;
        cfg.inh_lognormal_sigma = 0.5;
        std::vector<IntraClusterDelays> intra(1);
        intra[0].rho_ns = {0.0};
        const int n = 100000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
        {
            const double dtau = gen_cluster_delays(p, intra, rng, cfg)[0] - p.mti_ns;
            REQUIRE(dtau > 0.0);
            sum += dtau;
        }
        REQUIRE_THAT(sum / n, Catch::Matchers::WithinRel(p.cluster_delay_mean_ns, 0.02));
    }
}

TEST_CASE("cluster powers")
{
    RngStream rng(105);
    const ScenarioParams p = params(Scenario::UMi, ChannelCondition::Los, 28.0);
    SECTION("a single cluster carries the whole budget exactly")
    {
        for (int i = 0; i < 100; ++i)
        {
            const std::vector<double> pw = gen_cluster_powers(p, {37.0}, 2.5, rng);
            REQUIRE(pw.size() == 1);
            REQUIRE(pw[0] == 2.5);
        }
    }
    SECTION("without shadowing the powers decay monotonically in delay")
    {
        ScenarioParams quiet = p;
        quiet.cluster_shadow_db = 0.0;
        const std::vector<double> pw = gen_cluster_powers(quiet, {10.0, 60.0, 200.0}, 1.0, rng);
        REQUIRE(pw[0] > pw[1]);
        REQUIRE(pw[1] > pw[2]);
    }
    SECTION("normalization conserves the budget")
    {
        for (int i = 0; i < 200; ++i)
        {
            const std::vector<double> pw =
                gen_cluster_powers(p, {10.0, 50.0, 90.0, 200.0}, 3.75, rng);
            REQUIRE_THAT(std::accumulate(pw.begin(), pw.end(), 0.0),
                         Catch::Matchers::WithinRel(3.75, 1e-12));
        }
    }
    SECTION("mean power ratio matches the lognormal-corrected decay")
    {
        // at tau2 - tau1 = Gamma the decay is e^{-1}; the shadowing ratio
        // 10^{(Z2-Z1)/10} has mean exp((sqrt(2) sigma ln10/10)^2 / 2)
        const double c = std::log(10.0) / 10.0;
        const double expected =
            std::exp(-1.0) * std::exp(c * c * 2.0 * p.cluster_shadow_db * p.cluster_shadow_db / 2.0);
        const int n = 100000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
        {
            const std::vector<double> pw =
                gen_cluster_powers(p, {0.0, p.cluster_decay_ns}, 1.0, rng);
            sum += pw[1] / pw[0];
        }
        REQUIRE_THAT(sum / n, Catch::Matchers::WithinRel(expected, 0.02));
    }
}

TEST_CASE("subpath powers")
{
    RngStream rng(106);
    const ScenarioParams inh = params(Scenario::InH, ChannelCondition::Los, 140.0);
    SECTION("a lone subpath takes the whole cluster power")
    {
        std::vector<IntraClusterDelays> intra(1);
        intra[0].rho_ns = {0.0};
        const auto pw = gen_subpath_powers(inh, intra, {0.7}, rng, ChannelCondition::Nlos);
        REQUIRE(pw[0][0] == 0.7);
    }
    SECTION("without shadowing, powers decrease strictly with delay")
    {
        ScenarioParams quiet = inh;
        quiet.subpath_shadow_db = 0.0;
        std::vector<IntraClusterDelays> intra(1);
        intra[0].rho_ns = {0.0, 1.0, 3.0, 9.0};
        const auto pw = gen_subpath_powers(quiet, intra, {1.0}, rng, ChannelCondition::Nlos);
        for (std::size_t m = 1; m < pw[0].size(); ++m)
            REQUIRE(pw[0][m] < pw[0][m - 1]);
    }
    SECTION("the indoor 140 GHz decay constant halves power at gamma = 2 ns")
    {
        ScenarioParams quiet = inh;
        quiet.subpath_shadow_db = 0.0;
        std::vector<IntraClusterDelays> intra(1);
        intra[0].rho_ns = {0.0, 2.0};
        const auto pw = gen_subpath_powers(quiet, intra, {1.0}, rng, ChannelCondition::Nlos);
        REQUIRE_THAT(pw[0][1] / pw[0][0], Catch::Matchers::WithinRel(std::exp(-1.0), 1e-12));
    }
    SECTION("line-of-sight puts the strongest subpath first in cluster one")
    {
        std::vector<IntraClusterDelays> intra(2);
        intra[0].rho_ns = {0.0, 1.0, 2.0, 5.0, 9.0};
        intra[1].rho_ns = {0.0, 2.0};
        for (int i = 0; i < 500; ++i)
        {
            const auto pw = gen_subpath_powers(inh, intra, {0.6, 0.4}, rng, ChannelCondition::Los);
            for (std::size_t m = 1; m < pw[0].size(); ++m)
                REQUIRE(pw[0][0] >= pw[0][m]);
            REQUIRE_THAT(std::accumulate(pw[0].begin(), pw[0].end(), 0.0),
                         Catch::Matchers::WithinRel(0.6, 1e-12));
        }
    }
}

TEST_CASE("subpath phases")
{
    RngStream rng(107);
    SECTION("uniform over [0, 2pi) at the 1 percent level")
    {
        std::vector<double> phases;
        for (int i = 0; i < 25000; ++i)
        {
            const auto ph = gen_subpath_phases(rng);
            for (double v : ph)
            {
                REQUIRE(v >= 0.0);
                REQUIRE(v < 2.0 * pi);
            }
            phases.push_back(ph[0]);
        }
        const GofResult g =
            ks_test(phases, [](double x) { return uniform_cdf(x, 0.0, 2.0 * pi); }, "phases");
        REQUIRE(g.p_value > 0.01);
    }
    SECTION("polarization phases are uncorrelated")
    {
        const int n = 100000;
        double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
        for (int i = 0; i < n; ++i)
        {
            const auto ph = gen_subpath_phases(rng);
            sx += ph[0];
            sy += ph[3];
            sxy += ph[0] * ph[3];
            sxx += ph[0] * ph[0];
            syy += ph[3] * ph[3];
        }
        const double corr = (sxy / n - sx / n * sy / n) /
                            std::sqrt((sxx / n - sx / n * sx / n) * (syy / n - sy / n * sy / n));
        REQUIRE(std::abs(corr) < 0.02);
    }
    SECTION("deterministic under a fixed stream")
    {
        RngStream a(7), b(7);
        REQUIRE(gen_subpath_phases(a) == gen_subpath_phases(b));
    }
}

TEST_CASE("spatial lobes")
{
    RngStream rng(108);
    SECTION("rural lobe count is shifted Poisson with unit rate")
    {
        const ScenarioParams p = params(Scenario::RMa, ChannelCondition::Los, 28.0);
        const int n = 100000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            sum += static_cast<double>(gen_spatial_lobes(p, LobeKind::Aod, rng).size());
        REQUIRE_THAT(sum / n, Catch::Matchers::WithinAbs(2.0, 0.05));
    }
    SECTION("lobe azimuth means partition the circle")
    {
        const ScenarioParams p = params(Scenario::UMi, ChannelCondition::Los, 28.0);
        for (int i = 0; i < 2000; ++i)
        {
            const auto lobes = gen_spatial_lobes(p, LobeKind::Aoa, rng);
            const double l = static_cast<double>(lobes.size());
            for (const SpatialLobe& lobe : lobes)
            {
                REQUIRE(lobe.azimuth_deg >= 360.0 * (lobe.index - 1) / l);
                REQUIRE(lobe.azimuth_deg < 360.0 * lobe.index / l);
            }
        }
    }
    SECTION("departure lobe elevations center on the configured mean")
    {
        const ScenarioParams p = params(Scenario::UMi, ChannelCondition::Los, 140.0);
        const int n = 100000;
        double sum = 0.0;
        long count = 0;
        for (int i = 0; i < n / 10; ++i)
        {
            for (const SpatialLobe& lobe : gen_spatial_lobes(p, LobeKind::Aod, rng))
            {
                sum += lobe.elevation_deg;
                ++count;
            }
        }
        REQUIRE_THAT(sum / static_cast<double>(count), Catch::Matchers::WithinAbs(-3.2, 0.1));
    }
    SECTION("indoor lobe count is discrete uniform")
    {
        const ScenarioParams p = params(Scenario::InH, ChannelCondition::Los, 28.0);
        for (int i = 0; i < 1000; ++i)
        {
            const auto lobes = gen_spatial_lobes(p, LobeKind::Aod, rng);
            REQUIRE(lobes.size() >= 1);
            REQUIRE(lobes.size() <= 3);
        }
    }
}

TEST_CASE("subpath angle assignment")
{
    RngStream rng(109);
    const ScenarioParams p = params(Scenario::UMi, ChannelCondition::Nlos, 28.0);
    auto make_clusters = [](int n_clusters, int n_subpaths) {
        std::vector<TimeCluster> cl(static_cast<std::size_t>(n_clusters));
        for (auto& c : cl)
            c.subpaths.resize(static_cast<std::size_t>(n_subpaths));
        return cl;
    };
    SECTION("zero offsets put every subpath at its lobe mean")
    {
        ScenarioParams quiet = p;
        quiet.offset_sigma_aod_az_deg = 0.0;
        quiet.offset_sigma_zod_deg = 0.0;
        quiet.offset_sigma_aoa_az_deg = 0.0;
        quiet.offset_sigma_zoa_deg = 0.0;
        auto clusters = make_clusters(2, 4);
        const auto aod = gen_spatial_lobes(quiet, LobeKind::Aod, rng);
        const auto aoa = gen_spatial_lobes(quiet, LobeKind::Aoa, rng);
        assign_subpath_angles(aod, aoa, clusters, quiet, rng);
        for (const TimeCluster& c : clusters)
        {
            for (const Subpath& sp : c.subpaths)
            {
                const SpatialLobe& ld = aod[static_cast<std::size_t>(sp.aod_lobe - 1)];
                REQUIRE_THAT(sp.aod_az_deg, Catch::Matchers::WithinAbs(ld.azimuth_deg, 1e-12));
                REQUIRE_THAT(sp.aod_el_deg,
                             Catch::Matchers::WithinAbs(
                                 std::clamp(ld.elevation_deg, -60.0, 60.0), 1e-12));
            }
        }
    }
    SECTION("arrival azimuth offsets have the configured spread")
    {
        // fixed single lobe so the offset is directly observable
        std::vector<SpatialLobe> aod{{LobeKind::Aod, 1, 180.0, 0.0}};
        std::vector<SpatialLobe> aoa{{LobeKind::Aoa, 1, 180.0, 0.0}};
        const int n = 100000;
        auto clusters = make_clusters(1, 1);
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < n; ++i)
        {
            assign_subpath_angles(aod, aoa, clusters, p, rng);
            const double off = clusters[0].subpaths[0].aoa_az_deg - 180.0;
            sum += off;
            sum_sq += off * off;
        }
        const double sd = std::sqrt(sum_sq / n - (sum / n) * (sum / n));
        REQUIRE_THAT(sd, Catch::Matchers::WithinRel(7.5, 0.02));
    }
    SECTION("every subpath points at an existing lobe and stays in range")
    {
        auto clusters = make_clusters(3, 10);
        const auto aod = gen_spatial_lobes(p, LobeKind::Aod, rng);
        const auto aoa = gen_spatial_lobes(p, LobeKind::Aoa, rng);
        assign_subpath_angles(aod, aoa, clusters, p, rng);
        for (const TimeCluster& c : clusters)
        {
            for (const Subpath& sp : c.subpaths)
            {
                REQUIRE(sp.aod_lobe >= 1);
                REQUIRE(sp.aod_lobe <= static_cast<int>(aod.size()));
                REQUIRE(sp.aoa_lobe >= 1);
                REQUIRE(sp.aoa_lobe <= static_cast<int>(aoa.size()));
                REQUIRE(sp.aod_az_deg >= 0.0);
                REQUIRE(sp.aod_az_deg < 360.0);
                REQUIRE(std::abs(sp.aod_el_deg) <= 60.0);
                REQUIRE(std::abs(sp.aoa_el_deg) <= 60.0);
            }
        }
    }
}

TEST_CASE("absolute propagation times")
{
    SECTION("300 m line of flight is a microsecond")
    {
        std::vector<TimeCluster> clusters(1);
        clusters[0].tau_ns = 0.0;
        clusters[0].subpaths.resize(1);
        const LinkGeometry g = link_geometry({0, 0, 0}, {300, 0, 0});
        absolute_propagation_times(g, clusters);
        REQUIRE_THAT(clusters[0].subpaths[0].delay_ns,
                     Catch::Matchers::WithinAbs(300.0 / speed_of_light_m_s * 1e9, 1e-9));
        REQUIRE_THAT(clusters[0].subpaths[0].delay_ns, Catch::Matchers::WithinAbs(1000.7, 0.05));
    }
    SECTION("cluster delay and intra delay add on top")
    {
        std::vector<TimeCluster> clusters(2);
        clusters[0].tau_ns = 25.0;
        clusters[0].subpaths.resize(2);
        clusters[0].subpaths[1].rho_ns = 3.0;
        clusters[1].tau_ns = 90.0;
        clusters[1].subpaths.resize(1);
        const LinkGeometry g = link_geometry({0, 0, 0}, {30, 0, 0});
        absolute_propagation_times(g, clusters);
        const double base = 30.0 / speed_of_light_m_s * 1e9;
        REQUIRE_THAT(clusters[0].subpaths[0].delay_ns, Catch::Matchers::WithinAbs(base + 25.0, 1e-12));
        REQUIRE_THAT(clusters[0].subpaths[1].delay_ns,
                     Catch::Matchers::WithinAbs(base + 28.0, 1e-12));
        REQUIRE(std::is_sorted(clusters[0].subpaths.begin(), clusters[0].subpaths.end(),
                               [](const Subpath& a, const Subpath& b) {
                                   return a.delay_ns < b.delay_ns;
                               }));
        REQUIRE_THAT(clusters[1].subpaths[0].delay_ns, Catch::Matchers::WithinAbs(base + 90.0, 1e-12));
    }
}

namespace {

Subpath make_subpath(double delay_ns, double power_mw, double phase_tt, double aod_az = 10.0,
                     double aoa_az = 200.0)
{
    Subpath sp;
    sp.delay_ns = delay_ns;
    sp.power_mw = power_mw;
    sp.phase_rad = {phase_tt, 0.1, 0.2, 0.3};
    sp.aod_az_deg = aod_az;
    sp.aoa_az_deg = aoa_az;
    sp.aod_el_deg = 5.0;
    sp.aoa_el_deg = -5.0;
    return sp;
}

} // namespace

TEST_CASE("bandwidth adjustment")
{
    SECTION("infinite bandwidth keeps every subpath")
    {
        std::vector<Subpath> in{make_subpath(0.0, 1.0, 0.0), make_subpath(0.01, 1.0, 0.0)};
        const auto out = bandwidth_adjust(in, std::numeric_limits<double>::infinity());
        REQUIRE(out.size() == 2);
    }
    SECTION("opposite phases cancel inside one bin")
    {
        std::vector<Subpath> in{make_subpath(0.0, 1.0, 0.0), make_subpath(0.1, 1.0, pi)};
        const auto out = bandwidth_adjust(in, 1e9); // 1 ns bins
        REQUIRE(out.size() == 1);
        REQUIRE_THAT(out[0].power_mw, Catch::Matchers::WithinAbs(0.0, 1e-24));
    }
    SECTION("aligned phases quadruple the power of one subpath")
    {
        std::vector<Subpath> in{make_subpath(0.0, 1.0, 0.5), make_subpath(0.1, 1.0, 0.5)};
        const auto out = bandwidth_adjust(in, 1e9);
        REQUIRE(out.size() == 1);
        REQUIRE_THAT(out[0].power_mw, Catch::Matchers::WithinRel(4.0, 1e-12));
        // merged delay is the power-weighted member mean
        REQUIRE_THAT(out[0].delay_ns, Catch::Matchers::WithinAbs(0.05, 1e-12));
    }
    SECTION("bins are anchored at the earliest subpath")
    {
        // delays 5.0 and 5.9 share the [5.0, 6.0) bin; 6.1 does not
        std::vector<Subpath> in{make_subpath(5.0, 1.0, 0.0), make_subpath(5.9, 1.0, 0.0),
                                make_subpath(6.1, 1.0, 0.0)};
        const auto out = bandwidth_adjust(in, 1e9);
        REQUIRE(out.size() == 2);
    }
    SECTION("merged attributes come from the strongest member")
    {
        std::vector<Subpath> in{make_subpath(0.0, 1.0, 0.0, 11.0, 201.0),
                                make_subpath(0.2, 9.0, 0.0, 22.0, 202.0)};
        const auto out = bandwidth_adjust(in, 1e9);
        REQUIRE(out.size() == 1);
        REQUIRE(out[0].aod_az_deg == 22.0);
        REQUIRE(out[0].aoa_az_deg == 202.0);
        // power-weighted delay leans toward the strong member
        REQUIRE_THAT(out[0].delay_ns, Catch::Matchers::WithinAbs(0.18, 1e-12));
    }
}

TEST_CASE("line-of-sight alignment")
{
    SECTION("first subpath departs along the link bearing (measurement convention)")
    {
        // Rx due east of the Tx at the same height
        const LinkGeometry g = link_geometry({0, 0, 5}, {50, 0, 5});
        std::vector<Subpath> sp{make_subpath(0.0, 1.0, 0.0), make_subpath(3.0, 0.5, 0.0)};
        const double rel_aod = wrap_pm180(sp[1].aod_az_deg - sp[0].aod_az_deg);
        align_los(sp, g, ChannelCondition::Los);
        REQUIRE_THAT(sp[0].aod_az_deg, Catch::Matchers::WithinAbs(90.0, 1e-9));
        REQUIRE_THAT(sp[0].aod_el_deg, Catch::Matchers::WithinAbs(0.0, 1e-9));
        // reciprocity of the first subpath
        REQUIRE_THAT(wrap_360(sp[0].aoa_az_deg - sp[0].aod_az_deg),
                     Catch::Matchers::WithinAbs(180.0, 1e-9));
        REQUIRE_THAT(sp[0].aoa_el_deg, Catch::Matchers::WithinAbs(-sp[0].aod_el_deg, 1e-9));
        // relative structure is preserved
        REQUIRE_THAT(wrap_pm180(sp[1].aod_az_deg - sp[0].aod_az_deg),
                     Catch::Matchers::WithinAbs(rel_aod, 1e-9));
    }
    SECTION("non-line-of-sight input is untouched")
    {
        const LinkGeometry g = link_geometry({0, 0, 5}, {50, 0, 5});
        std::vector<Subpath> sp{make_subpath(0.0, 1.0, 0.0), make_subpath(3.0, 0.5, 0.0)};
        const std::vector<Subpath> before = sp;
        align_los(sp, g, ChannelCondition::Nlos);
        for (std::size_t i = 0; i < sp.size(); ++i)
        {
            REQUIRE(sp[i].aod_az_deg == before[i].aod_az_deg);
            REQUIRE(sp[i].aoa_az_deg == before[i].aoa_az_deg);
            REQUIRE(sp[i].aod_el_deg == before[i].aod_el_deg);
            REQUIRE(sp[i].aoa_el_deg == before[i].aoa_el_deg);
        }
    }
}

TEST_CASE("dynamic range pruning")
{
    std::vector<Subpath> sp{make_subpath(0.0, dbm_to_mw(0.0), 0.0),
                            make_subpath(1.0, dbm_to_mw(-10.0), 0.0),
                            make_subpath(2.0, dbm_to_mw(-40.0), 0.0)};
    SECTION("a 30 dB span keeps the first two")
    {
        const auto out = prune_dynamic_range(sp, 30.0);
        REQUIRE(out.size() == 2);
        REQUIRE(out[0].delay_ns == 0.0);
        REQUIRE(out[1].delay_ns == 1.0);
    }
    SECTION("zero span keeps only the strongest")
    {
        const auto out = prune_dynamic_range(sp, 0.0);
        REQUIRE(out.size() == 1);
        REQUIRE(out[0].delay_ns == 0.0);
    }
    SECTION("infinite span keeps everything")
    {
        const auto out = prune_dynamic_range(sp, std::numeric_limits<double>::infinity());
        REQUIRE(out.size() == 3);
    }
    SECTION("an empty set is rejected")
    {
        REQUIRE_THROWS_AS(prune_dynamic_range({}, 30.0), std::invalid_argument);
    }
}

TEST_CASE("cross-polarization ratios")
{
    RngStream rng(110);
    SECTION("zero spread gives the mean exactly, in linear terms")
    {
        ScenarioParams p = params(Scenario::UMi, ChannelCondition::Los, 28.0);
        p.xpd_mean_db = 10.0;
        p.xpd_sigma_db = 0.0;
        std::vector<Subpath> sp{make_subpath(0.0, 1.0, 0.0)};
        gen_xpd(sp, p, rng);
        for (double k : sp[0].xpd_linear)
            REQUIRE_THAT(k, Catch::Matchers::WithinRel(10.0, 1e-12));
    }
    SECTION("ratios are always positive and the dB mean matches")
    {
        const ScenarioParams p = params(Scenario::UMi, ChannelCondition::Nlos, 140.0);
        std::vector<Subpath> sp(100000, make_subpath(0.0, 1.0, 0.0));
        gen_xpd(sp, p, rng);
        double sum = 0.0;
        for (const Subpath& s : sp)
        {
            for (double k : s.xpd_linear)
                REQUIRE(k > 0.0);
            sum += s.xpd_db[0];
        }
        REQUIRE_THAT(sum / static_cast<double>(sp.size()),
                     Catch::Matchers::WithinRel(p.xpd_mean_db, 0.01));
    }
}

TEST_CASE("coordinate conversion")
{
    SECTION("the measurement y-axis maps to 90 degrees azimuth in GCS")
    {
        const GcsAngles g = nyu_to_gcs({0.0, 0.0});
        REQUIRE_THAT(g.azimuth_deg, Catch::Matchers::WithinAbs(90.0, 1e-12));
        REQUIRE_THAT(g.zenith_deg, Catch::Matchers::WithinAbs(90.0, 1e-12));
    }
    SECTION("straight up is zero zenith")
    {
        REQUIRE_THAT(nyu_to_gcs({123.0, 90.0}).zenith_deg, Catch::Matchers::WithinAbs(0.0, 1e-12));
    }
    SECTION("round trip is the identity")
    {
        RngStream rng(111);
        for (int i = 0; i < 10000; ++i)
        {
            const NyuAngles a{rng.uniform(0.0, 360.0), rng.uniform(-90.0, 90.0)};
            const NyuAngles b = gcs_to_nyu(nyu_to_gcs(a));
            REQUIRE_THAT(b.azimuth_deg, Catch::Matchers::WithinAbs(a.azimuth_deg, 1e-9));
            REQUIRE_THAT(b.elevation_deg, Catch::Matchers::WithinAbs(a.elevation_deg, 1e-9));
        }
    }
}

TEST_CASE("full realization generation")
{
    const CarrierConfig carrier(28.0, 800e6);
    const SmallScaleConfig cfg;
    SECTION("rural realizations have one cluster with at most two subpaths")
    {
        const ScenarioParams p = params(Scenario::RMa, ChannelCondition::Nlos, 28.0);
        RngStream rng(112);
        for (int i = 0; i < 200; ++i)
        {
            RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
            const ChannelRealization r =
                generate_realization(p, test_link(), carrier, fixed_loss(100.0), cfg, sub);
            REQUIRE(r.clusters.size() == 1);
            REQUIRE(r.clusters[0].subpaths.size() <= 2);
        }
    }
    SECTION("identical seeds give identical realizations")
    {
        const ScenarioParams p = params(Scenario::UMi, ChannelCondition::Los, 28.0);
        RngStream a(113), b(113);
        const ChannelRealization r1 =
            generate_realization(p, test_link(), carrier, fixed_loss(100.0), cfg, a);
        const ChannelRealization r2 =
            generate_realization(p, test_link(), carrier, fixed_loss(100.0), cfg, b);
        REQUIRE(r1.resolvable.size() == r2.resolvable.size());
        for (std::size_t i = 0; i < r1.resolvable.size(); ++i)
        {
            REQUIRE(r1.resolvable[i].delay_ns == r2.resolvable[i].delay_ns);
            REQUIRE(r1.resolvable[i].power_mw == r2.resolvable[i].power_mw);
            REQUIRE(r1.resolvable[i].aoa_az_gcs_deg == r2.resolvable[i].aoa_az_gcs_deg);
            REQUIRE(r1.resolvable[i].xpd_db == r2.resolvable[i].xpd_db);
        }
    }
    SECTION("urban 140 GHz NLOS cluster count averages two")
    {
        const ScenarioParams p = params(Scenario::UMi, ChannelCondition::Nlos, 140.0);
        const CarrierConfig c140(140.0, 800e6);
        RngStream rng(114);
        double sum = 0.0;
        const int n = 1000;
        for (int i = 0; i < n; ++i)
        {
            RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
            sum += static_cast<double>(
                generate_realization(p, test_link(), c140, fixed_loss(110.0), cfg, sub)
                    .clusters.size());
        }
        REQUIRE_THAT(sum / n, Catch::Matchers::WithinAbs(2.0, 0.1));
    }
    SECTION("power budget conservation and invariants across scenarios")
    {
        RngStream rng(115);
        int index = 0;
        for (Scenario sce : all_scenarios)
        {
            for (ChannelCondition cond : all_conditions)
            {
                const double f = (sce == Scenario::InF) ? 140.0 : 28.0;
                const ScenarioParams p = params(sce, cond, f);
                const CarrierConfig c(f, 800e6);
                for (int i = 0; i < 1000; ++i)
                {
                    RngStream sub = rng.substream(static_cast<std::uint64_t>(index++));
                    const ChannelRealization r =
                        generate_realization(p, test_link(), c, fixed_loss(100.0), cfg, sub);
                    // budget: 30 dBm - 100 dB = -70 dBm
                    REQUIRE_THAT(r.pre_merge_power_mw(),
                                 Catch::Matchers::WithinRel(dbm_to_mw(-70.0), 1e-9));
                    REQUIRE_FALSE(r.resolvable.empty());
                    // cluster delays strictly increase with the minimum gap
                    for (std::size_t n = 1; n < r.clusters.size(); ++n)
                        REQUIRE(r.clusters[n].tau_ns >
                                r.clusters[n - 1].tau_ns + p.mti_ns - 1e-9);
                    for (const Subpath& sp : r.resolvable)
                    {
                        REQUIRE(sp.zod_deg >= 0.0);
                        REQUIRE(sp.zod_deg <= 180.0);
                        REQUIRE(sp.zoa_deg >= 0.0);
                        REQUIRE(sp.zoa_deg <= 180.0);
                        REQUIRE(sp.aod_az_gcs_deg >= 0.0);
                        REQUIRE(sp.aod_az_gcs_deg < 360.0);
                        REQUIRE(sp.aoa_az_gcs_deg >= 0.0);
                        REQUIRE(sp.aoa_az_gcs_deg < 360.0);
                        REQUIRE(std::isfinite(sp.power_mw));
                        REQUIRE(sp.power_mw >= 0.0);
                    }
                    if (cond == ChannelCondition::Los)
                    {
                        const LinkGeometry g = test_link();
                        const NyuAngles aod = gcs_to_nyu(
                            {r.resolvable[0].aod_az_gcs_deg, r.resolvable[0].zod_deg});
                        REQUIRE_THAT(aod.azimuth_deg,
                                     Catch::Matchers::WithinAbs(wrap_360(90.0 - g.bearing_deg),
                                                                1e-6));
                        REQUIRE_THAT(aod.elevation_deg,
                                     Catch::Matchers::WithinAbs(g.elevation_deg, 1e-6));
                    }
                }
            }
        }
    }
    SECTION("doppler follows the motion along the arrival direction")
    {
        const ScenarioParams p = params(Scenario::UMi, ChannelCondition::Los, 28.0);
        const LinkGeometry g = link_geometry({0, 0, 10}, {60, 0, 1.5}, {20, 0, 0});
        RngStream rng(116);
        const ChannelRealization r =
            generate_realization(p, g, carrier, fixed_loss(100.0), cfg, rng);
        const double lambda = carrier.wavelength_m();
        for (const Subpath& sp : r.resolvable)
        {
            const Vec3 arr = gcs_unit_vector(sp.aoa_az_gcs_deg, sp.zoa_deg);
            REQUIRE_THAT(sp.doppler_hz,
                         Catch::Matchers::WithinAbs(20.0 * arr.x / lambda, 1e-9));
            REQUIRE(std::abs(sp.doppler_hz) <= 20.0 / lambda + 1e-9);
        }
    }
}
