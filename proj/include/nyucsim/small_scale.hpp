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
// Time-cluster / spatial-lobe generation: number of clusters and subpaths,
// delays, powers, phases, lobes and per-subpath angles, then bandwidth
// merging, LOS alignment, dynamic-range pruning, cross-polarization ratios
// and conversion to the global coordinate system.
//
// Angle conventions: generation runs in the measurement convention (azimuth
// from the y-axis, clockwise; elevation from the horizon) and the final
// resolvable subpaths additionally carry global-coordinate angles (azimuth
// from the x-axis, counterclockwise; zenith from the z-axis).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "nyucsim/common.hpp"
#include "nyucsim/geometry.hpp"
#include "nyucsim/large_scale.hpp"
#include "nyucsim/params.hpp"
#include "nyucsim/rng.hpp"
#include "nyucsim/types.hpp"

namespace nyucsim {

enum class LobeKind { Aod, Aoa };

struct SpatialLobe {
    LobeKind kind{};
    int index = 1; // 1-based; azimuth mean lies in the index-th sector of 360/L
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;
};

/// One multipath component. Angles in the measurement convention are always
/// populated; the global-coordinate fields and XPD/Doppler are filled for
/// resolvable subpaths at the end of the generation chain.
struct Subpath {
    int cluster = 1; // n, 1-based
    int index = 1;   // m, 1-based within the cluster
    double rho_ns = 0.0;   // intra-cluster excess delay
    double delay_ns = 0.0; // absolute propagation delay
    double power_mw = 0.0;
    std::array<double, 4> phase_rad{}; // theta-theta, theta-phi, phi-theta, phi-phi

    double aod_az_deg = 0.0, aod_el_deg = 0.0; // measurement convention
    double aoa_az_deg = 0.0, aoa_el_deg = 0.0;
    int aod_lobe = 1, aoa_lobe = 1;

    double aod_az_gcs_deg = 0.0, zod_deg = 0.0; // global coordinate system
    double aoa_az_gcs_deg = 0.0, zoa_deg = 0.0;

    std::array<double, 3> xpd_db{};     // theta-phi, phi-theta, phi-phi
    std::array<double, 3> xpd_linear{}; // 10^(dB/10)
    double doppler_hz = 0.0;

    double amplitude() const { return std::sqrt(power_mw); }
};

struct TimeCluster {
    int index = 1;           // n, 1-based
    double tau_ns = 0.0;     // cluster excess delay
    double power_mw = 0.0;   // cluster power after normalization
    double delay_exponent = 0.0; // X_n used by the sub-100 GHz delay formula
    std::vector<Subpath> subpaths;
};

struct SmallScaleConfig {
    double tx_power_dbm = 30.0;
    /// Baseband bandwidth for the sub-100 GHz intra-cluster delay formula;
    /// 0 selects rf_bandwidth / 2 (complex baseband of the RF bandwidth).
    double baseband_bandwidth_hz = 0.0;
    /// Receiver dynamic range: the pruning span is
    /// max(min_prune_span_db, max_measurable_pl_db - mean path loss).
    double max_measurable_pl_db = 190.0;
    double min_prune_span_db = 30.0;
    /// The indoor cluster-delay law can be exponential or lognormal without a
    /// published selection rule; exponential is the default. When enabled, the
    /// lognormal is parameterized to keep the configured mean.
    bool inh_cluster_delay_lognormal = false;
    double inh_lognormal_sigma = 0.5;
};

struct ChannelRealization {
    Scenario scenario{};
    ChannelCondition condition{};
    double frequency_ghz = 0.0;
    double rf_bandwidth_hz = 0.0;
    LinkGeometry geometry;
    std::uint64_t drop_id = 0;

    double p_r_mw = 0.0;             // total received power budget
    double total_path_loss_db = 0.0;
    double prune_threshold_db = 0.0;

    std::vector<TimeCluster> clusters;   // pre-merge structure (steps 3-12)
    std::vector<SpatialLobe> aod_lobes;
    std::vector<SpatialLobe> aoa_lobes;
    std::vector<Subpath> resolvable;     // post merge/alignment/pruning (steps 13-16)

    double pre_merge_power_mw() const
    {
        double s = 0.0;
        for (const TimeCluster& c : clusters)
            for (const Subpath& sp : c.subpaths)
                s += sp.power_mw;
        return s;
    }

    double resolvable_power_mw() const
    {
        double s = 0.0;
        for (const Subpath& sp : resolvable)
            s += sp.power_mw;
        return s;
    }
};

// ---------------------------------------------------------------- sampling

/// Discrete exponential DE(mu): max(1, round(X)) with X ~ Exp(mu).
/// pmf: P(1) = 1 - exp(-1.5/mu), P(k) = exp(-(k-.5)/mu) - exp(-(k+.5)/mu).
inline long discrete_exponential(double mean, RngStream& rng)
{
    return std::max(1l, std::lround(rng.exponential(mean)));
}

/// Generation step: number of time clusters.
inline int gen_num_time_clusters(const ScenarioParams& params, RngStream& rng)
{
    if (is_indoor(params.scenario))
        return static_cast<int>(rng.poisson(params.cluster_rate)) + 1;
    return static_cast<int>(rng.uniform_int(1, std::lround(params.cluster_count_max)));
}

/// Generation step: number of subpaths in one cluster.
inline int gen_num_subpaths(const ScenarioParams& params, RngStream& rng)
{
    if (params.scenario == Scenario::RMa)
        return static_cast<int>(rng.uniform_int(1, std::lround(params.subpath_count_max)));
    if (is_indoor(params.scenario))
    {
        // composite (1-beta) point mass at 1 + beta DE(mu_s)
        if (rng.uniform01() < params.subpath_beta)
            return static_cast<int>(discrete_exponential(params.subpath_mean, rng));
        return 1;
    }
    if (params.high_band())
        return static_cast<int>(discrete_exponential(params.subpath_mean, rng));
    return static_cast<int>(rng.uniform_int(1, std::lround(params.subpath_count_max)));
}

/// Sub-100 GHz intra-cluster delay formula, in nanoseconds:
/// [(m-1)/B_bb]^(1+X_n) with the bracket expressed in ns.
inline double intra_cluster_delay_formula_ns(int m, double baseband_bandwidth_hz, double exponent_x)
{
    if (!(baseband_bandwidth_hz > 0.0))
        throw std::invalid_argument("intra-cluster delay formula: bandwidth must be positive");
    const double base_ns = (static_cast<double>(m - 1) / baseband_bandwidth_hz) * 1e9;
    return std::pow(base_ns, 1.0 + exponent_x);
}

struct IntraClusterDelays {
    std::vector<double> rho_ns; // sorted ascending, rho[0] == 0
    double exponent = 0.0;      // X_n (sub-100 GHz outdoor only)
};

/// Generation step: intra-cluster subpath excess delays for one cluster.
/// Draws are sorted ascending and shifted so the first subpath defines the
/// cluster start (rho_1 = 0).
inline IntraClusterDelays gen_intra_cluster_delays(const ScenarioParams& params,
                                                   double baseband_bandwidth_hz, int m_n,
                                                   RngStream& rng)
{
    if (m_n < 1)
        throw std::invalid_argument("gen_intra_cluster_delays: need at least one subpath");
    IntraClusterDelays out;
    out.rho_ns.resize(static_cast<std::size_t>(m_n));

    const Scenario sce = params.scenario;
    if (!is_indoor(sce) && !params.high_band())
    {
        // deterministic grid raised to 1+X_n, X_n ~ U(0, X) per cluster
        out.exponent = params.intra_delay_exponent_max * rng.uniform01();
        for (int m = 1; m <= m_n; ++m)
            out.rho_ns[static_cast<std::size_t>(m - 1)] =
                intra_cluster_delay_formula_ns(m, baseband_bandwidth_hz, out.exponent);
        return out; // grid is already sorted with rho_1 = 0
    }

    for (double& r : out.rho_ns)
    {
        if (sce == Scenario::InF)
            r = rng.gamma(params.intra_delay_shape, params.intra_delay_scale_ns);
        else
            r = rng.exponential(params.intra_delay_mean_ns);
    }
    std::sort(out.rho_ns.begin(), out.rho_ns.end());
    const double first = out.rho_ns.front();
    for (double& r : out.rho_ns)
        r -= first;
    return out;
}

/// Generation step: cluster excess delays through the recursion
/// tau_n = tau_{n-1} + rho_{last,n-1} + dtau_n + MTI with tau_0 = 0.
inline std::vector<double> gen_cluster_delays(const ScenarioParams& params,
                                              const std::vector<IntraClusterDelays>& intra,
                                              RngStream& rng,
                                              const SmallScaleConfig& cfg = {})
{
    std::vector<double> tau(intra.size());
    double prev_tau = 0.0;
    double prev_last_rho = 0.0;
    for (std::size_t n = 0; n < intra.size(); ++n)
    {
        double dtau;
        if (params.scenario == Scenario::InF)
            dtau = rng.gamma(params.cluster_delay_shape, params.cluster_delay_scale_ns);
        else if (params.scenario == Scenario::InH && cfg.inh_cluster_delay_lognormal)
        {
            const double s = cfg.inh_lognormal_sigma;
            dtau = rng.lognormal(std::log(params.cluster_delay_mean_ns) - 0.5 * s * s, s);
        }
        else
            dtau = rng.exponential(params.cluster_delay_mean_ns);

        tau[n] = prev_tau + prev_last_rho + dtau + params.mti_ns;
        prev_tau = tau[n];
        prev_last_rho = intra[n].rho_ns.empty() ? 0.0 : intra[n].rho_ns.back();
    }
    return tau;
}

/// Generation step: cluster powers, exponential decay over tau with lognormal
/// shadowing, normalized so they sum to the received power budget.
inline std::vector<double> gen_cluster_powers(const ScenarioParams& params,
                                              const std::vector<double>& tau_ns, double p_r_mw,
                                              RngStream& rng)
{
    if (!(p_r_mw > 0.0))
        throw std::invalid_argument("gen_cluster_powers: received power must be positive");
    std::vector<double> p(tau_ns.size());
    double sum = 0.0;
    for (std::size_t n = 0; n < tau_ns.size(); ++n)
    {
        const double z = params.cluster_shadow_db * rng.normal();
        p[n] = std::exp(-tau_ns[n] / params.cluster_decay_ns) * db_to_linear(z);
        sum += p[n];
    }
    if (sum <= 0.0)
    {
        std::fill(p.begin(), p.end(), p_r_mw / static_cast<double>(p.size()));
        return p;
    }
    for (double& v : p)
        v = (v / sum) * p_r_mw;
    return p;
}

/// Generation step: subpath powers within each cluster, normalized per cluster.
/// In LOS the strongest subpath of the first cluster is swapped to the front,
/// so the earliest subpath is the cluster-1 maximum that step 13 aligns.
inline std::vector<std::vector<double>> gen_subpath_powers(
    const ScenarioParams& params, const std::vector<IntraClusterDelays>& intra,
    const std::vector<double>& cluster_power_mw, RngStream& rng,
    ChannelCondition condition)
{
    std::vector<std::vector<double>> powers(intra.size());
    for (std::size_t n = 0; n < intra.size(); ++n)
    {
        const std::vector<double>& rho = intra[n].rho_ns;
        std::vector<double>& pi = powers[n];
        pi.resize(rho.size());
        double sum = 0.0;
        for (std::size_t m = 0; m < rho.size(); ++m)
        {
            const double u = params.subpath_shadow_db * rng.normal();
            pi[m] = std::exp(-rho[m] / params.subpath_decay_ns) * db_to_linear(u);
            sum += pi[m];
        }
        if (condition == ChannelCondition::Los && n == 0 && !pi.empty())
        {
            const auto max_it = std::max_element(pi.begin(), pi.end());
            std::iter_swap(pi.begin(), max_it);
        }
        if (sum <= 0.0)
        {
            std::fill(pi.begin(), pi.end(),
                      cluster_power_mw[n] / static_cast<double>(pi.size()));
            continue;
        }
        for (double& v : pi)
            v = (v / sum) * cluster_power_mw[n];
    }
    return powers;
}

/// Generation step: one phase per polarization pair, i.i.d. uniform [0, 2pi).
inline std::array<double, 4> gen_subpath_phases(RngStream& rng)
{
    std::array<double, 4> ph;
    for (double& v : ph)
        v = rng.uniform(0.0, 2.0 * pi);
    return ph;
}

/// Generation step: lobe count, sector-uniform azimuth means and Gaussian
/// elevation means. AOD lobes use the ZOD elevation statistics, AOA lobes the
/// ZOA ones.
inline std::vector<SpatialLobe> gen_spatial_lobes(const ScenarioParams& params, LobeKind kind,
                                                  RngStream& rng)
{
    const double rate = (kind == LobeKind::Aod) ? params.lobe_rate_aod : params.lobe_rate_aoa;
    long count;
    if (params.scenario == Scenario::InH)
        count = rng.uniform_int(1, std::lround(rate));
    else
        count = rng.poisson(rate) + 1;

    const double mean_el = (kind == LobeKind::Aod) ? params.lobe_elev_mean_zod_deg
                                                   : params.lobe_elev_mean_zoa_deg;
    const double sigma_el = (kind == LobeKind::Aod) ? params.lobe_elev_sigma_zod_deg
                                                    : params.lobe_elev_sigma_zoa_deg;

    std::vector<SpatialLobe> lobes(static_cast<std::size_t>(count));
    for (long i = 1; i <= count; ++i)
    {
        SpatialLobe& l = lobes[static_cast<std::size_t>(i - 1)];
        l.kind = kind;
        l.index = static_cast<int>(i);
        const double lo = 360.0 * static_cast<double>(i - 1) / static_cast<double>(count);
        const double hi = 360.0 * static_cast<double>(i) / static_cast<double>(count);
        l.azimuth_deg = rng.uniform(lo, hi);
        l.elevation_deg = rng.normal(mean_el, sigma_el);
    }
    return lobes;
}

/// Generation step: assign every subpath a departure and an arrival
/// lobe (uniformly and independently) and offset the lobe mean by Gaussian
/// angular offsets. Azimuths wrap to [0, 360), elevations clamp to +-60
/// before coordinate conversion.
inline void assign_subpath_angles(const std::vector<SpatialLobe>& aod_lobes,
                                  const std::vector<SpatialLobe>& aoa_lobes,
                                  std::vector<TimeCluster>& clusters,
                                  const ScenarioParams& params, RngStream& rng)
{
    if (aod_lobes.empty() || aoa_lobes.empty())
        throw std::invalid_argument("assign_subpath_angles: lobes must be generated first");
    for (TimeCluster& c : clusters)
    {
        for (Subpath& sp : c.subpaths)
        {
            const auto aod_pick = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<long>(aod_lobes.size()) - 1));
            const SpatialLobe& ld = aod_lobes[aod_pick];
            sp.aod_lobe = ld.index;
            sp.aod_az_deg = wrap_360(ld.azimuth_deg + rng.normal(0.0, params.offset_sigma_aod_az_deg));
            sp.aod_el_deg = std::clamp(ld.elevation_deg + rng.normal(0.0, params.offset_sigma_zod_deg),
                                       -60.0, 60.0);

            const auto aoa_pick = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<long>(aoa_lobes.size()) - 1));
            const SpatialLobe& la = aoa_lobes[aoa_pick];
            sp.aoa_lobe = la.index;
            sp.aoa_az_deg = wrap_360(la.azimuth_deg + rng.normal(0.0, params.offset_sigma_aoa_az_deg));
            sp.aoa_el_deg = std::clamp(la.elevation_deg + rng.normal(0.0, params.offset_sigma_zoa_deg),
                                       -60.0, 60.0);
        }
    }
}

/// Step 11: absolute delay = line-of-flight time + cluster delay + intra delay.
inline void absolute_propagation_times(const LinkGeometry& geom, std::vector<TimeCluster>& clusters)
{
    const double base_ns = geom.d3d_m / speed_of_light_m_s * 1e9;
    for (TimeCluster& c : clusters)
        for (Subpath& sp : c.subpaths)
            sp.delay_ns = base_ns + c.tau_ns + sp.rho_ns;
}

// ------------------------------------------------------- steps 13 to 16

/// Step 13a: vector-combines subpaths that fall into the same delay bin of
/// width 1/rf_bandwidth (bins anchored at the earliest subpath). The merged
/// power is the coherent |sum of amplitude * exp(j phase_theta_theta)|^2, the
/// merged delay the power-weighted member mean, and every other attribute is
/// inherited from the strongest member. A non-positive bin width (infinite
/// bandwidth) leaves the list untouched.
inline std::vector<Subpath> bandwidth_adjust(std::vector<Subpath> subpaths, double rf_bandwidth_hz)
{
    if (subpaths.empty())
        return subpaths;
    std::sort(subpaths.begin(), subpaths.end(),
              [](const Subpath& a, const Subpath& b) { return a.delay_ns < b.delay_ns; });
    const double bin_ns = (rf_bandwidth_hz > 0.0 && std::isfinite(rf_bandwidth_hz))
                              ? 1e9 / rf_bandwidth_hz
                              : 0.0;
    if (bin_ns <= 0.0)
        return subpaths;

    std::vector<Subpath> merged;
    const double t0 = subpaths.front().delay_ns;
    std::size_t i = 0;
    while (i < subpaths.size())
    {
        const auto bin = static_cast<std::uint64_t>((subpaths[i].delay_ns - t0) / bin_ns);
        std::size_t j = i;
        std::complex<double> sum(0.0, 0.0);
        double power_sum = 0.0;
        double delay_weighted = 0.0;
        std::size_t strongest = i;
        while (j < subpaths.size() &&
               static_cast<std::uint64_t>((subpaths[j].delay_ns - t0) / bin_ns) == bin)
        {
            const Subpath& sp = subpaths[j];
            sum += sp.amplitude() * std::polar(1.0, sp.phase_rad[0]);
            power_sum += sp.power_mw;
            delay_weighted += sp.power_mw * sp.delay_ns;
            if (sp.power_mw > subpaths[strongest].power_mw)
                strongest = j;
            ++j;
        }
        Subpath rep = subpaths[strongest];
        rep.power_mw = std::norm(sum);
        rep.delay_ns = (power_sum > 0.0) ? delay_weighted / power_sum : subpaths[i].delay_ns;
        merged.push_back(rep);
        i = j;
    }
    return merged;
}

/// Step 13b: in LOS the earliest subpath must depart along the Tx->Rx
/// geometry and arrive from the reciprocal direction. The whole angle set is
/// rotated by the correction applied to that first subpath so the relative
/// structure survives. NLOS input is returned unchanged.
inline void align_los(std::vector<Subpath>& subpaths, const LinkGeometry& geom,
                      ChannelCondition condition)
{
    if (condition != ChannelCondition::Los || subpaths.empty())
        return;

    // geometry to measurement convention: azimuth from y-axis, clockwise
    const double bearing_meas = wrap_360(90.0 - geom.bearing_deg);
    const double target_aod_az = bearing_meas;
    const double target_aod_el = geom.elevation_deg;
    const double target_aoa_az = wrap_360(bearing_meas + 180.0);
    const double target_aoa_el = -geom.elevation_deg;

    const Subpath& first = subpaths.front();
    const double d_aod_az = wrap_pm180(target_aod_az - first.aod_az_deg);
    const double d_aod_el = target_aod_el - first.aod_el_deg;
    const double d_aoa_az = wrap_pm180(target_aoa_az - first.aoa_az_deg);
    const double d_aoa_el = target_aoa_el - first.aoa_el_deg;

    for (Subpath& sp : subpaths)
    {
        sp.aod_az_deg = wrap_360(sp.aod_az_deg + d_aod_az);
        sp.aod_el_deg = reflect_elevation(sp.aod_el_deg + d_aod_el);
        sp.aoa_az_deg = wrap_360(sp.aoa_az_deg + d_aoa_az);
        sp.aoa_el_deg = reflect_elevation(sp.aoa_el_deg + d_aoa_el);
    }
}

/// Step 14: drop subpaths weaker than the strongest minus the dynamic-range
/// span. The strongest subpath always survives.
inline std::vector<Subpath> prune_dynamic_range(const std::vector<Subpath>& subpaths,
                                                double threshold_db)
{
    if (subpaths.empty())
        throw std::invalid_argument("prune_dynamic_range: needs at least one subpath");
    double max_power = 0.0;
    for (const Subpath& sp : subpaths)
        max_power = std::max(max_power, sp.power_mw);
    const double floor = std::isinf(threshold_db) ? 0.0
                                                  : max_power * db_to_linear(-threshold_db);
    std::vector<Subpath> kept;
    for (const Subpath& sp : subpaths)
        if (sp.power_mw >= floor)
            kept.push_back(sp);
    return kept;
}

/// Step 15: three independent Gaussian draws in dB per subpath, mapped to the
/// linear ratios that scale the cross-polar entries of the channel matrix.
inline void gen_xpd(std::vector<Subpath>& subpaths, const ScenarioParams& params, RngStream& rng)
{
    for (Subpath& sp : subpaths)
    {
        for (std::size_t k = 0; k < 3; ++k)
        {
            sp.xpd_db[k] = rng.normal(params.xpd_mean_db, params.xpd_sigma_db);
            sp.xpd_linear[k] = db_to_linear(sp.xpd_db[k]);
        }
    }
}

// --------------------------------------------- coordinate conversion

struct NyuAngles {
    double azimuth_deg = 0.0;   // from y-axis, clockwise positive
    double elevation_deg = 0.0; // from the horizon
};

struct GcsAngles {
    double azimuth_deg = 0.0; // from x-axis, counterclockwise
    double zenith_deg = 0.0;  // from z-axis
};

/// Step 16: measurement convention -> global coordinate system.
inline GcsAngles nyu_to_gcs(const NyuAngles& a)
{
    return {wrap_360(90.0 - a.azimuth_deg), 90.0 - a.elevation_deg};
}

inline NyuAngles gcs_to_nyu(const GcsAngles& a)
{
    return {wrap_360(90.0 - a.azimuth_deg), 90.0 - a.zenith_deg};
}

/// Unit direction vector of a set of global-coordinate angles.
inline Vec3 gcs_unit_vector(double azimuth_deg, double zenith_deg)
{
    const double az = deg2rad(azimuth_deg);
    const double zen = deg2rad(zenith_deg);
    return {std::sin(zen) * std::cos(az), std::sin(zen) * std::sin(az), std::cos(zen)};
}

// ------------------------------------------------------------ realization

/// Runs the full generation chain for one link and drop. The received power
/// budget is the configured Tx power minus the total path loss; the pruning
/// span derives from the receiver's maximum measurable path loss.
inline ChannelRealization generate_realization(const ScenarioParams& params,
                                               const LinkGeometry& geom,
                                               const CarrierConfig& carrier,
                                               const PathLossBreakdown& path_loss,
                                               const SmallScaleConfig& cfg, RngStream& rng)
{
    ChannelRealization r;
    r.scenario = params.scenario;
    r.condition = params.condition;
    r.frequency_ghz = carrier.frequency_ghz;
    r.rf_bandwidth_hz = carrier.rf_bandwidth_hz;
    r.geometry = geom;
    r.total_path_loss_db = path_loss.total_db();
    r.p_r_mw = dbm_to_mw(cfg.tx_power_dbm - r.total_path_loss_db);
    r.prune_threshold_db =
        std::max(cfg.min_prune_span_db, cfg.max_measurable_pl_db - path_loss.mean_db());

    const double b_bb_hz = (cfg.baseband_bandwidth_hz > 0.0) ? cfg.baseband_bandwidth_hz
                                                             : carrier.rf_bandwidth_hz / 2.0;

    const int n_clusters = gen_num_time_clusters(params, rng);
    r.aod_lobes = gen_spatial_lobes(params, LobeKind::Aod, rng);
    r.aoa_lobes = gen_spatial_lobes(params, LobeKind::Aoa, rng);

    std::vector<IntraClusterDelays> intra(static_cast<std::size_t>(n_clusters));
    r.clusters.resize(static_cast<std::size_t>(n_clusters));
    for (int n = 0; n < n_clusters; ++n)
    {
        const int m_n = gen_num_subpaths(params, rng);
        intra[static_cast<std::size_t>(n)] =
            gen_intra_cluster_delays(params, b_bb_hz, m_n, rng);
    }

    const std::vector<double> tau = gen_cluster_delays(params, intra, rng, cfg);
    const std::vector<double> cluster_power = gen_cluster_powers(params, tau, r.p_r_mw, rng);
    const std::vector<std::vector<double>> subpath_power =
        gen_subpath_powers(params, intra, cluster_power, rng, params.condition);

    for (int n = 0; n < n_clusters; ++n)
    {
        const auto ni = static_cast<std::size_t>(n);
        TimeCluster& c = r.clusters[ni];
        c.index = n + 1;
        c.tau_ns = tau[ni];
        c.power_mw = cluster_power[ni];
        c.delay_exponent = intra[ni].exponent;
        c.subpaths.resize(intra[ni].rho_ns.size());
        for (std::size_t m = 0; m < c.subpaths.size(); ++m)
        {
            Subpath& sp = c.subpaths[m];
            sp.cluster = n + 1;
            sp.index = static_cast<int>(m) + 1;
            sp.rho_ns = intra[ni].rho_ns[m];
            sp.power_mw = subpath_power[ni][m];
            sp.phase_rad = gen_subpath_phases(rng);
        }
    }

    assign_subpath_angles(r.aod_lobes, r.aoa_lobes, r.clusters, params, rng);
    absolute_propagation_times(geom, r.clusters);

    std::vector<Subpath> flat;
    for (const TimeCluster& c : r.clusters)
        flat.insert(flat.end(), c.subpaths.begin(), c.subpaths.end());

    std::vector<Subpath> merged = bandwidth_adjust(std::move(flat), carrier.rf_bandwidth_hz);
    align_los(merged, geom, params.condition);
    r.resolvable = prune_dynamic_range(merged, r.prune_threshold_db);
    gen_xpd(r.resolvable, params, rng);

    const double lambda0 = carrier.wavelength_m();
    for (Subpath& sp : r.resolvable)
    {
        const GcsAngles aod = nyu_to_gcs({sp.aod_az_deg, sp.aod_el_deg});
        const GcsAngles aoa = nyu_to_gcs({sp.aoa_az_deg, sp.aoa_el_deg});
        sp.aod_az_gcs_deg = aod.azimuth_deg;
        sp.zod_deg = aod.zenith_deg;
        sp.aoa_az_gcs_deg = aoa.azimuth_deg;
        sp.zoa_deg = aoa.zenith_deg;
        // Doppler from UE motion along the arrival direction (a convention;
        // positive when moving toward the incoming wave).
        const Vec3 arrival = gcs_unit_vector(sp.aoa_az_gcs_deg, sp.zoa_deg);
        sp.doppler_hz = geom.ue_velocity.dot(arrival) / lambda0;
    }
    return r;
}

} // namespace nyucsim
