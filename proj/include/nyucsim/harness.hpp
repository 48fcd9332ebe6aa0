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
// Monte Carlo drop harness: UE placement, per-drop condition / path loss /
// realization / beamformed PSD evaluation, and the CSV reports.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nyucsim/antenna.hpp"
#include "nyucsim/channel_condition.hpp"
#include "nyucsim/common.hpp"
#include "nyucsim/geometry.hpp"
#include "nyucsim/large_scale.hpp"
#include "nyucsim/matrix_psd.hpp"
#include "nyucsim/params.hpp"
#include "nyucsim/rng.hpp"
#include "nyucsim/small_scale.hpp"
#include "nyucsim/stats.hpp"
#include "nyucsim/types.hpp"

namespace nyucsim {

enum class ConditionOverride { Auto, ForceLos, ForceNlos };

inline ConditionOverride condition_override_from_string(const std::string& s)
{
    if (s == "auto") return ConditionOverride::Auto;
    if (s == "los" || s == "LOS") return ConditionOverride::ForceLos;
    if (s == "nlos" || s == "NLOS") return ConditionOverride::ForceNlos;
    throw ConfigError("unknown condition override '" + s + "' (expected auto, los or nlos)");
}

struct ArrayConfig {
    int rows = 1;
    int cols = 1;
    double spacing_wavelengths = 0.5;
    ElementPattern pattern = ElementPattern::Isotropic;

    AntennaArray build() const
    {
        if (rows < 1 || cols < 1)
            throw ConfigError("antenna array needs at least one element");
        AntennaArray a;
        a.rows = rows;
        a.cols = cols;
        a.spacing_wavelengths = spacing_wavelengths;
        a.pattern = pattern;
        return a;
    }
};

struct DropConfig {
    Scenario scenario = Scenario::UMi;
    double frequency_ghz = 28.0;
    double rf_bandwidth_hz = 800e6;
    std::uint64_t drops = 1;
    std::uint64_t seed = 1;

    // UE placement: annulus [d_min, d_max] around the gNB, or a fixed
    // distance sweep when distances_m is non-empty (drops per distance).
    double d_min_m = 10.0;
    double d_max_m = 200.0;
    std::vector<double> distances_m;

    double gnb_height_m = -1.0; // negative selects the per-scenario default
    double ue_height_m = 1.5;
    Vec3 ue_velocity_mps{};

    ConditionOverride condition = ConditionOverride::Auto;
    bool shadowing = true;
    O2iMode o2i_mode = O2iMode::None;
    double foliage_db_per_m = 0.0;
    double foliage_depth_m = 0.0;
    bool atmosphere = false;

    double tx_power_dbm = 30.0;
    double max_measurable_pl_db = 190.0;
    double min_prune_span_db = 30.0;
    double baseband_bandwidth_hz = 0.0; // 0 selects rf_bandwidth / 2
    bool inh_cluster_delay_lognormal = false;
    double inh_lognormal_sigma = 0.5;

    ArrayConfig tx_array;
    ArrayConfig rx_array;
    int subbands = 100;
    std::vector<double> times_s{0.0};

    int jobs = 1;

    std::string params_file;     // empty selects the shipped data file
    std::string atmosphere_file; // empty selects the shipped data file

    double gnb_height_or_default() const
    {
        if (gnb_height_m > 0.0)
            return gnb_height_m;
        switch (scenario)
        {
        case Scenario::UMi: return 10.0;
        case Scenario::UMa: return 25.0;
        case Scenario::RMa: return 35.0;
        case Scenario::InH: return 3.0;
        case Scenario::InF: return 8.0;
        }
        return 10.0;
    }

    CarrierConfig carrier() const { return {frequency_ghz, rf_bandwidth_hz}; }

    void validate() const
    {
        (void)carrier();
        if (drops < 1)
            throw ConfigError("drops must be >= 1");
        if (d_min_m < 1.0)
            throw ConfigError("d_min must be >= 1 m (close-in reference distance)");
        if (d_max_m < d_min_m)
            throw ConfigError("d_max must be >= d_min");
        for (double d : distances_m)
            if (d < 1.0)
                throw ConfigError("sweep distances must be >= 1 m");
        if (subbands < 1)
            throw ConfigError("subbands must be >= 1");
        if (jobs < 1)
            throw ConfigError("jobs must be >= 1");
        if (times_s.empty())
            throw ConfigError("at least one evaluation time is required");
    }
};

/// Applies the keys present in a JSON config object onto a DropConfig.
inline void apply_json(DropConfig& cfg, const nlohmann::json& j)
{
    using json = nlohmann::json;
    auto num = [&](const char* key, double& target) {
        if (j.contains(key))
            target = j.at(key).get<double>();
    };
    if (j.contains("scenario"))
        cfg.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    num("frequency_ghz", cfg.frequency_ghz);
    num("rf_bandwidth_hz", cfg.rf_bandwidth_hz);
    if (j.contains("drops"))
        cfg.drops = j.at("drops").get<std::uint64_t>();
    if (j.contains("seed"))
        cfg.seed = j.at("seed").get<std::uint64_t>();
    num("d_min_m", cfg.d_min_m);
    num("d_max_m", cfg.d_max_m);
    if (j.contains("distances_m"))
        cfg.distances_m = j.at("distances_m").get<std::vector<double>>();
    num("gnb_height_m", cfg.gnb_height_m);
    num("ue_height_m", cfg.ue_height_m);
    if (j.contains("ue_velocity_mps"))
    {
        const json& v = j.at("ue_velocity_mps");
        if (!v.is_array() || v.size() != 3)
            throw ConfigError("ue_velocity_mps must be a 3-element array");
        cfg.ue_velocity_mps = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    }
    if (j.contains("condition"))
        cfg.condition = condition_override_from_string(j.at("condition").get<std::string>());
    if (j.contains("shadowing"))
        cfg.shadowing = j.at("shadowing").get<bool>();
    if (j.contains("o2i_mode"))
        cfg.o2i_mode = o2i_mode_from_string(j.at("o2i_mode").get<std::string>());
    num("foliage_db_per_m", cfg.foliage_db_per_m);
    num("foliage_depth_m", cfg.foliage_depth_m);
    if (j.contains("atmosphere"))
        cfg.atmosphere = j.at("atmosphere").get<bool>();
    num("tx_power_dbm", cfg.tx_power_dbm);
    num("max_measurable_pl_db", cfg.max_measurable_pl_db);
    num("min_prune_span_db", cfg.min_prune_span_db);
    num("baseband_bandwidth_hz", cfg.baseband_bandwidth_hz);
    if (j.contains("inh_cluster_delay_lognormal"))
        cfg.inh_cluster_delay_lognormal = j.at("inh_cluster_delay_lognormal").get<bool>();
    num("inh_lognormal_sigma", cfg.inh_lognormal_sigma);
    auto array_cfg = [&](const char* key, ArrayConfig& a) {
        if (!j.contains(key))
            return;
        const json& ja = j.at(key);
        if (ja.contains("rows")) a.rows = ja.at("rows").get<int>();
        if (ja.contains("cols")) a.cols = ja.at("cols").get<int>();
        if (ja.contains("spacing_wavelengths"))
            a.spacing_wavelengths = ja.at("spacing_wavelengths").get<double>();
        if (ja.contains("pattern"))
            a.pattern = element_pattern_from_string(ja.at("pattern").get<std::string>());
    };
    array_cfg("tx_array", cfg.tx_array);
    array_cfg("rx_array", cfg.rx_array);
    if (j.contains("subbands"))
        cfg.subbands = j.at("subbands").get<int>();
    if (j.contains("times_s"))
        cfg.times_s = j.at("times_s").get<std::vector<double>>();
    if (j.contains("jobs"))
        cfg.jobs = j.at("jobs").get<int>();
    if (j.contains("params_file"))
        cfg.params_file = j.at("params_file").get<std::string>();
    if (j.contains("atmosphere_file"))
        cfg.atmosphere_file = j.at("atmosphere_file").get<std::string>();
}

inline DropConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    DropConfig cfg;
    apply_json(cfg, j);
    return cfg;
}

struct DropResult {
    std::uint64_t drop_id = 0;
    std::uint64_t link_id = 0;
    ChannelCondition condition = ChannelCondition::Los;
    double d2d_m = 0.0;
    PathLossBreakdown path_loss;
    int cluster_count = 0;
    int subpath_count = 0;
    double rms_delay_spread_ns = 0.0;
    AngularSpreads spreads;
    double beamforming_gain_db = 0.0;
};

struct PsdSample {
    std::uint64_t drop_id = 0;
    double time_s = 0.0;
    SpectralDensity tx;
    SpectralDensity rx;
};

struct DropOutput {
    DropResult result;
    std::optional<ChannelRealization> realization;
    std::vector<PsdSample> psd;
};

struct RunOptions {
    bool keep_realizations = false;
    bool keep_psd = false;
};

/// Shared immutable context for a run.
struct RunContext {
    ParamTable params;
    AttenuationConfig attenuation;

    static RunContext make(const DropConfig& cfg)
    {
        RunContext ctx{ParamTable::load(cfg.params_file.empty() ? default_params_path()
                                                                : cfg.params_file),
                       {}};
        ctx.attenuation.o2i_mode = cfg.o2i_mode;
        ctx.attenuation.foliage_db_per_m = cfg.foliage_db_per_m;
        ctx.attenuation.foliage_depth_m = cfg.foliage_depth_m;
        ctx.attenuation.shadowing_enabled = cfg.shadowing;
        ctx.attenuation.atmospheric_enabled = cfg.atmosphere;
        if (cfg.atmosphere)
            ctx.attenuation.atmosphere = AtmosphereTable::load(
                cfg.atmosphere_file.empty() ? default_atmosphere_path() : cfg.atmosphere_file);
        return ctx;
    }
};

namespace detail {

// substream purposes within one (drop, link)
enum : std::uint64_t { rng_placement = 0, rng_condition = 1, rng_large_scale = 2, rng_small_scale = 3 };

/// Online mean/variance (Welford); exact zero spread for identical samples.
struct Welford {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x)
    {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    double stddev() const
    {
        return (n > 0) ? std::sqrt(std::max(0.0, m2 / static_cast<double>(n))) : 0.0;
    }
};

inline DropOutput evaluate_drop(const DropConfig& cfg, const RunContext& ctx,
                                std::uint64_t drop_id, std::optional<double> fixed_distance,
                                const RunOptions& opt)
{
    const RngStream link_rng = RngStream(cfg.seed).substream(drop_id, 0);

    // placement: uniform angle; distance fixed or uniform in annulus area
    RngStream place_rng = link_rng.substream(rng_placement);
    const double angle = place_rng.uniform(0.0, 2.0 * pi);
    double distance;
    if (fixed_distance)
        distance = *fixed_distance;
    else
    {
        const double u = place_rng.uniform01();
        distance = std::sqrt(cfg.d_min_m * cfg.d_min_m +
                             u * (cfg.d_max_m * cfg.d_max_m - cfg.d_min_m * cfg.d_min_m));
    }
    const Vec3 tx{0.0, 0.0, cfg.gnb_height_or_default()};
    const Vec3 rx{distance * std::cos(angle), distance * std::sin(angle), cfg.ue_height_m};
    const LinkGeometry geom = link_geometry(tx, rx, cfg.ue_velocity_mps);

    // condition, drawn once per link per drop
    ChannelCondition condition;
    if (cfg.condition == ConditionOverride::ForceLos)
        condition = ChannelCondition::Los;
    else if (cfg.condition == ConditionOverride::ForceNlos)
        condition = ChannelCondition::Nlos;
    else
    {
        RngStream cond_rng = link_rng.substream(rng_condition);
        const double p = los_probability(cfg.scenario, geom, ctx.params.los_params());
        condition = draw_condition(p, cond_rng);
    }

    const ScenarioParams params = ctx.params.params_for(cfg.scenario, condition, cfg.frequency_ghz);

    RngStream ls_rng = link_rng.substream(rng_large_scale);
    ShadowingState shadow_state; // drop-based: fresh state per drop
    const PathLossBreakdown breakdown =
        total_path_loss(params, geom, cfg.frequency_ghz, ctx.attenuation, ctx.params, shadow_state,
                        ls_rng, cfg.gnb_height_or_default());

    SmallScaleConfig ss;
    ss.tx_power_dbm = cfg.tx_power_dbm;
    ss.max_measurable_pl_db = cfg.max_measurable_pl_db;
    ss.min_prune_span_db = cfg.min_prune_span_db;
    ss.baseband_bandwidth_hz = cfg.baseband_bandwidth_hz;
    ss.inh_cluster_delay_lognormal = cfg.inh_cluster_delay_lognormal;
    ss.inh_lognormal_sigma = cfg.inh_lognormal_sigma;

    RngStream ss_rng = link_rng.substream(rng_small_scale);
    ChannelRealization real =
        generate_realization(params, geom, cfg.carrier(), breakdown, ss, ss_rng);
    real.drop_id = drop_id;

    const AntennaArray tx_array = cfg.tx_array.build();
    const AntennaArray rx_array = cfg.rx_array.build();
    const ChannelMatrix matrix = build_channel_matrix(real, tx_array, rx_array);

    // steer toward the strongest resolvable subpath
    std::size_t strongest = 0;
    for (std::size_t i = 1; i < real.resolvable.size(); ++i)
        if (real.resolvable[i].power_mw > real.resolvable[strongest].power_mw)
            strongest = i;
    const Subpath& ref = real.resolvable[strongest];

    DropOutput out;
    out.result.drop_id = drop_id;
    out.result.link_id = 0;
    out.result.condition = condition;
    out.result.d2d_m = geom.d2d_m;
    out.result.path_loss = breakdown;
    out.result.cluster_count = static_cast<int>(real.clusters.size());
    out.result.subpath_count = static_cast<int>(real.resolvable.size());
    out.result.rms_delay_spread_ns = rms_delay_spread_ns(real.resolvable);
    out.result.spreads = angular_spreads(real.resolvable);
    out.result.beamforming_gain_db =
        beamforming_gain(matrix, tx_array, rx_array, ref.zod_deg, ref.aod_az_gcs_deg, ref.zoa_deg,
                         ref.aoa_az_gcs_deg, cfg.rf_bandwidth_hz, cfg.subbands, cfg.times_s.front());

    if (opt.keep_psd)
    {
        const auto w_tx =
            tx_array.steering_weights(ref.zod_deg, ref.aod_az_gcs_deg, matrix.wavelength_m);
        const auto w_rx =
            rx_array.steering_weights(ref.zoa_deg, ref.aoa_az_gcs_deg, matrix.wavelength_m);
        const SpectralDensity tx_psd =
            flat_tx_psd(cfg.rf_bandwidth_hz, cfg.subbands, dbm_to_mw(cfg.tx_power_dbm) * 1e-3);
        for (double t : cfg.times_s)
        {
            PsdSample s;
            s.drop_id = drop_id;
            s.time_s = t;
            s.tx = tx_psd;
            s.rx = rx_psd(tx_psd, matrix, w_tx, w_rx, t);
            out.psd.push_back(std::move(s));
        }
    }
    if (opt.keep_realizations)
        out.realization = std::move(real);
    return out;
}

/// Runs fn(i) for i in [0, n) on cfg.jobs threads; any exception is rethrown
/// on the caller thread.
template <typename Fn>
inline void parallel_for(std::uint64_t n, int jobs, Fn&& fn)
{
    if (jobs <= 1 || n < 2)
    {
        for (std::uint64_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;)
        {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try
            {
                fn(i);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int threads = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(jobs), n));
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (std::thread& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace detail

/// Monte Carlo drops. Outputs are indexed by drop id regardless of the
/// execution order, so runs are deterministic for a fixed config and seed.
inline std::vector<DropOutput> run_drops(const DropConfig& cfg, const RunContext& ctx,
                                         const RunOptions& opt = {})
{
    cfg.validate();
    const bool sweep_mode = !cfg.distances_m.empty();
    const std::uint64_t per_distance = cfg.drops;
    const std::uint64_t total =
        sweep_mode ? per_distance * cfg.distances_m.size() : cfg.drops;

    std::vector<DropOutput> out(total);
    detail::parallel_for(total, cfg.jobs, [&](std::uint64_t i) {
        std::optional<double> fixed;
        if (sweep_mode)
            fixed = cfg.distances_m[static_cast<std::size_t>(i / per_distance)];
        out[i] = detail::evaluate_drop(cfg, ctx, i, fixed, opt);
    });
    return out;
}

// ------------------------------------------------------------- sweep report

struct SweepPoint {
    double distance_m = 0.0;
    ChannelCondition condition = ChannelCondition::Los;
    std::uint64_t count = 0;
    double mean_total_db = 0.0;
    double std_total_db = 0.0;
};

/// Path-loss-vs-distance sweep: per distance, cfg.drops placements evaluated
/// through condition assignment and the large-scale chain only (no
/// small-scale generation). Results are split by condition.
inline std::vector<SweepPoint> sweep_path_loss(const DropConfig& cfg, const RunContext& ctx)
{
    cfg.validate();
    if (cfg.distances_m.empty())
        throw ConfigError("sweep requires a list of distances");

    std::vector<SweepPoint> points;
    std::uint64_t drop_id = 0;
    for (double distance : cfg.distances_m)
    {
        detail::Welford acc[2];
        for (std::uint64_t rep = 0; rep < cfg.drops; ++rep, ++drop_id)
        {
            const RngStream link_rng = RngStream(cfg.seed).substream(drop_id, 0);
            RngStream place_rng = link_rng.substream(detail::rng_placement);
            const double angle = place_rng.uniform(0.0, 2.0 * pi);
            const Vec3 tx{0.0, 0.0, cfg.gnb_height_or_default()};
            const Vec3 rx{distance * std::cos(angle), distance * std::sin(angle), cfg.ue_height_m};
            const LinkGeometry geom = link_geometry(tx, rx, cfg.ue_velocity_mps);

            ChannelCondition condition;
            if (cfg.condition == ConditionOverride::ForceLos)
                condition = ChannelCondition::Los;
            else if (cfg.condition == ConditionOverride::ForceNlos)
                condition = ChannelCondition::Nlos;
            else
            {
                RngStream cond_rng = link_rng.substream(detail::rng_condition);
                condition = draw_condition(
                    los_probability(cfg.scenario, geom, ctx.params.los_params()), cond_rng);
            }
            const ScenarioParams params =
                ctx.params.params_for(cfg.scenario, condition, cfg.frequency_ghz);
            RngStream ls_rng = link_rng.substream(detail::rng_large_scale);
            ShadowingState state;
            const PathLossBreakdown b =
                total_path_loss(params, geom, cfg.frequency_ghz, ctx.attenuation, ctx.params,
                                state, ls_rng, cfg.gnb_height_or_default());
            acc[condition == ChannelCondition::Los ? 0 : 1].add(b.total_db());
        }
        for (int c = 0; c < 2; ++c)
        {
            if (acc[c].n == 0)
                continue;
            SweepPoint p;
            p.distance_m = distance;
            p.condition = (c == 0) ? ChannelCondition::Los : ChannelCondition::Nlos;
            p.count = acc[c].n;
            p.mean_total_db = acc[c].mean;
            p.std_total_db = acc[c].stddev();
            points.push_back(p);
        }
    }
    return points;
}

/// Log-spaced distance grid, endpoints included.
inline std::vector<double> log_spaced_distances(double d_min, double d_max, int points)
{
    if (points < 2 || d_min <= 0.0 || d_max <= d_min)
        throw ConfigError("log_spaced_distances: invalid grid");
    std::vector<double> d(static_cast<std::size_t>(points));
    const double l0 = std::log10(d_min), l1 = std::log10(d_max);
    for (int i = 0; i < points; ++i)
        d[static_cast<std::size_t>(i)] =
            std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / (points - 1));
    return d;
}

// ------------------------------------------------------- binned mean report

struct PathLossBin {
    double lo_m = 0.0;
    double hi_m = 0.0;
    ChannelCondition condition = ChannelCondition::Los;
    std::uint64_t count = 0;
    double mean_total_db = 0.0;
    double std_total_db = 0.0;
};

/// Distance-binned mean and std of the total path loss, split by condition.
/// Bins with no results are absent from the output.
inline std::vector<PathLossBin> mean_pathloss_report(const std::vector<DropResult>& results,
                                                     int bins)
{
    if (bins < 1)
        throw ConfigError("mean_pathloss_report: needs at least one bin");
    if (results.empty())
        return {};
    double lo = results.front().d2d_m, hi = lo;
    for (const DropResult& r : results)
    {
        lo = std::min(lo, r.d2d_m);
        hi = std::max(hi, r.d2d_m);
    }
    const double width = (hi > lo) ? (hi - lo) / bins : 1.0;

    std::vector<std::array<detail::Welford, 2>> acc(static_cast<std::size_t>(bins));
    for (const DropResult& r : results)
    {
        auto b = static_cast<std::size_t>((r.d2d_m - lo) / width);
        if (b >= static_cast<std::size_t>(bins))
            b = static_cast<std::size_t>(bins) - 1;
        acc[b][r.condition == ChannelCondition::Los ? 0 : 1].add(r.path_loss.total_db());
    }
    std::vector<PathLossBin> out;
    for (int b = 0; b < bins; ++b)
    {
        for (int c = 0; c < 2; ++c)
        {
            const detail::Welford& a = acc[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
            if (a.n == 0)
                continue;
            PathLossBin row;
            row.lo_m = lo + b * width;
            row.hi_m = lo + (b + 1) * width;
            row.condition = (c == 0) ? ChannelCondition::Los : ChannelCondition::Nlos;
            row.count = a.n;
            row.mean_total_db = a.mean;
            row.std_total_db = a.stddev();
            out.push_back(row);
        }
    }
    return out;
}

// -------------------------------------------------- distribution validation

/// Empirical-vs-theoretical checks of the generation-procedure distributions
/// recovered from a batch of realizations that share one
/// (scenario, condition, frequency) configuration.
inline std::vector<GofResult> distribution_report(const std::vector<ChannelRealization>& reals,
                                                  const ScenarioParams& params,
                                                  std::size_t min_samples = 10000)
{
    std::vector<GofResult> out;
    if (reals.empty())
        throw std::invalid_argument("distribution_report: no realizations");
    const Scenario sce = params.scenario;
    const bool indoor = is_indoor(sce);
    const bool formula_delays = !indoor && !params.high_band();

    auto flag_min = [&](GofResult r, std::size_t required) {
        r.sufficient = r.samples >= required;
        out.push_back(std::move(r));
    };

    // step 1: number of time clusters
    {
        std::vector<long> counts;
        counts.reserve(reals.size());
        for (const ChannelRealization& r : reals)
            counts.push_back(static_cast<long>(r.clusters.size()));
        GofResult g;
        if (indoor)
            g = chi2_integer_test(
                counts, [&](long k) { return poisson_plus_one_pmf(k, params.cluster_rate); }, 24,
                "step1_cluster_count");
        else
        {
            const long n_max = std::lround(params.cluster_count_max);
            g = chi2_integer_test(
                counts, [&](long k) { return discrete_uniform_pmf(k, 1, n_max); }, n_max,
                "step1_cluster_count");
        }
        flag_min(std::move(g), min_samples / 10);
    }

    // step 2: subpaths per cluster
    {
        std::vector<long> counts;
        for (const ChannelRealization& r : reals)
            for (const TimeCluster& c : r.clusters)
                counts.push_back(static_cast<long>(c.subpaths.size()));
        GofResult g;
        if (sce == Scenario::RMa || (!indoor && !params.high_band()))
        {
            const long m_max = std::lround(params.subpath_count_max);
            g = chi2_integer_test(
                counts, [&](long k) { return discrete_uniform_pmf(k, 1, m_max); }, m_max,
                "step2_subpath_count");
        }
        else if (indoor)
            g = chi2_integer_test(
                counts,
                [&](long k) {
                    return composite_subpath_pmf(k, params.subpath_beta, params.subpath_mean);
                },
                60, "step2_subpath_count");
        else
            g = chi2_integer_test(
                counts, [&](long k) { return discrete_exponential_pmf(k, params.subpath_mean); },
                60, "step2_subpath_count");
        flag_min(std::move(g), min_samples / 10);
    }

    // step 3: cluster excess delay increments recovered from the recursion
    {
        std::vector<double> dtau;
        for (const ChannelRealization& r : reals)
        {
            double prev_tau = 0.0, prev_rho = 0.0;
            for (const TimeCluster& c : r.clusters)
            {
                dtau.push_back(c.tau_ns - prev_tau - prev_rho - params.mti_ns);
                prev_tau = c.tau_ns;
                prev_rho = c.subpaths.empty() ? 0.0 : c.subpaths.back().rho_ns;
            }
        }
        GofResult g;
        if (sce == Scenario::InF)
            g = ks_test(
                dtau,
                [&](double x) {
                    return gamma_cdf(x, params.cluster_delay_shape, params.cluster_delay_scale_ns);
                },
                "step3_cluster_delay");
        else
            g = ks_test(dtau,
                        [&](double x) { return exponential_cdf(x, params.cluster_delay_mean_ns); },
                        "step3_cluster_delay");
        flag_min(std::move(g), min_samples / 10);
    }

    // step 4: intra-cluster delays
    if (formula_delays)
    {
        std::vector<double> exponents;
        for (const ChannelRealization& r : reals)
            for (const TimeCluster& c : r.clusters)
                exponents.push_back(c.delay_exponent);
        flag_min(ks_test(exponents,
                         [&](double x) {
                             return uniform_cdf(x, 0.0, params.intra_delay_exponent_max);
                         },
                         "step4_intra_delay_exponent"),
                 min_samples / 10);
    }
    else
    {
        // for two-subpath clusters the gap rho_2 has a closed or integrable
        // reference law: Exp stays Exp; |X1 - X2| for Gamma via quadrature
        std::vector<double> gaps;
        for (const ChannelRealization& r : reals)
            for (const TimeCluster& c : r.clusters)
                if (c.subpaths.size() == 2)
                    gaps.push_back(c.subpaths[1].rho_ns);
        GofResult g;
        if (sce == Scenario::InF)
        {
            const auto cdf = gamma_abs_diff_cdf(params.intra_delay_shape,
                                                params.intra_delay_scale_ns);
            g = ks_test(gaps, cdf, "step4_intra_delay_gap");
        }
        else
            g = ks_test(gaps,
                        [&](double x) { return exponential_cdf(x, params.intra_delay_mean_ns); },
                        "step4_intra_delay_gap");
        flag_min(std::move(g), 1000);
    }

    // step 5: cluster shadowing difference Z_1 - Z_2 recovered from power
    // ratios of the first two clusters
    {
        std::vector<double> zdiff;
        const double log10e = std::log10(std::exp(1.0));
        for (const ChannelRealization& r : reals)
        {
            if (r.clusters.size() < 2)
                continue;
            const TimeCluster& c1 = r.clusters[0];
            const TimeCluster& c2 = r.clusters[1];
            if (c1.power_mw <= 0.0 || c2.power_mw <= 0.0)
                continue;
            const double decay_db =
                10.0 * log10e * (c2.tau_ns - c1.tau_ns) / params.cluster_decay_ns;
            zdiff.push_back(10.0 * std::log10(c1.power_mw / c2.power_mw) - decay_db);
        }
        flag_min(ks_test(zdiff,
                         [&](double x) {
                             return normal_cdf(x, 0.0, params.cluster_shadow_db * std::sqrt(2.0));
                         },
                         "step5_cluster_power_shadowing"),
                 1000);
    }

    // step 6: subpath shadowing difference within a cluster; skips the first
    // cluster in LOS where the strongest subpath is swapped to the front
    {
        std::vector<double> udiff;
        const double log10e = std::log10(std::exp(1.0));
        for (const ChannelRealization& r : reals)
        {
            for (const TimeCluster& c : r.clusters)
            {
                if (params.condition == ChannelCondition::Los && c.index == 1)
                    continue;
                if (c.subpaths.size() < 2)
                    continue;
                const Subpath& s1 = c.subpaths[0];
                const Subpath& s2 = c.subpaths[1];
                if (s1.power_mw <= 0.0 || s2.power_mw <= 0.0)
                    continue;
                const double decay_db =
                    10.0 * log10e * (s2.rho_ns - s1.rho_ns) / params.subpath_decay_ns;
                udiff.push_back(10.0 * std::log10(s1.power_mw / s2.power_mw) - decay_db);
            }
        }
        flag_min(ks_test(udiff,
                         [&](double x) {
                             return normal_cdf(x, 0.0, params.subpath_shadow_db * std::sqrt(2.0));
                         },
                         "step6_subpath_power_shadowing"),
                 1000);
    }

    // step 7: phases uniform on [0, 2pi), pooled over every polarization
    {
        std::vector<double> phases;
        for (const ChannelRealization& r : reals)
            for (const TimeCluster& c : r.clusters)
                for (const Subpath& sp : c.subpaths)
                    for (double ph : sp.phase_rad)
                        phases.push_back(ph);
        flag_min(ks_test(phases, [&](double x) { return uniform_cdf(x, 0.0, 2.0 * pi); },
                         "step7_phases"),
                 min_samples);
    }

    // step 8: spatial lobe counts
    for (LobeKind kind : {LobeKind::Aod, LobeKind::Aoa})
    {
        std::vector<long> counts;
        for (const ChannelRealization& r : reals)
            counts.push_back(static_cast<long>(
                (kind == LobeKind::Aod ? r.aod_lobes : r.aoa_lobes).size()));
        const double rate = (kind == LobeKind::Aod) ? params.lobe_rate_aod : params.lobe_rate_aoa;
        const std::string name =
            (kind == LobeKind::Aod) ? "step8_lobe_count_aod" : "step8_lobe_count_aoa";
        GofResult g;
        if (sce == Scenario::InH)
        {
            const long l_max = std::lround(rate);
            g = chi2_integer_test(
                counts, [&](long k) { return discrete_uniform_pmf(k, 1, l_max); }, l_max, name);
        }
        else
            g = chi2_integer_test(
                counts, [&](long k) { return poisson_plus_one_pmf(k, rate); }, 16, name);
        flag_min(std::move(g), min_samples / 10);
    }

    // step 9: lobe azimuth means uniform within their sector
    {
        std::vector<double> unit;
        for (const ChannelRealization& r : reals)
        {
            for (const std::vector<SpatialLobe>* lobes : {&r.aod_lobes, &r.aoa_lobes})
            {
                const double l = static_cast<double>(lobes->size());
                for (const SpatialLobe& lobe : *lobes)
                {
                    const double lo = 360.0 * (lobe.index - 1) / l;
                    unit.push_back((lobe.azimuth_deg - lo) / (360.0 / l));
                }
            }
        }
        flag_min(ks_test(unit, [&](double x) { return uniform_cdf(x, 0.0, 1.0); },
                         "step9_lobe_azimuth"),
                 min_samples / 10);
    }

    // step 10: lobe elevation means Gaussian
    for (LobeKind kind : {LobeKind::Aod, LobeKind::Aoa})
    {
        std::vector<double> elev;
        for (const ChannelRealization& r : reals)
            for (const SpatialLobe& lobe : (kind == LobeKind::Aod ? r.aod_lobes : r.aoa_lobes))
                elev.push_back(lobe.elevation_deg);
        const double mean = (kind == LobeKind::Aod) ? params.lobe_elev_mean_zod_deg
                                                    : params.lobe_elev_mean_zoa_deg;
        const double sigma = (kind == LobeKind::Aod) ? params.lobe_elev_sigma_zod_deg
                                                     : params.lobe_elev_sigma_zoa_deg;
        const std::string name = (kind == LobeKind::Aod) ? "step10_lobe_elevation_zod"
                                                         : "step10_lobe_elevation_zoa";
        flag_min(ks_test(elev, [&](double x) { return normal_cdf(x, mean, sigma); }, name),
                 min_samples / 10);
    }

    // step 11: angular offsets about the assigned lobe mean. Azimuth offsets
    // are compared to the plain normal; elevation offsets use the
    // probability integral transform conditioned on the +-60 clamp window.
    {
        std::vector<double> aod_az, aoa_az, zod_u, zoa_u;
        for (const ChannelRealization& r : reals)
        {
            auto lobe_of = [&](const std::vector<SpatialLobe>& lobes, int index) -> const SpatialLobe& {
                return lobes[static_cast<std::size_t>(index - 1)];
            };
            for (const TimeCluster& c : r.clusters)
            {
                for (const Subpath& sp : c.subpaths)
                {
                    const SpatialLobe& ld = lobe_of(r.aod_lobes, sp.aod_lobe);
                    const SpatialLobe& la = lobe_of(r.aoa_lobes, sp.aoa_lobe);
                    aod_az.push_back(wrap_pm180(sp.aod_az_deg - ld.azimuth_deg));
                    aoa_az.push_back(wrap_pm180(sp.aoa_az_deg - la.azimuth_deg));
                    auto pit = [](double angle, double mean, double sigma) -> std::optional<double> {
                        if (sigma <= 0.0)
                            return std::nullopt;
                        if (angle <= -60.0 || angle >= 60.0)
                            return std::nullopt; // clamped sample
                        const double lo = normal_cdf(-60.0, mean, sigma);
                        const double hi = normal_cdf(60.0, mean, sigma);
                        return (normal_cdf(angle, mean, sigma) - lo) / (hi - lo);
                    };
                    if (auto u = pit(sp.aod_el_deg, ld.elevation_deg, params.offset_sigma_zod_deg))
                        zod_u.push_back(*u);
                    if (auto u = pit(sp.aoa_el_deg, la.elevation_deg, params.offset_sigma_zoa_deg))
                        zoa_u.push_back(*u);
                }
            }
        }
        flag_min(ks_test(aod_az,
                         [&](double x) {
                             return normal_cdf(x, 0.0, params.offset_sigma_aod_az_deg);
                         },
                         "step11_offset_aod_azimuth"),
                 min_samples / 10);
        flag_min(ks_test(aoa_az,
                         [&](double x) {
                             return normal_cdf(x, 0.0, params.offset_sigma_aoa_az_deg);
                         },
                         "step11_offset_aoa_azimuth"),
                 min_samples / 10);
        if (params.offset_sigma_zod_deg > 0.0)
            flag_min(ks_test(zod_u, [&](double x) { return uniform_cdf(x, 0.0, 1.0); },
                             "step11_offset_zod"),
                     min_samples / 10);
        if (params.offset_sigma_zoa_deg > 0.0)
            flag_min(ks_test(zoa_u, [&](double x) { return uniform_cdf(x, 0.0, 1.0); },
                             "step11_offset_zoa"),
                     min_samples / 10);
    }

    // cross-polarization draws (after pruning)
    {
        std::vector<double> xpd;
        for (const ChannelRealization& r : reals)
            for (const Subpath& sp : r.resolvable)
                for (double v : sp.xpd_db)
                    xpd.push_back(v);
        flag_min(ks_test(xpd,
                         [&](double x) {
                             return normal_cdf(x, params.xpd_mean_db, params.xpd_sigma_db);
                         },
                         "step15_xpd"),
                 min_samples / 10);
    }

    return out;
}

// --------------------------------------------------------------- CSV output

namespace detail {

inline std::string fmt_num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace detail

inline void write_drops_csv(const std::vector<DropOutput>& outputs, std::ostream& os)
{
    os << "drop,link,condition,d2d_m,fspl_1m_db,distance_term_db,atmospheric_db,o2i_db,"
          "foliage_db,shadowing_db,total_db,clusters,subpaths,rms_delay_spread_ns,"
          "as_aod_az_deg,as_zod_deg,as_aoa_az_deg,as_zoa_deg,bf_gain_db\n";
    for (const DropOutput& o : outputs)
    {
        const DropResult& r = o.result;
        const PathLossBreakdown& b = r.path_loss;
        os << r.drop_id << ',' << r.link_id << ',' << to_string(r.condition) << ','
           << detail::fmt_num(r.d2d_m) << ',' << detail::fmt_num(b.fspl_1m_db) << ','
           << detail::fmt_num(b.distance_term_db) << ',' << detail::fmt_num(b.atmospheric_db)
           << ',' << detail::fmt_num(b.o2i_db) << ',' << detail::fmt_num(b.foliage_db) << ','
           << detail::fmt_num(b.shadowing_db) << ',' << detail::fmt_num(b.total_db()) << ','
           << r.cluster_count << ',' << r.subpath_count << ','
           << detail::fmt_num(r.rms_delay_spread_ns) << ','
           << detail::fmt_num(r.spreads.aod_az_deg) << ',' << detail::fmt_num(r.spreads.zod_deg)
           << ',' << detail::fmt_num(r.spreads.aoa_az_deg) << ','
           << detail::fmt_num(r.spreads.zoa_deg) << ','
           << detail::fmt_num(r.beamforming_gain_db) << '\n';
    }
}

/// Per-subpath realization dump.
inline void write_realization_dump_csv(const std::vector<DropOutput>& outputs, std::ostream& os)
{
    os << "drop,link,cluster,subpath,delay_ns,power_dbm,phase_tt_rad,phase_tp_rad,phase_pt_rad,"
          "phase_pp_rad,aod_az_gcs_deg,zod_deg,aoa_az_gcs_deg,zoa_deg,xpd_tp_db,xpd_pt_db,"
          "xpd_pp_db,doppler_hz\n";
    for (const DropOutput& o : outputs)
    {
        if (!o.realization)
            continue;
        for (const Subpath& sp : o.realization->resolvable)
        {
            os << o.result.drop_id << ',' << o.result.link_id << ',' << sp.cluster << ','
               << sp.index << ',' << detail::fmt_num(sp.delay_ns) << ','
               << detail::fmt_num(mw_to_dbm(sp.power_mw)) << ','
               << detail::fmt_num(sp.phase_rad[0]) << ',' << detail::fmt_num(sp.phase_rad[1])
               << ',' << detail::fmt_num(sp.phase_rad[2]) << ','
               << detail::fmt_num(sp.phase_rad[3]) << ',' << detail::fmt_num(sp.aod_az_gcs_deg)
               << ',' << detail::fmt_num(sp.zod_deg) << ',' << detail::fmt_num(sp.aoa_az_gcs_deg)
               << ',' << detail::fmt_num(sp.zoa_deg) << ',' << detail::fmt_num(sp.xpd_db[0])
               << ',' << detail::fmt_num(sp.xpd_db[1]) << ',' << detail::fmt_num(sp.xpd_db[2])
               << ',' << detail::fmt_num(sp.doppler_hz) << '\n';
        }
    }
}

inline void write_psd_csv(const std::vector<DropOutput>& outputs, std::ostream& os)
{
    os << "drop,time_s,subband,offset_hz,s_tx_w_per_hz,s_rx_w_per_hz,gain_db\n";
    for (const DropOutput& o : outputs)
    {
        for (const PsdSample& s : o.psd)
        {
            for (std::size_t i = 0; i < s.tx.offset_hz.size(); ++i)
            {
                const double tx = s.tx.value_w_per_hz[i];
                const double rx = s.rx.value_w_per_hz[i];
                const double gain = (tx > 0.0 && rx > 0.0) ? linear_to_db(rx / tx) : -999.0;
                os << o.result.drop_id << ',' << detail::fmt_num(s.time_s) << ',' << i << ','
                   << detail::fmt_num(s.tx.offset_hz[i]) << ',' << detail::fmt_num(tx) << ','
                   << detail::fmt_num(rx) << ',' << detail::fmt_num(gain) << '\n';
            }
        }
    }
}

inline void write_sweep_csv(const std::vector<SweepPoint>& points, std::ostream& os)
{
    os << "distance_m,condition,count,mean_total_db,std_total_db\n";
    for (const SweepPoint& p : points)
        os << detail::fmt_num(p.distance_m) << ',' << to_string(p.condition) << ',' << p.count
           << ',' << detail::fmt_num(p.mean_total_db) << ',' << detail::fmt_num(p.std_total_db)
           << '\n';
}

inline void write_pathloss_bins_csv(const std::vector<PathLossBin>& bins, std::ostream& os)
{
    os << "bin_lo_m,bin_hi_m,condition,count,mean_total_db,std_total_db\n";
    for (const PathLossBin& b : bins)
        os << detail::fmt_num(b.lo_m) << ',' << detail::fmt_num(b.hi_m) << ','
           << to_string(b.condition) << ',' << b.count << ',' << detail::fmt_num(b.mean_total_db)
           << ',' << detail::fmt_num(b.std_total_db) << '\n';
}

inline void write_gof_csv(const std::vector<GofResult>& results, std::ostream& os)
{
    os << "name,method,samples,statistic,p_value,sufficient\n";
    for (const GofResult& g : results)
        os << g.name << ',' << g.method << ',' << g.samples << ','
           << detail::fmt_num(g.statistic) << ',' << detail::fmt_num(g.p_value) << ','
           << (g.sufficient ? 1 : 0) << '\n';
}

} // namespace nyucsim
