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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nyucsim/common.hpp"
#include "nyucsim/geometry.hpp"
#include "nyucsim/params.hpp"
#include "nyucsim/rng.hpp"
#include "nyucsim/types.hpp"

namespace nyucsim {

/// Additive dB components of the large-scale loss. total is always the exact
/// sum of the six parts; atmospheric/o2i/foliage are floored at 0 dB while
/// shadowing is zero-mean and may be negative.
struct PathLossBreakdown {
    double fspl_1m_db = 0.0;
    double distance_term_db = 0.0;
    double atmospheric_db = 0.0;
    double o2i_db = 0.0;
    double foliage_db = 0.0;
    double shadowing_db = 0.0;

    double total_db() const
    {
        return fspl_1m_db + distance_term_db + atmospheric_db + o2i_db + foliage_db + shadowing_db;
    }

    double mean_db() const { return fspl_1m_db + distance_term_db; }
};

/// Per-link state for exponentially correlated shadow fading.
struct ShadowingState {
    bool initialized = false;
    Vec3 last_position;
    double last_value_db = 0.0;
};

enum class O2iMode { None, LowLoss, HighLoss };

inline O2iMode o2i_mode_from_string(const std::string& s)
{
    if (s == "none" || s == "None") return O2iMode::None;
    if (s == "low" || s == "LowLoss") return O2iMode::LowLoss;
    if (s == "high" || s == "HighLoss") return O2iMode::HighLoss;
    throw ConfigError("unknown O2I mode '" + s + "' (expected none, low or high)");
}

inline std::string to_string(O2iMode m)
{
    switch (m)
    {
    case O2iMode::None: return "none";
    case O2iMode::LowLoss: return "low";
    case O2iMode::HighLoss: return "high";
    }
    return "none";
}

/// Specific-attenuation lookup (GHz -> dB/km) with linear interpolation
/// between strictly increasing sample frequencies.
class AtmosphereTable {
public:
    static AtmosphereTable load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open atmosphere table '" + path + "'");
        AtmosphereTable t;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            std::istringstream ls(line);
            double f = 0.0, a = 0.0;
            if (!(ls >> f))
                continue; // blank or comment-only line
            if (!(ls >> a))
                throw ConfigError("atmosphere table line " + std::to_string(lineno) +
                                  ": expected two columns");
            if (!t.freq_ghz_.empty() && f <= t.freq_ghz_.back())
                throw ConfigError("atmosphere table: frequencies must be strictly increasing");
            if (a < 0.0)
                throw ConfigError("atmosphere table: attenuation must be non-negative");
            t.freq_ghz_.push_back(f);
            t.db_per_km_.push_back(a);
        }
        if (t.freq_ghz_.size() < 2)
            throw ConfigError("atmosphere table: needs at least two samples");
        return t;
    }

    static AtmosphereTable from_samples(std::vector<double> freq_ghz, std::vector<double> db_per_km)
    {
        if (freq_ghz.size() != db_per_km.size() || freq_ghz.size() < 2)
            throw ConfigError("atmosphere table: malformed samples");
        AtmosphereTable t;
        t.freq_ghz_ = std::move(freq_ghz);
        t.db_per_km_ = std::move(db_per_km);
        for (std::size_t i = 1; i < t.freq_ghz_.size(); ++i)
            if (t.freq_ghz_[i] <= t.freq_ghz_[i - 1])
                throw ConfigError("atmosphere table: frequencies must be strictly increasing");
        return t;
    }

    double db_per_km(double f_ghz) const
    {
        if (f_ghz < freq_ghz_.front() || f_ghz > freq_ghz_.back())
            throw ConfigError("atmosphere table does not cover " + std::to_string(f_ghz) + " GHz");
        const auto it = std::lower_bound(freq_ghz_.begin(), freq_ghz_.end(), f_ghz);
        const auto i = static_cast<std::size_t>(it - freq_ghz_.begin());
        if (i == 0 || *it == f_ghz)
            return db_per_km_[i];
        const double f0 = freq_ghz_[i - 1], f1 = freq_ghz_[i];
        const double a0 = db_per_km_[i - 1], a1 = db_per_km_[i];
        return a0 + (a1 - a0) * (f_ghz - f0) / (f1 - f0);
    }

    double min_freq_ghz() const { return freq_ghz_.front(); }
    double max_freq_ghz() const { return freq_ghz_.back(); }

private:
    std::vector<double> freq_ghz_;
    std::vector<double> db_per_km_;
};

/// Switches for the optional attenuation terms of the total loss.
struct AttenuationConfig {
    O2iMode o2i_mode = O2iMode::None;
    double foliage_db_per_m = 0.0;
    double foliage_depth_m = 0.0;
    bool atmospheric_enabled = false;
    std::optional<AtmosphereTable> atmosphere;
    bool shadowing_enabled = true;
};

/// Free space path loss at the 1 m reference distance:
/// 20 log10(4 pi f / c) = 32.4478 + 20 log10(f_GHz) dB.
inline double fspl_1m(double f_ghz)
{
    if (!(f_ghz > 0.0))
        throw std::invalid_argument("fspl_1m: frequency must be positive");
    return 20.0 * std::log10(4.0 * pi * f_ghz * 1e9 / speed_of_light_m_s);
}

/// Close-in reference distance path loss: FSPL(f, 1 m) + 10 n log10(d2D).
inline double ci_path_loss(const ScenarioParams& params, const LinkGeometry& geom, double f_ghz)
{
    if (!params.has_ple)
        throw std::invalid_argument("ci_path_loss: scenario has no PLE; use cih_path_loss");
    if (geom.d2d_m < 1.0)
        throw std::invalid_argument("ci_path_loss: requires d2D >= 1 m (close-in reference)");
    return fspl_1m(f_ghz) + 10.0 * params.ple * std::log10(geom.d2d_m);
}

/// Height-dependent CI path loss used for RMa.
inline double cih_path_loss(const LinkGeometry& geom, double f_ghz, ChannelCondition cond,
                            double h_bs_m)
{
    if (geom.d2d_m < 1.0)
        throw std::invalid_argument("cih_path_loss: requires d2D >= 1 m (close-in reference)");
    if (!(h_bs_m > 0.0))
        throw std::invalid_argument("cih_path_loss: base station height must be positive");
    const double rel = (h_bs_m - 35.0) / 35.0;
    const double slope = (cond == ChannelCondition::Los) ? 23.1 * (1.0 - 0.03 * rel)
                                                         : 30.7 * (1.0 - 0.049 * rel);
    return fspl_1m(f_ghz) + slope * std::log10(geom.d2d_m);
}

/// Parabolic building-penetration loss, 10 log10(A + B f^2) plus a Gaussian
/// spread, floored at 0 dB. Redrawn once per drop.
inline double o2i_loss(O2iMode mode, double f_ghz, const ParamTable& table, RngStream& rng)
{
    if (mode == O2iMode::None)
        return 0.0;
    const O2iModelParams& p = table.o2i_params(mode == O2iMode::HighLoss);
    const double mean = 10.0 * std::log10(p.a + p.b * f_ghz * f_ghz);
    return std::max(0.0, mean + p.sigma_db * rng.normal());
}

inline double foliage_loss(const AttenuationConfig& cfg)
{
    if (cfg.foliage_db_per_m < 0.0 || cfg.foliage_depth_m < 0.0)
        throw std::invalid_argument("foliage_loss: per-meter loss and depth must be non-negative");
    return cfg.foliage_db_per_m * cfg.foliage_depth_m;
}

/// Specific attenuation at f times the 3D path length. The 3D distance is
/// used as the physical path length.
inline double atmospheric_attenuation(double f_ghz, double d3d_m, const AtmosphereTable& table)
{
    if (d3d_m < 0.0)
        throw std::invalid_argument("atmospheric_attenuation: negative distance");
    return table.db_per_km(f_ghz) * (d3d_m / 1000.0);
}

/// Correlated shadow fading. The first call for a link draws N(0, sigma^2);
/// later calls blend with the previous value using
/// rho = exp(-displacement / d_corr).
inline double shadowing(const ScenarioParams& params, ShadowingState& state,
                        const LinkGeometry& geom, RngStream& rng)
{
    const double sigma = params.shadow_sigma_db;
    double value;
    if (!state.initialized)
    {
        value = sigma * rng.normal();
    }
    else
    {
        const double dd = (geom.rx_position - state.last_position).norm();
        const double rho = std::exp(-dd / params.shadow_corr_distance_m);
        value = rho * state.last_value_db + std::sqrt(1.0 - rho * rho) * sigma * rng.normal();
    }
    state.initialized = true;
    state.last_position = geom.rx_position;
    state.last_value_db = value;
    return value;
}

/// Total large-scale loss: dispatches CI vs CIH by scenario, then adds the
/// enabled attenuation terms and shadow fading. h_bs_m only matters for RMa.
inline PathLossBreakdown total_path_loss(const ScenarioParams& params, const LinkGeometry& geom,
                                         double f_ghz, const AttenuationConfig& cfg,
                                         const ParamTable& table, ShadowingState& shadow_state,
                                         RngStream& rng, double h_bs_m = 35.0)
{
    PathLossBreakdown b;
    b.fspl_1m_db = fspl_1m(f_ghz);
    if (params.scenario == Scenario::RMa)
        b.distance_term_db = cih_path_loss(geom, f_ghz, params.condition, h_bs_m) - b.fspl_1m_db;
    else
        b.distance_term_db = ci_path_loss(params, geom, f_ghz) - b.fspl_1m_db;

    if (cfg.atmospheric_enabled)
    {
        if (!cfg.atmosphere)
            throw ConfigError("atmospheric attenuation enabled but no table configured");
        b.atmospheric_db = atmospheric_attenuation(f_ghz, geom.d3d_m, *cfg.atmosphere);
    }
    b.o2i_db = o2i_loss(cfg.o2i_mode, f_ghz, table, rng);
    b.foliage_db = foliage_loss(cfg);
    if (cfg.shadowing_enabled)
        b.shadowing_db = shadowing(params, shadow_state, geom, rng);
    return b;
}

} // namespace nyucsim
