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
#include <string>

#include "nyucsim/common.hpp"

namespace nyucsim {

enum class Scenario { UMi, UMa, RMa, InH, InF };
enum class ChannelCondition { Los, Nlos };

inline std::string to_string(Scenario s)
{
    switch (s)
    {
    case Scenario::UMi: return "UMi";
    case Scenario::UMa: return "UMa";
    case Scenario::RMa: return "RMa";
    case Scenario::InH: return "InH";
    case Scenario::InF: return "InF";
    }
    throw std::invalid_argument("unknown scenario");
}

inline std::string to_string(ChannelCondition c)
{
    return c == ChannelCondition::Los ? "LOS" : "NLOS";
}

inline Scenario scenario_from_string(const std::string& s)
{
    if (s == "UMi") return Scenario::UMi;
    if (s == "UMa") return Scenario::UMa;
    if (s == "RMa") return Scenario::RMa;
    if (s == "InH") return Scenario::InH;
    if (s == "InF") return Scenario::InF;
    throw ConfigError("unknown scenario '" + s + "' (expected UMi, UMa, RMa, InH or InF)");
}

inline ChannelCondition condition_from_string(const std::string& s)
{
    if (s == "LOS" || s == "los") return ChannelCondition::Los;
    if (s == "NLOS" || s == "nlos") return ChannelCondition::Nlos;
    throw ConfigError("unknown channel condition '" + s + "'");
}

constexpr Scenario all_scenarios[] = {Scenario::UMi, Scenario::UMa, Scenario::RMa,
                                      Scenario::InH, Scenario::InF};
constexpr ChannelCondition all_conditions[] = {ChannelCondition::Los, ChannelCondition::Nlos};

inline bool is_indoor(Scenario s) { return s == Scenario::InH || s == Scenario::InF; }

/// Carrier description; the supported band is 0.5-150 GHz.
struct CarrierConfig {
    double frequency_ghz;
    double rf_bandwidth_hz;

    CarrierConfig(double f_ghz, double rf_bw_hz)
        : frequency_ghz(f_ghz), rf_bandwidth_hz(rf_bw_hz)
    {
        if (!std::isfinite(f_ghz) || f_ghz < 0.5 || f_ghz > 150.0)
            throw ConfigError("carrier frequency must be within [0.5, 150] GHz, got " +
                              std::to_string(f_ghz));
        if (!std::isfinite(rf_bw_hz) || rf_bw_hz <= 0.0)
            throw ConfigError("RF bandwidth must be positive");
    }

    double frequency_hz() const { return frequency_ghz * 1e9; }
    double wavelength_m() const { return speed_of_light_m_s / frequency_hz(); }
};

} // namespace nyucsim
