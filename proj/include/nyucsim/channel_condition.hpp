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

#include "nyucsim/common.hpp"
#include "nyucsim/geometry.hpp"
#include "nyucsim/params.hpp"
#include "nyucsim/rng.hpp"
#include "nyucsim/types.hpp"

namespace nyucsim {

namespace detail {

/// Squared LOS probability shared by the urban models:
/// (min(d1/d, 1) * (1 - exp(-d/d2)) + exp(-d/d2))^2.
inline double squared_los_model(double d2d, double d1, double d2)
{
    const double e = std::exp(-d2d / d2);
    const double inner = std::min(d1 / d2d, 1.0) * (1.0 - e) + e;
    return inner * inner;
}

/// UMa aerial correction term C(d2D, hUE): zero at or below 13 m, then
/// ((hUE-13)/10)^1.5 * (5/4) * (d2D/100)^3 * exp(-d2D/150). Valid to 23 m;
/// callers reject larger heights.
inline double uma_aerial_correction(double d2d, double h_ue)
{
    if (h_ue <= 13.0)
        return 0.0;
    const double h = std::pow((h_ue - 13.0) / 10.0, 1.5);
    return h * 1.25 * std::pow(d2d / 100.0, 3.0) * std::exp(-d2d / 150.0);
}

} // namespace detail

/// LOS probability for one link. Frequency never enters: the models are
/// purely geometric. The result is clamped to [0, 1].
inline double los_probability(Scenario sce, const LinkGeometry& geom, const LosModelParams& p)
{
    const double d2d = geom.d2d_m;
    if (!(d2d > 0.0))
        throw std::invalid_argument("los_probability: requires d2D > 0");

    double prob = 0.0;
    switch (sce)
    {
    case Scenario::UMi:
        prob = detail::squared_los_model(d2d, p.umi_d1_m, p.umi_d2_m);
        break;
    case Scenario::UMa:
    {
        const double h_ue = ue_height_m(geom);
        if (h_ue > p.uma_h_ue_max_m)
            throw std::invalid_argument("los_probability: UMa aerial correction is only valid up "
                                        "to a UE height of " +
                                        std::to_string(p.uma_h_ue_max_m) + " m");
        const double e = std::exp(-d2d / p.uma_d2_m);
        const double inner = (std::min(p.uma_d1_m / d2d, 1.0) * (1.0 - e) + e) *
                             (1.0 + detail::uma_aerial_correction(d2d, h_ue));
        prob = inner * inner;
        break;
    }
    case Scenario::RMa:
        prob = (d2d <= p.rma_breakpoint_m)
                   ? 1.0
                   : std::exp(-(d2d - p.rma_breakpoint_m) / p.rma_decay_m);
        break;
    case Scenario::InH:
        if (d2d <= p.inh_p1_m)
            prob = 1.0;
        else if (d2d < p.inh_p2_m)
            prob = std::exp(-(d2d - p.inh_p1_m) / p.inh_decay1_m);
        else
            prob = p.inh_scale2 * std::exp(-(d2d - p.inh_p2_m) / p.inh_decay2_m);
        break;
    case Scenario::InF:
    {
        if (p.inf_subscenarios.empty())
            throw std::invalid_argument("los_probability: InF clutter parameters missing");
        // Mean of the sub-scenario models exp(-d2D/k); for a BS above the
        // clutter k is stretched by (hBS - hUT)/(hc - hUT).
        double sum = 0.0;
        for (const InfSubscenario& s : p.inf_subscenarios)
        {
            double k = -s.clutter_size_m / std::log(1.0 - s.clutter_density);
            if (s.bs_above_clutter)
            {
                const double denom = s.clutter_height_m - p.inf_h_ut_m;
                if (denom <= 0.0)
                    throw std::invalid_argument(
                        "los_probability: InF clutter height must exceed the UT height");
                k *= (s.h_bs_m - p.inf_h_ut_m) / denom;
            }
            if (!(k > 0.0))
                throw std::invalid_argument("los_probability: invalid InF clutter parameters");
            sum += std::exp(-d2d / k);
        }
        prob = sum / static_cast<double>(p.inf_subscenarios.size());
        break;
    }
    }
    return std::clamp(prob, 0.0, 1.0);
}

/// Bernoulli draw of the per-drop condition; LOS with probability p_los.
inline ChannelCondition draw_condition(double p_los, RngStream& rng)
{
    if (!(p_los >= 0.0 && p_los <= 1.0))
        throw std::invalid_argument("draw_condition: probability outside [0, 1]");
    return (rng.uniform01() < p_los) ? ChannelCondition::Los : ChannelCondition::Nlos;
}

} // namespace nyucsim
