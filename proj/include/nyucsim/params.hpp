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
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nyucsim/common.hpp"
#include "nyucsim/types.hpp"

namespace nyucsim {

/// Linear anchor interpolation: returns p28 for f <= 28 GHz, p140 for
/// f >= 140 GHz, and the straight line through the two anchors in between.
/// Continuous at both anchors and monotone between them.
inline double interpolate_param(double p28, double p140, double f_ghz)
{
    if (!std::isfinite(p28) || !std::isfinite(p140) || !std::isfinite(f_ghz) || f_ghz <= 0.0)
        throw std::invalid_argument("interpolate_param: non-finite input or non-positive frequency");
    if (f_ghz <= 28.0)
        return p28;
    if (f_ghz >= 140.0)
        return p140;
    return (p140 - p28) / (140.0 - 28.0) * f_ghz + (5.0 * p28 - p140) / 4.0;
}

/// All model parameters for one (scenario, condition) pair resolved at a
/// carrier frequency. Fields whose distribution family differs between the
/// anchor frequencies carry both parameterizations; the active family is
/// selected by comparing the frequency against family_switch_ghz.
struct ScenarioParams {
    Scenario scenario{};
    ChannelCondition condition{};
    double frequency_ghz = 0.0;
    double family_switch_ghz = 100.0;

    // large scale
    bool has_ple = true;      // RMa rows are NA; the CIH model applies instead
    double ple = 0.0;         // n
    double shadow_sigma_db = 0.0; // chi_sigma
    double shadow_corr_distance_m = 0.0;

    // number of time clusters
    double cluster_count_max = 0.0; // N_c for DU(1, N_c), outdoor scenarios
    double cluster_rate = 0.0;      // lambda_c for Poisson(lambda_c)+1, indoor

    // number of subpaths per cluster
    double subpath_count_max = 0.0; // M_s, discrete-uniform family
    double subpath_mean = 0.0;      // mu_s, discrete-exponential family
    double subpath_beta = 0.0;      // beta_s, indoor composite weight

    // cluster excess delay
    double cluster_delay_mean_ns = 0.0;  // mu_tau, exponential family
    double cluster_delay_shape = 0.0;    // alpha_tau, InF gamma family
    double cluster_delay_scale_ns = 0.0; // beta_tau
    double mti_ns = 0.0;

    // intra-cluster subpath excess delay
    double intra_delay_exponent_max = 0.0; // X, outdoor < 100 GHz formula
    double intra_delay_mean_ns = 0.0;      // mu_rho, exponential family
    double intra_delay_shape = 0.0;        // alpha_rho, InF gamma family
    double intra_delay_scale_ns = 0.0;     // beta_rho

    // cluster / subpath power
    double cluster_decay_ns = 0.0;   // Gamma
    double cluster_shadow_db = 0.0;  // sigma_Z
    double subpath_decay_ns = 0.0;   // gamma
    double subpath_shadow_db = 0.0;  // sigma_U

    // spatial lobes
    double lobe_rate_aod = 0.0; // lambda_l,AOD
    double lobe_rate_aoa = 0.0; // lambda_l,AOA
    double lobe_elev_mean_zod_deg = 0.0;  // mu_l,ZOD
    double lobe_elev_sigma_zod_deg = 0.0; // sigma_l,ZOD
    double lobe_elev_mean_zoa_deg = 0.0;
    double lobe_elev_sigma_zoa_deg = 0.0;

    // subpath angular offsets
    double offset_sigma_aod_az_deg = 0.0; // sigma_phi,AOD
    double offset_sigma_zod_deg = 0.0;    // sigma_theta,ZOD
    double offset_sigma_aoa_az_deg = 0.0;
    double offset_sigma_zoa_deg = 0.0;

    // cross-polarization discrimination (dB domain)
    double xpd_mean_db = 0.0;
    double xpd_sigma_db = 0.0;

    bool high_band() const { return frequency_ghz >= family_switch_ghz; }
};

struct O2iModelParams {
    double a = 0.0;
    double b = 0.0;
    double sigma_db = 0.0;
};

struct InfSubscenario {
    std::string name;
    double clutter_density = 0.0; // r, fraction in (0, 1)
    double clutter_size_m = 0.0;  // d_clutter
    double clutter_height_m = 0.0;
    bool bs_above_clutter = false;
    double h_bs_m = 0.0;
};

/// LOS-probability model constants (transcribed values live in the
/// parameter data file, see los_probability there).
struct LosModelParams {
    double umi_d1_m = 22.0;
    double umi_d2_m = 100.0;
    double uma_d1_m = 20.0;
    double uma_d2_m = 160.0;
    double uma_h_ue_max_m = 23.0;
    double rma_breakpoint_m = 10.0;
    double rma_decay_m = 1000.0;
    double inh_p1_m = 1.2;
    double inh_decay1_m = 4.7;
    double inh_p2_m = 6.5;
    double inh_decay2_m = 32.6;
    double inh_scale2 = 0.32;
    double inf_h_ut_m = 1.5;
    std::vector<InfSubscenario> inf_subscenarios;
};

/// Parameter table loaded from the anchor data file. Holds the raw per-anchor
/// records and resolves a ScenarioParams at any frequency in [0.5, 150] GHz
/// via interpolate_param; InF uses its single 140 GHz anchor across the band.
class ParamTable {
public:
    using json = nlohmann::json;

    static ParamTable load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open parameter file '" + path + "'");
        json j;
        try
        {
            in >> j;
        }
        catch (const json::parse_error& e)
        {
            throw ConfigError("parameter file '" + path + "': " + e.what());
        }
        return from_json(j);
    }

    static ParamTable from_json(const json& j)
    {
        ParamTable t;
        t.validate_and_store(j);
        return t;
    }

    ScenarioParams params_for(Scenario sce, ChannelCondition cond, double f_ghz) const
    {
        if (!std::isfinite(f_ghz) || f_ghz < 0.5 || f_ghz > 150.0)
            throw ConfigError("frequency " + std::to_string(f_ghz) +
                              " GHz outside the supported [0.5, 150] GHz range");

        const Record& lo = record(sce, cond, 28);
        const Record& hi = record(sce, cond, 140);

        ScenarioParams p;
        p.scenario = sce;
        p.condition = cond;
        p.frequency_ghz = f_ghz;
        p.family_switch_ghz = family_switch_ghz_;
        p.mti_ns = mti_ns_.at(sce);
        p.shadow_corr_distance_m = shadow_corr_.at({sce, cond});

        // InF has a single anchor; its values apply across the whole band.
        const bool inf = (sce == Scenario::InF);
        auto field = [&](const char* key, bool required = false) -> double {
            const auto a = lo.get(key);
            const auto b = hi.get(key);
            if (inf)
            {
                if (!b)
                {
                    if (required)
                        throw ConfigError(std::string("parameter file: InF missing field ") + key);
                    return 0.0;
                }
                return *b;
            }
            if (a && b)
                return interpolate_param(*a, *b, f_ghz);
            if (a && !b)
                return *a; // family parameter anchored at 28 GHz only
            if (!a && b)
                return *b; // family parameter anchored at 140 GHz only
            if (required)
                throw ConfigError(std::string("parameter file: missing field ") + key + " for " +
                                  to_string(sce) + "/" + to_string(cond));
            return 0.0;
        };

        if (sce == Scenario::RMa)
        {
            p.has_ple = false; // path loss comes from the height-dependent model
        }
        else
        {
            p.has_ple = true;
            p.ple = field("n", true);
        }
        p.shadow_sigma_db = field("chi_sigma", true);

        p.cluster_count_max = field("N_c");
        p.cluster_rate = field("lambda_c");
        p.subpath_count_max = field("M_s");
        p.subpath_mean = field("mu_s");
        p.subpath_beta = field("beta_s");
        p.cluster_delay_mean_ns = field("mu_tau");
        p.cluster_delay_shape = field("alpha_tau");
        p.cluster_delay_scale_ns = field("beta_tau");
        p.intra_delay_exponent_max = field("X");
        p.intra_delay_mean_ns = field("mu_rho");
        p.intra_delay_shape = field("alpha_rho");
        p.intra_delay_scale_ns = field("beta_rho");
        p.cluster_decay_ns = field("Gamma", true);
        p.cluster_shadow_db = field("sigma_Z", true);
        p.subpath_decay_ns = field("gamma", true);
        p.subpath_shadow_db = field("sigma_U", true);
        p.lobe_rate_aod = field("lambda_l_AOD", true);
        p.lobe_rate_aoa = field("lambda_l_AOA", true);
        p.lobe_elev_mean_zod_deg = field("mu_l_ZOD", true);
        p.lobe_elev_sigma_zod_deg = field("sigma_l_ZOD", true);
        p.lobe_elev_mean_zoa_deg = field("mu_l_ZOA", true);
        p.lobe_elev_sigma_zoa_deg = field("sigma_l_ZOA", true);
        p.offset_sigma_aod_az_deg = field("sigma_phi_AOD", true);
        p.offset_sigma_zod_deg = field("sigma_theta_ZOD", true);
        p.offset_sigma_aoa_az_deg = field("sigma_phi_AOA", true);
        p.offset_sigma_zoa_deg = field("sigma_theta_ZOA", true);

        const XpdParams& x = xpd_.at(cond);
        p.xpd_mean_db = x.mean_base_db + x.mean_slope_db_per_ghz * f_ghz;
        p.xpd_sigma_db = x.sigma_db;

        return p;
    }

    const LosModelParams& los_params() const { return los_; }
    const O2iModelParams& o2i_params(bool high_loss) const
    {
        return high_loss ? o2i_high_ : o2i_low_;
    }

private:
    struct Record {
        std::map<std::string, double> fields;
        std::optional<double> get(const std::string& key) const
        {
            auto it = fields.find(key);
            if (it == fields.end())
                return std::nullopt;
            return it->second;
        }
    };

    struct XpdParams {
        double mean_base_db = 0.0;
        double mean_slope_db_per_ghz = 0.0;
        double sigma_db = 0.0;
    };

    const Record& record(Scenario sce, ChannelCondition cond, int anchor) const
    {
        // InF carries only the 140 GHz anchor; both lookups resolve to it.
        if (sce == Scenario::InF)
            anchor = 140;
        auto it = records_.find(std::make_tuple(sce, cond, anchor));
        if (it == records_.end())
            throw ConfigError("parameter file: no record for " + to_string(sce) + "/" +
                              to_string(cond) + " at " + std::to_string(anchor) + " GHz");
        return it->second;
    }

    void validate_and_store(const json& j)
    {
        const int version = j.value("version", 0);
        if (version != 1)
            throw ConfigError("parameter file: unsupported version " + std::to_string(version) +
                              " (expected 1)");
        require(j, "scenarios");
        require(j, "mti_ns");
        require(j, "los_probability");
        require(j, "shadow_correlation_distance_m");
        require(j, "o2i");
        require(j, "xpd");
        family_switch_ghz_ = j.value("family_switch_ghz", 100.0);

        for (Scenario sce : all_scenarios)
        {
            const std::string name = to_string(sce);
            mti_ns_[sce] = j.at("mti_ns").at(name).get<double>();
            const json& js = j.at("scenarios").at(name);
            for (ChannelCondition cond : all_conditions)
            {
                const json& jc = js.at(to_string(cond));
                for (auto& [anchor_key, rec] : jc.items())
                {
                    const int anchor = std::stoi(anchor_key);
                    if (anchor != 28 && anchor != 140)
                        throw ConfigError("parameter file: unexpected anchor '" + anchor_key + "'");
                    Record r;
                    for (auto& [k, v] : rec.items())
                    {
                        if (!v.is_number())
                            throw ConfigError("parameter file: field " + k + " must be numeric");
                        const double d = v.get<double>();
                        if (!std::isfinite(d))
                            throw ConfigError("parameter file: field " + k + " is not finite");
                        r.fields[k] = d;
                    }
                    check_record(sce, cond, anchor, r);
                    records_[std::make_tuple(sce, cond, anchor)] = std::move(r);
                }
                if (sce != Scenario::InF)
                {
                    record(sce, cond, 28);
                    record(sce, cond, 140);
                }
                else
                {
                    record(sce, cond, 140);
                }
                shadow_corr_[{sce, cond}] =
                    j.at("shadow_correlation_distance_m").at(name).at(to_string(cond)).get<double>();
            }
        }

        const json& jlos = j.at("los_probability");
        los_.umi_d1_m = jlos.at("UMi").at("d1_m").get<double>();
        los_.umi_d2_m = jlos.at("UMi").at("d2_m").get<double>();
        los_.uma_d1_m = jlos.at("UMa").at("d1_m").get<double>();
        los_.uma_d2_m = jlos.at("UMa").at("d2_m").get<double>();
        los_.uma_h_ue_max_m = jlos.at("UMa").value("h_ue_max_m", 23.0);
        los_.rma_breakpoint_m = jlos.at("RMa").at("breakpoint_m").get<double>();
        los_.rma_decay_m = jlos.at("RMa").at("decay_m").get<double>();
        los_.inh_p1_m = jlos.at("InH").at("p1_m").get<double>();
        los_.inh_decay1_m = jlos.at("InH").at("decay1_m").get<double>();
        los_.inh_p2_m = jlos.at("InH").at("p2_m").get<double>();
        los_.inh_decay2_m = jlos.at("InH").at("decay2_m").get<double>();
        los_.inh_scale2 = jlos.at("InH").at("scale2").get<double>();
        los_.inf_h_ut_m = jlos.at("InF").at("h_ut_m").get<double>();
        for (const json& s : jlos.at("InF").at("subscenarios"))
        {
            InfSubscenario sub;
            sub.name = s.at("name").get<std::string>();
            sub.clutter_density = s.at("clutter_density").get<double>();
            sub.clutter_size_m = s.at("clutter_size_m").get<double>();
            sub.clutter_height_m = s.at("clutter_height_m").get<double>();
            sub.bs_above_clutter = s.at("bs_above_clutter").get<bool>();
            sub.h_bs_m = s.at("h_bs_m").get<double>();
            if (!(sub.clutter_density > 0.0 && sub.clutter_density < 1.0))
                throw ConfigError("InF clutter density must be in (0, 1)");
            if (sub.clutter_size_m <= 0.0)
                throw ConfigError("InF clutter size must be positive");
            los_.inf_subscenarios.push_back(std::move(sub));
        }
        if (los_.inf_subscenarios.empty())
            throw ConfigError("parameter file: InF requires at least one sub-scenario");
        if (los_.umi_d1_m <= 0 || los_.umi_d2_m <= 0 || los_.uma_d1_m <= 0 || los_.uma_d2_m <= 0)
            throw ConfigError("LOS probability distances d1/d2 must be positive");

        o2i_low_ = {j.at("o2i").at("low").at("a").get<double>(),
                    j.at("o2i").at("low").at("b").get<double>(),
                    j.at("o2i").at("low").at("sigma_db").get<double>()};
        o2i_high_ = {j.at("o2i").at("high").at("a").get<double>(),
                     j.at("o2i").at("high").at("b").get<double>(),
                     j.at("o2i").at("high").at("sigma_db").get<double>()};

        for (ChannelCondition cond : all_conditions)
        {
            const json& jx = j.at("xpd").at(to_string(cond));
            xpd_[cond] = {jx.at("mean_base_db").get<double>(),
                          jx.at("mean_slope_db_per_ghz").get<double>(),
                          jx.at("sigma_db").get<double>()};
        }
    }

    static void require(const json& j, const char* key)
    {
        if (!j.contains(key))
            throw ConfigError(std::string("parameter file: missing top-level key '") + key + "'");
    }

    static void check_record(Scenario sce, ChannelCondition cond, int anchor, const Record& r)
    {
        auto expect = [&](const char* key) {
            if (!r.get(key))
                throw ConfigError("parameter file: " + to_string(sce) + "/" + to_string(cond) +
                                  "@" + std::to_string(anchor) + " missing " + key);
        };
        for (const char* key : {"chi_sigma", "Gamma", "sigma_Z", "gamma", "sigma_U",
                                "lambda_l_AOD", "lambda_l_AOA", "mu_l_ZOD", "sigma_l_ZOD",
                                "mu_l_ZOA", "sigma_l_ZOA", "sigma_phi_AOD", "sigma_theta_ZOD",
                                "sigma_phi_AOA", "sigma_theta_ZOA"})
            expect(key);
        if (sce != Scenario::RMa)
            expect("n");
        // family anchors
        if (sce == Scenario::UMi || sce == Scenario::UMa || sce == Scenario::RMa)
        {
            if (anchor == 28)
            {
                expect("M_s");
                expect("X");
                expect("mu_tau");
            }
            else
            {
                if (sce == Scenario::RMa)
                    expect("M_s");
                else
                    expect("mu_s");
                expect("mu_rho");
                expect("mu_tau");
            }
            expect("N_c");
        }
        else if (sce == Scenario::InH)
        {
            for (const char* key : {"lambda_c", "beta_s", "mu_s", "mu_tau", "mu_rho"})
                expect(key);
        }
        else // InF
        {
            for (const char* key :
                 {"lambda_c", "beta_s", "mu_s", "alpha_tau", "beta_tau", "alpha_rho", "beta_rho"})
                expect(key);
        }
        // plausibility: delay constants and standard deviations are non-negative
        for (const auto& [k, v] : r.fields)
        {
            const bool is_scale = k == "mu_tau" || k == "mu_rho" || k == "Gamma" || k == "gamma" ||
                                  k == "beta_tau" || k == "beta_rho" || k == "sigma_Z" ||
                                  k == "sigma_U" || k == "chi_sigma" || k.rfind("sigma_", 0) == 0;
            if (is_scale && v < 0.0)
                throw ConfigError("parameter file: " + k + " must be non-negative");
        }
    }

    std::map<std::tuple<Scenario, ChannelCondition, int>, Record> records_;
    std::map<Scenario, double> mti_ns_;
    std::map<std::pair<Scenario, ChannelCondition>, double> shadow_corr_;
    std::map<ChannelCondition, XpdParams> xpd_;
    LosModelParams los_;
    O2iModelParams o2i_low_, o2i_high_;
    double family_switch_ghz_ = 100.0;
};

/// Resolves the data directory: $NYUCSIM_DATA_DIR wins, then the compiled-in
/// source location, then ./data.
inline std::string default_data_dir()
{
    if (const char* env = std::getenv("NYUCSIM_DATA_DIR"))
        return env;
#ifdef NYUCSIM_DATA_DIR
    return NYUCSIM_DATA_DIR;
#else
    return "data";
#endif
}

inline std::string default_params_path() { return default_data_dir() + "/nyu_channel_params.json"; }
inline std::string default_atmosphere_path()
{
    return default_data_dir() + "/atmosphere_db_per_km.txt";
}

} // namespace nyucsim
