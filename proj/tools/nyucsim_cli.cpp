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
// Command line front end. Subcommands:
//   sweep    path loss vs distance (mean curves)
//   drops    Monte Carlo drops with per-drop channel realizations
//   validate generation-procedure distribution report
//   dump     per-subpath realization dump
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nyucsim/nyucsim.hpp"

namespace {

using namespace nyucsim;

struct CommonFlags {
    std::string config_path;
    std::optional<std::string> scenario;
    std::optional<double> frequency_ghz;
    std::optional<double> rf_bandwidth_hz;
    std::optional<std::uint64_t> drops;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> condition;
    std::optional<bool> shadowing;
    std::optional<std::string> o2i;
    std::optional<double> foliage_db_per_m;
    std::optional<double> foliage_depth_m;
    std::optional<bool> atmosphere;
    std::optional<double> gnb_height_m;
    std::optional<double> ue_height_m;
    std::optional<double> tx_power_dbm;
    std::optional<double> d_min_m;
    std::optional<double> d_max_m;
    std::vector<double> distances_m;
    std::optional<int> subbands;
    std::optional<int> jobs;
    std::optional<std::string> params_file;
    std::optional<std::string> atmosphere_file;
    std::vector<double> ue_velocity_mps;
    std::vector<double> times_s;
    std::optional<double> max_measurable_pl_db;
    std::optional<double> min_prune_span_db;
    std::optional<double> baseband_bandwidth_hz;
    std::optional<bool> inh_lognormal;
    std::optional<double> inh_lognormal_sigma;
    std::vector<int> tx_array_shape;
    std::vector<int> rx_array_shape;
    std::optional<double> tx_spacing;
    std::optional<double> rx_spacing;
    std::optional<std::string> tx_pattern;
    std::optional<std::string> rx_pattern;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--config", f.config_path, "JSON config file; flags override its keys");
    cmd->add_option("--scenario", f.scenario, "UMi, UMa, RMa, InH or InF");
    cmd->add_option("--freq-ghz", f.frequency_ghz, "carrier frequency in GHz [0.5, 150]");
    cmd->add_option("--rf-bw-hz", f.rf_bandwidth_hz, "RF bandwidth in Hz");
    cmd->add_option("--drops", f.drops, "number of drops (per distance in sweep mode)");
    cmd->add_option("--seed", f.seed, "RNG seed");
    cmd->add_option("--condition", f.condition, "auto, los or nlos");
    cmd->add_option("--shadowing", f.shadowing, "enable shadow fading (true/false)");
    cmd->add_option("--o2i", f.o2i, "O2I penetration mode: none, low or high");
    cmd->add_option("--foliage-db-per-m", f.foliage_db_per_m, "foliage loss per meter");
    cmd->add_option("--foliage-depth-m", f.foliage_depth_m, "foliage depth in meters");
    cmd->add_option("--atmosphere", f.atmosphere, "enable atmospheric attenuation (true/false)");
    cmd->add_option("--gnb-height", f.gnb_height_m, "gNB height in meters (default per scenario)");
    cmd->add_option("--ue-height", f.ue_height_m, "UE height in meters");
    cmd->add_option("--tx-power-dbm", f.tx_power_dbm, "transmit power in dBm");
    cmd->add_option("--d-min", f.d_min_m, "minimum 2D distance in meters");
    cmd->add_option("--d-max", f.d_max_m, "maximum 2D distance in meters");
    cmd->add_option("--distance", f.distances_m, "fixed sweep distance(s) in meters");
    cmd->add_option("--subbands", f.subbands, "number of PSD subbands");
    cmd->add_option("--jobs", f.jobs, "worker threads");
    cmd->add_option("--params", f.params_file, "parameter anchor file");
    cmd->add_option("--atmosphere-table", f.atmosphere_file, "atmosphere table file");
    cmd->add_option("--ue-velocity", f.ue_velocity_mps, "UE velocity vector in m/s")
        ->expected(3);
    cmd->add_option("--time", f.times_s, "PSD evaluation time(s) in seconds");
    cmd->add_option("--max-measurable-pl", f.max_measurable_pl_db,
                    "receiver maximum measurable path loss in dB");
    cmd->add_option("--min-prune-span", f.min_prune_span_db,
                    "minimum dynamic-range span in dB");
    cmd->add_option("--baseband-bw-hz", f.baseband_bandwidth_hz,
                    "baseband bandwidth for the intra-cluster delay grid (0 = rf/2)");
    cmd->add_option("--inh-lognormal", f.inh_lognormal,
                    "use the lognormal indoor cluster-delay law (true/false)");
    cmd->add_option("--inh-lognormal-sigma", f.inh_lognormal_sigma,
                    "log-domain sigma of the lognormal cluster-delay law");
    cmd->add_option("--tx-array", f.tx_array_shape, "Tx array rows cols")->expected(2);
    cmd->add_option("--rx-array", f.rx_array_shape, "Rx array rows cols")->expected(2);
    cmd->add_option("--tx-spacing", f.tx_spacing, "Tx element spacing in wavelengths");
    cmd->add_option("--rx-spacing", f.rx_spacing, "Rx element spacing in wavelengths");
    cmd->add_option("--tx-pattern", f.tx_pattern, "Tx element pattern: iso or 3gpp");
    cmd->add_option("--rx-pattern", f.rx_pattern, "Rx element pattern: iso or 3gpp");
}

DropConfig make_config(const CommonFlags& f)
{
    DropConfig cfg;
    if (!f.config_path.empty())
        cfg = load_config(f.config_path);
    if (f.scenario) cfg.scenario = scenario_from_string(*f.scenario);
    if (f.frequency_ghz) cfg.frequency_ghz = *f.frequency_ghz;
    if (f.rf_bandwidth_hz) cfg.rf_bandwidth_hz = *f.rf_bandwidth_hz;
    if (f.drops) cfg.drops = *f.drops;
    if (f.seed) cfg.seed = *f.seed;
    if (f.condition) cfg.condition = condition_override_from_string(*f.condition);
    if (f.shadowing) cfg.shadowing = *f.shadowing;
    if (f.o2i) cfg.o2i_mode = o2i_mode_from_string(*f.o2i);
    if (f.foliage_db_per_m) cfg.foliage_db_per_m = *f.foliage_db_per_m;
    if (f.foliage_depth_m) cfg.foliage_depth_m = *f.foliage_depth_m;
    if (f.atmosphere) cfg.atmosphere = *f.atmosphere;
    if (f.gnb_height_m) cfg.gnb_height_m = *f.gnb_height_m;
    if (f.ue_height_m) cfg.ue_height_m = *f.ue_height_m;
    if (f.tx_power_dbm) cfg.tx_power_dbm = *f.tx_power_dbm;
    if (f.d_min_m) cfg.d_min_m = *f.d_min_m;
    if (f.d_max_m) cfg.d_max_m = *f.d_max_m;
    if (!f.distances_m.empty()) cfg.distances_m = f.distances_m;
    if (f.subbands) cfg.subbands = *f.subbands;
    if (f.jobs) cfg.jobs = *f.jobs;
    if (f.params_file) cfg.params_file = *f.params_file;
    if (f.atmosphere_file) cfg.atmosphere_file = *f.atmosphere_file;
    if (!f.ue_velocity_mps.empty())
        cfg.ue_velocity_mps = {f.ue_velocity_mps[0], f.ue_velocity_mps[1], f.ue_velocity_mps[2]};
    if (!f.times_s.empty()) cfg.times_s = f.times_s;
    if (f.max_measurable_pl_db) cfg.max_measurable_pl_db = *f.max_measurable_pl_db;
    if (f.min_prune_span_db) cfg.min_prune_span_db = *f.min_prune_span_db;
    if (f.baseband_bandwidth_hz) cfg.baseband_bandwidth_hz = *f.baseband_bandwidth_hz;
    if (f.inh_lognormal) cfg.inh_cluster_delay_lognormal = *f.inh_lognormal;
    if (f.inh_lognormal_sigma) cfg.inh_lognormal_sigma = *f.inh_lognormal_sigma;
    if (!f.tx_array_shape.empty())
    {
        cfg.tx_array.rows = f.tx_array_shape[0];
        cfg.tx_array.cols = f.tx_array_shape[1];
    }
    if (!f.rx_array_shape.empty())
    {
        cfg.rx_array.rows = f.rx_array_shape[0];
        cfg.rx_array.cols = f.rx_array_shape[1];
    }
    if (f.tx_spacing) cfg.tx_array.spacing_wavelengths = *f.tx_spacing;
    if (f.rx_spacing) cfg.rx_array.spacing_wavelengths = *f.rx_spacing;
    if (f.tx_pattern) cfg.tx_array.pattern = element_pattern_from_string(*f.tx_pattern);
    if (f.rx_pattern) cfg.rx_array.pattern = element_pattern_from_string(*f.rx_pattern);
    return cfg;
}

std::ofstream open_output(const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw ConfigError("cannot open output file '" + path + "'");
    return os;
}

void write_to(const std::string& path, const std::function<void(std::ostream&)>& writer)
{
    if (path.empty() || path == "-")
    {
        writer(std::cout);
        return;
    }
    std::ofstream os = open_output(path);
    writer(os);
}

int run_sweep(const CommonFlags& flags, const std::string& out, int grid_points)
{
    DropConfig cfg = make_config(flags);
    if (cfg.distances_m.empty())
        cfg.distances_m = log_spaced_distances(cfg.d_min_m, cfg.d_max_m, grid_points);
    const RunContext ctx = RunContext::make(cfg);
    const std::vector<SweepPoint> points = sweep_path_loss(cfg, ctx);
    write_to(out, [&](std::ostream& os) { write_sweep_csv(points, os); });
    return 0;
}

int run_monte_carlo(const CommonFlags& flags, const std::string& out, const std::string& dump_out,
                    const std::string& psd_out, const std::string& bins_out, int bins)
{
    DropConfig cfg = make_config(flags);
    const RunContext ctx = RunContext::make(cfg);
    RunOptions opt;
    opt.keep_realizations = !dump_out.empty();
    opt.keep_psd = !psd_out.empty();
    const std::vector<DropOutput> outputs = run_drops(cfg, ctx, opt);
    write_to(out, [&](std::ostream& os) { write_drops_csv(outputs, os); });
    if (!dump_out.empty())
        write_to(dump_out, [&](std::ostream& os) { write_realization_dump_csv(outputs, os); });
    if (!psd_out.empty())
        write_to(psd_out, [&](std::ostream& os) { write_psd_csv(outputs, os); });
    if (!bins_out.empty())
    {
        std::vector<DropResult> results;
        results.reserve(outputs.size());
        for (const DropOutput& o : outputs)
            results.push_back(o.result);
        const auto report = mean_pathloss_report(results, bins);
        write_to(bins_out, [&](std::ostream& os) { write_pathloss_bins_csv(report, os); });
    }
    return 0;
}

int run_validate(const CommonFlags& flags, const std::string& out, std::uint64_t realizations)
{
    DropConfig cfg = make_config(flags);
    if (cfg.condition == ConditionOverride::Auto)
        throw ConfigError("validate requires --condition los or --condition nlos");
    cfg.drops = realizations;
    cfg.distances_m.clear();
    const RunContext ctx = RunContext::make(cfg);
    RunOptions opt;
    opt.keep_realizations = true;
    const std::vector<DropOutput> outputs = run_drops(cfg, ctx, opt);
    std::vector<ChannelRealization> reals;
    reals.reserve(outputs.size());
    for (const DropOutput& o : outputs)
        reals.push_back(*o.realization);
    const ChannelCondition cond = (cfg.condition == ConditionOverride::ForceLos)
                                      ? ChannelCondition::Los
                                      : ChannelCondition::Nlos;
    const ScenarioParams params =
        ctx.params.params_for(cfg.scenario, cond, cfg.frequency_ghz);
    const std::vector<GofResult> report = distribution_report(reals, params);
    write_to(out, [&](std::ostream& os) { write_gof_csv(report, os); });

    std::size_t failed = 0, insufficient = 0;
    for (const GofResult& g : report)
    {
        if (!g.sufficient)
            ++insufficient;
        else if (g.p_value < 0.01)
            ++failed;
    }
    std::cerr << report.size() << " checks, " << failed << " below p=0.01, " << insufficient
              << " with insufficient samples\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"drop-based statistical channel simulator (0.5-150 GHz)"};
    app.require_subcommand(1);

    CommonFlags sweep_flags, drops_flags, validate_flags, dump_flags;
    std::string sweep_out = "-", drops_out = "-", dump_out, psd_out, bins_out, validate_out = "-";
    std::string dump_main_out;
    int grid_points = 20;
    int bins = 20;
    std::uint64_t validate_realizations = 20000;

    CLI::App* sweep = app.add_subcommand("sweep", "mean path loss vs distance");
    add_common_flags(sweep, sweep_flags);
    sweep->add_option("--points", grid_points, "log-spaced grid size when no --distance given");
    sweep->add_option("-o,--out", sweep_out, "output CSV ('-' for stdout)");

    CLI::App* drops = app.add_subcommand("drops", "Monte Carlo drop simulation");
    add_common_flags(drops, drops_flags);
    drops->add_option("-o,--out", drops_out, "per-drop CSV ('-' for stdout)");
    drops->add_option("--dump-out", dump_out, "per-subpath realization dump CSV");
    drops->add_option("--psd-out", psd_out, "per-subband PSD CSV");
    drops->add_option("--bins-out", bins_out, "distance-binned mean path loss CSV");
    drops->add_option("--bins", bins, "number of distance bins for --bins-out");

    CLI::App* validate = app.add_subcommand("validate", "distribution fidelity report");
    add_common_flags(validate, validate_flags);
    validate->add_option("--realizations", validate_realizations, "realizations to generate");
    validate->add_option("-o,--out", validate_out, "report CSV ('-' for stdout)");

    CLI::App* dump = app.add_subcommand("dump", "per-subpath realization dump");
    add_common_flags(dump, dump_flags);
    dump->add_option("-o,--out", dump_main_out, "dump CSV ('-' for stdout)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try
    {
        if (sweep->parsed())
            return run_sweep(sweep_flags, sweep_out, grid_points);
        if (drops->parsed())
            return run_monte_carlo(drops_flags, drops_out, dump_out, psd_out, bins_out, bins);
        if (validate->parsed())
            return run_validate(validate_flags, validate_out, validate_realizations);
        if (dump->parsed())
        {
            DropConfig cfg = make_config(dump_flags);
            const RunContext ctx = RunContext::make(cfg);
            RunOptions opt;
            opt.keep_realizations = true;
            const std::vector<DropOutput> outputs = run_drops(cfg, ctx, opt);
            write_to(dump_main_out.empty() ? "-" : dump_main_out,
                     [&](std::ostream& os) { write_realization_dump_csv(outputs, os); });
            return 0;
        }
    }
    catch (const nyucsim::ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
