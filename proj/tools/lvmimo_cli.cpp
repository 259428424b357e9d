// SPDX-License-Identifier: Apache-2.0
//
// lvmimo - loss visibility aware MIMO video transmission simulator
// Copyright (C) 2026 lvmimo contributors
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
// Command line front end. Subcommands: plan, gains, simulate, codebook.
// Configuration comes from a JSON file plus flag overrides; every dB/linear
// conversion happens here.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "lvmimo/common.hpp"
#include "lvmimo/config.hpp"

namespace {

using namespace lvmimo;

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::optional<int> nt, nr, retx_limit, quant_bits, threads;
    std::optional<double> es_n0_db, source_rate;
    std::optional<long> trials, coherence;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode, trace, codebook, channel;
};

void add_common_flags(CLI::App *cmd, CommonArgs &args) {
    cmd->add_option("-c,--config", args.config_path, "Run configuration JSON file");
    cmd->add_option("-o,--out", args.out_path, "Output file (default: stdout)");
    cmd->add_option("--nt", args.nt, "Transmit antennas (default 4)");
    cmd->add_option("--nr", args.nr, "Receive antennas (default 4)");
    cmd->add_option("--mode", args.mode, "Stream count or 'adaptive' (default 2)");
    cmd->add_option("--es-n0-db", args.es_n0_db, "Symbol SNR Es/N0 in dB (default 5)");
    cmd->add_option("--retx-limit", args.retx_limit, "Retransmission limit L (default 4)");
    cmd->add_option("--source-rate", args.source_rate, "Video source rate in bits/s (default 0)");
    cmd->add_option("--trace", args.trace, "Trace CSV path (default: synthetic source)");
    cmd->add_option("--codebook", args.codebook, "Codebook JSON path (default: full CSI)");
    cmd->add_option("--channel", args.channel, "Channel matrix JSON path (default: sampled)");
    cmd->add_option("--coherence", args.coherence, "Coherence block length in packets (default 256)");
    cmd->add_option("--trials", args.trials, "Monte Carlo trials (default 1000)");
    cmd->add_option("--threads", args.threads, "Worker threads (default 1)");
    cmd->add_option("--quant-bits", args.quant_bits, "Header score quantizer bits, 0 = exact (default 4)");
    cmd->add_option("--seed", args.seed,
                    "Random seed (default 1; env LVMIMO_SEED overrides the default)");
}

RunConfig resolve_config(const CommonArgs &args) {
    RunConfig config;
    bool config_names_seed = false;
    if (!args.config_path.empty()) {
        config = read_run_config(args.config_path);
        std::ifstream in(args.config_path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        config_names_seed = text.find("\"seed\"") != std::string::npos;
    }
    if (const char *env = std::getenv("LVMIMO_SEED"); env != nullptr && !config_names_seed)
        config.seed = std::strtoull(env, nullptr, 10);
    if (args.seed)
        config.seed = *args.seed;
    if (args.nt)
        config.nt = *args.nt;
    if (args.nr)
        config.nr = *args.nr;
    if (args.mode) {
        if (*args.mode == "adaptive") {
            config.adaptive_mode = true;
        } else {
            config.adaptive_mode = false;
            try {
                config.num_streams = std::stoi(*args.mode);
            } catch (const std::exception &) {
                throw std::invalid_argument("--mode expects a stream count or 'adaptive', got '" +
                                            *args.mode + "'");
            }
        }
    }
    if (args.es_n0_db)
        config.es_n0_db = *args.es_n0_db;
    if (args.retx_limit)
        config.retx_limit = *args.retx_limit;
    if (args.source_rate)
        config.source_rate = *args.source_rate;
    if (args.trace)
        config.trace_path = *args.trace;
    if (args.codebook)
        config.codebook_path = *args.codebook;
    if (args.channel)
        config.channel_path = *args.channel;
    if (args.coherence)
        config.coherence_packets = *args.coherence;
    if (args.trials)
        config.trials = *args.trials;
    if (args.threads)
        config.threads = *args.threads;
    if (args.quant_bits)
        config.visibility_quant_bits = *args.quant_bits;
    if (config.trace_path.empty() && !config.synthetic)
        config.synthetic = GopTraceConfig{}; // default packet source
    validate(config);
    return config;
}

void emit(const std::string &out_path, const std::string &payload) {
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path);
    if (!out)
        throw std::runtime_error("cannot open output file " + out_path);
    out << payload;
}

int cmd_plan(const CommonArgs &args) {
    RunConfig config = resolve_config(args);
    auto records = load_trace(config);
    TraceSummary summary = summarize_trace(records, config);
    ChannelRealization h = [&] {
        if (!config.channel_path.empty())
            return read_channel(config.channel_path);
        auto rng = make_rng(config.seed);
        return sample_rayleigh(config.nr, config.nt, rng);
    }();
    PrecoderSource source = config.codebook_path.empty()
                                ? PrecoderSource::svd()
                                : PrecoderSource::codebooks(
                                      {{config.num_streams, read_codebook(config.codebook_path)}});
    PlannerConfig pcfg = planner_config(config, summary.mean_packet_symbols);
    TransmissionPlan plan = config.adaptive_mode
                                ? select_mode(h, summary.dist, pcfg, source)
                                : plan_for_mode(h, summary.dist, pcfg, source, config.num_streams);
    emit(args.out_path, plan_to_json(plan) + "\n");
    return 0;
}

int cmd_gains(const CommonArgs &args) {
    RunConfig config = resolve_config(args);
    auto records = load_trace(config);
    TraceSummary summary = summarize_trace(records, config);
    GainConfig gcfg = gain_config(config);
    gcfg.mean_packet_symbols = summary.mean_packet_symbols;
    std::vector<double> grid =
        config.snr_grid_db.empty() ? std::vector<double>{config.es_n0_db} : config.snr_grid_db;

    GainSweepResult sweep;
    sweep.axis_label = "es_n0_db";
    std::optional<GainSweepResult> companion;
    if (!config.codebook_path.empty()) {
        Codebook cb = read_codebook(config.codebook_path);
        companion = GainSweepResult{"es_n0_db", {}};
        for (double point_db : grid) {
            GainConfig point = gcfg;
            point.es_over_n0 = db_to_linear(point_db);
            LimitedFeedbackReport rep =
                limited_feedback_gains(point, summary.dist, cb, config.trials);
            sweep.points.push_back({point_db, rep.limited});
            companion->points.push_back({point_db, rep.full_csi});
        }
    } else {
        sweep = snr_sweep(gcfg, summary.dist, grid, config.trials);
    }

    emit(args.out_path, gain_sweep_to_csv(sweep));
    if (!args.out_path.empty()) {
        std::ofstream meta(args.out_path + ".meta.json");
        meta << gain_sweep_sidecar_json(sweep, gcfg) << "\n";
        if (companion) {
            std::ofstream full(args.out_path + ".fullcsi.csv");
            full << gain_sweep_to_csv(*companion);
        }
    }
    return 0;
}

int cmd_simulate(const CommonArgs &args) {
    RunConfig config = resolve_config(args);
    auto records = load_trace(config);
    SessionResult session = run_session(records, config.coherence_packets, session_config(config));
    emit(args.out_path, session_to_csv(session));
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Loss-visibility aware video packet transmission over MIMO spatial streams"};
    app.require_subcommand(1);

    CommonArgs plan_args, gains_args, sim_args;
    CLI::App *plan = app.add_subcommand(
        "plan", "Compute one transmission plan (mode, MCS, ordering, thresholds) as JSON");
    add_common_flags(plan, plan_args);
    CLI::App *gains = app.add_subcommand(
        "gains", "Monte Carlo packet-prioritization and unequal-modulation gains as CSV");
    add_common_flags(gains, gains_args);
    CLI::App *simulate = app.add_subcommand(
        "simulate", "Replay a trace in coherence blocks; per-block realized objectives as CSV");
    add_common_flags(simulate, sim_args);

    CLI::App *codebook = app.add_subcommand("codebook", "Generate a precoder codebook JSON");
    int cb_nt = 4, cb_streams = 2, cb_bits = 3, cb_iterations = 800;
    std::uint64_t cb_seed = 1;
    std::string cb_out;
    codebook->add_option("--nt", cb_nt, "Transmit antennas")->capture_default_str();
    codebook->add_option("--streams", cb_streams, "Spatial streams per codeword")
        ->capture_default_str();
    codebook->add_option("--bits", cb_bits, "Feedback bits (2^bits codewords)")
        ->capture_default_str();
    codebook->add_option("--iterations", cb_iterations, "Packing refinement iterations")
        ->capture_default_str();
    codebook->add_option("--seed", cb_seed, "Random seed")->capture_default_str();
    codebook->add_option("-o,--out", cb_out, "Output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (plan->parsed())
            return cmd_plan(plan_args);
        if (gains->parsed())
            return cmd_gains(gains_args);
        if (simulate->parsed())
            return cmd_simulate(sim_args);
        if (codebook->parsed()) {
            if (const char *env = std::getenv("LVMIMO_SEED");
                env != nullptr && codebook->count("--seed") == 0)
                cb_seed = std::strtoull(env, nullptr, 10);
            auto rng = make_rng(cb_seed);
            Codebook cb = generate_codebook(cb_nt, cb_streams, cb_bits, cb_iterations, rng);
            emit(cb_out, codebook_to_json(cb) + "\n");
            return 0;
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
