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
// Monte Carlo gain estimation and session sweeps, decomposing the policy's
// advantage over non-prioritized transmission into two ratios of
// expectations over shared channel draws:
//   G_PP (quality side): sum_i p_i * classwise value, against multiplexing
//     every packet across the same per-stream links (their error rates
//     compose as 1 - prod(1-alpha_i)^(1/S));
//   G_UM (rate side): the prioritized post-retransmission sum throughput
//     C* sum_i R_i/r_i, against the stand-alone equal-modulation baseline
//     S * max_{M,C} C R / r_base.

#ifndef LVMIMO_EXPERIMENTS_HPP
#define LVMIMO_EXPERIMENTS_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "lvmimo/channel.hpp"
#include "lvmimo/link.hpp"
#include "lvmimo/policy.hpp"
#include "lvmimo/visibility.hpp"

namespace lvmimo {

struct GainConfig {
    int nt = 2;
    int nr = 2;
    int num_streams = 2;
    double es_over_n0 = 1.0; // linear
    std::vector<ModulationScheme> mod_set = default_modulation_set();
    std::vector<CodeRate> code_set = default_code_set();
    int retx_limit = 4;
    double bandwidth_hz = 1e6;
    double mean_packet_symbols = 100.0;
    double cond_cap = 1e12;
    std::optional<ChannelRealization> fixed_channel; // pin H instead of sampling
    int threads = 1;
    std::uint64_t seed = 1;
};

struct GainReport {
    double g_pp = 1.0;
    double g_um = 1.0;
    double g = 1.0; // g_pp * g_um by construction
    double se_pp = 0.0;
    double se_um = 0.0;
    double se_g = 0.0;
    long trials = 0;
    double min_realization_g_pp = 1.0; // smallest per-draw quality ratio
    std::string config_snapshot;       // JSON
};

/// Equal-modulation reference transmission: every packet rides all streams.
struct BaselineChoice {
    ModulationScheme mod;
    CodeRate code;
    double alpha_baseline = 0.0;
    double p_success = 1.0;
    double mean_transmissions = 1.0;
    double rate = 0.0; // bits/s of the common modulation
};

/// Picks the common (M, C) maximizing post-retransmission throughput
/// C * R / r_baseline; ties prefer the lower order, then the lower rate.
BaselineChoice select_baseline_mcs(const SnrVector &gammas,
                                   const std::vector<ModulationScheme> &mod_set,
                                   const std::vector<CodeRate> &code_set, int retx_limit,
                                   double mean_packet_symbols, double bandwidth_hz);

/// Channel draw used for trial `index`; exposed so tests can replay the exact
/// sequence a report was built from.
ChannelRealization trial_channel(const GainConfig &config, long index);

/// Monte Carlo gain decomposition over `trials` channel draws, each planned
/// with the SVD precoder. Deterministic for a given (config, seed) regardless
/// of the thread count.
GainReport monte_carlo_gains(const GainConfig &config, const VisibilityDistribution &dist,
                             long trials);

struct LimitedFeedbackReport {
    GainReport limited;
    GainReport full_csi; // companion run on identical channel draws
    std::vector<int> selected_codewords;
};

/// Gains with codebook-quantized precoding; SNRs come from the zero-forcing
/// expression under the selected codeword.
LimitedFeedbackReport limited_feedback_gains(const GainConfig &config,
                                             const VisibilityDistribution &dist,
                                             const Codebook &codebook, long trials);

struct GainSweepPoint {
    double axis = 0.0;
    GainReport report;
};

struct GainSweepResult {
    std::string axis_label;
    std::vector<GainSweepPoint> points;
};

/// One gain report per SNR grid point (dB axis), identical seeds across
/// points so curves share channel noise.
GainSweepResult snr_sweep(const GainConfig &config, const VisibilityDistribution &dist,
                          const std::vector<double> &es_n0_db_grid, long trials);

struct SessionConfig {
    int nt = 2;
    int nr = 2;
    int num_streams = 2;
    bool adaptive_mode = false; // sweep modes per block instead of fixed S
    std::vector<ModulationScheme> mod_set = default_modulation_set();
    std::vector<CodeRate> code_set = default_code_set();
    int retx_limit = 4;
    double bandwidth_hz = 1e6;
    double es_over_n0 = 1.0; // linear
    double source_rate = 0.0;
    double cond_cap = 1e12;
    std::size_t kde_window = 500;
    double kde_bandwidth = 0.05;
    KernelType kernel = KernelType::kGaussian;
    int visibility_quant_bits = 4; // header-embedded score precision; 0 = exact
    PrecoderSource precoder_source = PrecoderSource::svd();
    std::uint64_t seed = 1;
};

struct SessionBlock {
    long block_index = 0;
    long packets = 0;
    double realized_wt = 0.0;
    double baseline_wt = 0.0;
    double theoretical_wt = 0.0;
    double theoretical_baseline_wt = 0.0;
};

struct SessionResult {
    std::vector<SessionBlock> blocks;
    // Session-level value/time aggregation across blocks.
    double realized_wt = 0.0;
    double baseline_wt = 0.0;
    double theoretical_wt = 0.0;
    double theoretical_baseline_wt = 0.0;
};

/// Replays a trace in coherence blocks: each block draws a fresh channel,
/// plans from the kernel density estimate of previously seen (quantized)
/// scores, then transmits the block's actual packets under that plan. The
/// first block seeds the estimate with its own scores. Realized accounting
/// is the discrete mapping objective; theoretical accounting evaluates the
/// same plan against the planning distribution.
SessionResult run_session(const std::vector<PacketRecord> &trace, long coherence_packets,
                          const SessionConfig &config);

struct CoherenceSweepPoint {
    long coherence_packets = 0;
    SessionResult session;
};

struct CoherenceSweepResult {
    std::vector<CoherenceSweepPoint> points;
};

/// Runs one session per coherence length (all consuming the trace once,
/// sequentially). Throws if the trace is shorter than the largest length.
CoherenceSweepResult coherence_sweep(const std::vector<PacketRecord> &trace,
                                     const std::vector<long> &coherence_lengths,
                                     const SessionConfig &config);

/// CSV/JSON export. Gain sweeps emit one row per point plus a JSON sidecar
/// with the config snapshot and seed; sessions emit one row per block.
std::string gain_sweep_to_csv(const GainSweepResult &sweep);
std::string gain_sweep_sidecar_json(const GainSweepResult &sweep, const GainConfig &config);
std::string session_to_csv(const SessionResult &session);
std::string gain_config_to_json(const GainConfig &config);

} // namespace lvmimo

#endif
