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
// Run configuration shared by the command line tool: JSON file plus flag
// overrides. dB values live here; the library works on linear scale.

#ifndef LVMIMO_CONFIG_HPP
#define LVMIMO_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "lvmimo/channel.hpp"
#include "lvmimo/experiments.hpp"
#include "lvmimo/link.hpp"
#include "lvmimo/policy.hpp"
#include "lvmimo/visibility.hpp"

namespace lvmimo {

struct RunConfig {
    int nt = 4;
    int nr = 4;
    bool adaptive_mode = false;
    int num_streams = 2;
    double es_n0_db = 5.0;
    std::vector<double> snr_grid_db;             // sweeps; empty = single point
    std::vector<ModulationScheme> mod_set = default_modulation_set();
    std::vector<CodeRate> code_set = default_code_set();
    int retx_limit = 4;
    double bandwidth_hz = 1e6;
    std::size_t kde_window = 500;
    double kde_bandwidth = 0.05;
    KernelType kernel = KernelType::kGaussian;
    int visibility_quant_bits = 4;
    std::string trace_path;                      // or synthetic source below
    std::optional<GopTraceConfig> synthetic;
    std::string glm_model_path;                  // score trace features instead
    double source_rate = 0.0;
    std::string codebook_path;
    std::string channel_path;                    // pin the channel draw (plan)
    long coherence_packets = 256;
    long trials = 1000;
    int threads = 1;
    std::uint64_t seed = 1;
};

/// Parses the config JSON; unknown keys raise std::invalid_argument naming
/// the key, malformed values name the field.
RunConfig run_config_from_json(const std::string &text);
RunConfig read_run_config(const std::string &path);
std::string run_config_to_json(const RunConfig &config);

/// Structural validation with field-level messages.
void validate(const RunConfig &config);

/// Trace records for the configured source (file, GLM-scored file, or the
/// synthetic group-of-pictures generator).
std::vector<PacketRecord> load_trace(const RunConfig &config);

/// Planning inputs from the trailing window of a trace: the score
/// distribution over header-quantized values and the mean packet size.
struct TraceSummary {
    VisibilityDistribution dist;
    double mean_packet_symbols;
};
TraceSummary summarize_trace(const std::vector<PacketRecord> &records, const RunConfig &config);

/// Channel matrix file: JSON object {nr, nt, entries: [[re, im], ...]},
/// row-major.
ChannelRealization channel_from_json(const std::string &text);
ChannelRealization read_channel(const std::string &path);
std::string channel_to_json(const ChannelRealization &h);

PlannerConfig planner_config(const RunConfig &config, double mean_packet_symbols);
GainConfig gain_config(const RunConfig &config);
SessionConfig session_config(const RunConfig &config);

} // namespace lvmimo

#endif
