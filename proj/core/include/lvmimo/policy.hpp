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
// The transmission policy: stream ordering, load-balancing visibility
// thresholds, weighted-throughput objectives, per-stream MCS selection, mode
// selection, and the prioritizing interleaver. The objective throughout is
// the loss-visibility weighted throughput: the perceptual value of packets
// delivered per unit time.

#ifndef LVMIMO_POLICY_HPP
#define LVMIMO_POLICY_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lvmimo/channel.hpp"
#include "lvmimo/link.hpp"
#include "lvmimo/visibility.hpp"

namespace lvmimo {

/// Visibility thresholds v[0] = 0 <= v[1] <= ... <= v[S] = 1. Packets with
/// visibility in [v[i-1], v[i]) form class i; a value exactly on a threshold
/// joins the higher class.
struct ThresholdPolicy {
    std::vector<double> v_hat; // size S + 1

    int num_classes() const { return static_cast<int>(v_hat.size()) - 1; }
    int classify(double v) const;
};

/// Everything needed to run one coherence block: mode, precoder, the
/// class-ordered links, thresholds, and the achieved objective.
struct TransmissionPlan {
    int num_streams = 0;
    Precoder precoder;
    int codeword_index = -1;        // codebook selections only; -1 = full CSI
    std::vector<int> stream_order;  // class position -> original stream index
    std::vector<StreamLink> links;  // in class order (ascending p_success)
    ThresholdPolicy thresholds;
    double weighted_throughput = 0.0;
    double sum_throughput = 0.0; // post-retransmission C * sum_i R_i / r_i, bits/s
    bool rate_feasible = true;
};

/// Permutation placing streams in ascending post-retransmission success
/// probability; ties keep the original order.
std::vector<int> order_streams(const std::vector<StreamLink> &links);

std::vector<StreamLink> apply_order(const std::vector<StreamLink> &links,
                                    const std::vector<int> &order);

/// Load-balancing thresholds for class-ordered links: class i receives the
/// fraction (R_i/r_i) / sum_j (R_j/r_j) of the visibility distribution, so
/// every stream's expected transmission time is equal. Computed through
/// cumulative-weight quantiles, exact for any continuous distribution.
ThresholdPolicy optimal_thresholds(const VisibilityDistribution &dist,
                                   const std::vector<StreamLink> &ordered_links);

struct McsSelection {
    std::vector<ModulationScheme> mods; // per stream
    CodeRate code;                      // common across streams
};

/// Two-step link adaptation: per coding rate, each stream takes the
/// modulation maximizing its post-retransmission throughput R*(1-a)/(1-a^(L+1));
/// the common rate then maximizes the weighted sum. Ties prefer the lower
/// order and lower rate.
McsSelection select_mcs(const SnrVector &gammas, const std::vector<ModulationScheme> &mod_set,
                        const std::vector<CodeRate> &code_set, int retx_limit,
                        double mean_packet_symbols);

/// Index of the bottleneck stream: argmax of the per-class expected
/// transmission time mass_i * r_i / (C * R_i). Comparisons carry a 1e-12
/// relative tolerance; ties resolve to the lowest index.
int bottleneck_stream(const ThresholdPolicy &thresholds,
                      const std::vector<StreamLink> &ordered_links,
                      const VisibilityDistribution &dist);

/// Distribution-level weighted throughput of a thresholding policy over
/// class-ordered links (bits-equivalent perceptual value per second):
///   sum_i p_i * int_{v_i}^{v_{i+1}} v f(v) dv   divided by the bottleneck
/// class time E[b] * mass_i * r_i / (C * R_i).
double weighted_throughput_prioritized(const ThresholdPolicy &thresholds,
                                       const std::vector<StreamLink> &ordered_links,
                                       const VisibilityDistribution &dist,
                                       double mean_packet_symbols);

/// Closed-form objective for the baseline that multiplexes every packet over
/// all streams: E[v] * C * S * (1 - alpha_baseline) * min_i R_i / E[b].
/// Independent of the retransmission limit.
double weighted_throughput_baseline(const std::vector<StreamLink> &links,
                                    const VisibilityDistribution &dist,
                                    double mean_packet_symbols);

/// Expected delivered value and bottleneck transmission time of a discrete
/// packet-to-stream mapping; their ratio is the weighted throughput.
struct MappingParts {
    double value = 0.0; // sum_i p_i * sum_{p in class i} v_p
    double time = 0.0;  // max_i sum_{p in class i} b_p * r_i / (C * R_i)
};

MappingParts evaluate_mapping_parts(const std::vector<std::vector<std::size_t>> &mapping,
                                    const std::vector<StreamLink> &links,
                                    const std::vector<PacketRecord> &packets);

/// Discrete-packet objective for an arbitrary packet-to-stream mapping
/// (class i holds the packet indices mapping[i]). Used for realized-session
/// accounting and exchange-argument checks. The mapping must partition the
/// packet set; empty classes contribute zero time.
double evaluate_mapping_wt(const std::vector<std::vector<std::size_t>> &mapping,
                           const std::vector<StreamLink> &links,
                           const std::vector<PacketRecord> &packets);

/// Precoder provider for mode selection: either full-CSI SVD precoding or a
/// per-mode codebook (modes without a codebook are skipped).
struct PrecoderSource {
    static PrecoderSource svd();
    static PrecoderSource codebooks(std::map<int, Codebook> by_mode);

    bool use_codebooks = false;
    std::map<int, Codebook> by_mode;
};

struct PlannerConfig {
    std::vector<ModulationScheme> mod_set;
    std::vector<CodeRate> code_set;
    int retx_limit = 4;
    double bandwidth_hz = 1e6;
    double es_over_n0 = 1.0; // linear
    double source_rate = 0.0; // bits/s; modes must sustain it
    double mean_packet_symbols = 100.0;
    double cond_cap = 1e12;
};

/// Builds the full plan for a fixed number of streams.
TransmissionPlan plan_for_mode(const ChannelRealization &h, const VisibilityDistribution &dist,
                               const PlannerConfig &config, const PrecoderSource &source, int s);

/// Sweeps all modes 1..min(nt, nr), keeping the best weighted throughput among
/// modes whose post-retransmission sum throughput exceeds the source rate;
/// ties prefer fewer streams. When no mode sustains the rate the best-effort
/// plan is returned with rate_feasible = false.
TransmissionPlan select_mode(const ChannelRealization &h, const VisibilityDistribution &dist,
                             const PlannerConfig &config, const PrecoderSource &source);

/// Sliding interleaver over class-ordered packet queues. Global symbol
/// indices run over the class-concatenated symbol vector (class 1 block
/// first). Row m transmits the i-th symbol of class m's block at channel use
/// i and idles once the block is exhausted, so class-m symbols only ever
/// appear on row m. Advancing one use shifts every active row's selection by
/// one column.
class InterleaverMap {
  public:
    explicit InterleaverMap(const std::vector<std::vector<int>> &class_packet_sizes);

    int num_rows() const { return static_cast<int>(block_size_.size()); }
    std::size_t total_symbols() const { return total_; }
    /// Number of channel uses until every class is drained (largest block).
    std::size_t num_uses() const;
    /// Global symbol index transmitted on `row` at 0-based channel use, or
    /// nullopt when the row's class is exhausted.
    std::optional<std::size_t> symbol_at(std::size_t use, int row) const;
    std::vector<std::optional<std::size_t>> assignment(std::size_t use) const;

  private:
    std::vector<std::size_t> block_start_;
    std::vector<std::size_t> block_size_;
    std::size_t total_ = 0;
};

InterleaverMap build_interleaver(const std::vector<std::vector<int>> &class_packet_sizes);

/// Assignment at use i+1 given the map at use i (0-based uses).
std::vector<std::optional<std::size_t>> slide(const InterleaverMap &map, std::size_t use);

/// Plan JSON round trip. Per-stream entries carry gamma_db, modulation, code
/// rate, alpha, mean transmissions, and success probability.
std::string plan_to_json(const TransmissionPlan &plan);
TransmissionPlan plan_from_json(const std::string &text);

} // namespace lvmimo

#endif
