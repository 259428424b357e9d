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

#include "lvmimo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "lvmimo/common.hpp"

namespace lvmimo {

namespace {

constexpr double kTieTolerance = 1e-12;

void require_class_ordered(const std::vector<StreamLink> &links, const char *who) {
    if (links.empty())
        throw std::invalid_argument(std::string(who) + ": need at least one stream");
    for (std::size_t i = 1; i < links.size(); ++i)
        if (links[i].p_success < links[i - 1].p_success)
            throw std::invalid_argument(std::string(who) +
                                        ": links must be ordered by ascending success probability");
}

double common_code_rate(const std::vector<StreamLink> &links, const char *who) {
    double c = links.front().code.value();
    for (const StreamLink &l : links)
        if (std::abs(l.code.value() - c) > 0.0)
            throw std::invalid_argument(std::string(who) + ": streams must share one coding rate");
    return c;
}

void require_thresholds(const ThresholdPolicy &t, std::size_t streams, const char *who) {
    if (t.v_hat.size() != streams + 1)
        throw std::invalid_argument(std::string(who) + ": thresholds must have S+1 entries");
    if (t.v_hat.front() != 0.0 || t.v_hat.back() != 1.0)
        throw std::invalid_argument(std::string(who) + ": thresholds must start at 0 and end at 1");
    for (std::size_t i = 1; i < t.v_hat.size(); ++i)
        if (t.v_hat[i] < t.v_hat[i - 1])
            throw std::invalid_argument(std::string(who) + ": thresholds must be non-decreasing");
}

} // namespace

int ThresholdPolicy::classify(double v) const {
    int cls = 0;
    for (std::size_t i = 1; i + 1 < v_hat.size(); ++i)
        if (v >= v_hat[i])
            cls = static_cast<int>(i);
    return cls;
}

std::vector<int> order_streams(const std::vector<StreamLink> &links) {
    if (links.empty())
        throw std::invalid_argument("order_streams: need at least one stream");
    std::vector<int> order(links.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return links[static_cast<std::size_t>(a)].p_success <
               links[static_cast<std::size_t>(b)].p_success;
    });
    return order;
}

std::vector<StreamLink> apply_order(const std::vector<StreamLink> &links,
                                    const std::vector<int> &order) {
    std::vector<StreamLink> out;
    out.reserve(order.size());
    for (int idx : order)
        out.push_back(links[static_cast<std::size_t>(idx)]);
    return out;
}

ThresholdPolicy optimal_thresholds(const VisibilityDistribution &dist,
                                   const std::vector<StreamLink> &ordered_links) {
    require_class_ordered(ordered_links, "optimal_thresholds");
    std::size_t s = ordered_links.size();
    std::vector<double> weight(s);
    double total = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        weight[i] = ordered_links[i].rate / ordered_links[i].mean_transmissions;
        total += weight[i];
    }
    if (!(total > 0.0))
        throw std::invalid_argument("optimal_thresholds: all stream throughputs vanish");

    ThresholdPolicy policy;
    policy.v_hat.resize(s + 1);
    policy.v_hat[0] = 0.0;
    policy.v_hat[s] = 1.0;
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < s; ++i) {
        cum += weight[i];
        policy.v_hat[i + 1] = dist.quantile(std::min(cum / total, 1.0));
    }
    // Quantiles of a monotone CDF preserve order; enforce against rounding.
    for (std::size_t i = 1; i <= s; ++i)
        policy.v_hat[i] = std::max(policy.v_hat[i], policy.v_hat[i - 1]);
    return policy;
}

McsSelection select_mcs(const SnrVector &gammas, const std::vector<ModulationScheme> &mod_set,
                        const std::vector<CodeRate> &code_set, int retx_limit,
                        double mean_packet_symbols) {
    if (gammas.empty())
        throw std::invalid_argument("select_mcs: need at least one stream SNR");
    if (mod_set.empty() || code_set.empty())
        throw std::invalid_argument("select_mcs: modulation and code sets must be non-empty");

    // Scan both sets in ascending order so strict improvement keeps the
    // lowest order / lowest rate on ties.
    std::vector<ModulationScheme> mods = mod_set;
    std::sort(mods.begin(), mods.end(), [](const auto &a, const auto &b) { return a.m < b.m; });
    std::vector<CodeRate> codes = code_set;
    std::sort(codes.begin(), codes.end(),
              [](const auto &a, const auto &b) { return a.value() < b.value(); });

    McsSelection best;
    double best_obj = -1.0;
    for (const CodeRate &code : codes) {
        std::vector<ModulationScheme> pick(gammas.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < gammas.size(); ++i) {
            double stream_best = -1.0;
            for (const ModulationScheme &mod : mods) {
                double alpha = packet_error_rate(mod, code, gammas[i], mean_packet_symbols);
                double obj = mod.bits_per_symbol() / mean_retransmissions(alpha, retx_limit);
                if (obj > stream_best) {
                    stream_best = obj;
                    pick[i] = mod;
                }
            }
            sum += stream_best;
        }
        double obj = code.value() * sum;
        if (obj > best_obj) {
            best_obj = obj;
            best.mods = pick;
            best.code = code;
        }
    }
    return best;
}

int bottleneck_stream(const ThresholdPolicy &thresholds,
                      const std::vector<StreamLink> &ordered_links,
                      const VisibilityDistribution &dist) {
    require_thresholds(thresholds, ordered_links.size(), "bottleneck_stream");
    common_code_rate(ordered_links, "bottleneck_stream");
    int best = 0;
    double t_best = -1.0;
    for (std::size_t i = 0; i < ordered_links.size(); ++i) {
        double mass = dist.cdf(thresholds.v_hat[i + 1]) - dist.cdf(thresholds.v_hat[i]);
        double t = mass * ordered_links[i].mean_transmissions / ordered_links[i].rate;
        if (t > t_best * (1.0 + kTieTolerance)) {
            t_best = t;
            best = static_cast<int>(i);
        }
    }
    return best;
}

double weighted_throughput_prioritized(const ThresholdPolicy &thresholds,
                                       const std::vector<StreamLink> &ordered_links,
                                       const VisibilityDistribution &dist,
                                       double mean_packet_symbols) {
    require_class_ordered(ordered_links, "weighted_throughput_prioritized");
    require_thresholds(thresholds, ordered_links.size(), "weighted_throughput_prioritized");
    double code = common_code_rate(ordered_links, "weighted_throughput_prioritized");
    if (!(mean_packet_symbols > 0.0))
        throw std::invalid_argument("weighted_throughput_prioritized: mean packet size must be positive");

    double value = 0.0;
    for (std::size_t i = 0; i < ordered_links.size(); ++i)
        value += ordered_links[i].p_success *
                 dist.partial_moment(thresholds.v_hat[i], thresholds.v_hat[i + 1]);

    int tilde = bottleneck_stream(thresholds, ordered_links, dist);
    const StreamLink &bn = ordered_links[static_cast<std::size_t>(tilde)];
    double mass = dist.cdf(thresholds.v_hat[tilde + 1]) - dist.cdf(thresholds.v_hat[tilde]);
    double time = mean_packet_symbols * mass * bn.mean_transmissions / (code * bn.rate);
    return value / time;
}

double weighted_throughput_baseline(const std::vector<StreamLink> &links,
                                    const VisibilityDistribution &dist,
                                    double mean_packet_symbols) {
    if (links.empty())
        throw std::invalid_argument("weighted_throughput_baseline: need at least one stream");
    double code = common_code_rate(links, "weighted_throughput_baseline");
    if (!(mean_packet_symbols > 0.0))
        throw std::invalid_argument("weighted_throughput_baseline: mean packet size must be positive");
    std::vector<double> alphas;
    alphas.reserve(links.size());
    double min_rate = links.front().rate;
    for (const StreamLink &l : links) {
        alphas.push_back(l.alpha);
        min_rate = std::min(min_rate, l.rate);
    }
    double ab = baseline_per(alphas, static_cast<int>(links.size()));
    return dist.mean() * code * static_cast<double>(links.size()) * (1.0 - ab) * min_rate /
           mean_packet_symbols;
}

MappingParts evaluate_mapping_parts(const std::vector<std::vector<std::size_t>> &mapping,
                                    const std::vector<StreamLink> &links,
                                    const std::vector<PacketRecord> &packets) {
    if (mapping.size() != links.size())
        throw std::invalid_argument("evaluate_mapping_wt: one packet set per stream required");
    if (packets.empty())
        throw std::invalid_argument("evaluate_mapping_wt: no packets");
    double code = common_code_rate(links, "evaluate_mapping_wt");

    std::vector<char> seen(packets.size(), 0);
    MappingParts parts;
    for (std::size_t i = 0; i < mapping.size(); ++i) {
        double class_value = 0.0;
        double class_symbols = 0.0;
        for (std::size_t p : mapping[i]) {
            if (p >= packets.size() || seen[p])
                throw std::invalid_argument("evaluate_mapping_wt: mapping must partition the packet set");
            seen[p] = 1;
            class_value += packets[p].visibility;
            class_symbols += static_cast<double>(packets[p].size_symbols);
        }
        parts.value += links[i].p_success * class_value;
        double time = class_symbols * links[i].mean_transmissions / (code * links[i].rate);
        parts.time = std::max(parts.time, time);
    }
    for (char s : seen)
        if (!s)
            throw std::invalid_argument("evaluate_mapping_wt: mapping must partition the packet set");
    return parts;
}

double evaluate_mapping_wt(const std::vector<std::vector<std::size_t>> &mapping,
                           const std::vector<StreamLink> &links,
                           const std::vector<PacketRecord> &packets) {
    MappingParts parts = evaluate_mapping_parts(mapping, links, packets);
    return parts.value / parts.time;
}

PrecoderSource PrecoderSource::svd() { return PrecoderSource{}; }

PrecoderSource PrecoderSource::codebooks(std::map<int, Codebook> by_mode) {
    PrecoderSource s;
    s.use_codebooks = true;
    s.by_mode = std::move(by_mode);
    return s;
}

TransmissionPlan plan_for_mode(const ChannelRealization &h, const VisibilityDistribution &dist,
                               const PlannerConfig &config, const PrecoderSource &source, int s) {
    TransmissionPlan plan;
    plan.num_streams = s;
    if (source.use_codebooks) {
        auto it = source.by_mode.find(s);
        if (it == source.by_mode.end())
            throw std::invalid_argument("plan_for_mode: no codebook for " + std::to_string(s) +
                                        " streams");
        auto [idx, f] = select_codebook_precoder(h, it->second);
        plan.codeword_index = idx;
        plan.precoder = f;
    } else {
        plan.precoder = unitary_precoder(h, s);
    }

    SnrVector gammas = zf_post_snr(h, plan.precoder, config.es_over_n0, config.cond_cap);
    McsSelection mcs =
        select_mcs(gammas, config.mod_set, config.code_set, config.retx_limit,
                   config.mean_packet_symbols);

    std::vector<StreamLink> links;
    links.reserve(gammas.size());
    for (std::size_t i = 0; i < gammas.size(); ++i)
        links.push_back(make_stream_link(gammas[i], mcs.mods[i], mcs.code, config.retx_limit,
                                         config.mean_packet_symbols, config.bandwidth_hz));

    plan.stream_order = order_streams(links);
    plan.links = apply_order(links, plan.stream_order);
    plan.thresholds = optimal_thresholds(dist, plan.links);
    plan.weighted_throughput = weighted_throughput_prioritized(plan.thresholds, plan.links, dist,
                                                               config.mean_packet_symbols);
    double sum = 0.0;
    for (const StreamLink &l : plan.links)
        sum += l.rate / l.mean_transmissions;
    plan.sum_throughput = mcs.code.value() * sum;
    plan.rate_feasible = plan.sum_throughput > config.source_rate;
    return plan;
}

TransmissionPlan select_mode(const ChannelRealization &h, const VisibilityDistribution &dist,
                             const PlannerConfig &config, const PrecoderSource &source) {
    int smax = std::min(h.nr, h.nt);
    bool have_any = false, have_feasible = false;
    TransmissionPlan best_any, best_feasible;
    for (int s = 1; s <= smax; ++s) {
        if (source.use_codebooks && source.by_mode.find(s) == source.by_mode.end())
            continue;
        TransmissionPlan plan;
        try {
            plan = plan_for_mode(h, dist, config, source, s);
        } catch (const SingularEffectiveChannelError &) {
            continue; // mode unusable under zero forcing for this realization
        }
        if (!have_any || plan.weighted_throughput > best_any.weighted_throughput) {
            best_any = plan;
            have_any = true;
        }
        if (plan.rate_feasible &&
            (!have_feasible || plan.weighted_throughput > best_feasible.weighted_throughput)) {
            best_feasible = plan;
            have_feasible = true;
        }
    }
    if (!have_any)
        throw std::runtime_error("select_mode: no usable mode for this channel realization");
    if (have_feasible)
        return best_feasible;
    best_any.rate_feasible = false;
    return best_any;
}

InterleaverMap::InterleaverMap(const std::vector<std::vector<int>> &class_packet_sizes) {
    if (class_packet_sizes.empty())
        throw std::invalid_argument("InterleaverMap: need at least one class");
    block_start_.reserve(class_packet_sizes.size());
    block_size_.reserve(class_packet_sizes.size());
    for (const auto &sizes : class_packet_sizes) {
        std::size_t block = 0;
        for (int b : sizes) {
            if (b < 1)
                throw std::invalid_argument("InterleaverMap: packet sizes must be >= 1 symbol");
            block += static_cast<std::size_t>(b);
        }
        block_start_.push_back(total_);
        block_size_.push_back(block);
        total_ += block;
    }
}

std::size_t InterleaverMap::num_uses() const {
    std::size_t uses = 0;
    for (std::size_t b : block_size_)
        uses = std::max(uses, b);
    return uses;
}

std::optional<std::size_t> InterleaverMap::symbol_at(std::size_t use, int row) const {
    if (row < 0 || row >= num_rows())
        throw std::invalid_argument("InterleaverMap: row out of range");
    std::size_t r = static_cast<std::size_t>(row);
    if (use >= block_size_[r])
        return std::nullopt;
    return block_start_[r] + use;
}

std::vector<std::optional<std::size_t>> InterleaverMap::assignment(std::size_t use) const {
    std::vector<std::optional<std::size_t>> out(block_size_.size());
    for (int m = 0; m < num_rows(); ++m)
        out[static_cast<std::size_t>(m)] = symbol_at(use, m);
    return out;
}

InterleaverMap build_interleaver(const std::vector<std::vector<int>> &class_packet_sizes) {
    return InterleaverMap(class_packet_sizes);
}

std::vector<std::optional<std::size_t>> slide(const InterleaverMap &map, std::size_t use) {
    return map.assignment(use + 1);
}

std::string plan_to_json(const TransmissionPlan &plan) {
    nlohmann::json j;
    j["mode"] = plan.num_streams;
    j["codeword_index"] = plan.codeword_index;
    j["stream_order"] = plan.stream_order;
    j["rate_feasible"] = plan.rate_feasible;
    j["weighted_throughput"] = plan.weighted_throughput;
    j["sum_throughput"] = plan.sum_throughput;
    j["thresholds"] = plan.thresholds.v_hat;
    if (!plan.links.empty())
        j["retx_limit"] = plan.links.front().retx_limit;
    nlohmann::json streams = nlohmann::json::array();
    for (const StreamLink &l : plan.links) {
        nlohmann::json s;
        s["gamma_db"] = linear_to_db(std::max(l.gamma, 1e-40));
        s["modulation"] = l.mod.m;
        s["code_rate"] = l.code.label();
        s["coding_gain_db"] = l.code.coding_gain_db;
        s["alpha"] = l.alpha;
        s["mean_transmissions"] = l.mean_transmissions;
        s["p_success"] = l.p_success;
        s["rate_bps"] = l.rate;
        streams.push_back(std::move(s));
    }
    j["streams"] = std::move(streams);
    nlohmann::json pre;
    pre["nt"] = plan.precoder.nt;
    pre["s"] = plan.precoder.s;
    nlohmann::json entries = nlohmann::json::array();
    for (const cxd &e : plan.precoder.entries)
        entries.push_back({e.real(), e.imag()});
    pre["entries"] = std::move(entries);
    j["precoder"] = std::move(pre);
    return j.dump(2);
}

TransmissionPlan plan_from_json(const std::string &text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TransmissionPlan plan;
    plan.num_streams = j.at("mode").get<int>();
    plan.codeword_index = j.value("codeword_index", -1);
    plan.stream_order = j.at("stream_order").get<std::vector<int>>();
    plan.rate_feasible = j.at("rate_feasible").get<bool>();
    plan.weighted_throughput = j.at("weighted_throughput").get<double>();
    plan.sum_throughput = j.at("sum_throughput").get<double>();
    plan.thresholds.v_hat = j.at("thresholds").get<std::vector<double>>();
    int retx = j.value("retx_limit", 0);
    for (const auto &s : j.at("streams")) {
        StreamLink l;
        l.gamma = db_to_linear(s.at("gamma_db").get<double>());
        l.mod = ModulationScheme(s.at("modulation").get<int>());
        auto [num, den] = parse_code_rate_label(s.at("code_rate").get<std::string>());
        l.code = CodeRate(num, den, s.at("coding_gain_db").get<double>());
        l.alpha = s.at("alpha").get<double>();
        l.retx_limit = retx;
        l.mean_transmissions = s.at("mean_transmissions").get<double>();
        l.p_success = s.at("p_success").get<double>();
        l.rate = s.at("rate_bps").get<double>();
        plan.links.push_back(std::move(l));
    }
    const auto &pre = j.at("precoder");
    plan.precoder.nt = pre.at("nt").get<int>();
    plan.precoder.s = pre.at("s").get<int>();
    for (const auto &pair : pre.at("entries"))
        plan.precoder.entries.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    return plan;
}

} // namespace lvmimo
