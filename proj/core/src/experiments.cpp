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

#include "lvmimo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "lvmimo/common.hpp"

namespace lvmimo {

namespace {

struct TrialGains {
    double quality_p = 0.0;
    double quality_b = 0.0;
    double thr_p = 0.0;
    double thr_b = 0.0;
};

PlannerConfig planner_from_gain_config(const GainConfig &cfg) {
    PlannerConfig p;
    p.mod_set = cfg.mod_set;
    p.code_set = cfg.code_set;
    p.retx_limit = cfg.retx_limit;
    p.bandwidth_hz = cfg.bandwidth_hz;
    p.es_over_n0 = cfg.es_over_n0;
    p.source_rate = 0.0;
    p.mean_packet_symbols = cfg.mean_packet_symbols;
    p.cond_cap = cfg.cond_cap;
    return p;
}

TrialGains run_gain_trial(const ChannelRealization &h, const VisibilityDistribution &dist,
                          double mean_v, const GainConfig &cfg, const PrecoderSource &source,
                          int *codeword_out) {
    PlannerConfig pcfg = planner_from_gain_config(cfg);
    TransmissionPlan plan = plan_for_mode(h, dist, pcfg, source, cfg.num_streams);
    if (codeword_out != nullptr)
        *codeword_out = plan.codeword_index;

    TrialGains t;
    std::vector<double> alphas;
    alphas.reserve(plan.links.size());
    for (std::size_t i = 0; i < plan.links.size(); ++i) {
        t.quality_p += plan.links[i].p_success *
                       dist.partial_moment(plan.thresholds.v_hat[i], plan.thresholds.v_hat[i + 1]);
        alphas.push_back(plan.links[i].alpha);
    }
    t.thr_p = plan.sum_throughput;

    // Quality side: the same per-stream links with every packet multiplexed
    // over all streams. Rate side: the stand-alone equal-modulation baseline.
    double ab = baseline_per(alphas, cfg.num_streams);
    t.quality_b = success_probability(ab, cfg.retx_limit) * mean_v;

    SnrVector gammas;
    gammas.reserve(plan.links.size());
    for (const StreamLink &l : plan.links)
        gammas.push_back(l.gamma);
    BaselineChoice bl = select_baseline_mcs(gammas, cfg.mod_set, cfg.code_set, cfg.retx_limit,
                                            cfg.mean_packet_symbols, cfg.bandwidth_hz);
    t.thr_b = static_cast<double>(cfg.num_streams) * bl.code.value() * bl.rate /
              bl.mean_transmissions;
    return t;
}

struct RatioStats {
    double value = 0.0;
    double se = 0.0;
};

// Jackknife standard error of a ratio-of-sums estimator.
RatioStats ratio_with_jackknife(const std::vector<double> &num, const std::vector<double> &den) {
    RatioStats out;
    double a = compensated_total(num);
    double b = compensated_total(den);
    out.value = a / b;
    std::size_t n = num.size();
    if (n < 2)
        return out;
    std::vector<double> loo(n);
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        loo[j] = (a - num[j]) / (b - den[j]);
        mean += loo[j];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        ss += (loo[j] - mean) * (loo[j] - mean);
    out.se = std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
    return out;
}

RatioStats product_with_jackknife(const std::vector<double> &a, const std::vector<double> &b,
                                  const std::vector<double> &c, const std::vector<double> &d) {
    RatioStats out;
    double sa = compensated_total(a), sb = compensated_total(b);
    double sc = compensated_total(c), sd = compensated_total(d);
    out.value = (sa / sb) * (sc / sd);
    std::size_t n = a.size();
    if (n < 2)
        return out;
    std::vector<double> loo(n);
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        loo[j] = ((sa - a[j]) / (sb - b[j])) * ((sc - c[j]) / (sd - d[j]));
        mean += loo[j];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        ss += (loo[j] - mean) * (loo[j] - mean);
    out.se = std::sqrt(ss * static_cast<double>(n - 1) / static_cast<double>(n));
    return out;
}

// Runs fn(trial_index) over [0, trials) on the configured number of workers.
// Results land in trial-indexed slots, so the reduction below is identical
// for any worker count.
template <typename Fn> void parallel_trials(long trials, int threads, Fn &&fn) {
    int workers = std::max<int>(1, static_cast<int>(std::min<long>(threads, trials)));
    if (workers == 1) {
        for (long t = 0; t < trials; ++t)
            fn(t);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    long chunk = (trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        long lo = w * chunk;
        long hi = std::min(trials, lo + chunk);
        pool.emplace_back([&, lo, hi, w]() {
            try {
                for (long t = lo; t < hi; ++t)
                    fn(t);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto &th : pool)
        th.join();
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

GainReport assemble_report(const std::vector<double> &qp, const std::vector<double> &qb,
                           const std::vector<double> &tp, const std::vector<double> &tb,
                           const GainConfig &config) {
    GainReport report;
    report.trials = static_cast<long>(qp.size());
    RatioStats pp = ratio_with_jackknife(qp, qb);
    RatioStats um = ratio_with_jackknife(tp, tb);
    RatioStats g = product_with_jackknife(qp, qb, tp, tb);
    report.g_pp = pp.value;
    report.se_pp = pp.se;
    report.g_um = um.value;
    report.se_um = um.se;
    report.g = report.g_pp * report.g_um;
    report.se_g = g.se;
    report.min_realization_g_pp = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < qp.size(); ++j) {
        if (qb[j] == 0.0 && qp[j] == 0.0)
            continue; // neither policy delivers anything; the ratio is moot
        report.min_realization_g_pp = std::min(report.min_realization_g_pp, qp[j] / qb[j]);
    }
    report.config_snapshot = gain_config_to_json(config);
    return report;
}

} // namespace

BaselineChoice select_baseline_mcs(const SnrVector &gammas,
                                   const std::vector<ModulationScheme> &mod_set,
                                   const std::vector<CodeRate> &code_set, int retx_limit,
                                   double mean_packet_symbols, double bandwidth_hz) {
    if (gammas.empty())
        throw std::invalid_argument("select_baseline_mcs: need at least one stream SNR");
    if (mod_set.empty() || code_set.empty())
        throw std::invalid_argument("select_baseline_mcs: modulation and code sets must be non-empty");
    std::vector<ModulationScheme> mods = mod_set;
    std::sort(mods.begin(), mods.end(), [](const auto &a, const auto &b) { return a.m < b.m; });
    std::vector<CodeRate> codes = code_set;
    std::sort(codes.begin(), codes.end(),
              [](const auto &a, const auto &b) { return a.value() < b.value(); });

    BaselineChoice best;
    double best_obj = -1.0;
    for (const ModulationScheme &mod : mods) {
        for (const CodeRate &code : codes) {
            std::vector<double> alphas;
            alphas.reserve(gammas.size());
            for (double g : gammas)
                alphas.push_back(packet_error_rate(mod, code, g, mean_packet_symbols));
            double ab = baseline_per(alphas, static_cast<int>(gammas.size()));
            double r = mean_retransmissions(ab, retx_limit);
            double rate = bandwidth_hz * mod.bits_per_symbol();
            double obj = code.value() * rate / r;
            if (obj > best_obj) {
                best_obj = obj;
                best.mod = mod;
                best.code = code;
                best.alpha_baseline = ab;
                best.mean_transmissions = r;
                best.p_success = success_probability(ab, retx_limit);
                best.rate = rate;
            }
        }
    }
    return best;
}

ChannelRealization trial_channel(const GainConfig &config, long index) {
    if (config.fixed_channel)
        return *config.fixed_channel;
    std::mt19937_64 rng = make_rng(config.seed, static_cast<std::uint64_t>(index));
    return sample_rayleigh(config.nr, config.nt, rng);
}

GainReport monte_carlo_gains(const GainConfig &config, const VisibilityDistribution &dist,
                             long trials) {
    if (trials < 1)
        throw std::invalid_argument("monte_carlo_gains: need at least one trial");
    double mean_v = dist.mean();
    std::vector<double> qp(trials), qb(trials), tp(trials), tb(trials);
    PrecoderSource source = PrecoderSource::svd();
    parallel_trials(trials, config.threads, [&](long t) {
        ChannelRealization h = trial_channel(config, t);
        TrialGains g = run_gain_trial(h, dist, mean_v, config, source, nullptr);
        qp[t] = g.quality_p;
        qb[t] = g.quality_b;
        tp[t] = g.thr_p;
        tb[t] = g.thr_b;
    });
    return assemble_report(qp, qb, tp, tb, config);
}

LimitedFeedbackReport limited_feedback_gains(const GainConfig &config,
                                             const VisibilityDistribution &dist,
                                             const Codebook &codebook, long trials) {
    if (trials < 1)
        throw std::invalid_argument("limited_feedback_gains: need at least one trial");
    if (codebook.nt != config.nt || codebook.s != config.num_streams)
        throw std::invalid_argument("limited_feedback_gains: codebook dimensions do not match config");
    double mean_v = dist.mean();
    std::vector<double> qp(trials), qb(trials), tp(trials), tb(trials);
    std::vector<double> fqp(trials), fqb(trials), ftp(trials), ftb(trials);
    std::vector<int> codewords(trials, -1);
    PrecoderSource limited = PrecoderSource::codebooks({{config.num_streams, codebook}});
    PrecoderSource full = PrecoderSource::svd();
    parallel_trials(trials, config.threads, [&](long t) {
        ChannelRealization h = trial_channel(config, t);
        TrialGains gl = run_gain_trial(h, dist, mean_v, config, limited, &codewords[t]);
        qp[t] = gl.quality_p;
        qb[t] = gl.quality_b;
        tp[t] = gl.thr_p;
        tb[t] = gl.thr_b;
        TrialGains gf = run_gain_trial(h, dist, mean_v, config, full, nullptr);
        fqp[t] = gf.quality_p;
        fqb[t] = gf.quality_b;
        ftp[t] = gf.thr_p;
        ftb[t] = gf.thr_b;
    });
    LimitedFeedbackReport report;
    report.limited = assemble_report(qp, qb, tp, tb, config);
    report.full_csi = assemble_report(fqp, fqb, ftp, ftb, config);
    report.selected_codewords = std::move(codewords);
    return report;
}

GainSweepResult snr_sweep(const GainConfig &config, const VisibilityDistribution &dist,
                          const std::vector<double> &es_n0_db_grid, long trials) {
    if (es_n0_db_grid.empty())
        throw std::invalid_argument("snr_sweep: grid must be non-empty");
    for (std::size_t i = 1; i < es_n0_db_grid.size(); ++i)
        if (!(es_n0_db_grid[i] > es_n0_db_grid[i - 1]))
            throw std::invalid_argument("snr_sweep: grid must be strictly increasing");
    GainSweepResult sweep;
    sweep.axis_label = "es_n0_db";
    for (double point_db : es_n0_db_grid) {
        GainConfig point = config;
        point.es_over_n0 = db_to_linear(point_db); // shared seed across points
        GainSweepPoint out;
        out.axis = point_db;
        out.report = monte_carlo_gains(point, dist, trials);
        sweep.points.push_back(std::move(out));
    }
    return sweep;
}

SessionResult run_session(const std::vector<PacketRecord> &trace, long coherence_packets,
                          const SessionConfig &config) {
    if (trace.empty())
        throw std::invalid_argument("run_session: empty trace");
    if (coherence_packets < 1)
        throw std::invalid_argument("run_session: coherence length must be >= 1 packet");
    if (static_cast<long>(trace.size()) < coherence_packets)
        throw std::invalid_argument("run_session: trace too short for the coherence length");

    PlannerConfig pcfg;
    pcfg.mod_set = config.mod_set;
    pcfg.code_set = config.code_set;
    pcfg.retx_limit = config.retx_limit;
    pcfg.bandwidth_hz = config.bandwidth_hz;
    pcfg.es_over_n0 = config.es_over_n0;
    pcfg.source_rate = config.source_rate;
    pcfg.cond_cap = config.cond_cap;

    SessionResult result;
    CompensatedSum real_value, real_time, base_value, base_time;
    CompensatedSum theo_value, theo_time, theo_base_value, theo_base_time;
    std::deque<std::pair<double, int>> history; // (quantized score, size)

    long n = static_cast<long>(trace.size());
    long block_count = (n + coherence_packets - 1) / coherence_packets;
    for (long k = 0; k < block_count; ++k) {
        long lo = k * coherence_packets;
        long hi = std::min(n, lo + coherence_packets);

        std::vector<PacketRecord> block;
        block.reserve(static_cast<std::size_t>(hi - lo));
        for (long p = lo; p < hi; ++p) {
            PacketRecord rec = trace[static_cast<std::size_t>(p)];
            rec.visibility = quantize_visibility(rec.visibility, config.visibility_quant_bits);
            block.push_back(rec);
        }

        // Plan from history; the first block has none and seeds the window
        // with its own scores.
        std::vector<double> window;
        double mean_b = 0.0;
        if (history.empty()) {
            for (const PacketRecord &r : block) {
                window.push_back(r.visibility);
                mean_b += r.size_symbols;
            }
            mean_b /= static_cast<double>(block.size());
        } else {
            std::size_t take = std::min(config.kde_window, history.size());
            for (std::size_t i = history.size() - take; i < history.size(); ++i) {
                window.push_back(history[i].first);
                mean_b += history[i].second;
            }
            mean_b /= static_cast<double>(take);
        }
        VisibilityDistribution dist(window, config.kde_bandwidth, config.kernel);
        pcfg.mean_packet_symbols = mean_b;

        std::mt19937_64 rng = make_rng(config.seed, static_cast<std::uint64_t>(k));
        ChannelRealization h = sample_rayleigh(config.nr, config.nt, rng);
        TransmissionPlan plan =
            config.adaptive_mode
                ? select_mode(h, dist, pcfg, config.precoder_source)
                : plan_for_mode(h, dist, pcfg, config.precoder_source, config.num_streams);

        std::vector<std::vector<std::size_t>> mapping(plan.links.size());
        for (std::size_t p = 0; p < block.size(); ++p)
            mapping[static_cast<std::size_t>(plan.thresholds.classify(block[p].visibility))]
                .push_back(p);
        MappingParts realized = evaluate_mapping_parts(mapping, plan.links, block);

        SnrVector gammas;
        for (const StreamLink &l : plan.links)
            gammas.push_back(l.gamma);
        BaselineChoice bl =
            select_baseline_mcs(gammas, config.mod_set, config.code_set, config.retx_limit,
                                mean_b, config.bandwidth_hz);
        double streams = static_cast<double>(plan.num_streams);
        double block_value = 0.0, block_symbols = 0.0;
        for (const PacketRecord &r : block) {
            block_value += r.visibility;
            block_symbols += static_cast<double>(r.size_symbols);
        }
        double base_v = bl.p_success * block_value;
        double base_t =
            block_symbols * bl.mean_transmissions / (bl.code.value() * streams * bl.rate);

        // Distribution-level accounting of the same plan, scaled to the block.
        double packets = static_cast<double>(block.size());
        double th_v = 0.0;
        for (std::size_t i = 0; i < plan.links.size(); ++i)
            th_v += plan.links[i].p_success *
                    dist.partial_moment(plan.thresholds.v_hat[i], plan.thresholds.v_hat[i + 1]);
        int tilde = bottleneck_stream(plan.thresholds, plan.links, dist);
        const StreamLink &bn = plan.links[static_cast<std::size_t>(tilde)];
        double mass = dist.cdf(plan.thresholds.v_hat[tilde + 1]) -
                      dist.cdf(plan.thresholds.v_hat[tilde]);
        double th_t = mean_b * mass * bn.mean_transmissions / (bn.code.value() * bn.rate);
        double th_bv = bl.p_success * dist.mean();
        double th_bt = mean_b * bl.mean_transmissions / (bl.code.value() * streams * bl.rate);

        SessionBlock out;
        out.block_index = k;
        out.packets = hi - lo;
        out.realized_wt = realized.value / realized.time;
        out.baseline_wt = base_v / base_t;
        out.theoretical_wt = (packets * th_v) / (packets * th_t);
        out.theoretical_baseline_wt = th_bv / th_bt;
        result.blocks.push_back(out);

        real_value.add(realized.value);
        real_time.add(realized.time);
        base_value.add(base_v);
        base_time.add(base_t);
        theo_value.add(packets * th_v);
        theo_time.add(packets * th_t);
        theo_base_value.add(packets * th_bv);
        theo_base_time.add(packets * th_bt);

        for (const PacketRecord &r : block) {
            history.emplace_back(r.visibility, r.size_symbols);
            if (history.size() > config.kde_window)
                history.pop_front();
        }
    }

    result.realized_wt = real_value.value() / real_time.value();
    result.baseline_wt = base_value.value() / base_time.value();
    result.theoretical_wt = theo_value.value() / theo_time.value();
    result.theoretical_baseline_wt = theo_base_value.value() / theo_base_time.value();
    return result;
}

CoherenceSweepResult coherence_sweep(const std::vector<PacketRecord> &trace,
                                     const std::vector<long> &coherence_lengths,
                                     const SessionConfig &config) {
    if (coherence_lengths.empty())
        throw std::invalid_argument("coherence_sweep: need at least one coherence length");
    for (std::size_t i = 1; i < coherence_lengths.size(); ++i)
        if (!(coherence_lengths[i] > coherence_lengths[i - 1]))
            throw std::invalid_argument("coherence_sweep: lengths must be strictly increasing");
    if (static_cast<long>(trace.size()) < coherence_lengths.back())
        throw std::invalid_argument("coherence_sweep: trace too short for the largest coherence length");
    CoherenceSweepResult sweep;
    for (long len : coherence_lengths) {
        CoherenceSweepPoint point;
        point.coherence_packets = len;
        point.session = run_session(trace, len, config);
        sweep.points.push_back(std::move(point));
    }
    return sweep;
}

std::string gain_sweep_to_csv(const GainSweepResult &sweep) {
    std::ostringstream out;
    out.precision(17);
    out << "axis,g_pp,g_pp_stderr,g_um,g_um_stderr,g,g_stderr\n";
    for (const GainSweepPoint &p : sweep.points)
        out << p.axis << "," << p.report.g_pp << "," << p.report.se_pp << "," << p.report.g_um
            << "," << p.report.se_um << "," << p.report.g << "," << p.report.se_g << "\n";
    return out.str();
}

std::string gain_sweep_sidecar_json(const GainSweepResult &sweep, const GainConfig &config) {
    nlohmann::json j;
    j["axis_label"] = sweep.axis_label;
    j["seed"] = config.seed;
    j["config"] = nlohmann::json::parse(gain_config_to_json(config));
    return j.dump(2);
}

std::string session_to_csv(const SessionResult &session) {
    std::ostringstream out;
    out.precision(17);
    out << "block,realized_wt,baseline_wt\n";
    for (const SessionBlock &b : session.blocks)
        out << b.block_index << "," << b.realized_wt << "," << b.baseline_wt << "\n";
    return out.str();
}

std::string gain_config_to_json(const GainConfig &config) {
    nlohmann::json j;
    j["nt"] = config.nt;
    j["nr"] = config.nr;
    j["num_streams"] = config.num_streams;
    j["es_n0_db"] = linear_to_db(std::max(config.es_over_n0, 1e-40));
    nlohmann::json mods = nlohmann::json::array();
    for (const ModulationScheme &m : config.mod_set)
        mods.push_back(m.m);
    j["modulation_set"] = std::move(mods);
    nlohmann::json codes = nlohmann::json::object();
    for (const CodeRate &c : config.code_set)
        codes[c.label()] = c.coding_gain_db;
    j["code_set"] = std::move(codes);
    j["retx_limit"] = config.retx_limit;
    j["bandwidth_hz"] = config.bandwidth_hz;
    j["mean_packet_symbols"] = config.mean_packet_symbols;
    j["threads"] = config.threads;
    j["seed"] = config.seed;
    if (config.fixed_channel) {
        nlohmann::json h;
        h["nr"] = config.fixed_channel->nr;
        h["nt"] = config.fixed_channel->nt;
        nlohmann::json entries = nlohmann::json::array();
        for (const cxd &e : config.fixed_channel->entries)
            entries.push_back({e.real(), e.imag()});
        h["entries"] = std::move(entries);
        j["fixed_channel"] = std::move(h);
    }
    return j.dump(2);
}

} // namespace lvmimo
