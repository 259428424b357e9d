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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lvmimo/common.hpp"
#include "lvmimo/experiments.hpp"
#include "oracles.hpp"

using namespace lvmimo;

namespace {

VisibilityDistribution video_dist() {
    GopTraceConfig config;
    config.packets = 500;
    auto rng = make_rng(33);
    auto trace = generate_gop_trace(config, rng);
    std::vector<double> v;
    for (const auto &r : trace)
        v.push_back(quantize_visibility(r.visibility, 4));
    return VisibilityDistribution(std::move(v), 0.05);
}

GainConfig base_config() {
    GainConfig g;
    g.nt = 2;
    g.nr = 2;
    g.num_streams = 2;
    g.es_over_n0 = db_to_linear(8.0);
    g.retx_limit = 4;
    g.mean_packet_symbols = 60.0;
    g.threads = 2;
    g.seed = 404;
    return g;
}

} // namespace

TEST_CASE("single-stream gains are unity") {
    GainConfig g = base_config();
    g.num_streams = 1;
    auto dist = video_dist();
    GainReport rep = monte_carlo_gains(g, dist, 200);
    REQUIRE(rep.g_pp == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(rep.g_um == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(rep.g == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(rep.min_realization_g_pp >= 1.0 - 1e-12);
}

TEST_CASE("gain report is the product of its parts and seed deterministic") {
    GainConfig g = base_config();
    auto dist = video_dist();
    GainReport a = monte_carlo_gains(g, dist, 300);
    REQUIRE(a.g == a.g_pp * a.g_um); // identical expression, bit for bit
    REQUIRE(a.trials == 300);

    GainReport b = monte_carlo_gains(g, dist, 300);
    REQUIRE(a.g_pp == b.g_pp);
    REQUIRE(a.g_um == b.g_um);
    REQUIRE(a.se_pp == b.se_pp);

    // Worker count must not change a single bit.
    g.threads = 7;
    GainReport c = monte_carlo_gains(g, dist, 300);
    REQUIRE(a.g_pp == c.g_pp);
    REQUIRE(a.g_um == c.g_um);
    REQUIRE(a.se_um == c.se_um);

    g.threads = 2;
    g.seed = 405;
    GainReport d = monte_carlo_gains(g, dist, 300);
    REQUIRE(a.g_pp != d.g_pp);
}

TEST_CASE("fixed channel gains reduce to one realization's closed forms") {
    auto dist = video_dist();
    GainConfig g = base_config();
    g.es_over_n0 = db_to_linear(12.0); // both streams of diag(2,1) live here
    std::vector<cxd> entries = {cxd(2, 0), cxd(0, 0), cxd(0, 0), cxd(1, 0)};
    g.fixed_channel = ChannelRealization(entries, 2, 2);
    GainReport rep = monte_carlo_gains(g, dist, 5);

    // Hand evaluation via the formula-level pieces on the single realization.
    SnrVector gammas = svd_post_snr({2.0, 1.0}, 2, g.es_over_n0);
    auto scan = oracles::exhaustive_mcs_scan(gammas, g.mod_set, g.code_set, g.retx_limit,
                                             g.mean_packet_symbols);
    std::vector<StreamLink> links;
    for (int i = 0; i < 2; ++i) {
        double gain = 0.0;
        for (const CodeRate &c : g.code_set)
            if (c.num == scan.code_num && c.den == scan.code_den)
                gain = c.coding_gain_db;
        links.push_back(make_stream_link(gammas[static_cast<std::size_t>(i)],
                                         ModulationScheme(scan.mods[static_cast<std::size_t>(i)]),
                                         CodeRate(scan.code_num, scan.code_den, gain),
                                         g.retx_limit, g.mean_packet_symbols, g.bandwidth_hz));
    }
    links = apply_order(links, order_streams(links));
    ThresholdPolicy policy = optimal_thresholds(dist, links);
    double quality_p = 0.0, thr_p = 0.0;
    std::vector<double> alphas;
    for (std::size_t i = 0; i < links.size(); ++i) {
        quality_p += links[i].p_success *
                     dist.partial_moment(policy.v_hat[i], policy.v_hat[i + 1]);
        thr_p += links[i].rate / links[i].mean_transmissions;
        alphas.push_back(links[i].alpha);
    }
    thr_p *= links[0].code.value();
    double quality_b =
        success_probability(baseline_per(alphas, 2), g.retx_limit) * dist.mean();
    SnrVector ordered_gammas = {links[0].gamma, links[1].gamma};
    BaselineChoice bl = select_baseline_mcs(ordered_gammas, g.mod_set, g.code_set, g.retx_limit,
                                            g.mean_packet_symbols, g.bandwidth_hz);
    double thr_b = 2.0 * bl.code.value() * bl.rate / bl.mean_transmissions;

    REQUIRE(rep.g_pp == Catch::Approx(quality_p / quality_b).epsilon(1e-12));
    REQUIRE(rep.g_um == Catch::Approx(thr_p / thr_b).epsilon(1e-12));
    REQUIRE(rep.se_pp == Catch::Approx(0.0).margin(1e-12)); // identical draws
}

TEST_CASE("large retransmission budgets drive the quality gain to one") {
    GainConfig g = base_config();
    g.nt = 4;
    g.nr = 4;
    g.es_over_n0 = db_to_linear(10.0);
    g.retx_limit = 200;
    auto dist = video_dist();
    GainReport rep = monte_carlo_gains(g, dist, 500);
    REQUIRE(std::abs(rep.g_pp - 1.0) <= 2.0 * rep.se_pp + 1e-9);
}

TEST_CASE("standard errors shrink like the square root of the trial count") {
    GainConfig g = base_config();
    g.es_over_n0 = db_to_linear(6.0);
    auto dist = video_dist();
    GainReport small = monte_carlo_gains(g, dist, 1000);
    GainReport large = monte_carlo_gains(g, dist, 4000);
    double ratio = small.se_pp / large.se_pp;
    REQUIRE(ratio > 2.0 * 0.75);
    REQUIRE(ratio < 2.0 * 1.25);
}

TEST_CASE("limited feedback with the exact precoder in the codebook is lossless") {
    // nt > s so codeword column spaces actually differ; the planted right
    // singular subspace attains the maximal minimum singular value.
    auto dist = video_dist();
    GainConfig g = base_config();
    g.nt = 4;
    g.nr = 2;
    g.es_over_n0 = db_to_linear(10.0);
    auto hrng = make_rng(70);
    ChannelRealization h = sample_rayleigh(2, 4, hrng);
    g.fixed_channel = h;

    auto rng = make_rng(71);
    Codebook cb = generate_codebook(4, 2, 2, 50, rng);
    cb.precoders[2] = unitary_precoder(h, 2); // plant the exact answer
    LimitedFeedbackReport rep = limited_feedback_gains(g, dist, cb, 4);
    for (int idx : rep.selected_codewords)
        REQUIRE(idx == 2);
    REQUIRE(rep.limited.g_pp == Catch::Approx(rep.full_csi.g_pp).epsilon(1e-12));
    REQUIRE(rep.limited.g_um == Catch::Approx(rep.full_csi.g_um).epsilon(1e-12));
}

TEST_CASE("limited feedback selections match the exhaustive scan per draw") {
    auto dist = video_dist();
    GainConfig g = base_config();
    g.nt = 4;
    g.nr = 2;
    g.es_over_n0 = db_to_linear(4.0);
    auto rng = make_rng(72);
    Codebook cb = generate_codebook(4, 2, 3, 200, rng);
    LimitedFeedbackReport rep = limited_feedback_gains(g, dist, cb, 50);
    for (long t = 0; t < 50; ++t) {
        ChannelRealization h = trial_channel(g, t);
        int best = 0;
        double best_val = -1.0;
        for (std::size_t j = 0; j < cb.precoders.size(); ++j) {
            double lam = min_singular_value(h, cb.precoders[j]);
            if (lam > best_val) {
                best_val = lam;
                best = static_cast<int>(j);
            }
        }
        REQUIRE(rep.selected_codewords[static_cast<std::size_t>(t)] == best);
    }
    // Quantized selection cannot beat the unquantized precoder.
    REQUIRE(rep.limited.g_um <= rep.full_csi.g_um + 2.0 * rep.limited.se_um);
}

TEST_CASE("feedback resolution helps where the baseline is resolution-bound") {
    // Low SNR pins the multiplexed baseline below its next modulation
    // boundary, so extra feedback bits pay off on the prioritized side.
    auto dist = video_dist();
    GainConfig g = base_config();
    g.nt = 4;
    g.nr = 2;
    g.es_over_n0 = db_to_linear(2.0);
    g.mean_packet_symbols = 60.0;
    g.threads = 4;
    g.seed = 7;
    auto c3 = make_rng(55);
    Codebook cb3 = generate_codebook(4, 2, 3, 800, c3);
    auto c6 = make_rng(57);
    Codebook cb6 = generate_codebook(4, 2, 6, 800, c6);
    for (int i = 0; i < 8; ++i)
        cb6.precoders[static_cast<std::size_t>(i)] = cb3.precoders[static_cast<std::size_t>(i)];
    auto r3 = limited_feedback_gains(g, dist, cb3, 2000);
    auto r6 = limited_feedback_gains(g, dist, cb6, 2000);
    REQUIRE(r6.limited.g_um >= r3.limited.g_um - 2.0 * r3.limited.se_um);
    REQUIRE(r6.limited.g_um <= r6.full_csi.g_um + 2.0 * r6.limited.se_um);
}

TEST_CASE("snr sweep shares seeds across points and exports csv") {
    GainConfig g = base_config();
    auto dist = video_dist();
    GainSweepResult one = snr_sweep(g, dist, {6.0}, 200);
    REQUIRE(one.points.size() == 1);
    GainSweepResult sweep = snr_sweep(g, dist, {2.0, 6.0, 10.0}, 200);
    REQUIRE(sweep.points.size() == 3);
    REQUIRE(sweep.points[1].report.g_pp == one.points[0].report.g_pp); // same seed, same point

    std::string csv = gain_sweep_to_csv(sweep);
    REQUIRE(csv.rfind("axis,g_pp,g_pp_stderr,g_um,g_um_stderr,g,g_stderr\n", 0) == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 4);
    std::string sidecar = gain_sweep_sidecar_json(sweep, g);
    REQUIRE(sidecar.find("\"seed\"") != std::string::npos);
    REQUIRE(sidecar.find("\"es_n0_db\"") != std::string::npos);

    REQUIRE_THROWS_AS(snr_sweep(g, dist, {}, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(snr_sweep(g, dist, {3.0, 1.0}, 10), std::invalid_argument);
}

TEST_CASE("sessions are deterministic and validate their input") {
    auto dist = video_dist();
    auto rng = make_rng(90);
    auto trace = generate_iid_trace(dist, 600, 120, 120, rng);
    SessionConfig sc;
    sc.nt = 4;
    sc.nr = 4;
    sc.num_streams = 2;
    sc.es_over_n0 = db_to_linear(6.0);
    sc.kde_bandwidth = 0.03;
    sc.seed = 5;
    SessionResult a = run_session(trace, 100, sc);
    SessionResult b = run_session(trace, 100, sc);
    REQUIRE(a.blocks.size() == 6);
    REQUIRE(a.realized_wt == b.realized_wt);
    REQUIRE(a.baseline_wt == b.baseline_wt);

    REQUIRE_THROWS_AS(run_session(trace, 601, sc), std::invalid_argument);
    REQUIRE_THROWS_AS(run_session(trace, 0, sc), std::invalid_argument);
    REQUIRE_THROWS_AS(coherence_sweep(trace, {100, 700}, sc), std::invalid_argument);
    REQUIRE_THROWS_AS(coherence_sweep(trace, {100, 100}, sc), std::invalid_argument);

    std::string csv = session_to_csv(a);
    REQUIRE(csv.rfind("block,realized_wt,baseline_wt\n", 0) == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("single-block sessions track the planning distribution") {
    auto dist = video_dist();
    auto rng = make_rng(99);
    auto trace = generate_iid_trace(dist, 3000, 210, 210, rng);
    SessionConfig sc;
    sc.nt = 4;
    sc.nr = 4;
    sc.num_streams = 2;
    sc.es_over_n0 = db_to_linear(6.0);
    sc.kde_bandwidth = 0.02;
    sc.visibility_quant_bits = 0;
    sc.seed = 18;
    SessionResult one = run_session(trace, 3000, sc);
    double realized_gain = one.realized_wt / one.baseline_wt;
    double theory_gain = one.theoretical_wt / one.theoretical_baseline_wt;
    REQUIRE(realized_gain == Catch::Approx(theory_gain).epsilon(0.05));
}

TEST_CASE("bursty traces under-deliver relative to the planning estimate") {
    GopTraceConfig gop;
    gop.packets = 2000;
    auto rng = make_rng(98);
    auto trace = generate_gop_trace(gop, rng);
    SessionConfig sc;
    sc.nt = 4;
    sc.nr = 4;
    sc.num_streams = 2;
    sc.es_over_n0 = db_to_linear(6.0);
    sc.kde_bandwidth = 0.02;
    sc.seed = 18;
    SessionResult s = run_session(trace, 8, sc);
    REQUIRE(s.realized_wt / s.baseline_wt <
            s.theoretical_wt / s.theoretical_baseline_wt);
}

TEST_CASE("baseline session throughput ignores the score distribution") {
    auto dist = video_dist();
    auto rng = make_rng(97);
    auto trace = generate_iid_trace(dist, 3000, 150, 150, rng);
    SessionConfig sc;
    sc.nt = 4;
    sc.nr = 4;
    sc.num_streams = 2;
    sc.es_over_n0 = db_to_linear(8.0);
    sc.kde_bandwidth = 0.03;
    sc.seed = 7;
    CoherenceSweepResult sweep = coherence_sweep(trace, {10, 50, 250}, sc);
    double lo = sweep.points[0].session.baseline_wt;
    for (const auto &p : sweep.points) {
        REQUIRE(p.session.baseline_wt == Catch::Approx(lo).epsilon(0.15));
    }
}

TEST_CASE("config snapshot serializes the run parameters") {
    GainConfig g = base_config();
    std::string snap = gain_config_to_json(g);
    REQUIRE(snap.find("\"nt\": 2") != std::string::npos);
    REQUIRE(snap.find("\"seed\": 404") != std::string::npos);
    REQUIRE(snap.find("\"retx_limit\": 4") != std::string::npos);
    auto dist = video_dist();
    GainReport rep = monte_carlo_gains(g, dist, 10);
    REQUIRE(rep.config_snapshot == snap);
}
