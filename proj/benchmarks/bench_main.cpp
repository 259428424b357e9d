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

#include <benchmark/benchmark.h>

#include "lvmimo/common.hpp"
#include "lvmimo/experiments.hpp"
#include "lvmimo/policy.hpp"

namespace {

using namespace lvmimo;

VisibilityDistribution bench_dist(int window) {
    GopTraceConfig config;
    config.packets = window;
    auto rng = make_rng(1);
    auto trace = generate_gop_trace(config, rng);
    std::vector<double> v;
    for (const auto &r : trace)
        v.push_back(r.visibility);
    return VisibilityDistribution(std::move(v), 0.05);
}

PlannerConfig bench_planner() {
    PlannerConfig p;
    p.mod_set = default_modulation_set();
    p.code_set = default_code_set();
    p.es_over_n0 = db_to_linear(8.0);
    p.mean_packet_symbols = 180.0;
    return p;
}

void SvdDecompose(benchmark::State &state) {
    auto rng = make_rng(2);
    int n = static_cast<int>(state.range(0));
    ChannelRealization h = sample_rayleigh(n, n, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(svd_decompose(h));
}
BENCHMARK(SvdDecompose)->Arg(2)->Arg(4)->Arg(8);

void KdeQuantile(benchmark::State &state) {
    VisibilityDistribution dist = bench_dist(static_cast<int>(state.range(0)));
    double q = 0.05;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dist.quantile(q));
        q += 0.09;
        if (q > 0.95)
            q = 0.05;
    }
}
BENCHMARK(KdeQuantile)->Arg(100)->Arg(500);

void ThresholdComputation(benchmark::State &state) {
    VisibilityDistribution dist = bench_dist(500);
    auto rng = make_rng(3);
    ChannelRealization h = sample_rayleigh(4, 4, rng);
    PlannerConfig p = bench_planner();
    SnrVector gammas = zf_post_snr(h, unitary_precoder(h, 3), p.es_over_n0);
    McsSelection mcs = select_mcs(gammas, p.mod_set, p.code_set, p.retx_limit,
                                  p.mean_packet_symbols);
    std::vector<StreamLink> links;
    for (std::size_t i = 0; i < gammas.size(); ++i)
        links.push_back(make_stream_link(gammas[i], mcs.mods[i], mcs.code, p.retx_limit,
                                         p.mean_packet_symbols, p.bandwidth_hz));
    links = apply_order(links, order_streams(links));
    for (auto _ : state)
        benchmark::DoNotOptimize(optimal_thresholds(dist, links));
}
BENCHMARK(ThresholdComputation);

void FullPlan(benchmark::State &state) {
    VisibilityDistribution dist = bench_dist(500);
    auto rng = make_rng(4);
    ChannelRealization h = sample_rayleigh(4, 4, rng);
    PlannerConfig p = bench_planner();
    for (auto _ : state)
        benchmark::DoNotOptimize(plan_for_mode(h, dist, p, PrecoderSource::svd(),
                                               static_cast<int>(state.range(0))));
}
BENCHMARK(FullPlan)->Arg(2)->Arg(4);

void ModeSweep(benchmark::State &state) {
    VisibilityDistribution dist = bench_dist(500);
    auto rng = make_rng(5);
    ChannelRealization h = sample_rayleigh(4, 4, rng);
    PlannerConfig p = bench_planner();
    for (auto _ : state)
        benchmark::DoNotOptimize(select_mode(h, dist, p, PrecoderSource::svd()));
}
BENCHMARK(ModeSweep);

void GainTrials(benchmark::State &state) {
    VisibilityDistribution dist = bench_dist(500);
    GainConfig g;
    g.nt = 4;
    g.nr = 4;
    g.num_streams = 2;
    g.es_over_n0 = db_to_linear(6.0);
    g.mean_packet_symbols = 60.0;
    g.seed = 6;
    long trials = state.range(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(monte_carlo_gains(g, dist, trials));
    state.SetItemsProcessed(state.iterations() * trials);
}
BENCHMARK(GainTrials)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void InterleaverBuild(benchmark::State &state) {
    std::vector<std::vector<int>> classes(4);
    for (int m = 0; m < 4; ++m)
        for (int pkt = 0; pkt < 64; ++pkt)
            classes[static_cast<std::size_t>(m)].push_back(60 + 7 * m + pkt % 40);
    for (auto _ : state) {
        InterleaverMap map = build_interleaver(classes);
        benchmark::DoNotOptimize(map.assignment(map.num_uses() / 2));
    }
}
BENCHMARK(InterleaverBuild);

} // namespace

int main(int argc, char **argv) {
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv))
        return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
