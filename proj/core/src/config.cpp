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

#include "lvmimo/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lvmimo/common.hpp"

namespace lvmimo {

namespace {

std::string read_file(const std::string &path, const char *who) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error(std::string(who) + ": cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

KernelType kernel_from_name(const std::string &name) {
    if (name == "gaussian")
        return KernelType::kGaussian;
    if (name == "epanechnikov")
        return KernelType::kEpanechnikov;
    throw std::invalid_argument("config field kde.kernel: unknown kernel '" + name + "'");
}

const char *kernel_name(KernelType k) {
    return k == KernelType::kGaussian ? "gaussian" : "epanechnikov";
}

} // namespace

RunConfig run_config_from_json(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception &e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    RunConfig c;
    const std::vector<std::string> known = {
        "nt", "nr", "mode", "es_n0_db", "snr_grid_db", "modulations", "code_rates",
        "retx_limit", "bandwidth_hz", "kde", "visibility_quant_bits", "trace", "synthetic",
        "glm_model", "source_rate", "codebook", "channel", "coherence_packets", "trials",
        "threads", "seed"};
    for (const auto &[key, value] : j.items()) {
        (void)value;
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("config: unknown field '" + key + "'");
    }

    c.nt = j.value("nt", c.nt);
    c.nr = j.value("nr", c.nr);
    if (j.contains("mode")) {
        const auto &mode = j.at("mode");
        if (mode.is_string() && mode.get<std::string>() == "adaptive") {
            c.adaptive_mode = true;
        } else if (mode.is_number_integer()) {
            c.adaptive_mode = false;
            c.num_streams = mode.get<int>();
        } else {
            throw std::invalid_argument("config field mode: expected \"adaptive\" or a stream count");
        }
    }
    c.es_n0_db = j.value("es_n0_db", c.es_n0_db);
    if (j.contains("snr_grid_db"))
        c.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
    if (j.contains("modulations")) {
        c.mod_set.clear();
        for (int m : j.at("modulations").get<std::vector<int>>())
            c.mod_set.push_back(ModulationScheme(m));
    }
    if (j.contains("code_rates")) {
        c.code_set.clear();
        for (const auto &[label, gain] : j.at("code_rates").items()) {
            auto [num, den] = parse_code_rate_label(label);
            c.code_set.push_back(CodeRate(num, den, gain.get<double>()));
        }
    }
    c.retx_limit = j.value("retx_limit", c.retx_limit);
    c.bandwidth_hz = j.value("bandwidth_hz", c.bandwidth_hz);
    if (j.contains("kde")) {
        const auto &k = j.at("kde");
        c.kde_window = k.value("window", c.kde_window);
        c.kde_bandwidth = k.value("bandwidth", c.kde_bandwidth);
        if (k.contains("kernel"))
            c.kernel = kernel_from_name(k.at("kernel").get<std::string>());
    }
    c.visibility_quant_bits = j.value("visibility_quant_bits", c.visibility_quant_bits);
    c.trace_path = j.value("trace", c.trace_path);
    if (j.contains("synthetic")) {
        const auto &s = j.at("synthetic");
        GopTraceConfig g;
        g.packets = s.value("packets", g.packets);
        g.gop_frames = s.value("gop_frames", g.gop_frames);
        g.slices_per_frame = s.value("slices_per_frame", g.slices_per_frame);
        g.intra_low = s.value("intra_low", g.intra_low);
        g.intra_high = s.value("intra_high", g.intra_high);
        g.predicted_low = s.value("predicted_low", g.predicted_low);
        g.predicted_high = s.value("predicted_high", g.predicted_high);
        g.bidirectional_low = s.value("bidirectional_low", g.bidirectional_low);
        g.bidirectional_high = s.value("bidirectional_high", g.bidirectional_high);
        g.size_min_symbols = s.value("size_min_symbols", g.size_min_symbols);
        g.size_max_symbols = s.value("size_max_symbols", g.size_max_symbols);
        c.synthetic = g;
    }
    c.glm_model_path = j.value("glm_model", c.glm_model_path);
    c.source_rate = j.value("source_rate", c.source_rate);
    c.codebook_path = j.value("codebook", c.codebook_path);
    c.channel_path = j.value("channel", c.channel_path);
    c.coherence_packets = j.value("coherence_packets", c.coherence_packets);
    c.trials = j.value("trials", c.trials);
    c.threads = j.value("threads", c.threads);
    c.seed = j.value("seed", c.seed);
    return c;
}

RunConfig read_run_config(const std::string &path) {
    return run_config_from_json(read_file(path, "read_run_config"));
}

std::string run_config_to_json(const RunConfig &c) {
    nlohmann::json j;
    j["nt"] = c.nt;
    j["nr"] = c.nr;
    if (c.adaptive_mode)
        j["mode"] = "adaptive";
    else
        j["mode"] = c.num_streams;
    j["es_n0_db"] = c.es_n0_db;
    if (!c.snr_grid_db.empty())
        j["snr_grid_db"] = c.snr_grid_db;
    nlohmann::json mods = nlohmann::json::array();
    for (const ModulationScheme &m : c.mod_set)
        mods.push_back(m.m);
    j["modulations"] = std::move(mods);
    nlohmann::json codes = nlohmann::json::object();
    for (const CodeRate &r : c.code_set)
        codes[r.label()] = r.coding_gain_db;
    j["code_rates"] = std::move(codes);
    j["retx_limit"] = c.retx_limit;
    j["bandwidth_hz"] = c.bandwidth_hz;
    j["kde"] = {{"window", c.kde_window},
                {"bandwidth", c.kde_bandwidth},
                {"kernel", kernel_name(c.kernel)}};
    j["visibility_quant_bits"] = c.visibility_quant_bits;
    if (!c.trace_path.empty())
        j["trace"] = c.trace_path;
    if (c.synthetic) {
        const GopTraceConfig &g = *c.synthetic;
        j["synthetic"] = {{"packets", g.packets},
                          {"gop_frames", g.gop_frames},
                          {"slices_per_frame", g.slices_per_frame},
                          {"intra_low", g.intra_low},
                          {"intra_high", g.intra_high},
                          {"predicted_low", g.predicted_low},
                          {"predicted_high", g.predicted_high},
                          {"bidirectional_low", g.bidirectional_low},
                          {"bidirectional_high", g.bidirectional_high},
                          {"size_min_symbols", g.size_min_symbols},
                          {"size_max_symbols", g.size_max_symbols}};
    }
    if (!c.glm_model_path.empty())
        j["glm_model"] = c.glm_model_path;
    j["source_rate"] = c.source_rate;
    if (!c.codebook_path.empty())
        j["codebook"] = c.codebook_path;
    if (!c.channel_path.empty())
        j["channel"] = c.channel_path;
    j["coherence_packets"] = c.coherence_packets;
    j["trials"] = c.trials;
    j["threads"] = c.threads;
    j["seed"] = c.seed;
    return j.dump(2);
}

void validate(const RunConfig &c) {
    auto fail = [](const std::string &msg) { throw std::invalid_argument("config field " + msg); };
    if (c.nt < 1)
        fail("nt: must be >= 1");
    if (c.nr < 1)
        fail("nr: must be >= 1");
    if (!c.adaptive_mode && (c.num_streams < 1 || c.num_streams > std::min(c.nt, c.nr)))
        fail("mode: stream count must satisfy 1 <= S <= min(nt, nr)");
    if (c.mod_set.empty())
        fail("modulations: must be non-empty");
    if (c.code_set.empty())
        fail("code_rates: must be non-empty");
    if (c.retx_limit < 0)
        fail("retx_limit: must be >= 0");
    if (!(c.bandwidth_hz > 0.0))
        fail("bandwidth_hz: must be positive");
    if (c.kde_window < 1)
        fail("kde.window: must be >= 1");
    if (!(c.kde_bandwidth > 0.0))
        fail("kde.bandwidth: must be positive");
    if (c.visibility_quant_bits < 0 || c.visibility_quant_bits > 16)
        fail("visibility_quant_bits: must lie in [0, 16]");
    if (c.source_rate < 0.0)
        fail("source_rate: must be >= 0");
    if (c.coherence_packets < 1)
        fail("coherence_packets: must be >= 1");
    if (c.trials < 1)
        fail("trials: must be >= 1");
    if (c.threads < 1)
        fail("threads: must be >= 1");
    for (std::size_t i = 1; i < c.snr_grid_db.size(); ++i)
        if (!(c.snr_grid_db[i] > c.snr_grid_db[i - 1]))
            fail("snr_grid_db: must be strictly increasing");
    if (c.trace_path.empty() && !c.synthetic)
        fail("trace: either a trace file or a synthetic source is required");
}

std::vector<PacketRecord> load_trace(const RunConfig &c) {
    if (!c.trace_path.empty()) {
        if (!c.glm_model_path.empty())
            return ingest_trace(c.trace_path, read_glm_model(c.glm_model_path));
        return ingest_trace(c.trace_path);
    }
    if (c.synthetic) {
        auto rng = make_rng(c.seed, 0xb10c'5eedULL);
        return generate_gop_trace(*c.synthetic, rng);
    }
    throw std::invalid_argument("config field trace: no packet source configured");
}

TraceSummary summarize_trace(const std::vector<PacketRecord> &records, const RunConfig &c) {
    if (records.empty())
        throw std::invalid_argument("summarize_trace: empty trace");
    std::size_t take = std::min(c.kde_window, records.size());
    std::vector<double> window;
    window.reserve(take);
    for (std::size_t i = records.size() - take; i < records.size(); ++i)
        window.push_back(quantize_visibility(records[i].visibility, c.visibility_quant_bits));
    return TraceSummary{VisibilityDistribution(std::move(window), c.kde_bandwidth, c.kernel),
                        mean_packet_size(records, take)};
}

ChannelRealization channel_from_json(const std::string &text) {
    nlohmann::json j = nlohmann::json::parse(text);
    int nr = j.at("nr").get<int>();
    int nt = j.at("nt").get<int>();
    std::vector<cxd> entries;
    for (const auto &pair : j.at("entries"))
        entries.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    return ChannelRealization(std::move(entries), nr, nt);
}

ChannelRealization read_channel(const std::string &path) {
    return channel_from_json(read_file(path, "read_channel"));
}

std::string channel_to_json(const ChannelRealization &h) {
    nlohmann::json j;
    j["nr"] = h.nr;
    j["nt"] = h.nt;
    nlohmann::json entries = nlohmann::json::array();
    for (const cxd &e : h.entries)
        entries.push_back({e.real(), e.imag()});
    j["entries"] = std::move(entries);
    return j.dump(2);
}

PlannerConfig planner_config(const RunConfig &c, double mean_packet_symbols) {
    PlannerConfig p;
    p.mod_set = c.mod_set;
    p.code_set = c.code_set;
    p.retx_limit = c.retx_limit;
    p.bandwidth_hz = c.bandwidth_hz;
    p.es_over_n0 = db_to_linear(c.es_n0_db);
    p.source_rate = c.source_rate;
    p.mean_packet_symbols = mean_packet_symbols;
    return p;
}

GainConfig gain_config(const RunConfig &c) {
    GainConfig g;
    g.nt = c.nt;
    g.nr = c.nr;
    g.num_streams = c.num_streams;
    g.es_over_n0 = db_to_linear(c.es_n0_db);
    g.mod_set = c.mod_set;
    g.code_set = c.code_set;
    g.retx_limit = c.retx_limit;
    g.bandwidth_hz = c.bandwidth_hz;
    g.threads = c.threads;
    g.seed = c.seed;
    if (!c.channel_path.empty())
        g.fixed_channel = read_channel(c.channel_path);
    return g;
}

SessionConfig session_config(const RunConfig &c) {
    SessionConfig s;
    s.nt = c.nt;
    s.nr = c.nr;
    s.num_streams = c.num_streams;
    s.adaptive_mode = c.adaptive_mode;
    s.mod_set = c.mod_set;
    s.code_set = c.code_set;
    s.retx_limit = c.retx_limit;
    s.bandwidth_hz = c.bandwidth_hz;
    s.es_over_n0 = db_to_linear(c.es_n0_db);
    s.source_rate = c.source_rate;
    s.kde_window = c.kde_window;
    s.kde_bandwidth = c.kde_bandwidth;
    s.kernel = c.kernel;
    s.visibility_quant_bits = c.visibility_quant_bits;
    if (!c.codebook_path.empty())
        s.precoder_source =
            PrecoderSource::codebooks({{c.num_streams, read_codebook(c.codebook_path)}});
    s.seed = c.seed;
    return s;
}

} // namespace lvmimo
