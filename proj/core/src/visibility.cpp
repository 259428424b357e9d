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

#include "lvmimo/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "lvmimo/common.hpp"

namespace lvmimo {

namespace {

// Kernel CDF, pdf and first-moment primitive, each as a function of the
// standardized coordinate u = (x - sample) / h.
double kernel_cdf(KernelType k, double u) {
    switch (k) {
    case KernelType::kGaussian:
        return normal_cdf(u);
    case KernelType::kEpanechnikov:
        if (u <= -1.0)
            return 0.0;
        if (u >= 1.0)
            return 1.0;
        return 0.5 + 0.75 * (u - u * u * u / 3.0);
    }
    return 0.0;
}

double kernel_pdf(KernelType k, double u) {
    switch (k) {
    case KernelType::kGaussian:
        return normal_pdf(u);
    case KernelType::kEpanechnikov:
        return (u <= -1.0 || u >= 1.0) ? 0.0 : 0.75 * (1.0 - u * u);
    }
    return 0.0;
}

// Antiderivative of u * K(u).
double kernel_moment(KernelType k, double u) {
    switch (k) {
    case KernelType::kGaussian:
        return -normal_pdf(u);
    case KernelType::kEpanechnikov: {
        double t = std::clamp(u, -1.0, 1.0);
        return 0.75 * (t * t / 2.0 - t * t * t * t / 4.0);
    }
    }
    return 0.0;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ','))
        cells.push_back(cell);
    return cells;
}

std::vector<PacketRecord> parse_trace_impl(const std::string &text, const GlmModel *model) {
    std::vector<PacketRecord> records;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<int> feature_cols; // column index per model feature
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto cells = split_csv_line(line);
        if (line_no == 1) {
            if (cells.size() < 3 || cells[0] != "id" || cells[1] != "visibility" ||
                cells[2] != "size_symbols")
                throw std::invalid_argument(
                    "trace line 1: expected header 'id,visibility,size_symbols[,features...]'");
            if (model != nullptr) {
                for (const std::string &name : model->feature_names) {
                    auto it = std::find(cells.begin() + 3, cells.end(), name);
                    if (it == cells.end())
                        throw std::invalid_argument("trace line 1: feature column '" + name +
                                                    "' required by the model is missing");
                    feature_cols.push_back(static_cast<int>(it - cells.begin()));
                }
            }
            continue;
        }
        if (cells.size() < 3)
            throw std::invalid_argument("trace line " + std::to_string(line_no) +
                                        ": expected at least 3 columns");
        PacketRecord rec;
        try {
            rec.id = std::stol(cells[0]);
            rec.visibility = std::stod(cells[1]);
            rec.size_symbols = std::stoi(cells[2]);
        } catch (const std::exception &) {
            throw std::invalid_argument("trace line " + std::to_string(line_no) +
                                        ": cannot parse numbers");
        }
        if (model != nullptr) {
            std::vector<double> feats;
            feats.reserve(feature_cols.size());
            for (int col : feature_cols) {
                if (col >= static_cast<int>(cells.size()))
                    throw std::invalid_argument("trace line " + std::to_string(line_no) +
                                                ": missing feature column");
                try {
                    feats.push_back(std::stod(cells[static_cast<std::size_t>(col)]));
                } catch (const std::exception &) {
                    throw std::invalid_argument("trace line " + std::to_string(line_no) +
                                                ": cannot parse feature value");
                }
            }
            rec.visibility = estimate_visibility(feats, *model);
        }
        if (rec.visibility < 0.0 || rec.visibility > 1.0)
            throw std::invalid_argument("trace line " + std::to_string(line_no) +
                                        ": visibility out of [0, 1]");
        if (rec.size_symbols < 1)
            throw std::invalid_argument("trace line " + std::to_string(line_no) +
                                        ": packet size must be >= 1 symbol");
        records.push_back(rec);
    }
    return records;
}

std::string read_file(const std::string &path, const char *who) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error(std::string(who) + ": cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int coupled_size(double v, int size_min, int size_max) {
    return size_min + static_cast<int>(std::lround(v * (size_max - size_min)));
}

} // namespace

VisibilityDistribution::VisibilityDistribution(std::vector<double> samples, double bandwidth,
                                               KernelType kernel)
    : samples_(std::move(samples)), h_(bandwidth), kernel_(kernel) {
    if (samples_.empty())
        throw std::invalid_argument("VisibilityDistribution: window must hold at least one sample");
    if (!(h_ > 0.0))
        throw std::invalid_argument("VisibilityDistribution: bandwidth must be positive");
    double acc = 0.0;
    for (double v : samples_) {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("VisibilityDistribution: samples must lie in [0, 1]");
        acc += kernel_cdf(kernel_, (1.0 - v) / h_) - kernel_cdf(kernel_, (0.0 - v) / h_);
    }
    norm_ = acc / static_cast<double>(samples_.size());
    if (!(norm_ > 0.0))
        throw std::invalid_argument("VisibilityDistribution: no kernel mass inside [0, 1]");
}

double VisibilityDistribution::pdf(double x) const {
    if (x < 0.0 || x > 1.0)
        return 0.0;
    double acc = 0.0;
    for (double v : samples_)
        acc += kernel_pdf(kernel_, (x - v) / h_);
    return acc / (static_cast<double>(samples_.size()) * h_ * norm_);
}

double VisibilityDistribution::cdf(double x) const {
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    double acc = 0.0;
    for (double v : samples_)
        acc += kernel_cdf(kernel_, (x - v) / h_) - kernel_cdf(kernel_, (0.0 - v) / h_);
    return std::clamp(acc / (static_cast<double>(samples_.size()) * norm_), 0.0, 1.0);
}

double VisibilityDistribution::quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0))
        throw std::invalid_argument("quantile: q must lie in [0, 1]");
    if (q == 0.0)
        return 0.0;
    if (q == 1.0)
        return 1.0;
    double lo = 0.0, hi = 1.0;
    // Bisection to the width of the double grid keeps downstream load-balance
    // residuals at rounding level.
    for (int it = 0; it < 80 && hi - lo > 1e-16; ++it) {
        double mid = 0.5 * (lo + hi);
        if (cdf(mid) < q)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double VisibilityDistribution::partial_moment(double a, double b) const {
    if (a > b)
        throw std::invalid_argument("partial_moment: need a <= b");
    if (!(a >= 0.0 && b <= 1.0))
        throw std::invalid_argument("partial_moment: interval must lie inside [0, 1]");
    double acc = 0.0;
    for (double v : samples_) {
        double ua = (a - v) / h_;
        double ub = (b - v) / h_;
        acc += v * (kernel_cdf(kernel_, ub) - kernel_cdf(kernel_, ua)) +
               h_ * (kernel_moment(kernel_, ub) - kernel_moment(kernel_, ua));
    }
    return acc / (static_cast<double>(samples_.size()) * norm_);
}

double VisibilityDistribution::sample(std::mt19937_64 &rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, samples_.size() - 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (;;) {
        double center = samples_[pick(rng)];
        double z;
        if (kernel_ == KernelType::kGaussian) {
            z = gauss(rng);
        } else {
            // Median of three uniforms draws the parabolic kernel exactly.
            double a = unit(rng), b = unit(rng), c = unit(rng);
            z = std::max(std::min(a, b), std::min(std::max(a, b), c));
        }
        double x = center + h_ * z;
        if (x >= 0.0 && x <= 1.0)
            return x;
    }
}

VisibilityDistribution update_distribution(std::vector<double> window_samples, double bandwidth,
                                           KernelType kernel) {
    return VisibilityDistribution(std::move(window_samples), bandwidth, kernel);
}

double estimate_visibility(std::span<const double> features, const GlmModel &model) {
    if (features.size() != model.coefficients.size())
        throw std::invalid_argument("estimate_visibility: expected " +
                                    std::to_string(model.coefficients.size()) + " features, got " +
                                    std::to_string(features.size()));
    double z = model.intercept;
    for (std::size_t i = 0; i < features.size(); ++i)
        z += model.coefficients[i] * features[i];
    return logistic(z);
}

double estimate_packet_visibility(const std::vector<std::vector<double>> &slice_features,
                                  const GlmModel &model) {
    if (slice_features.empty())
        throw std::invalid_argument("estimate_packet_visibility: packet carries no slices");
    double acc = 0.0;
    for (const auto &slice : slice_features)
        acc += estimate_visibility(slice, model);
    return acc / static_cast<double>(slice_features.size());
}

double quantize_visibility(double v, int bits) {
    if (bits < 0 || bits > 16)
        throw std::invalid_argument("quantize_visibility: bits must lie in [0, 16]");
    if (bits == 0)
        return v;
    double levels = static_cast<double>((1 << bits) - 1);
    return std::lround(std::clamp(v, 0.0, 1.0) * levels) / levels;
}

std::vector<PacketRecord> parse_trace_csv(const std::string &text) {
    return parse_trace_impl(text, nullptr);
}

std::vector<PacketRecord> parse_trace_csv(const std::string &text, const GlmModel &model) {
    return parse_trace_impl(text, &model);
}

std::vector<PacketRecord> ingest_trace(const std::string &path) {
    return parse_trace_csv(read_file(path, "ingest_trace"));
}

std::vector<PacketRecord> ingest_trace(const std::string &path, const GlmModel &model) {
    return parse_trace_csv(read_file(path, "ingest_trace"), model);
}

double mean_packet_size(const std::vector<PacketRecord> &records, std::size_t window) {
    if (records.empty())
        throw std::invalid_argument("mean_packet_size: empty trace");
    if (window == 0)
        throw std::invalid_argument("mean_packet_size: window must be >= 1");
    std::size_t n = std::min(window, records.size());
    double acc = 0.0;
    for (std::size_t i = records.size() - n; i < records.size(); ++i)
        acc += static_cast<double>(records[i].size_symbols);
    return acc / static_cast<double>(n);
}

GlmModel glm_from_json(const std::string &text) {
    nlohmann::json j = nlohmann::json::parse(text);
    GlmModel model;
    model.intercept = j.at("intercept").get<double>();
    for (const auto &[name, value] : j.at("coefficients").items()) {
        model.feature_names.push_back(name);
        model.coefficients.push_back(value.get<double>());
        if (!std::isfinite(model.coefficients.back()))
            throw std::invalid_argument("glm_from_json: coefficient '" + name + "' is not finite");
    }
    if (model.coefficients.empty())
        throw std::invalid_argument("glm_from_json: model needs at least one coefficient");
    return model;
}

std::string glm_to_json(const GlmModel &model) {
    nlohmann::json coef = nlohmann::json::object();
    for (std::size_t i = 0; i < model.coefficients.size(); ++i)
        coef[model.feature_names[i]] = model.coefficients[i];
    nlohmann::json j;
    j["intercept"] = model.intercept;
    j["coefficients"] = std::move(coef);
    return j.dump(2);
}

GlmModel read_glm_model(const std::string &path) {
    return glm_from_json(read_file(path, "read_glm_model"));
}

std::vector<PacketRecord> generate_gop_trace(const GopTraceConfig &config, std::mt19937_64 &rng) {
    if (config.packets < 1 || config.gop_frames < 1 || config.slices_per_frame < 1)
        throw std::invalid_argument("generate_gop_trace: counts must be positive");
    if (config.size_min_symbols < 1 || config.size_max_symbols < config.size_min_symbols)
        throw std::invalid_argument("generate_gop_trace: invalid size range");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<PacketRecord> records;
    records.reserve(static_cast<std::size_t>(config.packets));
    for (int p = 0; p < config.packets; ++p) {
        int frame = (p / config.slices_per_frame) % config.gop_frames;
        double lo, hi;
        if (frame == 0) {
            lo = config.intra_low;
            hi = config.intra_high;
        } else if (frame % 2 == 1) {
            lo = config.bidirectional_low;
            hi = config.bidirectional_high;
        } else {
            // Predicted frames late in the group propagate errors for fewer
            // frames, so their visibility decays toward the next intra frame.
            double decay = 1.0 - 0.5 * static_cast<double>(frame) / config.gop_frames;
            lo = config.predicted_low;
            hi = config.predicted_low + (config.predicted_high - config.predicted_low) * decay;
        }
        PacketRecord rec;
        rec.id = p;
        rec.visibility = lo + (hi - lo) * unit(rng);
        rec.size_symbols = coupled_size(rec.visibility, config.size_min_symbols, config.size_max_symbols);
        records.push_back(rec);
    }
    return records;
}

std::vector<PacketRecord> generate_iid_trace(const VisibilityDistribution &dist, int packets,
                                             int size_min_symbols, int size_max_symbols,
                                             std::mt19937_64 &rng) {
    if (packets < 1)
        throw std::invalid_argument("generate_iid_trace: packets must be positive");
    if (size_min_symbols < 1 || size_max_symbols < size_min_symbols)
        throw std::invalid_argument("generate_iid_trace: invalid size range");
    std::vector<PacketRecord> records;
    records.reserve(static_cast<std::size_t>(packets));
    for (int p = 0; p < packets; ++p) {
        PacketRecord rec;
        rec.id = p;
        rec.visibility = dist.sample(rng);
        rec.size_symbols = coupled_size(rec.visibility, size_min_symbols, size_max_symbols);
        records.push_back(rec);
    }
    return records;
}

std::string trace_to_csv(const std::vector<PacketRecord> &records) {
    std::ostringstream out;
    out << "id,visibility,size_symbols\n";
    out.precision(17);
    for (const PacketRecord &r : records)
        out << r.id << "," << r.visibility << "," << r.size_symbols << "\n";
    return out.str();
}

void write_trace(const std::string &path, const std::vector<PacketRecord> &records) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_trace: cannot open " + path);
    out << trace_to_csv(records);
}

} // namespace lvmimo
