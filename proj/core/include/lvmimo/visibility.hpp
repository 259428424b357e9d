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
// Loss-visibility scoring and distribution estimation. A packet's loss
// visibility is the probability, in [0, 1], that losing it produces a
// visible artifact; the running distribution of these scores drives the
// thresholding policy.

#ifndef LVMIMO_VISIBILITY_HPP
#define LVMIMO_VISIBILITY_HPP

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace lvmimo {

/// Logistic regression scoring model: logit(v) = intercept + sum_i coef_i * x_i.
struct GlmModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
    std::vector<std::string> feature_names;
};

struct PacketRecord {
    long id = 0;
    double visibility = 0.0; // in [0, 1]
    int size_symbols = 1;    // QAM symbols, >= 1
};

enum class KernelType { kGaussian, kEpanechnikov };

/// Kernel density estimate over [0, 1], truncated and globally renormalized so
/// the support boundary keeps unit mass. CDF, quantile and partial first
/// moments use the kernel's closed forms; the quantile inverts the CDF by
/// bisection.
class VisibilityDistribution {
  public:
    VisibilityDistribution(std::vector<double> samples, double bandwidth,
                           KernelType kernel = KernelType::kGaussian);

    double pdf(double x) const;
    double cdf(double x) const;

    /// Inverse CDF on [0, 1]; quantile(0) = 0 and quantile(1) = 1 by the
    /// support convention.
    double quantile(double q) const;

    /// Integral of v * pdf(v) over [a, b], 0 <= a <= b <= 1.
    double partial_moment(double a, double b) const;

    double mean() const { return partial_moment(0.0, 1.0); }

    /// Draws one value from the truncated estimate.
    double sample(std::mt19937_64 &rng) const;

    const std::vector<double> &samples() const { return samples_; }
    double bandwidth() const { return h_; }
    KernelType kernel() const { return kernel_; }

  private:
    std::vector<double> samples_;
    double h_;
    KernelType kernel_;
    double norm_; // mean in-support kernel mass before renormalization
};

/// Builds the distribution from the last W visibility values (window order is
/// irrelevant).
VisibilityDistribution update_distribution(std::vector<double> window_samples, double bandwidth,
                                           KernelType kernel = KernelType::kGaussian);

/// GLM score for one slice.
double estimate_visibility(std::span<const double> features, const GlmModel &model);

/// Packets carrying several slices score the mean of the slice values.
double estimate_packet_visibility(const std::vector<std::vector<double>> &slice_features,
                                  const GlmModel &model);

/// Uniform quantizer for header embedding; bits = 0 passes the value through.
double quantize_visibility(double v, int bits);

/// Trace CSV: header "id,visibility,size_symbols" plus optional feature
/// columns. Parse failures and out-of-range visibilities report the line
/// number. The GLM overload scores visibility from the named feature columns
/// instead of reading the visibility column.
std::vector<PacketRecord> parse_trace_csv(const std::string &text);
std::vector<PacketRecord> parse_trace_csv(const std::string &text, const GlmModel &model);
std::vector<PacketRecord> ingest_trace(const std::string &path);
std::vector<PacketRecord> ingest_trace(const std::string &path, const GlmModel &model);

/// Mean packet size over the trailing `window` records (all records when the
/// window is larger than the trace).
double mean_packet_size(const std::vector<PacketRecord> &records, std::size_t window);

/// GLM model JSON: {"intercept": x, "coefficients": {"name": value, ...}}.
GlmModel glm_from_json(const std::string &text);
std::string glm_to_json(const GlmModel &model);
GlmModel read_glm_model(const std::string &path);

/// Synthetic group-of-pictures source. Frames cycle through one intra frame
/// followed by alternating bidirectional/predicted frames; each type draws
/// visibility from its own range, predicted frames decay toward the end of
/// the group, and packet sizes grow monotonically with visibility.
struct GopTraceConfig {
    int packets = 1024;
    int gop_frames = 16;
    int slices_per_frame = 1;
    double intra_low = 0.55, intra_high = 0.95;
    double predicted_low = 0.25, predicted_high = 0.70;
    double bidirectional_low = 0.02, bidirectional_high = 0.25;
    int size_min_symbols = 60;
    int size_max_symbols = 360;
};

std::vector<PacketRecord> generate_gop_trace(const GopTraceConfig &config, std::mt19937_64 &rng);

/// Trace of independent draws from a distribution, sizes coupled to
/// visibility like the GoP source.
std::vector<PacketRecord> generate_iid_trace(const VisibilityDistribution &dist, int packets,
                                             int size_min_symbols, int size_max_symbols,
                                             std::mt19937_64 &rng);

std::string trace_to_csv(const std::vector<PacketRecord> &records);
void write_trace(const std::string &path, const std::vector<PacketRecord> &records);

} // namespace lvmimo

#endif
