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
// Per-stream link models: uncoded M-QAM symbol errors, coded packet error
// rates via a coding-gain SNR shift, and truncated-geometric retransmission
// statistics.

#ifndef LVMIMO_LINK_HPP
#define LVMIMO_LINK_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace lvmimo {

/// Square M-QAM constellation. m must be a power of two, at least 2 (BPSK).
struct ModulationScheme {
    int m = 2;

    ModulationScheme() = default;
    explicit ModulationScheme(int m_in);
    double bits_per_symbol() const;
};

/// Channel code identified by its rational rate, carrying the SNR shift (dB)
/// that maps its packet error curve onto the uncoded expression.
struct CodeRate {
    int num = 1;
    int den = 1;
    double coding_gain_db = 0.0;

    CodeRate() = default;
    CodeRate(int num_in, int den_in, double gain_db);
    double value() const { return static_cast<double>(num) / den; }
    std::string label() const; // e.g. "2/3"
};

/// Fully resolved per-stream state: SNR, MCS, packet error rate, and the
/// derived retransmission statistics.
struct StreamLink {
    double gamma = 0.0; // linear post-processing SNR
    ModulationScheme mod;
    CodeRate code;
    double alpha = 0.0;              // packet error probability
    int retx_limit = 0;              // L
    double mean_transmissions = 1.0; // r in [1, L+1]
    double p_success = 1.0;          // 1 - alpha^(L+1)
    double rate = 0.0;               // bits/s, bandwidth * log2(m)
};

/// Measured packet error waterfall: (gamma_db, per) points with strictly
/// increasing SNR and non-increasing error rate.
struct PerCurve {
    std::vector<std::pair<double, double>> points;
};

/// Uncoded symbol error probability for M-QAM at linear SNR gamma, using the
/// canonical textbook approximation (exact Gaussian tail for BPSK), clamped
/// to [0, 1].
double qam_ser(const ModulationScheme &mod, double gamma);

/// Packet error probability for packet_symbols QAM symbols: the coding gain
/// shifts the SNR, and symbol errors compose as 1 - (1 - SER)^b. Fractional
/// b is accepted so mean packet sizes can be used directly.
double packet_error_rate(const ModulationScheme &mod, const CodeRate &code, double gamma,
                         double packet_symbols);

/// Least-squares fit (in log error rate) of the SNR shift that maps the
/// uncoded expression onto a measured curve; golden-section search on
/// [0, 15] dB. The reference curve composes packet_symbols symbols per
/// packet; the default 1 treats the curve as a per-symbol waterfall.
/// Throws std::invalid_argument for degenerate curves.
double fit_coding_gain(const PerCurve &curve, const ModulationScheme &mod, const CodeRate &code,
                       double packet_symbols = 1.0);

/// Mean number of transmissions under a truncated-geometric retransmission
/// process with per-attempt error probability alpha and at most `limit`
/// retransmissions: (1 - alpha^(L+1)) / (1 - alpha), in [1, L+1].
/// alpha == 1 returns the degenerate limit L+1.
double mean_retransmissions(double alpha, int limit);

/// Post-retransmission delivery probability 1 - alpha^(L+1).
double success_probability(double alpha, int limit);

/// Packet error rate when each packet is multiplexed evenly over s streams
/// with per-stream packet error rates alphas: 1 - prod_i (1-alpha_i)^(1/s).
double baseline_per(const std::vector<double> &alphas, int s);

/// Builds a StreamLink, deriving alpha from the mean packet size and the
/// rate from the bandwidth.
StreamLink make_stream_link(double gamma, const ModulationScheme &mod, const CodeRate &code,
                            int retx_limit, double mean_packet_symbols, double bandwidth_hz);

/// Default sets matching common OFDM profiles. The coding gains are labeled
/// placeholders for real code simulations; override them via a gain table.
std::vector<ModulationScheme> default_modulation_set();
std::vector<CodeRate> default_code_set();

/// Parses "2/3" style rate labels.
std::pair<int, int> parse_code_rate_label(const std::string &label);

/// Applies a {"rate label": gain_db} table to a code set. Unknown labels in
/// the table raise std::invalid_argument.
void apply_coding_gain_table(std::vector<CodeRate> &codes,
                             const std::map<std::string, double> &gains_db);

/// PerCurve CSV I/O: header row "gamma_db,per", one point per line.
/// Parse failures report the offending line number.
PerCurve parse_per_curve_csv(const std::string &text);
PerCurve read_per_curve(const std::string &path);

} // namespace lvmimo

#endif
