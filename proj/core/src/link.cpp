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

#include "lvmimo/link.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lvmimo/common.hpp"

namespace lvmimo {

namespace {

bool is_power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

constexpr double kAlphaCap = 1.0 - 1e-15;

} // namespace

ModulationScheme::ModulationScheme(int m_in) : m(m_in) {
    if (m < 2 || !is_power_of_two(m))
        throw std::invalid_argument("ModulationScheme: constellation size must be a power of 2, >= 2");
}

double ModulationScheme::bits_per_symbol() const { return std::log2(static_cast<double>(m)); }

CodeRate::CodeRate(int num_in, int den_in, double gain_db)
    : num(num_in), den(den_in), coding_gain_db(gain_db) {
    if (num < 1 || den < 1 || num > den)
        throw std::invalid_argument("CodeRate: rate must lie in (0, 1]");
    if (!(gain_db >= 0.0))
        throw std::invalid_argument("CodeRate: coding gain must be nonnegative");
}

std::string CodeRate::label() const {
    if (num == den)
        return "1";
    return std::to_string(num) + "/" + std::to_string(den);
}

double qam_ser(const ModulationScheme &mod, double gamma) {
    if (!(gamma >= 0.0))
        throw std::invalid_argument("qam_ser: gamma must be nonnegative");
    if (mod.m == 2)
        return q_function(std::sqrt(2.0 * gamma));
    double m = static_cast<double>(mod.m);
    double ser = 4.0 * (1.0 - 1.0 / std::sqrt(m)) * q_function(std::sqrt(3.0 * gamma / (m - 1.0)));
    return std::clamp(ser, 0.0, 1.0);
}

double packet_error_rate(const ModulationScheme &mod, const CodeRate &code, double gamma,
                         double packet_symbols) {
    if (!(packet_symbols >= 1.0))
        throw std::invalid_argument("packet_error_rate: packet size must be >= 1 symbol");
    double ser = qam_ser(mod, gamma * db_to_linear(code.coding_gain_db));
    if (ser >= 1.0)
        return 1.0;
    if (ser <= 0.0)
        return 0.0;
    return -std::expm1(packet_symbols * std::log1p(-ser));
}

double fit_coding_gain(const PerCurve &curve, const ModulationScheme &mod, const CodeRate &code,
                       double packet_symbols) {
    (void)code; // identifies the code under fit; the shift itself is mod-driven
    const auto &pts = curve.points;
    if (pts.size() < 3)
        throw std::invalid_argument("fit_coding_gain: need at least 3 curve points");
    double per_max = 0.0, per_min = 1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0 && !(pts[i].first > pts[i - 1].first))
            throw std::invalid_argument("fit_coding_gain: SNR grid must be strictly increasing");
        if (i > 0 && pts[i].second > pts[i - 1].second)
            throw std::invalid_argument("fit_coding_gain: error rates must be non-increasing");
        if (pts[i].second < 0.0 || pts[i].second > 1.0)
            throw std::invalid_argument("fit_coding_gain: error rates must lie in [0, 1]");
        per_max = std::max(per_max, pts[i].second);
        per_min = std::min(per_min, pts[i].second);
    }
    if (per_max < 0.5 || per_min > 0.01)
        throw std::invalid_argument("fit_coding_gain: curve must span the error waterfall");

    // Clamp before the log so the reference side never produces -inf on the
    // steep tail of the waterfall.
    constexpr double kFloor = 1e-12;
    CodeRate unshifted(code.num, code.den, 0.0);
    auto sse = [&](double g_db) {
        double acc = 0.0;
        for (const auto &[gamma_db, per] : pts) {
            double ref = packet_error_rate(mod, unshifted, db_to_linear(gamma_db + g_db), packet_symbols);
            double d = std::log(std::max(per, kFloor)) - std::log(std::max(ref, kFloor));
            acc += d * d;
        }
        return acc;
    };

    // Golden-section search on [0, 15] dB.
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = 15.0;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = sse(x1), f2 = sse(x2);
    while (hi - lo > 1e-6) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = sse(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = sse(x2);
        }
    }
    return 0.5 * (lo + hi);
}

double mean_retransmissions(double alpha, int limit) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("mean_retransmissions: alpha must lie in [0, 1]");
    if (limit < 0)
        throw std::invalid_argument("mean_retransmissions: retransmission limit must be >= 0");
    double lp1 = static_cast<double>(limit) + 1.0;
    if (alpha >= kAlphaCap)
        return lp1; // degenerate: every attempt fails, all L+1 slots are used
    if (alpha == 0.0)
        return 1.0;
    double r = (1.0 - std::pow(alpha, lp1)) / (1.0 - alpha);
    return std::clamp(r, 1.0, lp1);
}

double success_probability(double alpha, int limit) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("success_probability: alpha must lie in [0, 1]");
    if (limit < 0)
        throw std::invalid_argument("success_probability: retransmission limit must be >= 0");
    return 1.0 - std::pow(alpha, static_cast<double>(limit) + 1.0);
}

double baseline_per(const std::vector<double> &alphas, int s) {
    if (alphas.empty() || s != static_cast<int>(alphas.size()))
        throw std::invalid_argument("baseline_per: s must equal the number of per-stream error rates");
    if (s == 1) {
        if (!(alphas[0] >= 0.0 && alphas[0] <= 1.0))
            throw std::invalid_argument("baseline_per: alphas must lie in [0, 1]");
        return alphas[0];
    }
    double log_acc = 0.0;
    for (double a : alphas) {
        if (!(a >= 0.0 && a <= 1.0))
            throw std::invalid_argument("baseline_per: alphas must lie in [0, 1]");
        if (a >= 1.0)
            return 1.0;
        log_acc += std::log1p(-a);
    }
    return -std::expm1(log_acc / static_cast<double>(s));
}

StreamLink make_stream_link(double gamma, const ModulationScheme &mod, const CodeRate &code,
                            int retx_limit, double mean_packet_symbols, double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0))
        throw std::invalid_argument("make_stream_link: bandwidth must be positive");
    StreamLink link;
    link.gamma = gamma;
    link.mod = mod;
    link.code = code;
    link.retx_limit = retx_limit;
    link.alpha = packet_error_rate(mod, code, gamma, mean_packet_symbols);
    link.mean_transmissions = mean_retransmissions(link.alpha, retx_limit);
    link.p_success = success_probability(link.alpha, retx_limit);
    link.rate = bandwidth_hz * mod.bits_per_symbol();
    return link;
}

std::vector<ModulationScheme> default_modulation_set() {
    return {ModulationScheme(2), ModulationScheme(4), ModulationScheme(16), ModulationScheme(64)};
}

std::vector<CodeRate> default_code_set() {
    // Placeholder gains, not calibrated against any real code family.
    return {CodeRate(1, 2, 5.0), CodeRate(2, 3, 4.0), CodeRate(3, 4, 3.5), CodeRate(5, 6, 3.0)};
}

std::pair<int, int> parse_code_rate_label(const std::string &label) {
    std::size_t slash = label.find('/');
    try {
        if (slash == std::string::npos) {
            int whole = std::stoi(label);
            return {whole, 1};
        }
        int num = std::stoi(label.substr(0, slash));
        int den = std::stoi(label.substr(slash + 1));
        return {num, den};
    } catch (const std::exception &) {
        throw std::invalid_argument("parse_code_rate_label: cannot parse rate '" + label + "'");
    }
}

void apply_coding_gain_table(std::vector<CodeRate> &codes,
                             const std::map<std::string, double> &gains_db) {
    for (const auto &[label, gain] : gains_db) {
        auto [num, den] = parse_code_rate_label(label);
        bool found = false;
        for (CodeRate &c : codes) {
            if (c.num * den == num * c.den) {
                c = CodeRate(c.num, c.den, gain);
                found = true;
            }
        }
        if (!found)
            throw std::invalid_argument("apply_coding_gain_table: rate '" + label +
                                        "' is not in the code set");
    }
}

PerCurve parse_per_curve_csv(const std::string &text) {
    PerCurve curve;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        if (line_no == 1) {
            if (line.rfind("gamma_db", 0) != 0)
                throw std::invalid_argument("per curve line 1: expected header 'gamma_db,per'");
            continue;
        }
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b, ','))
            throw std::invalid_argument("per curve line " + std::to_string(line_no) +
                                        ": expected 'gamma_db,per'");
        try {
            curve.points.emplace_back(std::stod(a), std::stod(b));
        } catch (const std::exception &) {
            throw std::invalid_argument("per curve line " + std::to_string(line_no) +
                                        ": cannot parse numbers");
        }
        auto [gamma_db, per] = curve.points.back();
        if (per < 0.0 || per > 1.0)
            throw std::invalid_argument("per curve line " + std::to_string(line_no) +
                                        ": error rate out of [0, 1]");
        if (curve.points.size() > 1) {
            auto prev = curve.points[curve.points.size() - 2];
            if (!(gamma_db > prev.first))
                throw std::invalid_argument("per curve line " + std::to_string(line_no) +
                                            ": SNR grid must be strictly increasing");
            if (per > prev.second)
                throw std::invalid_argument("per curve line " + std::to_string(line_no) +
                                            ": error rates must be non-increasing");
        }
    }
    return curve;
}

PerCurve read_per_curve(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_per_curve: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_per_curve_csv(buf.str());
}

} // namespace lvmimo
