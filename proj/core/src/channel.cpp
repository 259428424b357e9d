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

#include "lvmimo/channel.hpp"

#include <armadillo>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lvmimo {

namespace {

arma::cx_mat to_arma(const std::vector<cxd> &entries, int rows, int cols) {
    arma::cx_mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            m(i, j) = entries[static_cast<std::size_t>(i) * cols + j];
    return m;
}

std::vector<cxd> from_arma(const arma::cx_mat &m) {
    std::vector<cxd> out(m.n_rows * m.n_cols);
    for (arma::uword i = 0; i < m.n_rows; ++i)
        for (arma::uword j = 0; j < m.n_cols; ++j)
            out[i * m.n_cols + j] = m(i, j);
    return out;
}

arma::cx_mat channel_matrix(const ChannelRealization &h) { return to_arma(h.entries, h.nr, h.nt); }
arma::cx_mat precoder_matrix(const Precoder &f) { return to_arma(f.entries, f.nt, f.s); }

// Rotates each column so its largest-magnitude entry is real positive.
// Columns with a matched partner (shared singular value) must rotate in pairs
// to preserve the factorization, hence the companion matrix argument.
void fix_column_phases(arma::cx_mat &primary, arma::cx_mat *companion, arma::uword paired_cols) {
    for (arma::uword j = 0; j < primary.n_cols; ++j) {
        arma::uword imax = 0;
        double best = -1.0;
        for (arma::uword i = 0; i < primary.n_rows; ++i) {
            double mag = std::abs(primary(i, j));
            if (mag > best) {
                best = mag;
                imax = i;
            }
        }
        if (best <= 0.0)
            continue;
        cxd phase = primary(imax, j) / best;
        primary.col(j) *= std::conj(phase);
        if (companion != nullptr && j < paired_cols && j < companion->n_cols)
            companion->col(j) *= std::conj(phase);
    }
}

Precoder precoder_from_arma(const arma::cx_mat &m) {
    Precoder f;
    f.nt = static_cast<int>(m.n_rows);
    f.s = static_cast<int>(m.n_cols);
    f.entries = from_arma(m);
    return f;
}

// Orthonormal frame from a random Gaussian matrix, phase-normalized so the
// construction is a deterministic function of the draw.
arma::cx_mat random_orthonormal(int nt, int s, std::mt19937_64 &rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    arma::cx_mat g(nt, s);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < s; ++j) {
            double re = gauss(rng);
            double im = gauss(rng);
            g(i, j) = cxd(re, im);
        }
    arma::cx_mat q, r;
    arma::qr_econ(q, r, g);
    for (int j = 0; j < s; ++j) {
        cxd d = r(j, j);
        if (std::abs(d) > 0.0)
            q.col(j) *= d / std::abs(d);
    }
    fix_column_phases(q, nullptr, 0);
    return q;
}

double min_pairwise_chordal_impl(const std::vector<Precoder> &set) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::size_t j = i + 1; j < set.size(); ++j)
            best = std::min(best, chordal_distance(set[i], set[j]));
    return best;
}

} // namespace

ChannelRealization::ChannelRealization(std::vector<cxd> entries_in, int nr_in, int nt_in)
    : entries(std::move(entries_in)), nr(nr_in), nt(nt_in) {
    if (nr < 1 || nt < 1)
        throw std::invalid_argument("ChannelRealization: antenna counts must be >= 1");
    if (entries.size() != static_cast<std::size_t>(nr) * static_cast<std::size_t>(nt))
        throw std::invalid_argument("ChannelRealization: entry count does not match nr*nt");
    for (const cxd &e : entries)
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
            throw std::invalid_argument("ChannelRealization: entries must be finite");
}

ChannelRealization sample_rayleigh(int nr, int nt, std::mt19937_64 &rng) {
    if (nr < 1 || nt < 1)
        throw std::invalid_argument("sample_rayleigh: antenna counts must be >= 1");
    // Unit-variance complex entries: real and imaginary parts N(0, 1/2) each.
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::vector<cxd> entries(static_cast<std::size_t>(nr) * nt);
    for (auto &e : entries) {
        double re = gauss(rng);
        double im = gauss(rng);
        e = cxd(re, im);
    }
    return ChannelRealization(std::move(entries), nr, nt);
}

SvdResult svd_decompose(const ChannelRealization &h) {
    arma::cx_mat hm = channel_matrix(h);
    arma::cx_mat u, v;
    arma::vec s;
    if (!arma::svd(u, s, v, hm, "std"))
        throw std::runtime_error("svd_decompose: decomposition failed");
    arma::uword paired = std::min(u.n_cols, v.n_cols);
    fix_column_phases(v, &u, paired);
    // Columns of U beyond the shared count only span the cokernel; normalize
    // them independently.
    if (u.n_cols > paired) {
        arma::cx_mat tail = u.cols(paired, u.n_cols - 1);
        fix_column_phases(tail, nullptr, 0);
        u.cols(paired, u.n_cols - 1) = tail;
    }
    SvdResult out;
    out.u = from_arma(u);
    out.v = from_arma(v);
    out.sigma.assign(s.begin(), s.end());
    return out;
}

Precoder unitary_precoder(const ChannelRealization &h, int s) {
    int smax = std::min(h.nr, h.nt);
    if (s < 1 || s > smax)
        throw std::invalid_argument("unitary_precoder: s must satisfy 1 <= s <= min(nr, nt), got s=" +
                                    std::to_string(s));
    SvdResult dec = svd_decompose(h);
    arma::cx_mat v = to_arma(dec.v, h.nt, h.nt);
    arma::cx_mat f = v.cols(0, s - 1) / std::sqrt(static_cast<double>(s));
    return precoder_from_arma(f);
}

SnrVector zf_post_snr(const ChannelRealization &h, const Precoder &f, double es_over_n0,
                      double cond_cap) {
    if (f.nt != h.nt)
        throw std::invalid_argument("zf_post_snr: precoder rows must match transmit antennas");
    if (f.s < 1 || f.s > h.nr)
        throw std::invalid_argument("zf_post_snr: stream count must satisfy 1 <= s <= nr");
    if (!(es_over_n0 >= 0.0))
        throw std::invalid_argument("zf_post_snr: es_over_n0 must be nonnegative");

    arma::cx_mat a = channel_matrix(h) * precoder_matrix(f); // effective channel, nr x s
    arma::cx_mat ua, va;
    arma::vec sa;
    if (!arma::svd(ua, sa, va, a, "std"))
        throw std::runtime_error("zf_post_snr: effective channel SVD failed");
    double smax = sa(0);
    double smin = sa(sa.n_elem - 1);
    if (smin <= 0.0 || smax / smin > cond_cap) {
        // The right singular vector of the smallest singular value points at
        // the stream combination that cannot be separated.
        arma::cx_vec null_dir = va.col(va.n_cols - 1);
        int worst = static_cast<int>(arma::index_max(arma::abs(null_dir))) + 1;
        std::ostringstream msg;
        msg << "zf_post_snr: effective channel is rank deficient for stream " << worst
            << " (condition number ";
        if (smin <= 0.0)
            msg << "infinite";
        else
            msg << smax / smin;
        msg << " exceeds cap " << cond_cap << ")";
        throw SingularEffectiveChannelError(msg.str(), worst);
    }

    arma::cx_mat gram = a.t() * a; // F^H H^H H F
    arma::cx_mat ginv = arma::inv_sympd(gram);
    SnrVector out(static_cast<std::size_t>(f.s));
    for (int i = 0; i < f.s; ++i)
        out[static_cast<std::size_t>(i)] = std::max(0.0, es_over_n0 / ginv(i, i).real());
    return out;
}

SnrVector svd_post_snr(const std::vector<double> &sigma, int s, double es_over_n0) {
    if (s < 1 || static_cast<std::size_t>(s) > sigma.size())
        throw std::invalid_argument("svd_post_snr: s must satisfy 1 <= s <= len(sigma)");
    SnrVector out(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i)
        out[static_cast<std::size_t>(i)] = es_over_n0 * sigma[static_cast<std::size_t>(i)] *
                                           sigma[static_cast<std::size_t>(i)] / static_cast<double>(s);
    return out;
}

double min_singular_value(const ChannelRealization &h, const Precoder &f) {
    if (f.nt != h.nt)
        throw std::invalid_argument("min_singular_value: dimension mismatch");
    arma::vec s = arma::svd(arma::cx_mat(channel_matrix(h) * precoder_matrix(f)));
    return s(s.n_elem - 1);
}

std::pair<int, Precoder> select_codebook_precoder(const ChannelRealization &h, const Codebook &cb) {
    if (cb.precoders.empty())
        throw std::invalid_argument("select_codebook_precoder: codebook is empty");
    if (cb.nt != h.nt)
        throw std::invalid_argument("select_codebook_precoder: codebook built for nt=" +
                                    std::to_string(cb.nt) + ", channel has nt=" + std::to_string(h.nt));
    if (cb.s > std::min(h.nr, h.nt))
        throw std::invalid_argument("select_codebook_precoder: codebook stream count exceeds min(nr, nt)");
    int best_idx = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < cb.precoders.size(); ++j) {
        double lam = min_singular_value(h, cb.precoders[j]);
        if (lam > best) {
            best = lam;
            best_idx = static_cast<int>(j);
        }
    }
    return {best_idx, cb.precoders[static_cast<std::size_t>(best_idx)]};
}

double chordal_distance(const Precoder &a, const Precoder &b) {
    if (a.nt != b.nt || a.s != b.s)
        throw std::invalid_argument("chordal_distance: dimension mismatch");
    // Columns have squared norm 1/s; rescale to orthonormal frames.
    arma::cx_mat pa = precoder_matrix(a) * std::sqrt(static_cast<double>(a.s));
    arma::cx_mat pb = precoder_matrix(b) * std::sqrt(static_cast<double>(b.s));
    double cross = arma::accu(arma::square(arma::abs(arma::cx_mat(pa.t() * pb))));
    return std::sqrt(std::max(0.0, static_cast<double>(a.s) - cross));
}

double min_pairwise_chordal(const Codebook &cb) { return min_pairwise_chordal_impl(cb.precoders); }

Codebook generate_codebook(int nt, int s, int bits, int iterations, std::mt19937_64 &rng) {
    if (bits < 1)
        throw std::invalid_argument("generate_codebook: need at least 1 feedback bit");
    if (s < 1 || s > nt)
        throw std::invalid_argument("generate_codebook: need 1 <= s <= nt");
    int n = 1 << bits;
    double scale = 1.0 / std::sqrt(static_cast<double>(s));

    Codebook cb;
    cb.nt = nt;
    cb.s = s;
    cb.bits = bits;
    cb.precoders.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        cb.precoders.push_back(precoder_from_arma(random_orthonormal(nt, s, rng) * scale));

    double best = min_pairwise_chordal_impl(cb.precoders);
    std::uniform_int_distribution<int> coin(0, 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto perturb = [&](const Precoder &base, double step) {
        arma::cx_mat cur = precoder_matrix(base) / scale;
        arma::cx_mat noise(nt, s);
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < s; ++j)
                noise(i, j) = cxd(gauss(rng), gauss(rng));
        arma::cx_mat q, r;
        arma::qr_econ(q, r, arma::cx_mat(cur + step * noise));
        for (int j = 0; j < s; ++j) {
            cxd d = r(j, j);
            if (std::abs(d) > 0.0)
                q.col(j) *= d / std::abs(d);
        }
        fix_column_phases(q, nullptr, 0);
        return precoder_from_arma(q * scale);
    };
    for (int it = 0; it < iterations; ++it) {
        // Push one member of the closest pair away; keep only improvements so
        // the achieved packing distance is non-decreasing.
        std::size_t wa = 0, wb = 1;
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cb.precoders.size(); ++i)
            for (std::size_t j = i + 1; j < cb.precoders.size(); ++j) {
                double d = chordal_distance(cb.precoders[i], cb.precoders[j]);
                if (d < worst) {
                    worst = d;
                    wa = i;
                    wb = j;
                }
            }
        std::size_t victim = (coin(rng) == 0) ? wa : wb;
        double step = 0.02 + 0.6 * std::generate_canonical<double, 53>(rng);
        Precoder candidate = perturb(cb.precoders[victim], step);
        Precoder saved = cb.precoders[victim];
        cb.precoders[victim] = candidate;
        double trial = min_pairwise_chordal_impl(cb.precoders);
        if (trial > best)
            best = trial;
        else
            cb.precoders[victim] = saved;
    }
    return cb;
}

std::string codebook_to_json(const Codebook &cb) {
    nlohmann::json j;
    j["nt"] = cb.nt;
    j["s"] = cb.s;
    j["bits"] = cb.bits;
    nlohmann::json list = nlohmann::json::array();
    for (const Precoder &f : cb.precoders) {
        nlohmann::json word = nlohmann::json::array();
        for (const cxd &e : f.entries)
            word.push_back({e.real(), e.imag()});
        list.push_back(std::move(word));
    }
    j["precoders"] = std::move(list);
    return j.dump(2);
}

Codebook codebook_from_json(const std::string &text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Codebook cb;
    cb.nt = j.at("nt").get<int>();
    cb.s = j.at("s").get<int>();
    cb.bits = j.at("bits").get<int>();
    std::size_t expected = std::size_t(1) << cb.bits;
    const auto &list = j.at("precoders");
    if (list.size() != expected)
        throw std::invalid_argument("codebook_from_json: expected " + std::to_string(expected) +
                                    " precoders, found " + std::to_string(list.size()));
    for (const auto &word : list) {
        Precoder f;
        f.nt = cb.nt;
        f.s = cb.s;
        if (word.size() != static_cast<std::size_t>(cb.nt) * cb.s)
            throw std::invalid_argument("codebook_from_json: precoder entry count mismatch");
        for (const auto &pair : word)
            f.entries.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
        cb.precoders.push_back(std::move(f));
    }
    return cb;
}

void write_codebook(const std::string &path, const Codebook &cb) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_codebook: cannot open " + path);
    out << codebook_to_json(cb) << "\n";
}

Codebook read_codebook(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("read_codebook: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return codebook_from_json(buf.str());
}

} // namespace lvmimo
