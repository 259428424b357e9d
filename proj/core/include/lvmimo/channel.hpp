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
// MIMO channel sampling, precoder computation (SVD-based and codebook-based)
// and zero-forcing post-processing SNR evaluation. All SNRs are linear scale;
// dB conversion is a CLI/config concern.

#ifndef LVMIMO_CHANNEL_HPP
#define LVMIMO_CHANNEL_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lvmimo {

using cxd = std::complex<double>;

/// One narrowband MIMO channel matrix sample. Entries are dimensionless
/// complex gains stored row-major, one row per receive antenna.
struct ChannelRealization {
    std::vector<cxd> entries;
    int nr = 0;
    int nt = 0;

    ChannelRealization() = default;
    ChannelRealization(std::vector<cxd> entries_in, int nr_in, int nt_in);

    cxd at(int row, int col) const { return entries[static_cast<std::size_t>(row) * nt + col]; }
};

/// Linear precoding matrix with nt rows and one column per spatial stream.
/// Columns are mutually orthogonal; the SVD construction scales each column
/// to squared norm 1/s so total transmit power is independent of the mode.
struct Precoder {
    std::vector<cxd> entries; // row-major, nt x s
    int nt = 0;
    int s = 0;

    cxd at(int row, int col) const { return entries[static_cast<std::size_t>(row) * s + col]; }
};

/// Finite set of candidate precoders indexed by a feedback word of `bits` bits.
struct Codebook {
    int nt = 0;
    int s = 0;
    int bits = 0;
    std::vector<Precoder> precoders; // size 2^bits
};

/// Per-stream post-processing SNRs, linear scale, nonnegative.
using SnrVector = std::vector<double>;

struct SvdResult {
    std::vector<cxd> u;        // nr x nr, row-major
    std::vector<double> sigma; // min(nr, nt) singular values, descending
    std::vector<cxd> v;        // nt x nt, row-major
};

/// Raised when the effective channel H*F cannot be zero-forced because its
/// condition number exceeds the configured cap. `stream` is the 1-based index
/// of the stream most aligned with the near-null direction.
class SingularEffectiveChannelError : public std::runtime_error {
  public:
    SingularEffectiveChannelError(std::string msg, int stream_in)
        : std::runtime_error(std::move(msg)), stream(stream_in) {}
    int stream;
};

/// Draws an nr x nt matrix with i.i.d. circularly-symmetric complex Gaussian
/// entries of unit variance (flat Rayleigh fading).
ChannelRealization sample_rayleigh(int nr, int nt, std::mt19937_64 &rng);

/// Singular value decomposition H = U * diag(sigma) * V^H with sigma sorted
/// descending. The phase of each singular vector is fixed by making its
/// largest-magnitude component real positive, so results are deterministic.
SvdResult svd_decompose(const ChannelRealization &h);

/// Unitary precoder from the first s right singular vectors scaled by 1/sqrt(s).
/// Throws std::invalid_argument unless 1 <= s <= min(nr, nt).
Precoder unitary_precoder(const ChannelRealization &h, int s);

/// Zero-forcing post-processing SNR per stream:
///   gamma_i = es_over_n0 / [ (F^H H^H H F)^{-1} ]_{i,i}.
/// Throws SingularEffectiveChannelError if cond(H*F) exceeds cond_cap.
SnrVector zf_post_snr(const ChannelRealization &h, const Precoder &f, double es_over_n0,
                      double cond_cap = 1e12);

/// Post-processing SNR under the SVD construction: gamma_i = es_over_n0 * sigma_i^2 / s
/// for the top-s singular values. Algebraically equal to zf_post_snr with the
/// unitary SVD precoder; kept as an independent route for consistency checks.
SnrVector svd_post_snr(const std::vector<double> &sigma, int s, double es_over_n0);

/// Smallest singular value of the effective channel H*F.
double min_singular_value(const ChannelRealization &h, const Precoder &f);

/// Selects the codeword maximizing the minimum singular value of H*F.
/// Ties resolve to the smallest index.
std::pair<int, Precoder> select_codebook_precoder(const ChannelRealization &h, const Codebook &cb);

/// Chordal distance between the column spaces of two precoders with
/// orthogonal columns of squared norm 1/s.
double chordal_distance(const Precoder &a, const Precoder &b);

double min_pairwise_chordal(const Codebook &cb);

/// Random-search codebook construction: repeated perturbation of the closest
/// pair, keeping a change only when the minimum pairwise chordal distance
/// improves. Deterministic for a given generator state.
Codebook generate_codebook(int nt, int s, int bits, int iterations, std::mt19937_64 &rng);

/// Codebook file I/O. The JSON layout is an object with fields nt, s, bits and
/// "precoders": an array of codewords, each a row-major array of [re, im] pairs.
std::string codebook_to_json(const Codebook &cb);
Codebook codebook_from_json(const std::string &text);
void write_codebook(const std::string &path, const Codebook &cb);
Codebook read_codebook(const std::string &path);

} // namespace lvmimo

#endif
