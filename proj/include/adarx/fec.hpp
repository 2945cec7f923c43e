// SPDX-License-Identifier: Apache-2.0
//
// adarx - adaptive neural OFDM receiver simulator
// Copyright (C) 2026 The adarx authors
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

#ifndef ADARX_FEC_HPP
#define ADARX_FEC_HPP

#include "adarx/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace adarx {

// LLR convention used throughout: L = log P(b = 0) / P(b = 1).
inline constexpr double kLlrClip = 20.0;

// Binary LDPC code given by a sparse parity-check matrix. Encoding is systematic:
// a codeword is [u | p] with the information bits in the first k positions,
// which requires the trailing (n - k) x (n - k) block of H to be invertible.
class LdpcCode {
public:
    static LdpcCode from_alist(std::istream &in);
    static LdpcCode from_alist(std::string_view text);
    static LdpcCode from_alist_file(const std::filesystem::path &path);

    // The (1296, 648) rate-1/2 quasi-cyclic code compiled into the library.
    static const LdpcCode &standard();

    int n() const { return n_; }
    int k() const { return n_ - m_; }
    int num_checks() const { return m_; }
    int num_edges() const { return static_cast<int>(edge_var_.size()); }
    double rate() const { return static_cast<double>(k()) / n_; }

    std::span<const int> check_vars(int check) const
    {
        return {edge_var_.data() + check_ptr_[check],
                static_cast<std::size_t>(check_ptr_[check + 1] - check_ptr_[check])};
    }
    // Edge ids (indices into the check-ordered edge list) incident to a variable.
    std::span<const int> var_edges(int var) const
    {
        return {var_edge_.data() + var_ptr_[var],
                static_cast<std::size_t>(var_ptr_[var + 1] - var_ptr_[var])};
    }
    int check_edge_begin(int check) const { return check_ptr_[check]; }
    int check_edge_end(int check) const { return check_ptr_[check + 1]; }
    int edge_var(int edge) const { return edge_var_[edge]; }
    int var_degree(int var) const { return var_ptr_[var + 1] - var_ptr_[var]; }

    // Encodes a multiple of k information bits into as many codewords.
    BitVector encode(std::span<const std::uint8_t> info) const;

    // Fraction of satisfied parity checks, one value per codeword.
    std::vector<double> syndrome_fractions(std::span<const std::uint8_t> word) const;

    // Satisfied-check fraction averaged over all codewords in `word`.
    double syndrome_fraction(std::span<const std::uint8_t> word) const;

    int gf2_rank() const;

    void write_alist(std::ostream &out) const;

private:
    LdpcCode(int n, int m, std::vector<std::vector<int>> rows);

    int n_ = 0;
    int m_ = 0;
    std::vector<int> check_ptr_;
    std::vector<int> edge_var_;
    std::vector<int> var_ptr_;
    std::vector<int> var_edge_;
    int words_per_info_ = 0;
    std::vector<std::uint64_t> parity_generator_;  // m rows of packed (B^-1 A)
};

// Permutation over a frame's bit positions: interleave(x)[i] = x[perm[i]].
class Interleaver {
public:
    static Interleaver random(std::size_t size, std::uint64_t seed);
    static Interleaver identity(std::size_t size);

    std::size_t size() const { return perm_.size(); }
    std::span<const std::uint32_t> permutation() const { return perm_; }

    template <typename T>
    std::vector<T> interleave(std::span<const T> x) const
    {
        check_size(x.size());
        std::vector<T> y(x.size());
        for (std::size_t i = 0; i < perm_.size(); ++i)
            y[i] = x[perm_[i]];
        return y;
    }

    template <typename T>
    std::vector<T> deinterleave(std::span<const T> y) const
    {
        check_size(y.size());
        std::vector<T> x(y.size());
        for (std::size_t i = 0; i < perm_.size(); ++i)
            x[perm_[i]] = y[i];
        return x;
    }

private:
    explicit Interleaver(std::vector<std::uint32_t> perm) : perm_(std::move(perm)) {}
    void check_size(std::size_t n) const;

    std::vector<std::uint32_t> perm_;
};

// Places whole codewords into one OFDM frame. The frame's bit budget is filled
// with floor(frame_bits / n) codewords followed by filler bits; the
// concatenation is permuted by one frame-spanning interleaver.
class FrameCoding {
public:
    FrameCoding(const LdpcCode &code, int frame_bits, Interleaver interleaver);
    FrameCoding(const LdpcCode &code, int frame_bits, std::uint64_t interleaver_seed);

    const LdpcCode &code() const { return *code_; }
    const Interleaver &interleaver() const { return interleaver_; }
    int frame_bits() const { return frame_bits_; }
    int num_codewords() const { return num_codewords_; }
    int coded_bits() const { return num_codewords_ * code_->n(); }
    int info_bits() const { return num_codewords_ * code_->k(); }
    int filler_bits() const { return frame_bits_ - coded_bits(); }

    // Interleaved frame bits from the concatenated codewords and filler.
    BitVector assemble(std::span<const std::uint8_t> coded, std::span<const std::uint8_t> filler) const;

    // Frame-order soft values to decoder-order values of the coded bits (filler dropped).
    std::vector<double> frame_to_coded(std::span<const double> frame_values) const;

    // Decoder-order coded values to frame order; filler positions get `filler_value`.
    std::vector<double> coded_to_frame(std::span<const double> coded_values,
                                       double filler_value = 0.0) const;

    // Hard coded bits to frame-order labels; filler positions are set to 0.
    BitVector labels_from_coded(std::span<const std::uint8_t> coded) const;

    // 1 at frame positions carrying coded bits, 0 at filler positions.
    const std::vector<std::uint8_t> &label_mask() const { return label_mask_; }

private:
    const LdpcCode *code_;
    int frame_bits_;
    int num_codewords_;
    Interleaver interleaver_;
    std::vector<std::uint8_t> label_mask_;
};

struct DecodeResult {
    std::vector<double> llr_coded;      // a-posteriori LLRs, decoder order
    std::vector<double> llr_extrinsic;  // a-posteriori minus decoder input
    BitVector hard_coded;               // c_hat
    BitVector hard_info;                // u_hat
    std::vector<double> syndrome_satisfied_fraction;  // per codeword
    int iterations_run = 0;

    double mean_syndrome_fraction() const;
};

struct BpOptions {
    int max_iterations = 20;
    // Stop a codeword once its syndrome is zero. Off for receivers that run
    // fixed-length iteration segments between feedback steps.
    bool early_stop = false;
};

// Flooding sum-product decoder over several codewords. Check-to-variable
// messages persist across iterate() calls, so iterative receivers can swap in
// refreshed channel LLRs between decoding segments.
class BpDecoder {
public:
    BpDecoder(const LdpcCode &code, int num_codewords);

    // Loads channel LLRs and clears all messages.
    void reset(std::span<const double> channel_llr);

    // Replaces the channel LLRs and keeps the check-to-variable messages.
    void update_channel(std::span<const double> channel_llr);

    // Runs up to `iterations` flooding iterations; returns the number run.
    int iterate(int iterations, bool early_stop = false);

    int total_iterations() const { return total_iterations_; }
    const std::vector<double> &posterior() const { return posterior_; }
    std::vector<double> extrinsic() const;
    BitVector hard_coded() const;
    DecodeResult result() const;

private:
    void update_posterior(int cw);
    bool codeword_valid(int cw) const;

    const LdpcCode *code_;
    int num_codewords_;
    std::vector<double> channel_;
    std::vector<double> c2v_;
    std::vector<double> posterior_;
    std::vector<std::uint8_t> active_;
    int total_iterations_ = 0;
};

// One-shot decode of llr_in (+ optional priors on the coded bits).
DecodeResult bp_decode(const LdpcCode &code, std::span<const double> llr_in,
                       const BpOptions &options = {}, std::span<const double> priors = {});

}  // namespace adarx

#endif
