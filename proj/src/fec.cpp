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

#include "adarx/fec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace adarx {

namespace detail {
extern const std::string_view kEmbeddedAlist;
}

namespace {

using Words = std::vector<std::uint64_t>;

int words_for(int bits) { return (bits + 63) / 64; }

void set_bit(std::uint64_t *row, int col) { row[col / 64] ^= (std::uint64_t{1} << (col % 64)); }

bool get_bit(const std::uint64_t *row, int col) { return (row[col / 64] >> (col % 64)) & 1U; }

// Row-reduces a dense GF(2) matrix in place; returns the pivot column per row
// (-1 when a row has no pivot among `cols`).
std::vector<int> row_reduce(Words &mat, int rows, int stride, const std::vector<int> &cols)
{
    std::vector<int> pivots(rows, -1);
    int r = 0;
    for (int c : cols) {
        if (r == rows)
            break;
        int sel = -1;
        for (int i = r; i < rows; ++i)
            if (get_bit(&mat[static_cast<std::size_t>(i) * stride], c)) {
                sel = i;
                break;
            }
        if (sel < 0)
            continue;
        if (sel != r)
            std::swap_ranges(mat.begin() + static_cast<std::ptrdiff_t>(sel) * stride,
                             mat.begin() + static_cast<std::ptrdiff_t>(sel + 1) * stride,
                             mat.begin() + static_cast<std::ptrdiff_t>(r) * stride);
        const std::uint64_t *pivot_row = &mat[static_cast<std::size_t>(r) * stride];
        for (int i = 0; i < rows; ++i) {
            if (i == r)
                continue;
            std::uint64_t *row = &mat[static_cast<std::size_t>(i) * stride];
            if (get_bit(row, c))
                for (int w = 0; w < stride; ++w)
                    row[w] ^= pivot_row[w];
        }
        pivots[r] = c;
        ++r;
    }
    return pivots;
}

}  // namespace

LdpcCode::LdpcCode(int n, int m, std::vector<std::vector<int>> rows) : n_(n), m_(m)
{
    if (n <= m || m <= 0)
        throw InvalidArgument("LdpcCode: need n > m > 0");

    check_ptr_.assign(1, 0);
    for (auto &row : rows) {
        std::sort(row.begin(), row.end());
        for (int v : row) {
            if (v < 0 || v >= n)
                throw InvalidArgument("LdpcCode: column index out of range");
            edge_var_.push_back(v);
        }
        check_ptr_.push_back(static_cast<int>(edge_var_.size()));
    }

    std::vector<int> degree(n, 0);
    for (int v : edge_var_)
        ++degree[v];
    var_ptr_.assign(n + 1, 0);
    for (int v = 0; v < n; ++v)
        var_ptr_[v + 1] = var_ptr_[v] + degree[v];
    var_edge_.resize(edge_var_.size());
    std::vector<int> fill(var_ptr_.begin(), var_ptr_.end() - 1);
    for (int e = 0; e < num_edges(); ++e)
        var_edge_[fill[edge_var_[e]]++] = e;

    // Systematic encoder: reduce [B | A] to [I | B^-1 A], where B holds the
    // trailing m columns of H and A the leading k.
    const int kk = n - m;
    const int stride = words_for(n);
    Words aug(static_cast<std::size_t>(m) * stride, 0);
    for (int c = 0; c < m; ++c)
        for (int v : check_vars(c)) {
            const int col = v >= kk ? v - kk : m + v;
            set_bit(&aug[static_cast<std::size_t>(c) * stride], col);
        }
    std::vector<int> cols(m);
    std::iota(cols.begin(), cols.end(), 0);
    const auto pivots = row_reduce(aug, m, stride, cols);
    for (int r = 0; r < m; ++r)
        if (pivots[r] != r)
            throw InvalidArgument("LdpcCode: parity part of H is not invertible");

    words_per_info_ = words_for(kk);
    parity_generator_.assign(static_cast<std::size_t>(m) * words_per_info_, 0);
    for (int r = 0; r < m; ++r)
        for (int j = 0; j < kk; ++j)
            if (get_bit(&aug[static_cast<std::size_t>(r) * stride], m + j))
                set_bit(&parity_generator_[static_cast<std::size_t>(r) * words_per_info_], j);
}

LdpcCode LdpcCode::from_alist(std::istream &in)
{
    int n = 0, m = 0, max_col = 0, max_row = 0;
    if (!(in >> n >> m >> max_col >> max_row) || n <= 0 || m <= 0)
        throw IoError("alist: malformed header");
    std::vector<int> col_deg(n), row_deg(m);
    for (auto &d : col_deg)
        if (!(in >> d))
            throw IoError("alist: truncated column degrees");
    for (auto &d : row_deg)
        if (!(in >> d))
            throw IoError("alist: truncated row degrees");

    // Column lists are redundant with the row lists; read and cross-check them.
    std::vector<std::vector<int>> col_lists(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < max_col; ++i) {
            int r = 0;
            if (!(in >> r))
                throw IoError("alist: truncated column lists");
            if (r > 0)
                col_lists[j].push_back(r - 1);
        }
    std::vector<std::vector<int>> rows(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < max_row; ++j) {
            int c = 0;
            if (!(in >> c))
                throw IoError("alist: truncated row lists");
            if (c > 0)
                rows[i].push_back(c - 1);
        }

    std::size_t edges_by_col = 0, edges_by_row = 0;
    for (int j = 0; j < n; ++j) {
        if (static_cast<int>(col_lists[j].size()) != col_deg[j])
            throw IoError("alist: column degree mismatch");
        edges_by_col += col_lists[j].size();
    }
    for (int i = 0; i < m; ++i) {
        if (static_cast<int>(rows[i].size()) != row_deg[i])
            throw IoError("alist: row degree mismatch");
        edges_by_row += rows[i].size();
    }
    if (edges_by_col != edges_by_row)
        throw IoError("alist: row and column lists disagree");
    return LdpcCode(n, m, std::move(rows));
}

LdpcCode LdpcCode::from_alist(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return from_alist(in);
}

LdpcCode LdpcCode::from_alist_file(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open alist file " + path.string());
    return from_alist(in);
}

const LdpcCode &LdpcCode::standard()
{
    static const LdpcCode code = from_alist(detail::kEmbeddedAlist);
    return code;
}

BitVector LdpcCode::encode(std::span<const std::uint8_t> info) const
{
    const int kk = k();
    if (info.size() % static_cast<std::size_t>(kk) != 0)
        throw InvalidArgument("encode: information length must be a multiple of k");
    const std::size_t ncw = info.size() / kk;
    BitVector out(ncw * n_);
    Words packed(words_per_info_);
    for (std::size_t cw = 0; cw < ncw; ++cw) {
        const std::uint8_t *u = info.data() + cw * kk;
        std::uint8_t *c = out.data() + cw * n_;
        std::fill(packed.begin(), packed.end(), 0);
        for (int j = 0; j < kk; ++j) {
            c[j] = u[j] & 1;
            if (c[j])
                set_bit(packed.data(), j);
        }
        for (int r = 0; r < m_; ++r) {
            const std::uint64_t *g = &parity_generator_[static_cast<std::size_t>(r) * words_per_info_];
            int acc = 0;
            for (int w = 0; w < words_per_info_; ++w)
                acc ^= std::popcount(g[w] & packed[w]) & 1;
            c[kk + r] = static_cast<std::uint8_t>(acc);
        }
    }
    return out;
}

std::vector<double> LdpcCode::syndrome_fractions(std::span<const std::uint8_t> word) const
{
    if (word.size() % static_cast<std::size_t>(n_) != 0)
        throw InvalidArgument("syndrome_fractions: length must be a multiple of n");
    const std::size_t ncw = word.size() / n_;
    std::vector<double> out(ncw);
    for (std::size_t cw = 0; cw < ncw; ++cw) {
        const std::uint8_t *c = word.data() + cw * n_;
        int satisfied = 0;
        for (int chk = 0; chk < m_; ++chk) {
            int parity = 0;
            for (int v : check_vars(chk))
                parity ^= c[v] & 1;
            satisfied += parity == 0;
        }
        out[cw] = static_cast<double>(satisfied) / m_;
    }
    return out;
}

double LdpcCode::syndrome_fraction(std::span<const std::uint8_t> word) const
{
    const auto f = syndrome_fractions(word);
    if (f.empty())
        return 1.0;
    return std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
}

int LdpcCode::gf2_rank() const
{
    const int stride = words_for(n_);
    Words mat(static_cast<std::size_t>(m_) * stride, 0);
    for (int c = 0; c < m_; ++c)
        for (int v : check_vars(c))
            set_bit(&mat[static_cast<std::size_t>(c) * stride], v);
    std::vector<int> cols(n_);
    std::iota(cols.begin(), cols.end(), 0);
    const auto pivots = row_reduce(mat, m_, stride, cols);
    return static_cast<int>(std::count_if(pivots.begin(), pivots.end(), [](int p) { return p >= 0; }));
}

void LdpcCode::write_alist(std::ostream &out) const
{
    int max_col = 0, max_row = 0;
    for (int v = 0; v < n_; ++v)
        max_col = std::max(max_col, var_degree(v));
    for (int c = 0; c < m_; ++c)
        max_row = std::max(max_row, static_cast<int>(check_vars(c).size()));
    out << n_ << ' ' << m_ << '\n' << max_col << ' ' << max_row << '\n';
    for (int v = 0; v < n_; ++v)
        out << var_degree(v) << (v + 1 < n_ ? ' ' : '\n');
    for (int c = 0; c < m_; ++c)
        out << check_vars(c).size() << (c + 1 < m_ ? ' ' : '\n');
    for (int v = 0; v < n_; ++v) {
        std::vector<int> checks;
        for (int e : var_edges(v))
            checks.push_back(static_cast<int>(
                std::upper_bound(check_ptr_.begin(), check_ptr_.end(), e) - check_ptr_.begin() - 1));
        std::sort(checks.begin(), checks.end());
        checks.resize(max_col, -1);
        for (int i = 0; i < max_col; ++i)
            out << checks[i] + 1 << (i + 1 < max_col ? ' ' : '\n');
    }
    for (int c = 0; c < m_; ++c) {
        std::vector<int> vars(check_vars(c).begin(), check_vars(c).end());
        vars.resize(max_row, -1);
        for (int i = 0; i < max_row; ++i)
            out << vars[i] + 1 << (i + 1 < max_row ? ' ' : '\n');
    }
}

// ---------------------------------------------------------------- Interleaver

Interleaver Interleaver::random(std::size_t size, std::uint64_t seed)
{
    std::vector<std::uint32_t> perm(size);
    std::iota(perm.begin(), perm.end(), 0U);
    Rng rng(seed);
    for (std::size_t i = size; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(perm[i - 1], perm[pick(rng)]);
    }
    return Interleaver(std::move(perm));
}

Interleaver Interleaver::identity(std::size_t size)
{
    std::vector<std::uint32_t> perm(size);
    std::iota(perm.begin(), perm.end(), 0U);
    return Interleaver(std::move(perm));
}

void Interleaver::check_size(std::size_t n) const
{
    if (n != perm_.size())
        throw InvalidArgument("interleaver: expected " + std::to_string(perm_.size()) +
                              " values, got " + std::to_string(n));
}

// ---------------------------------------------------------------- FrameCoding

FrameCoding::FrameCoding(const LdpcCode &code, int frame_bits, Interleaver interleaver)
    : code_(&code), frame_bits_(frame_bits), num_codewords_(frame_bits / code.n()),
      interleaver_(std::move(interleaver))
{
    if (num_codewords_ < 1)
        throw InvalidArgument("FrameCoding: frame too short for one codeword");
    if (interleaver_.size() != static_cast<std::size_t>(frame_bits))
        throw InvalidArgument("FrameCoding: interleaver size does not match frame");
    std::vector<std::uint8_t> linear(frame_bits, 0);
    std::fill(linear.begin(), linear.begin() + coded_bits(), 1);
    label_mask_ = interleaver_.interleave<std::uint8_t>(linear);
}

FrameCoding::FrameCoding(const LdpcCode &code, int frame_bits, std::uint64_t interleaver_seed)
    : FrameCoding(code, frame_bits, Interleaver::random(frame_bits, interleaver_seed))
{
}

BitVector FrameCoding::assemble(std::span<const std::uint8_t> coded,
                                std::span<const std::uint8_t> filler) const
{
    if (coded.size() != static_cast<std::size_t>(coded_bits()) ||
        filler.size() != static_cast<std::size_t>(filler_bits()))
        throw InvalidArgument("FrameCoding::assemble: wrong coded or filler length");
    BitVector linear(coded.begin(), coded.end());
    linear.insert(linear.end(), filler.begin(), filler.end());
    return interleaver_.interleave<std::uint8_t>(linear);
}

std::vector<double> FrameCoding::frame_to_coded(std::span<const double> frame_values) const
{
    auto linear = interleaver_.deinterleave(frame_values);
    linear.resize(coded_bits());
    return linear;
}

std::vector<double> FrameCoding::coded_to_frame(std::span<const double> coded_values,
                                                double filler_value) const
{
    if (coded_values.size() != static_cast<std::size_t>(coded_bits()))
        throw InvalidArgument("FrameCoding::coded_to_frame: wrong length");
    std::vector<double> linear(coded_values.begin(), coded_values.end());
    linear.resize(frame_bits_, filler_value);
    return interleaver_.interleave<double>(linear);
}

BitVector FrameCoding::labels_from_coded(std::span<const std::uint8_t> coded) const
{
    if (coded.size() != static_cast<std::size_t>(coded_bits()))
        throw InvalidArgument("FrameCoding::labels_from_coded: wrong length");
    BitVector linear(coded.begin(), coded.end());
    linear.resize(frame_bits_, 0);
    return interleaver_.interleave<std::uint8_t>(linear);
}

// ---------------------------------------------------------------- BP decoding

double DecodeResult::mean_syndrome_fraction() const
{
    if (syndrome_satisfied_fraction.empty())
        return 1.0;
    return std::accumulate(syndrome_satisfied_fraction.begin(), syndrome_satisfied_fraction.end(), 0.0) /
           static_cast<double>(syndrome_satisfied_fraction.size());
}

BpDecoder::BpDecoder(const LdpcCode &code, int num_codewords)
    : code_(&code), num_codewords_(num_codewords),
      channel_(static_cast<std::size_t>(num_codewords) * code.n(), 0.0),
      c2v_(static_cast<std::size_t>(num_codewords) * code.num_edges(), 0.0),
      posterior_(channel_.size(), 0.0), active_(num_codewords, 1)
{
    if (num_codewords < 1)
        throw InvalidArgument("BpDecoder: need at least one codeword");
}

void BpDecoder::reset(std::span<const double> channel_llr)
{
    std::fill(c2v_.begin(), c2v_.end(), 0.0);
    std::fill(active_.begin(), active_.end(), 1);
    total_iterations_ = 0;
    update_channel(channel_llr);
}

void BpDecoder::update_channel(std::span<const double> channel_llr)
{
    if (channel_llr.size() != channel_.size())
        throw InvalidArgument("BpDecoder: expected " + std::to_string(channel_.size()) + " LLRs");
    for (std::size_t i = 0; i < channel_.size(); ++i)
        channel_[i] = std::clamp(channel_llr[i], -kLlrClip, kLlrClip);
    for (int cw = 0; cw < num_codewords_; ++cw)
        update_posterior(cw);
}

void BpDecoder::update_posterior(int cw)
{
    const int n = code_->n();
    const double *ch = channel_.data() + static_cast<std::size_t>(cw) * n;
    const double *c2v = c2v_.data() + static_cast<std::size_t>(cw) * code_->num_edges();
    double *post = posterior_.data() + static_cast<std::size_t>(cw) * n;
    for (int v = 0; v < n; ++v) {
        double sum = ch[v];
        for (int e : code_->var_edges(v))
            sum += c2v[e];
        post[v] = sum;
    }
}

bool BpDecoder::codeword_valid(int cw) const
{
    const double *post = posterior_.data() + static_cast<std::size_t>(cw) * code_->n();
    for (int chk = 0; chk < code_->num_checks(); ++chk) {
        int parity = 0;
        for (int v : code_->check_vars(chk))
            parity ^= post[v] < 0.0;
        if (parity)
            return false;
    }
    return true;
}

int BpDecoder::iterate(int iterations, bool early_stop)
{
    const int n = code_->n();
    const int num_edges = code_->num_edges();
    std::vector<double> t;
    std::vector<double> prefix;
    int run = 0;

    if (early_stop)
        for (int cw = 0; cw < num_codewords_; ++cw)
            if (active_[cw] && codeword_valid(cw))
                active_[cw] = 0;

    for (int it = 0; it < iterations; ++it) {
        bool any = false;
        for (int cw = 0; cw < num_codewords_; ++cw) {
            if (early_stop && !active_[cw])
                continue;
            any = true;
            const double *post = posterior_.data() + static_cast<std::size_t>(cw) * n;
            double *c2v = c2v_.data() + static_cast<std::size_t>(cw) * num_edges;
            for (int chk = 0; chk < code_->num_checks(); ++chk) {
                const int begin = code_->check_edge_begin(chk);
                const int deg = code_->check_edge_end(chk) - begin;
                t.resize(deg);
                prefix.resize(deg + 1);
                for (int i = 0; i < deg; ++i) {
                    const int e = begin + i;
                    const double v2c = std::clamp(post[code_->edge_var(e)] - c2v[e], -kLlrClip, kLlrClip);
                    t[i] = std::tanh(0.5 * v2c);
                }
                prefix[0] = 1.0;
                for (int i = 0; i < deg; ++i)
                    prefix[i + 1] = prefix[i] * t[i];
                double suffix = 1.0;
                for (int i = deg - 1; i >= 0; --i) {
                    const double prod = std::clamp(prefix[i] * suffix, -1.0 + 1e-15, 1.0 - 1e-15);
                    c2v[begin + i] = std::clamp(2.0 * std::atanh(prod), -kLlrClip, kLlrClip);
                    suffix *= t[i];
                }
            }
            update_posterior(cw);
            if (early_stop && codeword_valid(cw))
                active_[cw] = 0;
        }
        if (!any)
            break;
        ++run;
    }
    total_iterations_ += run;
    return run;
}

std::vector<double> BpDecoder::extrinsic() const
{
    std::vector<double> ext(posterior_.size());
    for (std::size_t i = 0; i < ext.size(); ++i)
        ext[i] = posterior_[i] - channel_[i];
    return ext;
}

BitVector BpDecoder::hard_coded() const
{
    BitVector bits(posterior_.size());
    for (std::size_t i = 0; i < bits.size(); ++i)
        bits[i] = posterior_[i] < 0.0;
    return bits;
}

DecodeResult BpDecoder::result() const
{
    DecodeResult r;
    r.llr_coded = posterior_;
    r.llr_extrinsic = extrinsic();
    r.hard_coded = hard_coded();
    const int n = code_->n();
    const int kk = code_->k();
    r.hard_info.reserve(static_cast<std::size_t>(num_codewords_) * kk);
    for (int cw = 0; cw < num_codewords_; ++cw)
        r.hard_info.insert(r.hard_info.end(), r.hard_coded.begin() + static_cast<std::ptrdiff_t>(cw) * n,
                           r.hard_coded.begin() + static_cast<std::ptrdiff_t>(cw) * n + kk);
    r.syndrome_satisfied_fraction = code_->syndrome_fractions(r.hard_coded);
    r.iterations_run = total_iterations_;
    return r;
}

DecodeResult bp_decode(const LdpcCode &code, std::span<const double> llr_in, const BpOptions &options,
                       std::span<const double> priors)
{
    if (llr_in.empty() || llr_in.size() % static_cast<std::size_t>(code.n()) != 0)
        throw InvalidArgument("bp_decode: LLR length must be a positive multiple of n");
    if (!priors.empty() && priors.size() != llr_in.size())
        throw InvalidArgument("bp_decode: priors length mismatch");
    std::vector<double> input(llr_in.begin(), llr_in.end());
    for (std::size_t i = 0; i < priors.size(); ++i)
        input[i] += priors[i];
    BpDecoder decoder(code, static_cast<int>(llr_in.size() / code.n()));
    decoder.reset(input);
    decoder.iterate(options.max_iterations, options.early_stop);
    return decoder.result();
}

}  // namespace adarx
