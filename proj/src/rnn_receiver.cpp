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

#include "adarx/rnn_receiver.hpp"
#include "adarx/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace adarx {

// ------------------------------------------------------------------ input

InputTensor assemble_input(const CMatrix &y, const CMatrix &x_pilot, const CMatrix &h_ls, double sigma)
{
    if (y.rows() != x_pilot.rows() || y.cols() != x_pilot.cols() || y.rows() != h_ls.rows() ||
        y.cols() != h_ls.cols())
        throw InvalidArgument("assemble_input: Y, X_p and H_ls must have the same shape");
    if (!(sigma >= 0.0))
        throw InvalidArgument("assemble_input: sigma must be >= 0");
    InputTensor in;
    in.num_symbols = static_cast<int>(y.rows());
    in.num_subcarriers = static_cast<int>(y.cols());
    in.data.resize(static_cast<std::size_t>(y.size()) * kInputFeatures);
    for (Eigen::Index p = 0; p < y.size(); ++p) {
        float *v = in.data.data() + p * kInputFeatures;
        v[0] = static_cast<float>(y.data()[p].real());
        v[1] = static_cast<float>(y.data()[p].imag());
        v[2] = static_cast<float>(x_pilot.data()[p].real());
        v[3] = static_cast<float>(x_pilot.data()[p].imag());
        v[4] = static_cast<float>(h_ls.data()[p].real());
        v[5] = static_cast<float>(h_ls.data()[p].imag());
        v[6] = static_cast<float>(sigma);
    }
    return in;
}

InputTensor assemble_input(const CMatrix &y, const PilotPattern &pattern, double sigma)
{
    return assemble_input(y, pattern.symbols, ls_estimate_at_pilots(y, pattern), sigma);
}

// ----------------------------------------------------------------- layout

void RnnConfig::validate() const
{
    if (lstm_units < 1 || dense_units < 1 || bits_per_symbol < 1)
        throw InvalidArgument("RnnConfig: all layer sizes must be positive");
}

ParamLayout::ParamLayout(const RnnConfig &config)
{
    config.validate();
    const int u = config.lstm_units;
    auto add = [this](std::string name, int rows, int cols) {
        blocks_.push_back({std::move(name), rows, cols, total_});
        total_ += static_cast<std::size_t>(rows) * cols;
    };
    for (int layer = 0; layer < 3; ++layer) {
        const int in = layer == 0 ? kInputFeatures : 2 * u;
        for (const char *dir : {"fwd", "bwd"}) {
            const std::string prefix = "lstm" + std::to_string(layer + 1) + "." + dir;
            add(prefix + ".kernel", 4 * u, in);
            add(prefix + ".recurrent", 4 * u, u);
            add(prefix + ".bias", 4 * u, 1);
        }
    }
    add("dense1.kernel", config.dense_units, 2 * u);
    add("dense1.bias", config.dense_units, 1);
    add("dense2.kernel", config.bits_per_symbol, config.dense_units);
    add("dense2.bias", config.bits_per_symbol, 1);
}

const ParamBlock &ParamLayout::block(const std::string &name) const
{
    for (const auto &b : blocks_)
        if (b.name == name)
            return b;
    throw InvalidArgument("ParamLayout: unknown block " + name);
}

std::vector<int> freq_major_order(int batch, int num_symbols, int num_subcarriers)
{
    const int rows = batch * num_symbols;
    std::vector<int> order(static_cast<std::size_t>(rows) * num_subcarriers);
    for (int f = 0; f < num_subcarriers; ++f)
        for (int r = 0; r < rows; ++r)
            order[static_cast<std::size_t>(f) * rows + r] = r * num_subcarriers + f;
    return order;
}

std::vector<int> time_major_order(int batch, int num_symbols, int num_subcarriers)
{
    const int seqs = batch * num_subcarriers;
    std::vector<int> order(static_cast<std::size_t>(seqs) * num_symbols);
    for (int t = 0; t < num_symbols; ++t)
        for (int b = 0; b < batch; ++b)
            for (int f = 0; f < num_subcarriers; ++f)
                order[static_cast<std::size_t>(t) * seqs + b * num_subcarriers + f] =
                    (b * num_symbols + t) * num_subcarriers + f;
    return order;
}

// ---------------------------------------------------------------- network

namespace {

std::vector<int> inverse(const std::vector<int> &perm)
{
    std::vector<int> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i)
        inv[perm[i]] = static_cast<int>(i);
    return inv;
}

std::vector<int> compose(const std::vector<int> &outer, const std::vector<int> &inner)
{
    std::vector<int> out(inner.size());
    for (std::size_t i = 0; i < inner.size(); ++i)
        out[i] = outer[inner[i]];
    return out;
}

// dst.col(c) = src.col(index[c])
template <typename M>
M gather_cols(const M &src, const std::vector<int> &index)
{
    M dst(src.rows(), static_cast<Eigen::Index>(index.size()));
    for (std::size_t c = 0; c < index.size(); ++c)
        dst.col(static_cast<Eigen::Index>(c)) = src.col(index[c]);
    return dst;
}

// Column maps between the three layouts of one batch.
struct Orders {
    std::vector<int> freq;        // freq-major column -> canonical
    std::vector<int> freq_inv;    // canonical -> freq-major column
    std::vector<int> freq_to_time;  // time-major column -> freq-major column
    std::vector<int> time_to_freq;  // freq-major column -> time-major column

    Orders(int batch, int t, int f)
    {
        freq = freq_major_order(batch, t, f);
        freq_inv = inverse(freq);
        const auto time = time_major_order(batch, t, f);
        freq_to_time = compose(freq_inv, time);
        time_to_freq = compose(inverse(time), freq);
    }
};

template <typename Scalar>
using RowMap = Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <typename Scalar>
using ConstRowMap = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

template <typename Scalar>
ConstRowMap<Scalar> view(const std::vector<Scalar> &p, const ParamBlock &b)
{
    return ConstRowMap<Scalar>(p.data() + b.offset, b.rows, b.cols);
}

template <typename Scalar>
RowMap<Scalar> view(std::span<Scalar> p, const ParamBlock &b)
{
    return RowMap<Scalar>(p.data() + b.offset, b.rows, b.cols);
}

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived> &x)
{
    using S = typename Derived::Scalar;
    return (S(1) + (-x).exp()).inverse();
}

struct LstmNames {
    std::string kernel, recurrent, bias;
};

LstmNames lstm_names(int layer, int dir)
{
    const std::string p = "lstm" + std::to_string(layer + 1) + (dir == 0 ? ".fwd" : ".bwd");
    return {p + ".kernel", p + ".recurrent", p + ".bias"};
}

// One LSTM direction over `len` steps of `seqs` sequences; column = step * seqs + seq.
template <typename Scalar, typename Matrix>
void lstm_forward(const Matrix &x, const ConstRowMap<Scalar> &kernel, const ConstRowMap<Scalar> &rec,
                  const ConstRowMap<Scalar> &bias, int seqs, int len, bool reverse, Matrix &gates,
                  Matrix &cell, Matrix &cell_tanh, Matrix &hidden)
{
    const Eigen::Index u = rec.cols();
    const Eigen::Index n = x.cols();
    gates.noalias() = kernel * x;
    gates.colwise() += bias.col(0);
    cell.resize(u, n);
    cell_tanh.resize(u, n);
    hidden.resize(u, n);
    for (int q = 0; q < len; ++q) {
        const int s = reverse ? len - 1 - q : q;
        const int prev = reverse ? s + 1 : s - 1;
        const Eigen::Index col = static_cast<Eigen::Index>(s) * seqs;
        auto g = gates.middleCols(col, seqs);
        if (q > 0)
            g.noalias() += rec * hidden.middleCols(static_cast<Eigen::Index>(prev) * seqs, seqs);
        g.topRows(2 * u) = sigmoid(g.topRows(2 * u).array()).matrix();
        g.middleRows(2 * u, u) = g.middleRows(2 * u, u).array().tanh().matrix();
        g.bottomRows(u) = sigmoid(g.bottomRows(u).array()).matrix();
        auto c = cell.middleCols(col, seqs);
        c = (g.topRows(u).array() * g.middleRows(2 * u, u).array()).matrix();
        if (q > 0)
            c.array() += g.middleRows(u, u).array() *
                         cell.middleCols(static_cast<Eigen::Index>(prev) * seqs, seqs).array();
        auto tc = cell_tanh.middleCols(col, seqs);
        tc = c.array().tanh().matrix();
        hidden.middleCols(col, seqs) = (g.bottomRows(u).array() * tc.array()).matrix();
    }
}

// Backpropagation through one LSTM direction. Accumulates parameter gradients
// and, when dx is non-null, adds the input gradient to it.
template <typename Scalar, typename Matrix>
void lstm_backward(const Matrix &x, const Matrix &gates, const Matrix &cell, const Matrix &cell_tanh,
                   const Matrix &hidden, const Matrix &dh_out, const ConstRowMap<Scalar> &kernel,
                   const ConstRowMap<Scalar> &rec, int seqs, int len, bool reverse, RowMap<Scalar> dkernel,
                   RowMap<Scalar> drec, RowMap<Scalar> dbias, Matrix *dx)
{
    const Eigen::Index u = rec.cols();
    const Eigen::Index n = x.cols();
    Matrix dgates(4 * u, n);
    Matrix dh_rec = Matrix::Zero(u, seqs);
    Matrix dc_next = Matrix::Zero(u, seqs);
    for (int q = len - 1; q >= 0; --q) {
        const int s = reverse ? len - 1 - q : q;
        const int prev = reverse ? s + 1 : s - 1;
        const Eigen::Index col = static_cast<Eigen::Index>(s) * seqs;
        for (Eigen::Index j = 0; j < seqs; ++j) {
            const Scalar *g = gates.data() + (col + j) * 4 * u;
            const Scalar *tc = cell_tanh.data() + (col + j) * u;
            const Scalar *cp = q > 0 ? cell.data() + (static_cast<Eigen::Index>(prev) * seqs + j) * u : nullptr;
            const Scalar *dho = dh_out.data() + (col + j) * u;
            Scalar *dhr = dh_rec.data() + j * u;
            Scalar *dcn = dc_next.data() + j * u;
            Scalar *dg = dgates.data() + (col + j) * 4 * u;
            for (Eigen::Index r = 0; r < u; ++r) {
                const Scalar gi = g[r], gf = g[u + r], gc = g[2 * u + r], go = g[3 * u + r];
                const Scalar dh = dho[r] + dhr[r];
                const Scalar dc = dcn[r] + dh * go * (Scalar(1) - tc[r] * tc[r]);
                dg[r] = dc * gc * gi * (Scalar(1) - gi);
                dg[u + r] = cp ? dc * cp[r] * gf * (Scalar(1) - gf) : Scalar(0);
                dg[2 * u + r] = dc * gi * (Scalar(1) - gc * gc);
                dg[3 * u + r] = dh * tc[r] * go * (Scalar(1) - go);
                dcn[r] = dc * gf;
            }
        }
        dh_rec.noalias() = rec.transpose() * dgates.middleCols(col, seqs);
    }
    dkernel.noalias() += dgates * x.transpose();
    dbias.col(0).noalias() += dgates * Matrix::Ones(n, 1);
    const Eigen::Index shifted = n - seqs;
    if (shifted > 0) {
        if (reverse)
            drec.noalias() += dgates.leftCols(shifted) * hidden.middleCols(seqs, shifted).transpose();
        else
            drec.noalias() += dgates.middleCols(seqs, shifted) * hidden.leftCols(shifted).transpose();
    }
    if (dx)
        dx->noalias() += kernel.transpose() * dgates;
}

}  // namespace

template <typename Scalar>
RnnNetwork<Scalar>::RnnNetwork(RnnConfig config)
    : config_(config), layout_(config), params_(layout_.total_size(), Scalar(0))
{
}

template <typename Scalar>
void RnnNetwork<Scalar>::initialize(Rng &rng)
{
    const int u = config_.lstm_units;
    auto fill_uniform = [&](const ParamBlock &b, double fan_in, double fan_out) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (std::size_t i = 0; i < b.size(); ++i)
            params_[b.offset + i] = static_cast<Scalar>(dist(rng));
    };
    std::fill(params_.begin(), params_.end(), Scalar(0));
    for (int layer = 0; layer < 3; ++layer) {
        for (int dir = 0; dir < 2; ++dir) {
            const auto names = lstm_names(layer, dir);
            const auto &k = layout_.block(names.kernel);
            fill_uniform(k, k.cols, k.rows);
            fill_uniform(layout_.block(names.recurrent), u, 4.0 * u);
            const auto &b = layout_.block(names.bias);
            for (int i = u; i < 2 * u; ++i)
                params_[b.offset + i] = Scalar(1);
        }
    }
    const auto &d1 = layout_.block("dense1.kernel");
    fill_uniform(d1, d1.cols, d1.rows);
    // The output layer starts at zero. With random output weights the quickest
    // early loss reduction is to silence the ReLU layer, and at small batch
    // sizes the network then collapses to constant logits.
}

template <typename Scalar>
typename RnnNetwork<Scalar>::Matrix RnnNetwork<Scalar>::forward(const Matrix &input, int batch, int num_symbols,
                                                                int num_subcarriers, Cache *cache) const
{
    if (batch < 1 || num_symbols < 1 || num_subcarriers < 1)
        throw InvalidArgument("RnnNetwork::forward: empty batch or grid");
    const Eigen::Index n = static_cast<Eigen::Index>(batch) * num_symbols * num_subcarriers;
    if (input.rows() != kInputFeatures || input.cols() != n)
        throw InvalidArgument("RnnNetwork::forward: input shape does not match the grid");

    Cache local;
    Cache &c = cache ? *cache : local;
    c.batch = batch;
    c.num_symbols = num_symbols;
    c.num_subcarriers = num_subcarriers;
    const Orders orders(batch, num_symbols, num_subcarriers);
    const int u = config_.lstm_units;

    c.lstm[0].input = gather_cols(input, orders.freq);
    Matrix out;
    for (int layer = 0; layer < 3; ++layer) {
        const bool along_time = layer == 1;
        const int seqs = along_time ? batch * num_subcarriers : batch * num_symbols;
        const int len = along_time ? num_symbols : num_subcarriers;
        auto &lc = c.lstm[layer];
        if (layer == 1)
            lc.input = gather_cols(out, orders.freq_to_time);
        else if (layer == 2)
            lc.input = gather_cols(out, orders.time_to_freq);
        for (int dir = 0; dir < 2; ++dir) {
            const auto names = lstm_names(layer, dir);
            lstm_forward<Scalar>(lc.input, view(params_, layout_.block(names.kernel)),
                                 view(params_, layout_.block(names.recurrent)),
                                 view(params_, layout_.block(names.bias)), seqs, len, dir == 1, lc.gates[dir],
                                 lc.cell[dir], lc.cell_tanh[dir], lc.hidden[dir]);
        }
        out.resize(2 * u, n);
        out.topRows(u) = lc.hidden[0];
        out.bottomRows(u) = lc.hidden[1];
    }
    c.dense_in = gather_cols(out, orders.freq_inv);

    const auto w1 = view(params_, layout_.block("dense1.kernel"));
    const auto b1 = view(params_, layout_.block("dense1.bias"));
    const auto w2 = view(params_, layout_.block("dense2.kernel"));
    const auto b2 = view(params_, layout_.block("dense2.bias"));
    c.dense_hidden.noalias() = w1 * c.dense_in;
    c.dense_hidden.colwise() += b1.col(0);
    c.dense_hidden = c.dense_hidden.cwiseMax(Scalar(0));
    Matrix logits;
    logits.noalias() = w2 * c.dense_hidden;
    logits.colwise() += b2.col(0);
    return logits;
}

template <typename Scalar>
void RnnNetwork<Scalar>::backward(const Cache &c, const Matrix &dlogits, std::span<Scalar> grad) const
{
    if (grad.size() != params_.size())
        throw InvalidArgument("RnnNetwork::backward: gradient buffer has the wrong size");
    if (dlogits.rows() != config_.bits_per_symbol || dlogits.cols() != c.dense_in.cols())
        throw InvalidArgument("RnnNetwork::backward: dlogits shape does not match the cache");
    const Orders orders(c.batch, c.num_symbols, c.num_subcarriers);
    const int u = config_.lstm_units;

    const auto w1 = view(params_, layout_.block("dense1.kernel"));
    const auto w2 = view(params_, layout_.block("dense2.kernel"));
    view(grad, layout_.block("dense2.kernel")).noalias() += dlogits * c.dense_hidden.transpose();
    view(grad, layout_.block("dense2.bias")).col(0).noalias() += dlogits * Matrix::Ones(dlogits.cols(), 1);
    Matrix dhidden = w2.transpose() * dlogits;
    dhidden = dhidden.cwiseProduct((c.dense_hidden.array() > Scalar(0)).matrix().template cast<Scalar>());
    view(grad, layout_.block("dense1.kernel")).noalias() += dhidden * c.dense_in.transpose();
    view(grad, layout_.block("dense1.bias")).col(0).noalias() += dhidden * Matrix::Ones(dhidden.cols(), 1);
    const Matrix ddense = w1.transpose() * dhidden;

    Matrix dout = gather_cols(ddense, orders.freq);
    for (int layer = 2; layer >= 0; --layer) {
        const bool along_time = layer == 1;
        const int seqs = along_time ? c.batch * c.num_subcarriers : c.batch * c.num_symbols;
        const int len = along_time ? c.num_symbols : c.num_subcarriers;
        const auto &lc = c.lstm[layer];
        Matrix dx;
        if (layer > 0)
            dx = Matrix::Zero(lc.input.rows(), lc.input.cols());
        for (int dir = 0; dir < 2; ++dir) {
            const auto names = lstm_names(layer, dir);
            const Matrix dh = dout.middleRows(dir * u, u);
            lstm_backward<Scalar>(lc.input, lc.gates[dir], lc.cell[dir], lc.cell_tanh[dir], lc.hidden[dir], dh,
                                  view(params_, layout_.block(names.kernel)),
                                  view(params_, layout_.block(names.recurrent)), seqs, len, dir == 1,
                                  view(grad, layout_.block(names.kernel)), view(grad, layout_.block(names.recurrent)),
                                  view(grad, layout_.block(names.bias)), layer > 0 ? &dx : nullptr);
        }
        if (layer == 2)
            dout = gather_cols(dx, orders.freq_to_time);
        else if (layer == 1)
            dout = gather_cols(dx, orders.time_to_freq);
    }
}

template class RnnNetwork<float>;
template class RnnNetwork<double>;

template <typename Scalar>
typename RnnNetwork<Scalar>::Matrix stack_inputs(std::span<const InputTensor> inputs)
{
    if (inputs.empty())
        throw InvalidArgument("stack_inputs: no inputs");
    const int t = inputs[0].num_symbols;
    const int f = inputs[0].num_subcarriers;
    const Eigen::Index per_frame = static_cast<Eigen::Index>(t) * f;
    typename RnnNetwork<Scalar>::Matrix m(kInputFeatures, per_frame * static_cast<Eigen::Index>(inputs.size()));
    for (std::size_t b = 0; b < inputs.size(); ++b) {
        const auto &in = inputs[b];
        if (in.num_symbols != t || in.num_subcarriers != f ||
            in.data.size() != static_cast<std::size_t>(per_frame) * kInputFeatures)
            throw InvalidArgument("stack_inputs: inputs must share one grid shape");
        Scalar *dst = m.data() + static_cast<Eigen::Index>(b) * per_frame * kInputFeatures;
        std::transform(in.data.begin(), in.data.end(), dst, [](float v) { return static_cast<Scalar>(v); });
    }
    return m;
}

template RnnNetwork<float>::Matrix stack_inputs<float>(std::span<const InputTensor>);
template RnnNetwork<double>::Matrix stack_inputs<double>(std::span<const InputTensor>);

// ------------------------------------------------------------------- loss

namespace {

double bce_term(double z, int y) { return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z))); }

}  // namespace

template <typename Scalar>
double bce_with_logits(const typename RnnNetwork<Scalar>::Matrix &logits, std::span<const std::uint8_t> labels,
                       std::span<const std::uint8_t> mask, typename RnnNetwork<Scalar>::Matrix *dlogits,
                       double normalizer)
{
    const std::size_t n = static_cast<std::size_t>(logits.size());
    if (labels.size() != n || mask.size() != n)
        throw InvalidArgument("bce_with_logits: labels and mask must match the logits");
    if (normalizer <= 0.0)
        normalizer = static_cast<double>(std::count_if(mask.begin(), mask.end(), [](auto v) { return v != 0; }));
    if (normalizer <= 0.0)
        throw InvalidArgument("bce_with_logits: every entry is masked");
    if (dlogits)
        dlogits->resize(logits.rows(), logits.cols());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = static_cast<double>(logits.data()[i]);
        if (!mask[i]) {
            if (dlogits)
                dlogits->data()[i] = Scalar(0);
            continue;
        }
        const int y = labels[i] & 1;
        sum += bce_term(z, y);
        if (dlogits)
            dlogits->data()[i] = static_cast<Scalar>((1.0 / (1.0 + std::exp(-z)) - y) / normalizer);
    }
    return sum / normalizer;
}

template double bce_with_logits<float>(const RnnNetwork<float>::Matrix &, std::span<const std::uint8_t>,
                                       std::span<const std::uint8_t>, RnnNetwork<float>::Matrix *, double);
template double bce_with_logits<double>(const RnnNetwork<double>::Matrix &, std::span<const std::uint8_t>,
                                        std::span<const std::uint8_t>, RnnNetwork<double>::Matrix *, double);

double bce_loss(std::span<const double> logits, std::span<const std::uint8_t> labels,
                std::span<const std::uint8_t> mask)
{
    if (labels.size() != logits.size() || (!mask.empty() && mask.size() != logits.size()))
        throw InvalidArgument("bce_loss: length mismatch");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (!mask.empty() && !mask[i])
            continue;
        sum += bce_term(logits[i], labels[i] & 1);
        ++count;
    }
    if (count == 0)
        throw InvalidArgument("bce_loss: every entry is masked");
    return sum / static_cast<double>(count);
}

// ---------------------------------------------------------------- framing

std::vector<double> extract_data_llrs(const LogitGrid &grid, const PilotPattern &pattern, const FrameCoding &coding)
{
    const int m = grid.bits_per_symbol;
    if (grid.num_symbols != pattern.num_symbols || grid.num_subcarriers != pattern.num_subcarriers ||
        grid.values.size() != static_cast<std::size_t>(pattern.num_symbols) * pattern.num_subcarriers * m)
        throw InvalidArgument("extract_data_llrs: logit grid does not match the pilot pattern");
    const std::size_t bits = static_cast<std::size_t>(pattern.num_data()) * m;
    if (bits != static_cast<std::size_t>(coding.frame_bits()))
        throw InvalidArgument("extract_data_llrs: frame coding does not match the grid");
    std::vector<double> frame(bits);
    for (int d = 0; d < pattern.num_data(); ++d) {
        const std::size_t pos = static_cast<std::size_t>(pattern.data_positions[d]);
        for (int j = 0; j < m; ++j)
            frame[static_cast<std::size_t>(d) * m + j] = -grid.values[pos * m + j];
    }
    return coding.interleaver().deinterleave<double>(frame);
}

void frame_targets(std::span<const std::uint8_t> frame_labels, const PilotPattern &pattern, const FrameCoding &coding,
                   std::span<std::uint8_t> labels, std::span<std::uint8_t> mask)
{
    const std::size_t grid = static_cast<std::size_t>(pattern.num_symbols) * pattern.num_subcarriers;
    const std::size_t bits = static_cast<std::size_t>(pattern.num_data()) * kBitsPerSymbol;
    if (frame_labels.size() != bits || bits != static_cast<std::size_t>(coding.frame_bits()))
        throw InvalidArgument("frame_targets: label length does not match the frame");
    if (labels.size() != grid * kBitsPerSymbol || mask.size() != grid * kBitsPerSymbol)
        throw InvalidArgument("frame_targets: output buffers have the wrong size");
    std::fill(labels.begin(), labels.end(), std::uint8_t{0});
    std::fill(mask.begin(), mask.end(), std::uint8_t{0});
    const auto &coded = coding.label_mask();
    for (int d = 0; d < pattern.num_data(); ++d) {
        const std::size_t pos = static_cast<std::size_t>(pattern.data_positions[d]);
        for (int j = 0; j < kBitsPerSymbol; ++j) {
            const std::size_t bit = static_cast<std::size_t>(d) * kBitsPerSymbol + j;
            labels[pos * kBitsPerSymbol + j] = frame_labels[bit] & 1;
            mask[pos * kBitsPerSymbol + j] = coded[bit];
        }
    }
}

// -------------------------------------------------------------- optimizer

template <typename Scalar>
void adam_step(std::span<Scalar> params, std::span<const Scalar> grad, AdamState<Scalar> &state,
               const AdamConfig &config)
{
    if (grad.size() != params.size())
        throw InvalidArgument("adam_step: gradient size does not match the parameters");
    if (!(config.learning_rate > 0.0))
        throw InvalidArgument("adam_step: learning rate must be positive");
    if (state.m.size() != params.size()) {
        state.m.assign(params.size(), Scalar(0));
        state.v.assign(params.size(), Scalar(0));
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grad[i];
        const double m = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
        const double v = config.beta2 * state.v[i] + (1.0 - config.beta2) * g * g;
        state.m[i] = static_cast<Scalar>(m);
        state.v[i] = static_cast<Scalar>(v);
        const double update = config.learning_rate * (m / c1) / (std::sqrt(v / c2) + config.epsilon);
        params[i] = static_cast<Scalar>(params[i] - update);
    }
}

template void adam_step<float>(std::span<float>, std::span<const float>, AdamState<float> &, const AdamConfig &);
template void adam_step<double>(std::span<double>, std::span<const double>, AdamState<double> &,
                                const AdamConfig &);

template <typename Scalar>
double clip_global_norm(std::span<Scalar> grad, double max_norm)
{
    double sq = 0.0;
    for (Scalar g : grad)
        sq += static_cast<double>(g) * g;
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double scale = max_norm / norm;
        for (Scalar &g : grad)
            g = static_cast<Scalar>(g * scale);
    }
    return norm;
}

template double clip_global_norm<float>(std::span<float>, double);
template double clip_global_norm<double>(std::span<double>, double);

// --------------------------------------------------------------- receiver

void TrainConfig::validate() const
{
    if (!(adam.learning_rate > 0.0))
        throw InvalidArgument("TrainConfig: learning_rate must be > 0");
    if (chunk_frames < 1)
        throw InvalidArgument("TrainConfig: chunk_frames must be >= 1");
}

RnnReceiver::RnnReceiver(RnnConfig config) : network_(config) {}

RnnReceiver RnnReceiver::initialized(const RnnConfig &config, std::uint64_t seed)
{
    RnnReceiver rx(config);
    Rng rng(seed);
    rx.network_.initialize(rng);
    return rx;
}

namespace {

LogitGrid to_grid(const RnnNetwork<float>::Matrix &logits, Eigen::Index first_col, int t, int f, int m)
{
    LogitGrid g{t, f, m, std::vector<double>(static_cast<std::size_t>(t) * f * m)};
    const float *src = logits.data() + first_col * m;
    std::transform(src, src + g.values.size(), g.values.begin(), [](float v) { return static_cast<double>(v); });
    return g;
}

constexpr int kInferenceChunk = 8;

}  // namespace

LogitGrid RnnReceiver::logits(const InputTensor &input) const
{
    return logits(std::span<const InputTensor>(&input, 1)).front();
}

std::vector<LogitGrid> RnnReceiver::logits(std::span<const InputTensor> inputs) const
{
    std::vector<LogitGrid> out;
    out.reserve(inputs.size());
    for (std::size_t start = 0; start < inputs.size(); start += kInferenceChunk) {
        const auto chunk = inputs.subspan(start, std::min<std::size_t>(kInferenceChunk, inputs.size() - start));
        const int t = chunk[0].num_symbols;
        const int f = chunk[0].num_subcarriers;
        const auto x = stack_inputs<float>(chunk);
        const auto z = network_.forward(x, static_cast<int>(chunk.size()), t, f);
        for (std::size_t b = 0; b < chunk.size(); ++b)
            out.push_back(to_grid(z, static_cast<Eigen::Index>(b) * t * f, t, f, config().bits_per_symbol));
    }
    return out;
}

std::vector<double> RnnReceiver::coded_llrs(const InputTensor &input, const PilotPattern &pattern,
                                            const FrameCoding &coding) const
{
    auto llr = extract_data_llrs(logits(input), pattern, coding);
    llr.resize(coding.coded_bits());
    return llr;
}

namespace {

struct ChunkTargets {
    std::vector<std::uint8_t> labels;
    std::vector<std::uint8_t> mask;
};

ChunkTargets chunk_targets(std::span<const TrainingFrame> frames, const PilotPattern &pattern,
                           const FrameCoding &coding)
{
    const std::size_t per = static_cast<std::size_t>(pattern.num_symbols) * pattern.num_subcarriers * kBitsPerSymbol;
    ChunkTargets t{std::vector<std::uint8_t>(per * frames.size()), std::vector<std::uint8_t>(per * frames.size())};
    for (std::size_t b = 0; b < frames.size(); ++b)
        frame_targets(frames[b].frame_labels, pattern, coding, std::span(t.labels).subspan(b * per, per),
                      std::span(t.mask).subspan(b * per, per));
    return t;
}

}  // namespace

double RnnReceiver::evaluate_loss(std::span<const TrainingFrame> frames, const PilotPattern &pattern,
                                  const FrameCoding &coding, int chunk_frames) const
{
    if (frames.empty())
        throw InvalidArgument("evaluate_loss: no frames");
    if (config().bits_per_symbol != kBitsPerSymbol)
        throw InvalidArgument("evaluate_loss: network output size must equal the bits per symbol");
    const double normalizer = static_cast<double>(frames.size()) * coding.coded_bits();
    double loss = 0.0;
    const std::size_t step = static_cast<std::size_t>(std::max(1, chunk_frames));
    for (std::size_t start = 0; start < frames.size(); start += step) {
        const auto chunk = frames.subspan(start, std::min(step, frames.size() - start));
        std::vector<InputTensor> inputs;
        for (const auto &fr : chunk)
            inputs.push_back(fr.input);
        const auto x = stack_inputs<float>(inputs);
        const auto z = network_.forward(x, static_cast<int>(chunk.size()), pattern.num_symbols,
                                        pattern.num_subcarriers);
        const auto t = chunk_targets(chunk, pattern, coding);
        loss += bce_with_logits<float>(z, t.labels, t.mask, nullptr, normalizer);
    }
    return loss;
}

double RnnReceiver::train_step(std::span<const TrainingFrame> frames, const PilotPattern &pattern,
                               const FrameCoding &coding, const TrainConfig &config)
{
    config.validate();
    if (frames.empty())
        throw InvalidArgument("train_step: no frames");
    if (this->config().bits_per_symbol != kBitsPerSymbol)
        throw InvalidArgument("train_step: network output size must equal the bits per symbol");
    const double normalizer = static_cast<double>(frames.size()) * coding.coded_bits();
    std::vector<float> grad(network_.params().size(), 0.0f);
    double loss = 0.0;
    RnnNetwork<float>::Cache cache;
    RnnNetwork<float>::Matrix dlogits;
    const std::size_t step = static_cast<std::size_t>(config.chunk_frames);
    for (std::size_t start = 0; start < frames.size(); start += step) {
        const auto chunk = frames.subspan(start, std::min(step, frames.size() - start));
        std::vector<InputTensor> inputs;
        for (const auto &fr : chunk)
            inputs.push_back(fr.input);
        const auto x = stack_inputs<float>(inputs);
        const auto z = network_.forward(x, static_cast<int>(chunk.size()), pattern.num_symbols,
                                        pattern.num_subcarriers, &cache);
        const auto t = chunk_targets(chunk, pattern, coding);
        loss += bce_with_logits<float>(z, t.labels, t.mask, &dlogits, normalizer);
        network_.backward(cache, dlogits, grad);
    }
    clip_global_norm<float>(grad, config.clip_norm);
    adam_step<float>(network_.params(), grad, adam_, config.adam);
    return loss;
}

}  // namespace adarx
