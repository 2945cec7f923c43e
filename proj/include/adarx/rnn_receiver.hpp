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

#ifndef ADARX_RNN_RECEIVER_HPP
#define ADARX_RNN_RECEIVER_HPP

#include "adarx/fec.hpp"
#include "adarx/ofdm_link.hpp"
#include "adarx/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace adarx {

inline constexpr int kInputFeatures = 7;

// Network input for one frame. Row-major over the grid with the feature index
// fastest: value(t, f, c) = data[(t * num_subcarriers + f) * 7 + c]. Features are
// [Re Y, Im Y, Re X_p, Im X_p, Re H_ls, Im H_ls, sigma]; pilot features are zero
// off the pilot grid.
struct InputTensor {
    int num_symbols = 0;
    int num_subcarriers = 0;
    std::vector<float> data;

    float at(int t, int f, int c) const
    {
        return data[(static_cast<std::size_t>(t) * num_subcarriers + f) * kInputFeatures + c];
    }
};

InputTensor assemble_input(const CMatrix &y, const CMatrix &x_pilot, const CMatrix &h_ls, double sigma);

// Pilot symbols and LS estimates are taken from `pattern`.
InputTensor assemble_input(const CMatrix &y, const PilotPattern &pattern, double sigma);

struct RnnConfig {
    int lstm_units = 64;  // per direction
    int dense_units = 8;
    int bits_per_symbol = kBitsPerSymbol;

    void validate() const;
};

// Named parameter block of the flat parameter vector (row-major matrix data).
struct ParamBlock {
    std::string name;
    int rows = 0;
    int cols = 0;
    std::size_t offset = 0;

    std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

// Parameter layout: for layer in {lstm1, lstm2, lstm3} and dir in {fwd, bwd}:
//   <layer>.<dir>.kernel (4U x in), .recurrent (4U x U), .bias (4U x 1)
// with gate order (input, forget, cell, output); then dense1.kernel (D x 2U),
// dense1.bias, dense2.kernel (m x D), dense2.bias.
class ParamLayout {
public:
    explicit ParamLayout(const RnnConfig &config);

    const std::vector<ParamBlock> &blocks() const { return blocks_; }
    const ParamBlock &block(const std::string &name) const;
    std::size_t total_size() const { return total_; }

private:
    std::vector<ParamBlock> blocks_;
    std::size_t total_ = 0;
};

// Column orders used inside the network. For a batch of B frames with grid
// T x F, the canonical column of (b, t, f) is (b * T + t) * F + f. The returned
// vector maps each column of the layout to its canonical column.
std::vector<int> freq_major_order(int batch, int num_symbols, int num_subcarriers);
std::vector<int> time_major_order(int batch, int num_symbols, int num_subcarriers);

// Three bidirectional LSTM layers (along frequency, time, frequency) followed by
// two position-wise dense layers. Logits are positive for bit value 1.
template <typename Scalar>
class RnnNetwork {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    struct LstmCache {
        Matrix input;  // layer input in the layer's column order
        Matrix gates[2];  // activated gates per direction
        Matrix cell[2];
        Matrix cell_tanh[2];
        Matrix hidden[2];
    };

    struct Cache {
        int batch = 0;
        int num_symbols = 0;
        int num_subcarriers = 0;
        LstmCache lstm[3];
        Matrix dense_in;   // canonical order
        Matrix dense_hidden;
    };

    explicit RnnNetwork(RnnConfig config = {});

    const RnnConfig &config() const { return config_; }
    const ParamLayout &layout() const { return layout_; }
    std::vector<Scalar> &params() { return params_; }
    const std::vector<Scalar> &params() const { return params_; }

    // Uniform fan-based initialization; forget-gate biases start at 1.
    void initialize(Rng &rng);

    // input: kInputFeatures x (B * T * F), canonical columns. Returns logits
    // (m x B * T * F), canonical columns. The cache is filled when given.
    Matrix forward(const Matrix &input, int batch, int num_symbols, int num_subcarriers,
                   Cache *cache = nullptr) const;

    // Accumulates d loss / d params into `grad` (same layout as params()).
    void backward(const Cache &cache, const Matrix &dlogits, std::span<Scalar> grad) const;

private:
    RnnConfig config_;
    ParamLayout layout_;
    std::vector<Scalar> params_;
};

extern template class RnnNetwork<float>;
extern template class RnnNetwork<double>;

// Stacks input tensors into the network's canonical input matrix.
template <typename Scalar>
typename RnnNetwork<Scalar>::Matrix stack_inputs(std::span<const InputTensor> inputs);

// Mean binary cross-entropy over the unmasked entries, from logits (positive for
// label 1). When `dlogits` is given it receives d loss / d logits with the mean
// taken over `normalizer` entries (the masked count when normalizer <= 0).
template <typename Scalar>
double bce_with_logits(const typename RnnNetwork<Scalar>::Matrix &logits, std::span<const std::uint8_t> labels,
                       std::span<const std::uint8_t> mask, typename RnnNetwork<Scalar>::Matrix *dlogits = nullptr,
                       double normalizer = 0.0);

// Plain-vector form: mean BCE over unmasked entries (empty mask = all).
double bce_loss(std::span<const double> logits, std::span<const std::uint8_t> labels,
                std::span<const std::uint8_t> mask = {});

// Network output for one frame: value(t, f, j) = values[(t * F + f) * m + j].
struct LogitGrid {
    int num_symbols = 0;
    int num_subcarriers = 0;
    int bits_per_symbol = 0;
    std::vector<double> values;
};

// Drops pilot positions, orders the rest by data-symbol index, converts to
// decoder LLRs (log P0/P1 = -logit) and deinterleaves. The result has
// frame_bits entries: the coded bits in decoder order followed by the filler.
std::vector<double> extract_data_llrs(const LogitGrid &grid, const PilotPattern &pattern,
                                      const FrameCoding &coding);

// Per-entry label and mask arrays (m x T*F, column-major like the network
// output) for one frame from frame-order labels. Pilots and filler are masked.
void frame_targets(std::span<const std::uint8_t> frame_labels, const PilotPattern &pattern,
                   const FrameCoding &coding, std::span<std::uint8_t> labels, std::span<std::uint8_t> mask);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
};

template <typename Scalar>
struct AdamState {
    std::vector<Scalar> m;
    std::vector<Scalar> v;
    std::int64_t step = 0;
};

template <typename Scalar>
void adam_step(std::span<Scalar> params, std::span<const Scalar> grad, AdamState<Scalar> &state,
               const AdamConfig &config);

// Rescales grad to the given global L2 norm if it is larger; returns the norm before clipping.
template <typename Scalar>
double clip_global_norm(std::span<Scalar> grad, double max_norm);

struct TrainConfig {
    AdamConfig adam;
    double clip_norm = 10.0;
    int chunk_frames = 8;  // frames per forward/backward pass during a step
    std::uint64_t rng_seed = 1;

    void validate() const;
};

// One supervised example: the network input and frame-order labels.
struct TrainingFrame {
    InputTensor input;
    BitVector frame_labels;
};

// Deployed receiver: single-precision network plus Adam state.
class RnnReceiver {
public:
    explicit RnnReceiver(RnnConfig config = {});

    static RnnReceiver initialized(const RnnConfig &config, std::uint64_t seed);

    const RnnConfig &config() const { return network_.config(); }
    RnnNetwork<float> &network() { return network_; }
    const RnnNetwork<float> &network() const { return network_; }
    AdamState<float> &adam() { return adam_; }
    const AdamState<float> &adam() const { return adam_; }

    LogitGrid logits(const InputTensor &input) const;
    std::vector<LogitGrid> logits(std::span<const InputTensor> inputs) const;

    // Decoder-order LLRs of the coded bits (filler dropped).
    std::vector<double> coded_llrs(const InputTensor &input, const PilotPattern &pattern,
                                   const FrameCoding &coding) const;

    // Mean BCE over a set of frames without updating anything.
    double evaluate_loss(std::span<const TrainingFrame> frames, const PilotPattern &pattern,
                         const FrameCoding &coding, int chunk_frames = 8) const;

    // One Adam update on the mean BCE of `frames`; returns the loss before the update.
    double train_step(std::span<const TrainingFrame> frames, const PilotPattern &pattern,
                      const FrameCoding &coding, const TrainConfig &config);

private:
    RnnNetwork<float> network_;
    AdamState<float> adam_;
};

}  // namespace adarx

#endif
