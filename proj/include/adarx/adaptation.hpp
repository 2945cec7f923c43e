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

#ifndef ADARX_ADAPTATION_HPP
#define ADARX_ADAPTATION_HPP

#include "adarx/rnn_receiver.hpp"
#include "adarx/transceiver.hpp"

#include <filesystem>

namespace adarx {

inline constexpr int kLabelBpIterations = 20;

// RNN detection followed by BP decoding. The decode result serves both data
// detection (hard_info) and label recovery (hard_coded).
DecodeResult rnn_detect(const RnnReceiver &receiver, const InputTensor &input, const PilotPattern &pattern,
                        const FrameCoding &coding, int bp_iterations = kLabelBpIterations);

std::vector<DecodeResult> rnn_detect(const RnnReceiver &receiver, std::span<const InputTensor> inputs,
                                     const PilotPattern &pattern, const FrameCoding &coding,
                                     int bp_iterations = kLabelBpIterations);

struct RecoveredLabels {
    BitVector frame_labels;  // re-interleaved c_hat, aligned with the network output; filler = 0
    double syndrome_fraction = 0.0;
    DecodeResult decode;
};

RecoveredLabels recover_labels(const RnnReceiver &receiver, const InputTensor &input, const PilotPattern &pattern,
                               const FrameCoding &coding, int bp_iterations = kLabelBpIterations);

RecoveredLabels labels_from_decode(DecodeResult decode, const FrameCoding &coding);

struct LabeledFrame {
    InputTensor input;
    BitVector frame_labels;
    double syndrome_fraction = 0.0;
};

struct LabeledBatch {
    std::vector<LabeledFrame> frames;
    double ebn0_db = 0.0;

    double mean_syndrome_fraction() const;
};

struct GatePolicy {
    double min_syndrome_fraction = 0.82;  // inclusive
    double min_ebn0_db = 7.0;             // exclusive
    int batch_frames = 50;
    int batches_per_retrain = 32;
    // Drop individual frames below the syndrome threshold before the batch test.
    bool per_frame_filter = false;

    void validate() const;
    bool snr_allowed(double ebn0_db) const { return ebn0_db > min_ebn0_db; }
};

// Applies the gate. With per_frame_filter the batch is pruned in place first.
bool accept_batch(LabeledBatch &batch, const GatePolicy &policy);

// Simulated time needed to collect the batches of one retraining step.
double collection_time_s(const GatePolicy &policy, const FrameGeometry &geometry);

// Accepted batches awaiting a retraining step; each is used for exactly one update.
class RetrainBuffer {
public:
    explicit RetrainBuffer(int capacity = 32);

    int capacity() const { return capacity_; }
    int size() const { return static_cast<int>(batches_.size()); }
    bool full() const { return size() >= capacity_; }
    const std::vector<LabeledBatch> &batches() const { return batches_; }

    void push(LabeledBatch batch);
    std::vector<LabeledBatch> take_all();

private:
    int capacity_;
    std::vector<LabeledBatch> batches_;
};

void save_buffer(const std::filesystem::path &path, const RetrainBuffer &buffer);
RetrainBuffer load_buffer(const std::filesystem::path &path);

struct RetrainResult {
    std::vector<double> losses;  // loss before each update
    int updates = 0;
};

// One Adam update per buffered batch, in order; requires a full buffer and empties it.
RetrainResult retrain_step(RnnReceiver &receiver, RetrainBuffer &buffer, const PilotPattern &pattern,
                           const FrameCoding &coding, const TrainConfig &config);

struct AdaptationConfig {
    GatePolicy gate;
    TrainConfig train;
    int max_collection_batches = 64;  // gives up when this many batches were drawn
    int bp_iterations = kLabelBpIterations;
    bool genie_labels = false;  // use transmitted bits instead of recovered labels

    void validate() const;
};

struct AdaptationReport {
    int batches_accepted = 0;
    int batches_rejected = 0;
    int updates_applied = 0;
    bool snr_gated = false;  // SNR below the gate: nothing collected
    double collection_time_s = 0.0;
    double label_bit_error_rate = 0.0;  // of accepted labels vs. transmitted bits
    std::vector<double> losses;
};

// Collect, gate and retrain once at one operating point, starting from the
// receiver's current weights (which are updated in place).
AdaptationReport adapt_at_point(RnnReceiver &receiver, const Transceiver &link, const ChannelParams &channel,
                                double ebn0_db, const InterferenceSpec &interference, const AdaptationConfig &config,
                                std::uint64_t seed, RetrainBuffer *keep_buffer = nullptr);

// Fills a buffer with accepted batches without retraining (for the CLI split).
AdaptationReport collect_batches(const RnnReceiver &receiver, const Transceiver &link, const ChannelParams &channel,
                                 double ebn0_db, const InterferenceSpec &interference,
                                 const AdaptationConfig &config, std::uint64_t seed, RetrainBuffer &buffer);

}  // namespace adarx

#endif
