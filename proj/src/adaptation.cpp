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

#include "adarx/adaptation.hpp"
#include "adarx/container.hpp"
#include "adarx/rng.hpp"

#include <numeric>

namespace adarx {

DecodeResult rnn_detect(const RnnReceiver &receiver, const InputTensor &input, const PilotPattern &pattern,
                        const FrameCoding &coding, int bp_iterations)
{
    return rnn_detect(receiver, std::span<const InputTensor>(&input, 1), pattern, coding, bp_iterations).front();
}

std::vector<DecodeResult> rnn_detect(const RnnReceiver &receiver, std::span<const InputTensor> inputs,
                                     const PilotPattern &pattern, const FrameCoding &coding, int bp_iterations)
{
    const auto grids = receiver.logits(inputs);
    std::vector<DecodeResult> out;
    out.reserve(grids.size());
    BpOptions opts;
    opts.max_iterations = bp_iterations;
    for (const auto &g : grids) {
        auto llr = extract_data_llrs(g, pattern, coding);
        llr.resize(coding.coded_bits());
        out.push_back(bp_decode(coding.code(), llr, opts));
    }
    return out;
}

RecoveredLabels labels_from_decode(DecodeResult decode, const FrameCoding &coding)
{
    RecoveredLabels r;
    r.frame_labels = coding.labels_from_coded(decode.hard_coded);
    r.syndrome_fraction = decode.mean_syndrome_fraction();
    r.decode = std::move(decode);
    return r;
}

RecoveredLabels recover_labels(const RnnReceiver &receiver, const InputTensor &input, const PilotPattern &pattern,
                               const FrameCoding &coding, int bp_iterations)
{
    return labels_from_decode(rnn_detect(receiver, input, pattern, coding, bp_iterations), coding);
}

double LabeledBatch::mean_syndrome_fraction() const
{
    if (frames.empty())
        return 0.0;
    double s = 0.0;
    for (const auto &f : frames)
        s += f.syndrome_fraction;
    return s / static_cast<double>(frames.size());
}

void GatePolicy::validate() const
{
    if (batch_frames < 1 || batches_per_retrain < 1)
        throw InvalidArgument("GatePolicy: batch sizes must be >= 1");
    if (min_syndrome_fraction < 0.0 || min_syndrome_fraction > 1.0)
        throw InvalidArgument("GatePolicy: syndrome threshold must lie in [0, 1]");
}

bool accept_batch(LabeledBatch &batch, const GatePolicy &policy)
{
    if (!policy.snr_allowed(batch.ebn0_db))
        return false;
    if (policy.per_frame_filter)
        std::erase_if(batch.frames,
                      [&](const LabeledFrame &f) { return f.syndrome_fraction < policy.min_syndrome_fraction; });
    if (batch.frames.empty())
        return false;
    return batch.mean_syndrome_fraction() >= policy.min_syndrome_fraction;
}

double collection_time_s(const GatePolicy &policy, const FrameGeometry &geometry)
{
    return static_cast<double>(policy.batches_per_retrain) * policy.batch_frames * geometry.num_symbols *
           geometry.symbol_duration_s;
}

RetrainBuffer::RetrainBuffer(int capacity) : capacity_(capacity)
{
    if (capacity < 1)
        throw InvalidArgument("RetrainBuffer: capacity must be >= 1");
}

void RetrainBuffer::push(LabeledBatch batch)
{
    if (full())
        throw InvalidArgument("RetrainBuffer: buffer is full");
    batches_.push_back(std::move(batch));
}

std::vector<LabeledBatch> RetrainBuffer::take_all()
{
    std::vector<LabeledBatch> out;
    out.swap(batches_);
    return out;
}

void save_buffer(const std::filesystem::path &path, const RetrainBuffer &buffer)
{
    nlohmann::json doc;
    doc["format"] = "adarx-buffer";
    doc["version"] = kContainerVersion;
    doc["capacity"] = buffer.capacity();
    nlohmann::json batches = nlohmann::json::array();
    for (const auto &b : buffer.batches()) {
        nlohmann::json jb;
        jb["ebn0_db"] = b.ebn0_db;
        nlohmann::json frames = nlohmann::json::array();
        for (const auto &f : b.frames) {
            frames.push_back({{"syndrome_fraction", f.syndrome_fraction},
                              {"input", make_tensor("input", std::span<const float>(f.input.data),
                                                    {f.input.num_symbols, f.input.num_subcarriers, kInputFeatures})},
                              {"labels", make_tensor("labels", std::span<const std::uint8_t>(f.frame_labels),
                                                     {static_cast<std::int64_t>(f.frame_labels.size())})}});
        }
        jb["frames"] = std::move(frames);
        batches.push_back(std::move(jb));
    }
    doc["batches"] = std::move(batches);
    write_container(path, doc);
}

RetrainBuffer load_buffer(const std::filesystem::path &path)
{
    const auto doc = read_container(path);
    if (!doc.is_object() || doc.value("format", std::string()) != "adarx-buffer")
        throw IoError("not a retraining buffer container: " + path.string());
    try {
        RetrainBuffer buffer(doc.at("capacity").get<int>());
        for (const auto &jb : doc.at("batches")) {
            LabeledBatch b;
            b.ebn0_db = jb.at("ebn0_db").get<double>();
            for (const auto &jf : jb.at("frames")) {
                LabeledFrame f;
                f.syndrome_fraction = jf.at("syndrome_fraction").get<double>();
                const auto shape = tensor_shape(jf.at("input"));
                if (shape.size() != 3 || shape[2] != kInputFeatures)
                    throw IoError("buffer: input tensor has the wrong shape");
                f.input.num_symbols = static_cast<int>(shape[0]);
                f.input.num_subcarriers = static_cast<int>(shape[1]);
                f.input.data = tensor_f32(jf.at("input"));
                f.frame_labels = tensor_u8(jf.at("labels"));
                b.frames.push_back(std::move(f));
            }
            buffer.push(std::move(b));
        }
        return buffer;
    } catch (const nlohmann::json::exception &e) {
        throw IoError(std::string("malformed buffer: ") + e.what());
    }
}

RetrainResult retrain_step(RnnReceiver &receiver, RetrainBuffer &buffer, const PilotPattern &pattern,
                           const FrameCoding &coding, const TrainConfig &config)
{
    if (!buffer.full())
        throw InvalidArgument("retrain_step: buffer holds fewer batches than its capacity");
    RetrainResult r;
    for (const auto &batch : buffer.take_all()) {
        std::vector<TrainingFrame> frames;
        frames.reserve(batch.frames.size());
        for (const auto &f : batch.frames)
            frames.push_back({f.input, f.frame_labels});
        r.losses.push_back(receiver.train_step(frames, pattern, coding, config));
        ++r.updates;
    }
    return r;
}

void AdaptationConfig::validate() const
{
    gate.validate();
    train.validate();
    if (max_collection_batches < gate.batches_per_retrain)
        throw InvalidArgument("AdaptationConfig: max_collection_batches below the batches per retraining step");
    if (bp_iterations < 1)
        throw InvalidArgument("AdaptationConfig: bp_iterations must be >= 1");
}

namespace {

constexpr std::size_t kRecoveryChunk = 10;

}  // namespace

AdaptationReport collect_batches(const RnnReceiver &receiver, const Transceiver &link, const ChannelParams &channel,
                                 double ebn0_db, const InterferenceSpec &interference,
                                 const AdaptationConfig &config, std::uint64_t seed, RetrainBuffer &buffer)
{
    config.validate();
    AdaptationReport rep;
    rep.collection_time_s = collection_time_s(config.gate, link.geometry());
    if (!config.gate.snr_allowed(ebn0_db)) {
        rep.snr_gated = true;
        return rep;
    }
    const auto &coding = link.coding();
    const auto &mask = coding.label_mask();
    std::size_t label_errors = 0, label_bits = 0;
    for (int bi = 0; bi < config.max_collection_batches && !buffer.full(); ++bi) {
        LabeledBatch batch;
        batch.ebn0_db = ebn0_db;
        std::vector<BitVector> truth;
        for (std::size_t start = 0; start < static_cast<std::size_t>(config.gate.batch_frames);
             start += kRecoveryChunk) {
            const std::size_t count =
                std::min(kRecoveryChunk, static_cast<std::size_t>(config.gate.batch_frames) - start);
            std::vector<InputTensor> inputs;
            for (std::size_t k = 0; k < count; ++k) {
                Rng rng = make_stream(seed, {static_cast<std::uint64_t>(bi), start + k});
                auto tx = link.transmit(channel, ebn0_db, rng, interference);
                inputs.push_back(assemble_input(tx.grid.y, link.pilots(), tx.noise.sigma));
                truth.push_back(std::move(tx.frame_bits));
            }
            auto decoded = rnn_detect(receiver, inputs, link.pilots(), coding, config.bp_iterations);
            for (std::size_t k = 0; k < count; ++k) {
                auto rec = labels_from_decode(std::move(decoded[k]), coding);
                LabeledFrame f{std::move(inputs[k]), std::move(rec.frame_labels), rec.syndrome_fraction};
                if (config.genie_labels) {
                    const auto &t = truth[start + k];
                    for (std::size_t i = 0; i < t.size(); ++i)
                        f.frame_labels[i] = mask[i] ? t[i] : 0;
                }
                batch.frames.push_back(std::move(f));
            }
        }
        LabeledBatch candidate = batch;
        if (accept_batch(candidate, config.gate)) {
            for (std::size_t k = 0; k < batch.frames.size(); ++k) {
                const auto &t = truth[k];
                for (std::size_t i = 0; i < t.size(); ++i) {
                    if (!mask[i])
                        continue;
                    ++label_bits;
                    label_errors += batch.frames[k].frame_labels[i] != t[i];
                }
            }
            buffer.push(std::move(candidate));
            ++rep.batches_accepted;
        } else {
            ++rep.batches_rejected;
        }
    }
    rep.label_bit_error_rate = label_bits ? static_cast<double>(label_errors) / static_cast<double>(label_bits) : 0.0;
    return rep;
}

AdaptationReport adapt_at_point(RnnReceiver &receiver, const Transceiver &link, const ChannelParams &channel,
                                double ebn0_db, const InterferenceSpec &interference, const AdaptationConfig &config,
                                std::uint64_t seed, RetrainBuffer *keep_buffer)
{
    RetrainBuffer buffer(config.gate.batches_per_retrain);
    auto rep = collect_batches(receiver, link, channel, ebn0_db, interference, config, seed, buffer);
    if (keep_buffer)
        *keep_buffer = buffer;
    if (!buffer.full())
        return rep;
    const auto r = retrain_step(receiver, buffer, link.pilots(), link.coding(), config.train);
    rep.updates_applied = r.updates;
    rep.losses = r.losses;
    return rep;
}

}  // namespace adarx
