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

#ifndef ADARX_HARNESS_HPP
#define ADARX_HARNESS_HPP

#include "adarx/adaptation.hpp"
#include "adarx/baseline_rx.hpp"
#include "adarx/training.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace adarx {

enum class ReceiverKind { UniversalRnn, AdaptedRnn, LmmseIedd, PerfectIdd };

std::string receiver_name(ReceiverKind kind);
ReceiverKind parse_receiver(const std::string &name);

struct ScenarioConfig {
    std::string name = "custom";
    ChannelParams channel;
    std::vector<double> ebn0_db = {10.0, 12.0, 14.0};
    int frames_per_point = 2000;
    std::vector<ReceiverKind> receivers = {ReceiverKind::LmmseIedd, ReceiverKind::PerfectIdd};
    InterferenceSpec interference;
    std::uint64_t seed = 1;
    LinkConfig link;
    IeddOptions iedd;
    IddOptions idd;
    int rnn_bp_iterations = kLabelBpIterations;
    AdaptationConfig adaptation;
    std::string checkpoint;  // universal RNN weights, required by the RNN receivers
    std::string output_csv;
    std::string manifest;

    void validate() const;
    bool uses_rnn() const;
};

// Shipped scenarios: "corner" (L = 8, v = 0), "extreme" (L = 16, v = 100 km/h),
// "interference" (L = 8, v = 100 km/h, 6 dB extra noise on the outer four subcarriers).
ScenarioConfig scenario_preset(const std::string &name);
std::vector<std::string> scenario_preset_names();

// Parses a scenario document. An optional "preset" key selects the starting
// point; every other key overrides it. Unknown keys are rejected.
ScenarioConfig scenario_from_json(const nlohmann::json &doc);
nlohmann::json scenario_to_json(const ScenarioConfig &config);

// Training schedule document: the TrainingSchedule field names plus
// "learning_rate", "clip_norm", "chunk_frames" and "seed". Missing keys keep defaults.
TrainingSchedule schedule_from_json(const nlohmann::json &doc);
nlohmann::json schedule_to_json(const TrainingSchedule &schedule);

// Reads a JSON file (comments allowed).
nlohmann::json read_config_file(const std::filesystem::path &path);

struct BerRecord {
    std::string receiver;
    double ebn0_db = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    std::uint64_t frames = 0;
    int batches_accepted = 0;
    int batches_rejected = 0;
    int updates_applied = 0;

    double ber() const { return bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }
};

// Half-width of the normal-approximation 95% interval, 1.96 sqrt(p (1 - p) / N).
double ber_confidence(double p, double n);
double ber_confidence(const BerRecord &record);

struct ScenarioResult {
    std::vector<BerRecord> records;
    std::vector<AdaptationReport> adaptation;  // one per point when the adapted receiver runs
};

using ProgressCallback = std::function<void(const std::string &message)>;

// Monte-Carlo BER evaluation. Every receiver at a point sees the same frames;
// frame i of point p uses derive_seed(seed, {p, i, 1}). Adaptation at point p
// draws its own frames from derive_seed(seed, {p, 2}).
ScenarioResult run_scenario(const ScenarioConfig &config, const RnnReceiver *universal = nullptr,
                            const ProgressCallback &progress = {});

std::string format_csv(const std::vector<BerRecord> &records);
void write_csv(const std::filesystem::path &path, const std::vector<BerRecord> &records);
nlohmann::json make_manifest(const ScenarioConfig &config, const ScenarioResult &result);
void write_text_file(const std::filesystem::path &path, const std::string &text);

}  // namespace adarx

#endif
