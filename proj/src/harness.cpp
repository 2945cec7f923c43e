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

#include "adarx/harness.hpp"
#include "adarx/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace adarx {

using nlohmann::json;

// ------------------------------------------------------------- receivers

namespace {

constexpr std::pair<ReceiverKind, const char *> kReceiverNames[] = {
    {ReceiverKind::UniversalRnn, "universal_rnn"},
    {ReceiverKind::AdaptedRnn, "adapted_rnn"},
    {ReceiverKind::LmmseIedd, "lmmse_iedd"},
    {ReceiverKind::PerfectIdd, "perfect_idd"},
};

bool contains(const std::vector<ReceiverKind> &v, ReceiverKind k) { return std::find(v.begin(), v.end(), k) != v.end(); }

}  // namespace

std::string receiver_name(ReceiverKind kind)
{
    for (const auto &[k, name] : kReceiverNames)
        if (k == kind)
            return name;
    throw InvalidArgument("receiver_name: unknown receiver");
}

ReceiverKind parse_receiver(const std::string &name)
{
    for (const auto &[k, n] : kReceiverNames)
        if (name == n)
            return k;
    throw InvalidArgument("unknown receiver '" + name +
                          "' (expected universal_rnn, adapted_rnn, lmmse_iedd or perfect_idd)");
}

// ------------------------------------------------------------- scenarios

void ScenarioConfig::validate() const
{
    channel.validate();
    link.geometry.validate();
    if (ebn0_db.empty())
        throw InvalidArgument("scenario: the Eb/N0 sweep is empty");
    if (frames_per_point < 1)
        throw InvalidArgument("scenario: frames_per_point must be >= 1");
    if (receivers.empty())
        throw InvalidArgument("scenario: no receivers selected");
    if (std::set<ReceiverKind>(receivers.begin(), receivers.end()).size() != receivers.size())
        throw InvalidArgument("scenario: a receiver is listed twice");
    if (iedd.outer_loops < 1 || iedd.bp_iterations_per_loop < 0 || idd.iterations < 1 || rnn_bp_iterations < 1)
        throw InvalidArgument("scenario: iteration counts must be positive");
    for (int n : interference.subcarriers)
        if (n < 0 || n >= link.geometry.num_subcarriers)
            throw InvalidArgument("scenario: interference subcarrier out of range");
    if (interference.penalty_db < 0.0)
        throw InvalidArgument("scenario: interference penalty must be >= 0 dB");
    if (contains(receivers, ReceiverKind::AdaptedRnn))
        adaptation.validate();
}

bool ScenarioConfig::uses_rnn() const
{
    return contains(receivers, ReceiverKind::UniversalRnn) || contains(receivers, ReceiverKind::AdaptedRnn);
}

std::vector<std::string> scenario_preset_names() { return {"corner", "extreme", "interference"}; }

ScenarioConfig scenario_preset(const std::string &name)
{
    ScenarioConfig c;
    c.name = name;
    c.receivers = {ReceiverKind::UniversalRnn, ReceiverKind::AdaptedRnn, ReceiverKind::LmmseIedd,
                   ReceiverKind::PerfectIdd};
    if (name == "corner") {
        c.channel.num_taps = 8;
        c.channel.velocity_kmh = 0.0;
    } else if (name == "extreme") {
        c.channel.num_taps = 16;
        c.channel.velocity_kmh = 100.0;
    } else if (name == "interference") {
        c.channel.num_taps = 8;
        c.channel.velocity_kmh = 100.0;
        c.interference = InterferenceSpec::outer_four(c.link.geometry.num_subcarriers, 6.0);
    } else {
        throw InvalidArgument("unknown scenario preset '" + name + "' (expected corner, extreme or interference)");
    }
    return c;
}

namespace {

void check_keys(const json &obj, std::initializer_list<const char *> allowed, const std::string &context)
{
    if (!obj.is_object())
        throw InvalidArgument(context + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char *a : allowed)
            ok = ok || it.key() == a;
        if (!ok)
            throw InvalidArgument(context + ": unknown key '" + it.key() + "'");
    }
}

template <typename T>
void read(const json &obj, const char *key, T &out, const std::string &context)
{
    if (!obj.contains(key))
        return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception &) {
        throw InvalidArgument(context + "." + key + ": wrong type");
    }
}

}  // namespace

ScenarioConfig scenario_from_json(const json &doc)
{
    const std::string ctx = "scenario";
    check_keys(doc,
               {"preset", "name", "channel", "ebn0_db", "frames_per_point", "receivers", "interference", "seed",
                "link", "iedd", "idd", "rnn_bp_iterations", "adaptation", "checkpoint", "output_csv", "manifest"},
               ctx);
    ScenarioConfig c;
    if (doc.contains("preset")) {
        if (!doc["preset"].is_string())
            throw InvalidArgument("scenario.preset: expected a string");
        c = scenario_preset(doc["preset"].get<std::string>());
    }
    read(doc, "name", c.name, ctx);
    if (doc.contains("channel")) {
        const auto &ch = doc["channel"];
        check_keys(ch, {"num_taps", "velocity_kmh", "carrier_freq_hz", "tap_spacing_s", "decay_total_db"},
                   "scenario.channel");
        read(ch, "num_taps", c.channel.num_taps, "scenario.channel");
        read(ch, "velocity_kmh", c.channel.velocity_kmh, "scenario.channel");
        read(ch, "carrier_freq_hz", c.channel.carrier_freq_hz, "scenario.channel");
        read(ch, "tap_spacing_s", c.channel.tap_spacing_s, "scenario.channel");
        read(ch, "decay_total_db", c.channel.decay_total_db, "scenario.channel");
    }
    read(doc, "ebn0_db", c.ebn0_db, ctx);
    read(doc, "frames_per_point", c.frames_per_point, ctx);
    if (doc.contains("receivers")) {
        std::vector<std::string> names;
        read(doc, "receivers", names, ctx);
        c.receivers.clear();
        for (const auto &n : names)
            c.receivers.push_back(parse_receiver(n));
    }
    if (doc.contains("interference")) {
        const auto &in = doc["interference"];
        if (in.is_null()) {
            c.interference = {};
        } else {
            check_keys(in, {"subcarriers", "penalty_db"}, "scenario.interference");
            read(in, "subcarriers", c.interference.subcarriers, "scenario.interference");
            read(in, "penalty_db", c.interference.penalty_db, "scenario.interference");
        }
    }
    read(doc, "seed", c.seed, ctx);
    if (doc.contains("link")) {
        const auto &l = doc["link"];
        check_keys(l, {"pilot_seed", "interleaver_seed"}, "scenario.link");
        read(l, "pilot_seed", c.link.pilot_seed, "scenario.link");
        read(l, "interleaver_seed", c.link.interleaver_seed, "scenario.link");
    }
    if (doc.contains("iedd")) {
        const auto &i = doc["iedd"];
        check_keys(i, {"outer_loops", "bp_iterations_per_loop"}, "scenario.iedd");
        read(i, "outer_loops", c.iedd.outer_loops, "scenario.iedd");
        read(i, "bp_iterations_per_loop", c.iedd.bp_iterations_per_loop, "scenario.iedd");
    }
    if (doc.contains("idd")) {
        const auto &i = doc["idd"];
        check_keys(i, {"iterations", "demapper_feedback"}, "scenario.idd");
        read(i, "iterations", c.idd.iterations, "scenario.idd");
        read(i, "demapper_feedback", c.idd.demapper_feedback, "scenario.idd");
    }
    read(doc, "rnn_bp_iterations", c.rnn_bp_iterations, ctx);
    if (doc.contains("adaptation")) {
        const auto &a = doc["adaptation"];
        const std::string actx = "scenario.adaptation";
        check_keys(a,
                   {"min_syndrome_fraction", "min_ebn0_db", "batch_frames", "batches_per_retrain", "per_frame_filter",
                    "max_collection_batches", "learning_rate", "clip_norm", "chunk_frames", "genie_labels"},
                   actx);
        read(a, "min_syndrome_fraction", c.adaptation.gate.min_syndrome_fraction, actx);
        read(a, "min_ebn0_db", c.adaptation.gate.min_ebn0_db, actx);
        read(a, "batch_frames", c.adaptation.gate.batch_frames, actx);
        read(a, "batches_per_retrain", c.adaptation.gate.batches_per_retrain, actx);
        read(a, "per_frame_filter", c.adaptation.gate.per_frame_filter, actx);
        read(a, "max_collection_batches", c.adaptation.max_collection_batches, actx);
        read(a, "learning_rate", c.adaptation.train.adam.learning_rate, actx);
        read(a, "clip_norm", c.adaptation.train.clip_norm, actx);
        read(a, "chunk_frames", c.adaptation.train.chunk_frames, actx);
        read(a, "genie_labels", c.adaptation.genie_labels, actx);
    }
    read(doc, "checkpoint", c.checkpoint, ctx);
    read(doc, "output_csv", c.output_csv, ctx);
    read(doc, "manifest", c.manifest, ctx);
    c.validate();
    return c;
}

json scenario_to_json(const ScenarioConfig &c)
{
    json receivers = json::array();
    for (auto r : c.receivers)
        receivers.push_back(receiver_name(r));
    return json{
        {"name", c.name},
        {"channel",
         {{"num_taps", c.channel.num_taps},
          {"velocity_kmh", c.channel.velocity_kmh},
          {"carrier_freq_hz", c.channel.carrier_freq_hz},
          {"tap_spacing_s", c.channel.tap_spacing_s},
          {"decay_total_db", c.channel.decay_total_db}}},
        {"ebn0_db", c.ebn0_db},
        {"frames_per_point", c.frames_per_point},
        {"receivers", receivers},
        {"interference", {{"subcarriers", c.interference.subcarriers}, {"penalty_db", c.interference.penalty_db}}},
        {"seed", c.seed},
        {"link", {{"pilot_seed", c.link.pilot_seed}, {"interleaver_seed", c.link.interleaver_seed}}},
        {"iedd", {{"outer_loops", c.iedd.outer_loops}, {"bp_iterations_per_loop", c.iedd.bp_iterations_per_loop}}},
        {"idd", {{"iterations", c.idd.iterations}, {"demapper_feedback", c.idd.demapper_feedback}}},
        {"rnn_bp_iterations", c.rnn_bp_iterations},
        {"adaptation",
         {{"min_syndrome_fraction", c.adaptation.gate.min_syndrome_fraction},
          {"min_ebn0_db", c.adaptation.gate.min_ebn0_db},
          {"batch_frames", c.adaptation.gate.batch_frames},
          {"batches_per_retrain", c.adaptation.gate.batches_per_retrain},
          {"per_frame_filter", c.adaptation.gate.per_frame_filter},
          {"max_collection_batches", c.adaptation.max_collection_batches},
          {"learning_rate", c.adaptation.train.adam.learning_rate},
          {"clip_norm", c.adaptation.train.clip_norm},
          {"chunk_frames", c.adaptation.train.chunk_frames},
          {"genie_labels", c.adaptation.genie_labels}}},
        {"checkpoint", c.checkpoint},
        {"output_csv", c.output_csv},
        {"manifest", c.manifest},
    };
}

TrainingSchedule schedule_from_json(const json &doc)
{
    const std::string ctx = "training";
    check_keys(doc,
               {"epochs", "iterations_per_epoch", "batch_size", "velocity_min_kmh", "velocity_max_kmh", "ebn0_min_db",
                "ebn0_max_db", "taps_min_early", "taps_max_early", "taps_min_late", "taps_max_late",
                "late_phase_epoch", "reveal_start", "reveal_iterations", "learning_rate", "clip_norm", "chunk_frames",
                "seed"},
               ctx);
    TrainingSchedule s;
    read(doc, "epochs", s.epochs, ctx);
    read(doc, "iterations_per_epoch", s.iterations_per_epoch, ctx);
    read(doc, "batch_size", s.batch_size, ctx);
    read(doc, "velocity_min_kmh", s.velocity_min_kmh, ctx);
    read(doc, "velocity_max_kmh", s.velocity_max_kmh, ctx);
    read(doc, "ebn0_min_db", s.ebn0_min_db, ctx);
    read(doc, "ebn0_max_db", s.ebn0_max_db, ctx);
    read(doc, "taps_min_early", s.taps_min_early, ctx);
    read(doc, "taps_max_early", s.taps_max_early, ctx);
    read(doc, "taps_min_late", s.taps_min_late, ctx);
    read(doc, "taps_max_late", s.taps_max_late, ctx);
    if (doc.contains("late_phase_epoch"))
        read(doc, "late_phase_epoch", s.late_phase_epoch, ctx);
    else
        s.late_phase_epoch = s.epochs / 2;
    read(doc, "reveal_start", s.reveal_start, ctx);
    read(doc, "reveal_iterations", s.reveal_iterations, ctx);
    read(doc, "learning_rate", s.train.adam.learning_rate, ctx);
    read(doc, "clip_norm", s.train.clip_norm, ctx);
    read(doc, "chunk_frames", s.train.chunk_frames, ctx);
    read(doc, "seed", s.train.rng_seed, ctx);
    s.validate();
    return s;
}

json schedule_to_json(const TrainingSchedule &s)
{
    return json{{"epochs", s.epochs},
                {"iterations_per_epoch", s.iterations_per_epoch},
                {"batch_size", s.batch_size},
                {"velocity_min_kmh", s.velocity_min_kmh},
                {"velocity_max_kmh", s.velocity_max_kmh},
                {"ebn0_min_db", s.ebn0_min_db},
                {"ebn0_max_db", s.ebn0_max_db},
                {"taps_min_early", s.taps_min_early},
                {"taps_max_early", s.taps_max_early},
                {"taps_min_late", s.taps_min_late},
                {"taps_max_late", s.taps_max_late},
                {"late_phase_epoch", s.late_phase_epoch},
                {"reveal_start", s.reveal_start},
                {"reveal_iterations", s.reveal_iterations},
                {"learning_rate", s.train.adam.learning_rate},
                {"clip_norm", s.train.clip_norm},
                {"chunk_frames", s.train.chunk_frames},
                {"seed", s.train.rng_seed}};
}

json read_config_file(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file " + path.string());
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error &e) {
        throw InvalidArgument("config file " + path.string() + ": " + e.what());
    }
}

// ------------------------------------------------------------ statistics

double ber_confidence(double p, double n)
{
    if (!(n > 0.0))
        throw InvalidArgument("ber_confidence: bit count must be > 0");
    if (p < 0.0 || p > 1.0)
        throw InvalidArgument("ber_confidence: p must lie in [0, 1]");
    return 1.96 * std::sqrt(p * (1.0 - p) / n);
}

double ber_confidence(const BerRecord &record)
{
    return ber_confidence(record.ber(), static_cast<double>(record.bits));
}

// ------------------------------------------------------------ evaluation

namespace {

constexpr std::size_t kEvalChunk = 8;
constexpr std::uint64_t kFrameStream = 1;
constexpr std::uint64_t kAdaptStream = 2;

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig &config, const RnnReceiver *universal,
                            const ProgressCallback &progress)
{
    config.validate();
    if (config.uses_rnn() && !universal)
        throw InvalidArgument("run_scenario: RNN receivers selected but no checkpoint loaded");
    const Transceiver link(config.link);
    const auto &coding = link.coding();
    const auto &pilots = link.pilots();
    const bool want_adapted = contains(config.receivers, ReceiverKind::AdaptedRnn);

    ScenarioResult result;
    for (std::size_t p = 0; p < config.ebn0_db.size(); ++p) {
        const double ebn0 = config.ebn0_db[p];
        const NoiseSpec noise = make_noise_spec(ebn0, kBitsPerSymbol, link.code_rate());

        std::optional<RnnReceiver> adapted;
        AdaptationReport adapt_report;
        if (want_adapted) {
            adapted = *universal;
            adapt_report = adapt_at_point(*adapted, link, config.channel, ebn0, config.interference,
                                          config.adaptation, derive_seed(config.seed, {p, kAdaptStream}));
            result.adaptation.push_back(adapt_report);
            if (progress)
                progress(fmt::format("Eb/N0 {} dB: adaptation accepted {} rejected {} updates {}", ebn0,
                                     adapt_report.batches_accepted, adapt_report.batches_rejected,
                                     adapt_report.updates_applied));
        }

        const CorrelationModel corr = genie_correlation(config.channel, link.geometry(), noise.sigma * noise.sigma);
        std::vector<BerRecord> recs;
        for (auto kind : config.receivers) {
            BerRecord r;
            r.receiver = receiver_name(kind);
            r.ebn0_db = ebn0;
            if (kind == ReceiverKind::AdaptedRnn) {
                r.batches_accepted = adapt_report.batches_accepted;
                r.batches_rejected = adapt_report.batches_rejected;
                r.updates_applied = adapt_report.updates_applied;
            }
            recs.push_back(r);
        }
        auto record = [&](ReceiverKind kind) -> BerRecord & {
            return recs[static_cast<std::size_t>(
                std::find(config.receivers.begin(), config.receivers.end(), kind) - config.receivers.begin())];
        };
        auto tally = [&](ReceiverKind kind, const Transmission &tx, const DecodeResult &dec) {
            auto &r = record(kind);
            r.errors += link.count_info_errors(tx, dec.hard_info);
            r.bits += tx.info.size();
            r.frames += 1;
        };

        const std::size_t frames = static_cast<std::size_t>(config.frames_per_point);
        for (std::size_t start = 0; start < frames; start += kEvalChunk) {
            const std::size_t count = std::min(kEvalChunk, frames - start);
            std::vector<Transmission> txs;
            std::vector<InputTensor> inputs;
            for (std::size_t k = 0; k < count; ++k) {
                Rng rng = make_stream(config.seed, {p, start + k, kFrameStream});
                txs.push_back(link.transmit(config.channel, ebn0, rng, config.interference));
                if (config.uses_rnn())
                    inputs.push_back(assemble_input(txs.back().grid.y, pilots, noise.sigma));
            }
            for (auto kind : config.receivers) {
                if (kind == ReceiverKind::UniversalRnn || kind == ReceiverKind::AdaptedRnn) {
                    const RnnReceiver &rx = kind == ReceiverKind::UniversalRnn ? *universal : *adapted;
                    const auto decs = rnn_detect(rx, inputs, pilots, coding, config.rnn_bp_iterations);
                    for (std::size_t k = 0; k < count; ++k)
                        tally(kind, txs[k], decs[k]);
                } else if (kind == ReceiverKind::LmmseIedd) {
                    for (const auto &tx : txs)
                        tally(kind, tx, iedd_receive(tx.grid.y, pilots, corr, noise.sigma, coding, config.iedd));
                } else {
                    for (const auto &tx : txs)
                        tally(kind, tx,
                              perfect_knowledge_idd(tx.grid.y, tx.h, noise.sigma, pilots, coding, config.idd));
                }
            }
        }
        for (auto &r : recs) {
            if (progress)
                progress(fmt::format("Eb/N0 {} dB: {} BER {:.3e} ({} / {})", ebn0, r.receiver, r.ber(), r.errors,
                                     r.bits));
            result.records.push_back(std::move(r));
        }
    }
    return result;
}

std::string format_csv(const std::vector<BerRecord> &records)
{
    std::string out = "receiver,ebn0_db,ber,bits,errors,ci95\n";
    for (const auto &r : records)
        out += fmt::format("{},{},{:.6e},{},{},{:.6e}\n", r.receiver, r.ebn0_db, r.ber(), r.bits, r.errors,
                           r.bits ? ber_confidence(r) : 0.0);
    return out;
}

void write_text_file(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out)
        throw IoError("write failed for " + path.string());
}

void write_csv(const std::filesystem::path &path, const std::vector<BerRecord> &records)
{
    write_text_file(path, format_csv(records));
}

json make_manifest(const ScenarioConfig &config, const ScenarioResult &result)
{
    json points = json::array();
    for (std::size_t p = 0; p < config.ebn0_db.size(); ++p) {
        json pt{{"index", p},
                {"ebn0_db", config.ebn0_db[p]},
                {"adaptation_seed", derive_seed(config.seed, {p, kAdaptStream})}};
        if (p < result.adaptation.size()) {
            const auto &a = result.adaptation[p];
            pt["adaptation"] = {{"batches_accepted", a.batches_accepted},
                                {"batches_rejected", a.batches_rejected},
                                {"updates_applied", a.updates_applied},
                                {"snr_gated", a.snr_gated},
                                {"collection_time_s", a.collection_time_s},
                                {"label_bit_error_rate", a.label_bit_error_rate}};
        }
        points.push_back(std::move(pt));
    }
    json records = json::array();
    for (const auto &r : result.records)
        records.push_back({{"receiver", r.receiver},
                           {"ebn0_db", r.ebn0_db},
                           {"ber", r.ber()},
                           {"bits", r.bits},
                           {"errors", r.errors},
                           {"frames", r.frames},
                           {"batches_accepted", r.batches_accepted},
                           {"batches_rejected", r.batches_rejected},
                           {"updates_applied", r.updates_applied}});
    return json{{"scenario", scenario_to_json(config)},
                {"frame_seed_rule", "derive_seed(seed, {point, frame, 1})"},
                {"adaptation_seed_rule", "derive_seed(seed, {point, 2})"},
                {"points", points},
                {"records", records}};
}

}  // namespace adarx
