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
//
// Command line front end:
//   adarx train-initial     universal training, writes a checkpoint
//   adarx run-scenario      Monte-Carlo BER sweep, writes CSV + manifest
//   adarx adapt             label collection and one retraining step
//   adarx export-checkpoint container -> readable JSON

#include "adarx/container.hpp"
#include "adarx/harness.hpp"
#include "adarx/rng.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <optional>

namespace {

using adarx::IoError;
using adarx::InvalidArgument;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

// The config file holds a "training" section and a "scenario" section; either
// may be absent. A missing file argument means all defaults.
json load_section(const std::string &path, const char *section)
{
    if (path.empty())
        return json::object();
    const json doc = adarx::read_config_file(path);
    if (!doc.is_object())
        throw InvalidArgument("config file must contain a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "training" && it.key() != "scenario")
            throw InvalidArgument("config file: unknown top-level key '" + it.key() + "'");
    return doc.value(section, json::object());
}

std::vector<double> parse_double_list(const std::string &text)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find(',', pos);
        const auto item = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception &) {
            throw InvalidArgument("not a number list: '" + text + "'");
        }
        if (end == std::string::npos)
            break;
        pos = end + 1;
    }
    return out;
}

std::vector<std::string> split(const std::string &text)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto end = text.find(',', pos);
        out.push_back(text.substr(pos, end == std::string::npos ? std::string::npos : end - pos));
        if (end == std::string::npos)
            break;
        pos = end + 1;
    }
    return out;
}

struct ScenarioFlags {
    std::string config;
    std::string preset;
    std::string ebn0;
    std::string receivers;
    std::optional<int> frames;
    std::optional<std::uint64_t> seed;
    std::string checkpoint;
    std::string output;
    std::string manifest;
};

void add_scenario_flags(CLI::App *cmd, ScenarioFlags &f)
{
    cmd->add_option("-c,--config", f.config, "Config file (JSON; the \"scenario\" section is used)");
    cmd->add_option("--preset", f.preset, "Scenario preset: corner, extreme or interference");
    cmd->add_option("--ebn0", f.ebn0, "Comma-separated Eb/N0 points in dB");
    cmd->add_option("--receivers", f.receivers,
                    "Comma-separated receivers: universal_rnn, adapted_rnn, lmmse_iedd, perfect_idd");
    cmd->add_option("--frames", f.frames, "Frames per Eb/N0 point");
    cmd->add_option("--seed", f.seed, "Base seed of the frame streams");
    cmd->add_option("--checkpoint", f.checkpoint, "Universal RNN checkpoint");
}

adarx::ScenarioConfig build_scenario(const ScenarioFlags &f)
{
    json doc = load_section(f.config, "scenario");
    if (!f.preset.empty())
        doc["preset"] = f.preset;
    if (!f.ebn0.empty())
        doc["ebn0_db"] = parse_double_list(f.ebn0);
    if (!f.receivers.empty())
        doc["receivers"] = split(f.receivers);
    if (f.frames)
        doc["frames_per_point"] = *f.frames;
    if (f.seed)
        doc["seed"] = *f.seed;
    if (!f.checkpoint.empty())
        doc["checkpoint"] = f.checkpoint;
    if (!f.output.empty())
        doc["output_csv"] = f.output;
    if (!f.manifest.empty())
        doc["manifest"] = f.manifest;
    return adarx::scenario_from_json(doc);
}

void log_line(const std::string &s) { std::fprintf(stderr, "%s\n", s.c_str()); }

int cmd_train(const std::string &config, const std::string &output, std::optional<int> epochs,
              std::optional<int> iterations, std::optional<int> batch, std::optional<std::uint64_t> seed,
              const std::string &loss_log)
{
    json doc = load_section(config, "training");
    if (epochs)
        doc["epochs"] = *epochs;
    if (iterations)
        doc["iterations_per_epoch"] = *iterations;
    if (batch)
        doc["batch_size"] = *batch;
    if (seed)
        doc["seed"] = *seed;
    const auto schedule = adarx::schedule_from_json(doc);
    const adarx::Transceiver link;
    auto rx = adarx::RnnReceiver::initialized({}, adarx::derive_seed(schedule.train.rng_seed, {0xf00d}));
    const auto t0 = std::chrono::steady_clock::now();
    const auto history = adarx::initial_train(rx, link, schedule, [&](int epoch, int it, double loss) {
        if (it + 1 == schedule.iterations_per_epoch || it % 50 == 0) {
            const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            log_line(fmt::format("epoch {} iteration {} loss {:.5f} ({:.0f} s)", epoch, it, loss, s));
        }
    });
    json meta{{"schedule", adarx::schedule_to_json(schedule)},
              {"final_epoch_loss", history.epoch_loss.back()},
              {"frames_seen", static_cast<std::int64_t>(schedule.epochs) * schedule.iterations_per_epoch *
                                  schedule.batch_size}};
    adarx::save_checkpoint(output, rx, meta);
    if (!loss_log.empty()) {
        std::string text = "iteration,loss\n";
        for (std::size_t i = 0; i < history.iteration_loss.size(); ++i)
            text += fmt::format("{},{:.8g}\n", i, history.iteration_loss[i]);
        adarx::write_text_file(loss_log, text);
    }
    log_line(fmt::format("wrote {}", output));
    return 0;
}

int cmd_run(const ScenarioFlags &flags)
{
    const auto scenario = build_scenario(flags);
    if (scenario.output_csv.empty())
        throw InvalidArgument("run-scenario: no output CSV (use --output or scenario.output_csv)");
    std::optional<adarx::RnnReceiver> universal;
    if (scenario.uses_rnn()) {
        if (scenario.checkpoint.empty())
            throw InvalidArgument("run-scenario: RNN receivers need --checkpoint");
        universal = adarx::load_checkpoint(scenario.checkpoint);
    }
    const auto result = adarx::run_scenario(scenario, universal ? &*universal : nullptr, log_line);
    adarx::write_csv(scenario.output_csv, result.records);
    const std::string manifest = scenario.manifest.empty() ? scenario.output_csv + ".manifest.json" : scenario.manifest;
    adarx::write_text_file(manifest, adarx::make_manifest(scenario, result).dump(2) + "\n");
    std::fputs(adarx::format_csv(result.records).c_str(), stdout);
    return 0;
}

int cmd_adapt(const ScenarioFlags &flags, double ebn0, const std::string &buffer_in, const std::string &buffer_out,
              bool collect_only)
{
    const auto scenario = build_scenario(flags);
    if (scenario.checkpoint.empty())
        throw InvalidArgument("adapt: --checkpoint is required");
    if (flags.output.empty() && !collect_only)
        throw InvalidArgument("adapt: --output is required unless --collect-only is given");
    if (collect_only && buffer_out.empty())
        throw InvalidArgument("adapt: --collect-only needs --buffer-out");
    auto rx = adarx::load_checkpoint(scenario.checkpoint);
    const adarx::Transceiver link(scenario.link);
    const auto seed = adarx::derive_seed(scenario.seed, {0, 2});

    adarx::RetrainBuffer buffer(scenario.adaptation.gate.batches_per_retrain);
    adarx::AdaptationReport rep;
    if (!buffer_in.empty()) {
        buffer = adarx::load_buffer(buffer_in);
    } else {
        rep = adarx::collect_batches(rx, link, scenario.channel, ebn0, scenario.interference, scenario.adaptation,
                                     seed, buffer);
        log_line(fmt::format("collected: accepted {} rejected {} label BER {:.3e}{}", rep.batches_accepted,
                             rep.batches_rejected, rep.label_bit_error_rate,
                             rep.snr_gated ? " (below SNR gate)" : ""));
    }
    if (!buffer_out.empty())
        adarx::save_buffer(buffer_out, buffer);
    if (collect_only)
        return 0;
    json meta = adarx::load_checkpoint_metadata(scenario.checkpoint);
    if (buffer.full()) {
        const auto r = adarx::retrain_step(rx, buffer, link.pilots(), link.coding(), scenario.adaptation.train);
        rep.updates_applied = r.updates;
        log_line(fmt::format("retrained: {} updates, loss {:.5f} -> {:.5f}", r.updates, r.losses.front(),
                             r.losses.back()));
    } else {
        log_line(fmt::format("buffer holds {} of {} batches; weights unchanged", buffer.size(), buffer.capacity()));
    }
    meta["adaptation"] = {{"scenario", scenario.name},
                          {"ebn0_db", ebn0},
                          {"batches_accepted", rep.batches_accepted},
                          {"batches_rejected", rep.batches_rejected},
                          {"updates_applied", rep.updates_applied}};
    adarx::save_checkpoint(flags.output, rx, meta);
    log_line(fmt::format("wrote {}", flags.output));
    return 0;
}

}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"adarx: adaptive neural OFDM receiver simulator"};
    app.require_subcommand(1);

    auto *train = app.add_subcommand("train-initial", "Train a universal RNN receiver");
    std::string train_config, train_output, loss_log;
    std::optional<int> epochs, iterations, batch;
    std::optional<std::uint64_t> train_seed;
    train->add_option("-c,--config", train_config, "Config file (JSON; the \"training\" section is used)");
    train->add_option("-o,--output", train_output, "Checkpoint to write")->required();
    train->add_option("--epochs", epochs, "Number of epochs");
    train->add_option("--iterations", iterations, "Iterations per epoch");
    train->add_option("--batch-size", batch, "Frames per iteration");
    train->add_option("--seed", train_seed, "Training seed");
    train->add_option("--loss-log", loss_log, "Write the per-iteration loss as CSV");

    auto *run = app.add_subcommand("run-scenario", "Monte-Carlo BER evaluation of the selected receivers");
    ScenarioFlags run_flags;
    add_scenario_flags(run, run_flags);
    run->add_option("-o,--output", run_flags.output, "CSV file to write");
    run->add_option("--manifest", run_flags.manifest, "Run manifest (default: <output>.manifest.json)");

    auto *adapt = app.add_subcommand("adapt", "Collect recovered labels and run one retraining step");
    ScenarioFlags adapt_flags;
    double adapt_ebn0 = 14.0;
    std::string buffer_in, buffer_out;
    bool collect_only = false;
    add_scenario_flags(adapt, adapt_flags);
    adapt->add_option("--at", adapt_ebn0, "Operating Eb/N0 in dB")->capture_default_str();
    adapt->add_option("-o,--output", adapt_flags.output, "Adapted checkpoint to write");
    adapt->add_option("--buffer-in", buffer_in, "Retrain from a saved buffer instead of collecting");
    adapt->add_option("--buffer-out", buffer_out, "Save the collected buffer");
    adapt->add_flag("--collect-only", collect_only, "Only collect and save the buffer");

    auto *exp = app.add_subcommand("export-checkpoint", "Convert a checkpoint or buffer to readable JSON");
    std::string exp_in, exp_out;
    exp->add_option("-i,--input", exp_in, "Container file")->required();
    exp->add_option("-o,--output", exp_out, "JSON file to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*train)
            return cmd_train(train_config, train_output, epochs, iterations, batch, train_seed, loss_log);
        if (*run)
            return cmd_run(run_flags);
        if (*adapt)
            return cmd_adapt(adapt_flags, adapt_ebn0, buffer_in, buffer_out, collect_only);
        if (*exp) {
            adarx::export_container_json(exp_in, exp_out);
            return 0;
        }
    } catch (const IoError &e) {
        std::fprintf(stderr, "adarx: I/O error: %s\n", e.what());
        return kExitIo;
    } catch (const InvalidArgument &e) {
        std::fprintf(stderr, "adarx: configuration error: %s\n", e.what());
        return kExitConfig;
    }
    return 0;
}
