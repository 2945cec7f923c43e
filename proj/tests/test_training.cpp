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

#include "adarx/container.hpp"
#include "adarx/rng.hpp"
#include "adarx/training.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>

using namespace adarx;
using Catch::Approx;

namespace {

std::filesystem::path temp_path(const std::string &name)
{
    auto dir = std::filesystem::temp_directory_path() / "adarx_test_training";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("tap count ranges follow the epoch")
{
    TrainingSchedule s;
    Rng rng(1);
    int outside = 0, below = 0, above = 0;
    for (int i = 0; i < 1000; ++i) {
        const int early = draw_taps(s, 0, rng);
        CHECK(early >= 4);
        CHECK(early <= 10);
        const int late = draw_taps(s, 50, rng);
        CHECK(late >= 1);
        CHECK(late <= 14);
        outside += late < 4 || late > 10;
        below += late < 4;
        above += late > 10;
        CHECK(draw_taps(s, 49, rng) <= 10);
    }
    CHECK(outside > 0);
    CHECK(below > 0);
    CHECK(above > 0);
}

TEST_CASE("frame conditions stay inside the schedule ranges")
{
    TrainingSchedule s;
    Rng rng(2);
    double vmin = 1e9, vmax = -1e9, emin = 1e9, emax = -1e9;
    for (int i = 0; i < 2000; ++i) {
        const auto c = draw_conditions(s, 60, rng);
        vmin = std::min(vmin, c.channel.velocity_kmh);
        vmax = std::max(vmax, c.channel.velocity_kmh);
        emin = std::min(emin, c.ebn0_db);
        emax = std::max(emax, c.ebn0_db);
        CHECK(c.channel.decay_total_db == -13.0);
    }
    CHECK(vmin >= 0.0);
    CHECK(vmax <= 200.0);
    CHECK(vmax - vmin > 190.0);
    CHECK(emin >= 8.0);
    CHECK(emax <= 30.0);
    CHECK(emax - emin > 21.0);
}

TEST_CASE("schedule validation")
{
    TrainingSchedule s;
    s.validate();
    s.epochs = 0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s = {};
    s.taps_min_late = 0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s = {};
    s.ebn0_min_db = 31.0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s = {};
    s.train.adam.learning_rate = 0.0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s = {};
    s.reveal_start = 1.5;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    s = {};
    s.reveal_iterations = -1;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("reveal probability decays linearly to zero")
{
    TrainingSchedule s;
    CHECK(reveal_probability(s, 0) == 0.0);
    s.reveal_start = 0.5;
    s.reveal_iterations = 100;
    CHECK(reveal_probability(s, 0) == 0.5);
    CHECK(reveal_probability(s, 50) == Approx(0.25));
    CHECK(reveal_probability(s, 99) == Approx(0.005));
    CHECK(reveal_probability(s, 100) == 0.0);
    CHECK(reveal_probability(s, 5000) == 0.0);
}

TEST_CASE("revealed frames")
{
    Transceiver link;
    ChannelParams ch;
    ch.num_taps = 4;
    const auto &pattern = link.pilots();

    // Nothing revealed: identical to a plain training frame, same stream use.
    Rng a(5), b(5);
    const auto plain = make_training_frame(link, ch, 15.0, a);
    const auto none = make_revealed_frame(link, ch, 15.0, 0.0, b);
    CHECK(none.input.data == plain.input.data);
    CHECK(none.frame_labels == plain.frame_labels);
    CHECK(a() == b());

    // Everything revealed: every position carries X and Y / X.
    Rng c(5), d(5);
    const auto all = make_revealed_frame(link, ch, 15.0, 1.0, c);
    const auto tx = link.transmit(ch, 15.0, d);
    CHECK(all.frame_labels == tx.frame_bits);
    double worst = 0.0;
    for (Eigen::Index p = 0; p < tx.grid.y.size(); ++p) {
        const float *v = all.input.data.data() + p * kInputFeatures;
        const Complex x = tx.grid.x.data()[p];
        const Complex h = tx.grid.y.data()[p] / x;
        worst = std::max({worst, std::abs(v[0] - tx.grid.y.data()[p].real()), std::abs(v[2] - x.real()),
                          std::abs(v[3] - x.imag()), std::abs(v[4] - h.real()), std::abs(v[5] - h.imag())});
    }
    CHECK(worst < 1e-5);

    // Partial reveal: the fraction of revealed data positions tracks the probability.
    Rng e(6);
    const auto part = make_revealed_frame(link, ch, 15.0, 0.3, e);
    int revealed = 0;
    for (int pos : pattern.data_positions)
        revealed += part.input.data[static_cast<std::size_t>(pos) * kInputFeatures + 2] != 0.0f ||
                    part.input.data[static_cast<std::size_t>(pos) * kInputFeatures + 3] != 0.0f;
    const double frac = static_cast<double>(revealed) / pattern.data_positions.size();
    CHECK(frac == Approx(0.3).margin(0.04));
}

TEST_CASE("training frames carry the transmitted frame bits")
{
    Transceiver link;
    Rng a(3), b(3);
    const auto f = make_training_frame(link, ChannelParams{}, 12.0, a);
    const auto tx = link.transmit(ChannelParams{}, 12.0, b);
    CHECK(f.frame_labels == tx.frame_bits);
    const auto in = assemble_input(tx.grid.y, link.pilots(), tx.noise.sigma);
    CHECK(f.input.data == in.data);
}

TEST_CASE("scaled universal training makes progress")
{
    Transceiver link;
    TrainingSchedule s;
    s.epochs = 2;
    s.iterations_per_epoch = 50;
    s.batch_size = 8;
    s.late_phase_epoch = 1;
    auto rx = RnnReceiver::initialized(RnnConfig{}, 4);
    int calls = 0;
    const auto hist = initial_train(rx, link, s, [&](int, int, double) { ++calls; });
    REQUIRE(hist.iteration_loss.size() == 100);
    CHECK(hist.epoch_loss.size() == 2);
    CHECK(calls == 100);
    const double first = std::accumulate(hist.iteration_loss.begin(), hist.iteration_loss.begin() + 10, 0.0);
    const double last = std::accumulate(hist.iteration_loss.end() - 10, hist.iteration_loss.end(), 0.0);
    CHECK(last < first);
    CHECK(hist.epoch_loss[1] < hist.epoch_loss[0]);
    CHECK(rx.adam().step == 100);
}

TEST_CASE("universal training is reproducible")
{
    Transceiver link;
    TrainingSchedule s;
    s.epochs = 2;
    s.iterations_per_epoch = 2;
    s.batch_size = 3;
    s.late_phase_epoch = 1;
    auto a = RnnReceiver::initialized(RnnConfig{6, 4, 4}, 5);
    auto b = RnnReceiver::initialized(RnnConfig{6, 4, 4}, 5);
    const auto ha = initial_train(a, link, s);
    const auto hb = initial_train(b, link, s);
    CHECK(ha.iteration_loss == hb.iteration_loss);
    CHECK(a.network().params() == b.network().params());
    CHECK(a.adam().m == b.adam().m);
    CHECK(a.adam().v == b.adam().v);
}

TEST_CASE("checkpoint round trip")
{
    Transceiver link;
    auto rx = RnnReceiver::initialized(RnnConfig{5, 3, 4}, 6);
    TrainingSchedule s;
    s.epochs = 1;
    s.iterations_per_epoch = 2;
    s.batch_size = 2;
    initial_train(rx, link, s);
    const auto path = temp_path("rt.ckpt");
    save_checkpoint(path, rx, {{"note", "unit"}});
    const auto back = load_checkpoint(path);
    CHECK(back.config().lstm_units == 5);
    CHECK(back.config().dense_units == 3);
    CHECK(back.network().params() == rx.network().params());
    CHECK(back.adam().m == rx.adam().m);
    CHECK(back.adam().v == rx.adam().v);
    CHECK(back.adam().step == rx.adam().step);
    CHECK(load_checkpoint_metadata(path).at("note") == "unit");

    const auto json_path = temp_path("rt.json");
    export_container_json(path, json_path);
    std::ifstream in(json_path);
    const auto doc = nlohmann::json::parse(in);
    CHECK(doc.at("format") == "adarx-checkpoint");
    const auto &first = doc.at("params").at(0);
    CHECK(first.at("name") == "lstm1.fwd.kernel");
    CHECK(first.at("shape") == nlohmann::json::array({20, 7}));
    CHECK(first.at("data").size() == 140u);
    CHECK(first.at("data").at(3).get<double>() == Approx(rx.network().params()[3]).epsilon(1e-6));
}

TEST_CASE("container errors")
{
    CHECK_THROWS_AS(load_checkpoint("/nonexistent/dir/x.ckpt"), IoError);
    const auto bad = temp_path("bad.ckpt");
    {
        std::ofstream out(bad);
        out << "not cbor at all";
    }
    CHECK_THROWS_AS(load_checkpoint(bad), IoError);
    CHECK_THROWS_AS(save_checkpoint("/nonexistent/dir/x.ckpt", RnnReceiver(RnnConfig{2, 2, 4})), IoError);

    // A valid container that is not a checkpoint.
    const auto other = temp_path("other.cbor");
    write_container(other, {{"format", "something-else"}});
    CHECK_THROWS_AS(load_checkpoint(other), IoError);
}

TEST_CASE("tensor helpers")
{
    const std::vector<float> f = {1.5f, -2.0f, 3.25f, 0.0f, 7.0f, 8.0f};
    const auto t = make_tensor("w", std::span<const float>(f), {2, 3});
    CHECK(t.at("dtype") == "f32");
    CHECK(tensor_shape(t) == std::vector<std::int64_t>{2, 3});
    CHECK(tensor_f32(t) == f);
    CHECK_THROWS(tensor_f64(t));
    const std::vector<double> d = {1.0, 2.0};
    CHECK(tensor_f64(make_tensor("d", std::span<const double>(d), {2})) == d);
    const std::vector<std::uint8_t> u = {0, 1, 1};
    CHECK(tensor_u8(make_tensor("u", std::span<const std::uint8_t>(u), {3})) == u);
    CHECK_THROWS(make_tensor("bad", std::span<const float>(f), {4, 4}));
    const auto readable = tensor_to_readable(t);
    CHECK(readable.at("data").at(2).get<double>() == 3.25);
}
