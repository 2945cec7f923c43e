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

#include "adarx/training.hpp"
#include "adarx/rng.hpp"

#include <numeric>
#include <random>

namespace adarx {

void TrainingSchedule::validate() const
{
    if (epochs < 1 || iterations_per_epoch < 1 || batch_size < 1)
        throw InvalidArgument("TrainingSchedule: epochs, iterations and batch size must be >= 1");
    if (velocity_min_kmh < 0.0 || velocity_max_kmh < velocity_min_kmh)
        throw InvalidArgument("TrainingSchedule: invalid velocity range");
    if (ebn0_max_db < ebn0_min_db)
        throw InvalidArgument("TrainingSchedule: invalid Eb/N0 range");
    if (taps_min_early < 1 || taps_max_early < taps_min_early || taps_min_late < 1 ||
        taps_max_late < taps_min_late)
        throw InvalidArgument("TrainingSchedule: invalid tap ranges");
    if (!(reveal_start >= 0.0 && reveal_start <= 1.0) || reveal_iterations < 0)
        throw InvalidArgument("TrainingSchedule: reveal_start must be in [0, 1] and reveal_iterations >= 0");
    train.validate();
}

int draw_taps(const TrainingSchedule &schedule, int epoch, Rng &rng)
{
    if (epoch < schedule.late_phase_epoch)
        return uniform_int(rng, schedule.taps_min_early, schedule.taps_max_early);
    return uniform_int(rng, schedule.taps_min_late, schedule.taps_max_late);
}

FrameConditions draw_conditions(const TrainingSchedule &schedule, int epoch, Rng &rng)
{
    FrameConditions c;
    c.channel.velocity_kmh = uniform_real(rng, schedule.velocity_min_kmh, schedule.velocity_max_kmh);
    c.ebn0_db = uniform_real(rng, schedule.ebn0_min_db, schedule.ebn0_max_db);
    c.channel.num_taps = draw_taps(schedule, epoch, rng);
    return c;
}

TrainingFrame make_training_frame(const Transceiver &link, const ChannelParams &channel, double ebn0_db, Rng &rng,
                                  const InterferenceSpec &interference)
{
    auto tx = link.transmit(channel, ebn0_db, rng, interference);
    return {assemble_input(tx.grid.y, link.pilots(), tx.noise.sigma), std::move(tx.frame_bits)};
}

double reveal_probability(const TrainingSchedule &schedule, long iteration)
{
    if (schedule.reveal_iterations <= 0 || iteration >= schedule.reveal_iterations)
        return 0.0;
    return schedule.reveal_start * (1.0 - static_cast<double>(iteration) / schedule.reveal_iterations);
}

TrainingFrame make_revealed_frame(const Transceiver &link, const ChannelParams &channel, double ebn0_db,
                                  double reveal, Rng &rng)
{
    auto tx = link.transmit(channel, ebn0_db, rng);
    const auto &pattern = link.pilots();
    CMatrix x_known = pattern.symbols;
    CMatrix h_ls = ls_estimate_at_pilots(tx.grid.y, pattern);
    if (reveal > 0.0) {
        std::bernoulli_distribution coin(reveal);
        for (int pos : pattern.data_positions) {
            if (coin(rng)) {
                x_known.data()[pos] = tx.grid.x.data()[pos];
                h_ls.data()[pos] = tx.grid.y.data()[pos] / tx.grid.x.data()[pos];
            }
        }
    }
    return {assemble_input(tx.grid.y, x_known, h_ls, tx.noise.sigma), std::move(tx.frame_bits)};
}

TrainingHistory initial_train(RnnReceiver &receiver, const Transceiver &link, const TrainingSchedule &schedule,
                              const TrainingCallback &callback)
{
    schedule.validate();
    TrainingHistory history;
    std::vector<TrainingFrame> batch(static_cast<std::size_t>(schedule.batch_size));
    for (int epoch = 0; epoch < schedule.epochs; ++epoch) {
        double epoch_sum = 0.0;
        for (int it = 0; it < schedule.iterations_per_epoch; ++it) {
            const double reveal =
                reveal_probability(schedule, static_cast<long>(epoch) * schedule.iterations_per_epoch + it);
            for (int b = 0; b < schedule.batch_size; ++b) {
                Rng rng = make_stream(schedule.train.rng_seed, {static_cast<std::uint64_t>(epoch),
                                                                static_cast<std::uint64_t>(it),
                                                                static_cast<std::uint64_t>(b)});
                const auto cond = draw_conditions(schedule, epoch, rng);
                batch[b] = make_revealed_frame(link, cond.channel, cond.ebn0_db, reveal, rng);
            }
            const double loss = receiver.train_step(batch, link.pilots(), link.coding(), schedule.train);
            history.iteration_loss.push_back(loss);
            epoch_sum += loss;
            if (callback)
                callback(epoch, it, loss);
        }
        history.epoch_loss.push_back(epoch_sum / schedule.iterations_per_epoch);
    }
    return history;
}

}  // namespace adarx
