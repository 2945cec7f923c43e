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

#ifndef ADARX_TRAINING_HPP
#define ADARX_TRAINING_HPP

#include "adarx/rnn_receiver.hpp"
#include "adarx/transceiver.hpp"

#include <functional>

namespace adarx {

// Universal training schedule. Defaults are the full-scale values; every field
// can be scaled down for desk runs.
struct TrainingSchedule {
    int epochs = 100;
    int iterations_per_epoch = 1000;
    int batch_size = 128;
    double velocity_min_kmh = 0.0;
    double velocity_max_kmh = 200.0;
    double ebn0_min_db = 8.0;
    double ebn0_max_db = 30.0;
    int taps_min_early = 4;
    int taps_max_early = 10;
    int taps_min_late = 1;
    int taps_max_late = 14;
    int late_phase_epoch = 50;  // first epoch (0-based) using the late tap range
    // Pilot-densification warm-up. Each data position is revealed as an extra
    // pilot with probability reveal_start, decaying linearly to zero over
    // reveal_iterations global iterations. 0 disables it.
    double reveal_start = 0.0;
    int reveal_iterations = 0;
    TrainConfig train;

    void validate() const;
};

// Number of channel taps for a training frame in the given 0-based epoch.
int draw_taps(const TrainingSchedule &schedule, int epoch, Rng &rng);

// Random channel conditions for one training frame.
struct FrameConditions {
    ChannelParams channel;
    double ebn0_db = 0.0;
};

FrameConditions draw_conditions(const TrainingSchedule &schedule, int epoch, Rng &rng);

// Transmits one frame and packages it with its transmitted frame bits as labels.
TrainingFrame make_training_frame(const Transceiver &link, const ChannelParams &channel, double ebn0_db,
                                  Rng &rng, const InterferenceSpec &interference = {});

// Reveal probability of the warm-up at a global iteration index.
double reveal_probability(const TrainingSchedule &schedule, long iteration);

// Like make_training_frame, but each data position is also fed to the network
// as a pilot (its symbol and LS estimate) with probability `reveal`.
TrainingFrame make_revealed_frame(const Transceiver &link, const ChannelParams &channel, double ebn0_db,
                                  double reveal, Rng &rng);

struct TrainingHistory {
    std::vector<double> iteration_loss;  // loss before each update
    std::vector<double> epoch_loss;      // mean per epoch
};

using TrainingCallback = std::function<void(int epoch, int iteration, double loss)>;

// Runs the universal training schedule with fresh random frames every
// iteration. Frames are generated from derive_seed(train.rng_seed, {epoch, it, b}).
TrainingHistory initial_train(RnnReceiver &receiver, const Transceiver &link, const TrainingSchedule &schedule,
                              const TrainingCallback &callback = {});

}  // namespace adarx

#endif
