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

#ifndef ADARX_GEOMETRY_HPP
#define ADARX_GEOMETRY_HPP

#include "adarx/types.hpp"

namespace adarx {

// Time/frequency layout of one OFDM frame. Defaults are the 10 MHz,
// 64-subcarrier, 36-symbol configuration with a 15 x 5 rectangular pilot grid.
struct FrameGeometry {
    int num_symbols = 36;         // n_T
    int num_subcarriers = 64;     // N_Sub
    int pilot_time_spacing = 15;  // d_T
    int pilot_freq_spacing = 5;   // d_F
    double symbol_duration_s = 8e-6;  // includes the cyclic prefix
    double bandwidth_hz = 10e6;

    double subcarrier_spacing_hz() const { return bandwidth_hz / num_subcarriers; }
    int grid_size() const { return num_symbols * num_subcarriers; }
    double frame_duration_s() const { return num_symbols * symbol_duration_s; }

    void validate() const
    {
        if (num_symbols < 1 || num_subcarriers < 1)
            throw InvalidArgument("frame geometry: grid dimensions must be positive");
        if (pilot_time_spacing < 1 || pilot_time_spacing > num_symbols)
            throw InvalidArgument("frame geometry: pilot time spacing out of range");
        if (pilot_freq_spacing < 1 || pilot_freq_spacing > num_subcarriers)
            throw InvalidArgument("frame geometry: pilot frequency spacing out of range");
        if (!(symbol_duration_s > 0.0) || !(bandwidth_hz > 0.0))
            throw InvalidArgument("frame geometry: durations and bandwidth must be positive");
    }
};

}  // namespace adarx

#endif
