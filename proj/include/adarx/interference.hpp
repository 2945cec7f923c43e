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

#ifndef ADARX_INTERFERENCE_HPP
#define ADARX_INTERFERENCE_HPP

#include "adarx/types.hpp"

#include <vector>

namespace adarx {

// Side-channel interference: extra white noise on a set of subcarriers that
// raises their noise power by penalty_db. Receivers are not told about it.
struct InterferenceSpec {
    std::vector<int> subcarriers;
    double penalty_db = 0.0;

    bool active() const { return !subcarriers.empty() && penalty_db != 0.0; }

    // Two lowest and two highest subcarriers, 6 dB.
    static InterferenceSpec outer_four(int num_subcarriers, double penalty_db = 6.0);
};

// Adds CN(0, (10^(penalty/10) - 1) sigma^2) to every symbol on the listed
// subcarriers. A 0 dB penalty leaves y untouched and consumes no randomness.
CMatrix apply_interference(const CMatrix &y, const InterferenceSpec &spec, double sigma, Rng &rng);

}  // namespace adarx

#endif
