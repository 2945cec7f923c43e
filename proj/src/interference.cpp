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

#include "adarx/interference.hpp"
#include "adarx/rng.hpp"

#include <cmath>

namespace adarx {

InterferenceSpec InterferenceSpec::outer_four(int num_subcarriers, double penalty_db)
{
    if (num_subcarriers < 4)
        throw InvalidArgument("outer_four: need at least four subcarriers");
    return {{0, 1, num_subcarriers - 2, num_subcarriers - 1}, penalty_db};
}

CMatrix apply_interference(const CMatrix &y, const InterferenceSpec &spec, double sigma, Rng &rng)
{
    CMatrix out = y;
    if (!spec.active())
        return out;
    const double extra = (std::pow(10.0, spec.penalty_db / 10.0) - 1.0) * sigma * sigma;
    if (extra < 0.0)
        throw InvalidArgument("apply_interference: penalty must be >= 0 dB");
    for (int n : spec.subcarriers) {
        if (n < 0 || n >= out.cols())
            throw InvalidArgument("apply_interference: subcarrier index out of range");
    }
    for (Eigen::Index k = 0; k < out.rows(); ++k)
        for (int n : spec.subcarriers)
            out(k, n) += complex_normal(rng, extra);
    return out;
}

}  // namespace adarx
