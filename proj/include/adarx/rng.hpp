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

#ifndef ADARX_RNG_HPP
#define ADARX_RNG_HPP

#include "adarx/types.hpp"

#include <initializer_list>

namespace adarx {

// Derives a seed for an independent stream from a base seed and a path of
// indices (e.g. {point, frame}). Distinct paths give unrelated streams, so
// frames can be generated in any order or in parallel.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

inline Rng make_stream(std::uint64_t base, std::initializer_list<std::uint64_t> path)
{
    return Rng(derive_seed(base, path));
}

// Circularly symmetric complex Gaussian with E|z|^2 = variance.
Complex complex_normal(Rng &rng, double variance = 1.0);

double uniform_real(Rng &rng, double lo, double hi);

// Uniform integer in [lo, hi].
int uniform_int(Rng &rng, int lo, int hi);

BitVector random_bits(Rng &rng, std::size_t count);

}  // namespace adarx

#endif
