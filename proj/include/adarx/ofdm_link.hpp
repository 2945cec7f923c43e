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

#ifndef ADARX_OFDM_LINK_HPP
#define ADARX_OFDM_LINK_HPP

#include "adarx/geometry.hpp"
#include "adarx/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace adarx {

inline constexpr int kBitsPerSymbol = 4;  // 16-QAM

// Rectangular pilot grid anchored at (0, 0): pilots at every d_T-th symbol and
// every d_F-th subcarrier. Pilot values are seeded QPSK, fixed for a simulation.
struct PilotPattern {
    int num_symbols = 0;
    int num_subcarriers = 0;
    std::vector<std::uint8_t> mask;  // row-major, 1 at pilot positions
    CMatrix symbols;                 // X_p, zero off-mask
    std::vector<int> pilot_positions;  // row-major grid indices, ascending
    std::vector<int> data_positions;   // row-major grid indices, ascending

    int num_pilots() const { return static_cast<int>(pilot_positions.size()); }
    int num_data() const { return static_cast<int>(data_positions.size()); }
    bool is_pilot(int symbol, int subcarrier) const
    {
        return mask[static_cast<std::size_t>(symbol) * num_subcarriers + subcarrier] != 0;
    }
};

PilotPattern build_pilot_pattern(const FrameGeometry &geometry, std::uint64_t rng_seed);

// Gray-mapped 16-QAM with unit average energy. Index bits are (b0 b1 b2 b3) with
// b0 the most significant; b0 b1 select the in-phase level, b2 b3 the quadrature level.
const std::array<Complex, 16> &qam16_constellation();

// Bit j (0 = first bit of the symbol) of constellation index `point`.
inline int qam16_bit(int point, int j) { return (point >> (kBitsPerSymbol - 1 - j)) & 1; }

struct FrameGrid {
    CMatrix x;  // transmitted symbols
    CMatrix y;  // received symbols, empty until a channel is applied
    // bit_map[d] is the grid position of data symbol d; it carries frame bits
    // d * kBitsPerSymbol ... d * kBitsPerSymbol + 3.
    std::vector<int> bit_map;

    int num_data() const { return static_cast<int>(bit_map.size()); }
};

// Places Gray 16-QAM symbols at the data positions (row-major order) and the
// pilot symbols on the pilot grid.
FrameGrid map_bits_to_frame(std::span<const std::uint8_t> bits, const PilotPattern &pattern,
                            const FrameGeometry &geometry);

// Nearest-point hard demapping of y / h at the data positions.
BitVector demap_hard(const CMatrix &y, const CMatrix &h, const PilotPattern &pattern);

struct NoiseSpec {
    double sigma = 0.0;  // per-element complex noise standard deviation
    double ebn0_db = 0.0;
};

// sigma^2 = 1 / (m R_C 10^(Eb/N0 / 10)) at unit average symbol energy.
double ebn0_to_sigma(double ebn0_db, int bits_per_symbol, double code_rate);

NoiseSpec make_noise_spec(double ebn0_db, int bits_per_symbol, double code_rate);

// Y = H o X + N with N ~ CN(0, sigma^2) i.i.d.
CMatrix apply_channel(const CMatrix &x, const CMatrix &h, double sigma, Rng &rng);

// Y / X_p at pilot positions, zero elsewhere.
CMatrix ls_estimate_at_pilots(const CMatrix &y, const PilotPattern &pattern);

}  // namespace adarx

#endif
