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

#include "adarx/ofdm_link.hpp"
#include "adarx/rng.hpp"

#include <cmath>
#include <limits>

namespace adarx {

PilotPattern build_pilot_pattern(const FrameGeometry &geometry, std::uint64_t rng_seed)
{
    geometry.validate();
    PilotPattern p;
    p.num_symbols = geometry.num_symbols;
    p.num_subcarriers = geometry.num_subcarriers;
    p.mask.assign(geometry.grid_size(), 0);
    p.symbols = CMatrix::Zero(geometry.num_symbols, geometry.num_subcarriers);

    Rng rng(rng_seed);
    const double a = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < geometry.num_symbols; ++k) {
        for (int n = 0; n < geometry.num_subcarriers; ++n) {
            const int pos = k * geometry.num_subcarriers + n;
            if (k % geometry.pilot_time_spacing == 0 && n % geometry.pilot_freq_spacing == 0) {
                const auto q = rng() >> 62;
                p.mask[pos] = 1;
                p.symbols(k, n) = Complex{(q & 1) ? -a : a, (q & 2) ? -a : a};
                p.pilot_positions.push_back(pos);
            } else {
                p.data_positions.push_back(pos);
            }
        }
    }
    return p;
}

const std::array<Complex, 16> &qam16_constellation()
{
    static const std::array<Complex, 16> points = [] {
        // Gray order of the four amplitude levels for a two-bit label.
        constexpr double level[4] = {-3.0, -1.0, 3.0, 1.0};  // 00, 01, 10, 11
        const double norm = 1.0 / std::sqrt(10.0);
        std::array<Complex, 16> pts{};
        for (int idx = 0; idx < 16; ++idx)
            pts[idx] = Complex{level[idx >> 2] * norm, level[idx & 3] * norm};
        return pts;
    }();
    return points;
}

FrameGrid map_bits_to_frame(std::span<const std::uint8_t> bits, const PilotPattern &pattern,
                            const FrameGeometry &geometry)
{
    if (pattern.num_symbols != geometry.num_symbols ||
        pattern.num_subcarriers != geometry.num_subcarriers)
        throw InvalidArgument("map_bits_to_frame: pilot pattern does not match geometry");
    const std::size_t expected = static_cast<std::size_t>(pattern.num_data()) * kBitsPerSymbol;
    if (bits.size() != expected)
        throw InvalidArgument("map_bits_to_frame: expected " + std::to_string(expected) +
                              " bits, got " + std::to_string(bits.size()));

    const auto &qam = qam16_constellation();
    FrameGrid grid;
    grid.x = pattern.symbols;
    grid.bit_map = pattern.data_positions;
    Complex *x = grid.x.data();
    for (int d = 0; d < pattern.num_data(); ++d) {
        int idx = 0;
        for (int j = 0; j < kBitsPerSymbol; ++j)
            idx = (idx << 1) | (bits[static_cast<std::size_t>(d) * kBitsPerSymbol + j] & 1);
        x[pattern.data_positions[d]] = qam[idx];
    }
    return grid;
}

BitVector demap_hard(const CMatrix &y, const CMatrix &h, const PilotPattern &pattern)
{
    const auto &qam = qam16_constellation();
    BitVector bits(static_cast<std::size_t>(pattern.num_data()) * kBitsPerSymbol);
    const Complex *yp = y.data();
    const Complex *hp = h.data();
    for (int d = 0; d < pattern.num_data(); ++d) {
        const int pos = pattern.data_positions[d];
        const Complex z = yp[pos] / hp[pos];
        int best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 16; ++i) {
            const double dist = std::norm(z - qam[i]);
            if (dist < best_dist) {
                best_dist = dist;
                best = i;
            }
        }
        for (int j = 0; j < kBitsPerSymbol; ++j)
            bits[static_cast<std::size_t>(d) * kBitsPerSymbol + j] =
                static_cast<std::uint8_t>(qam16_bit(best, j));
    }
    return bits;
}

double ebn0_to_sigma(double ebn0_db, int bits_per_symbol, double code_rate)
{
    if (bits_per_symbol < 1)
        throw InvalidArgument("ebn0_to_sigma: bits_per_symbol must be >= 1");
    if (!(code_rate > 0.0 && code_rate <= 1.0))
        throw InvalidArgument("ebn0_to_sigma: code rate must be in (0, 1]");
    return std::sqrt(1.0 / (bits_per_symbol * code_rate * std::pow(10.0, ebn0_db / 10.0)));
}

NoiseSpec make_noise_spec(double ebn0_db, int bits_per_symbol, double code_rate)
{
    return {ebn0_to_sigma(ebn0_db, bits_per_symbol, code_rate), ebn0_db};
}

CMatrix apply_channel(const CMatrix &x, const CMatrix &h, double sigma, Rng &rng)
{
    if (x.rows() != h.rows() || x.cols() != h.cols())
        throw InvalidArgument("apply_channel: shape mismatch between X and H");
    CMatrix y = h.cwiseProduct(x);
    if (sigma > 0.0) {
        const double var = sigma * sigma;
        for (Eigen::Index i = 0; i < y.size(); ++i)
            y.data()[i] += complex_normal(rng, var);
    }
    return y;
}

CMatrix ls_estimate_at_pilots(const CMatrix &y, const PilotPattern &pattern)
{
    CMatrix h = CMatrix::Zero(y.rows(), y.cols());
    for (int pos : pattern.pilot_positions)
        h.data()[pos] = y.data()[pos] / pattern.symbols.data()[pos];
    return h;
}

}  // namespace adarx
