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

#ifndef ADARX_CHANNEL_MODEL_HPP
#define ADARX_CHANNEL_MODEL_HPP

#include "adarx/geometry.hpp"
#include "adarx/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace adarx {

inline constexpr double kSpeedOfLight = 299'792'458.0;

// Number of sinusoids summed per tap by the Doppler process generator.
inline constexpr int kSinusoidsPerTap = 32;

// Tapped-delay-line channel with an exponentially decaying power delay profile
// and Jakes (Clarke) time variation.
struct ChannelParams {
    int num_taps = 8;
    double velocity_kmh = 0.0;
    double carrier_freq_hz = 5.9e9;
    double tap_spacing_s = 1e-7;    // first tap at 0 s
    double decay_total_db = -13.0;  // power of last tap relative to first
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct PdpWeights {
    std::vector<double> weights;       // b_l, sum of squares is 1
    std::optional<double> decay_beta;  // undefined for a single tap

    // Average tap powers p_l = b_l^2.
    std::vector<double> powers() const;
};

// Exponential PDP weights b_l = sqrt(1 - beta) beta^(l/2) / gamma, with beta chosen
// so that p_{L-1}/p_0 matches decay_total_db and gamma normalizing the total power.
PdpWeights compute_pdp_weights(int num_taps, double decay_total_db);

// Maximum Doppler shift in Hz for a receiver moving at velocity_kmh.
double doppler_frequency(double velocity_kmh, double carrier_freq_hz);

struct TapProcess {
    std::vector<Complex> gains;  // a_l(t) at the requested time instants
    double doppler_freq_hz = 0.0;
    double power = 0.0;          // p_l
};

// One independent Rayleigh process per tap with autocorrelation p_l J0(2 pi f_D dt).
// Each process is a sum of kSinusoidsPerTap sinusoids with random arrival angles
// and complex Gaussian weights; a static receiver gets one constant draw per tap.
std::vector<TapProcess> generate_tap_processes(const ChannelParams &params,
                                               std::span<const double> time_instants,
                                               const PdpWeights &pdp, Rng &rng);

struct ChannelRealization {
    CMatrix h;  // num_symbols x num_subcarriers
    ChannelParams params;
};

// Samples H(t, f) at symbol starts k T_S and subcarrier frequencies n df.
ChannelRealization sample_channel_matrix(const ChannelParams &params,
                                         const FrameGeometry &geometry, Rng &rng);

// Same, seeded from params.rng_seed.
ChannelRealization sample_channel_matrix(const ChannelParams &params,
                                         const FrameGeometry &geometry);

// Frequency correlation E[H_{n+lag} H*_n] for lags 0..num_lags-1.
std::vector<Complex> frequency_correlation(const PdpWeights &pdp, double tap_spacing_s,
                                           double subcarrier_spacing_hz, int num_lags);

// Time correlation E[a(t + lag T_S) a*(t)] / p = J0(2 pi f_D lag T_S).
std::vector<double> time_correlation(double doppler_hz, double symbol_duration_s, int num_lags);

}  // namespace adarx

#endif
