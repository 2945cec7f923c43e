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

#include "adarx/channel_model.hpp"
#include "adarx/rng.hpp"

#include <cmath>

namespace adarx {

void ChannelParams::validate() const
{
    if (num_taps < 1)
        throw InvalidArgument("channel: num_taps must be >= 1");
    if (!(velocity_kmh >= 0.0))
        throw InvalidArgument("channel: velocity must be >= 0");
    if (!(tap_spacing_s > 0.0))
        throw InvalidArgument("channel: tap spacing must be > 0");
    if (!(decay_total_db <= 0.0))
        throw InvalidArgument("channel: decay_total_db must be <= 0");
    if (!(carrier_freq_hz > 0.0))
        throw InvalidArgument("channel: carrier frequency must be > 0");
}

std::vector<double> PdpWeights::powers() const
{
    std::vector<double> p(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i)
        p[i] = weights[i] * weights[i];
    return p;
}

PdpWeights compute_pdp_weights(int num_taps, double decay_total_db)
{
    if (num_taps < 1)
        throw InvalidArgument("compute_pdp_weights: num_taps must be >= 1");
    if (!(decay_total_db <= 0.0))
        throw InvalidArgument("compute_pdp_weights: decay_total_db must be <= 0");

    PdpWeights pdp;
    if (num_taps == 1) {
        pdp.weights = {1.0};
        return pdp;
    }

    // beta^(L-1) = p_{L-1} / p_0. The (1 - beta) factor cancels in the normalization.
    const double beta = std::pow(10.0, decay_total_db / 10.0 / (num_taps - 1));
    std::vector<double> p(num_taps);
    double total = 0.0;
    for (int l = 0; l < num_taps; ++l) {
        p[l] = std::pow(beta, l);
        total += p[l];
    }
    pdp.weights.resize(num_taps);
    for (int l = 0; l < num_taps; ++l)
        pdp.weights[l] = std::sqrt(p[l] / total);
    pdp.decay_beta = beta;
    return pdp;
}

double doppler_frequency(double velocity_kmh, double carrier_freq_hz)
{
    if (!(velocity_kmh >= 0.0))
        throw InvalidArgument("doppler_frequency: velocity must be >= 0");
    return velocity_kmh / 3.6 * carrier_freq_hz / kSpeedOfLight;
}

std::vector<TapProcess> generate_tap_processes(const ChannelParams &params,
                                               std::span<const double> time_instants,
                                               const PdpWeights &pdp, Rng &rng)
{
    params.validate();
    if (time_instants.empty())
        throw InvalidArgument("generate_tap_processes: no time instants");
    if (pdp.weights.size() != static_cast<std::size_t>(params.num_taps))
        throw InvalidArgument("generate_tap_processes: PDP size does not match num_taps");

    const double fd = doppler_frequency(params.velocity_kmh, params.carrier_freq_hz);
    std::vector<TapProcess> taps(params.num_taps);

    std::vector<double> omega(kSinusoidsPerTap);
    std::vector<Complex> weight(kSinusoidsPerTap);
    for (int l = 0; l < params.num_taps; ++l) {
        TapProcess &tap = taps[l];
        tap.doppler_freq_hz = fd;
        tap.power = pdp.weights[l] * pdp.weights[l];
        tap.gains.resize(time_instants.size());

        if (fd == 0.0) {
            const Complex a = complex_normal(rng, tap.power);
            std::fill(tap.gains.begin(), tap.gains.end(), a);
            continue;
        }

        const double scale = pdp.weights[l] / std::sqrt(static_cast<double>(kSinusoidsPerTap));
        for (int s = 0; s < kSinusoidsPerTap; ++s) {
            const double angle = uniform_real(rng, 0.0, 2.0 * kPi);
            omega[s] = 2.0 * kPi * fd * std::cos(angle);
            weight[s] = scale * complex_normal(rng, 1.0);
        }
        for (std::size_t i = 0; i < time_instants.size(); ++i) {
            Complex sum{0.0, 0.0};
            for (int s = 0; s < kSinusoidsPerTap; ++s)
                sum += weight[s] * std::polar(1.0, omega[s] * time_instants[i]);
            tap.gains[i] = sum;
        }
    }
    return taps;
}

ChannelRealization sample_channel_matrix(const ChannelParams &params,
                                         const FrameGeometry &geometry, Rng &rng)
{
    params.validate();
    geometry.validate();
    const int nt = geometry.num_symbols;
    const int nsub = geometry.num_subcarriers;

    std::vector<double> times(nt);
    for (int k = 0; k < nt; ++k)
        times[k] = k * geometry.symbol_duration_s;

    const PdpWeights pdp = compute_pdp_weights(params.num_taps, params.decay_total_db);
    const auto taps = generate_tap_processes(params, times, pdp, rng);

    // Per-tap phase ramp across subcarriers: exp(-j 2 pi f_n tau_l).
    const double df = geometry.subcarrier_spacing_hz();
    CMatrix ramp(params.num_taps, nsub);
    for (int l = 0; l < params.num_taps; ++l)
        for (int n = 0; n < nsub; ++n)
            ramp(l, n) = std::polar(1.0, -2.0 * kPi * n * df * l * params.tap_spacing_s);

    ChannelRealization out{CMatrix::Zero(nt, nsub), params};
    for (int k = 0; k < nt; ++k)
        for (int l = 0; l < params.num_taps; ++l)
            out.h.row(k) += taps[l].gains[k] * ramp.row(l);
    return out;
}

ChannelRealization sample_channel_matrix(const ChannelParams &params,
                                         const FrameGeometry &geometry)
{
    Rng rng(params.rng_seed);
    return sample_channel_matrix(params, geometry, rng);
}

std::vector<Complex> frequency_correlation(const PdpWeights &pdp, double tap_spacing_s,
                                           double subcarrier_spacing_hz, int num_lags)
{
    std::vector<Complex> r(num_lags, Complex{0.0, 0.0});
    for (int lag = 0; lag < num_lags; ++lag)
        for (std::size_t l = 0; l < pdp.weights.size(); ++l)
            r[lag] += pdp.weights[l] * pdp.weights[l] *
                      std::polar(1.0, -2.0 * kPi * lag * subcarrier_spacing_hz * l * tap_spacing_s);
    return r;
}

std::vector<double> time_correlation(double doppler_hz, double symbol_duration_s, int num_lags)
{
    std::vector<double> r(num_lags);
    for (int lag = 0; lag < num_lags; ++lag)
        r[lag] = std::cyl_bessel_j(0.0, 2.0 * kPi * doppler_hz * lag * symbol_duration_s);
    return r;
}

}  // namespace adarx
