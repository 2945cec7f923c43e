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

#include "adarx/transceiver.hpp"
#include "adarx/rng.hpp"

namespace adarx {

namespace {

FrameCoding make_coding(const LinkConfig &config, const PilotPattern &pilots, const LdpcCode &code)
{
    const int bits = pilots.num_data() * kBitsPerSymbol;
    if (config.identity_interleaver)
        return FrameCoding(code, bits, Interleaver::identity(bits));
    return FrameCoding(code, bits, config.interleaver_seed);
}

}  // namespace

Transceiver::Transceiver(LinkConfig config, const LdpcCode &code)
    : config_(config), pilots_(build_pilot_pattern(config.geometry, config.pilot_seed)),
      coding_(make_coding(config_, pilots_, code))
{
}

Transmission Transceiver::transmit(const ChannelParams &channel, double ebn0_db, Rng &rng,
                                   const InterferenceSpec &interference) const
{
    Transmission tx;
    tx.channel = channel;
    tx.noise = make_noise_spec(ebn0_db, kBitsPerSymbol, code_rate());
    tx.info = random_bits(rng, coding_.info_bits());
    tx.coded = code().encode(tx.info);
    tx.filler = random_bits(rng, coding_.filler_bits());
    tx.frame_bits = coding_.assemble(tx.coded, tx.filler);
    tx.grid = map_bits_to_frame(tx.frame_bits, pilots_, config_.geometry);
    tx.h = sample_channel_matrix(channel, config_.geometry, rng).h;
    tx.grid.y = apply_channel(tx.grid.x, tx.h, tx.noise.sigma, rng);
    if (interference.active())
        tx.grid.y = apply_interference(tx.grid.y, interference, tx.noise.sigma, rng);
    return tx;
}

std::size_t Transceiver::count_info_errors(const Transmission &tx,
                                           std::span<const std::uint8_t> info_hat) const
{
    if (info_hat.size() != tx.info.size())
        throw InvalidArgument("count_info_errors: length mismatch");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < info_hat.size(); ++i)
        errors += (info_hat[i] & 1) != tx.info[i];
    return errors;
}

}  // namespace adarx
