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

#ifndef ADARX_TRANSCEIVER_HPP
#define ADARX_TRANSCEIVER_HPP

#include "adarx/channel_model.hpp"
#include "adarx/fec.hpp"
#include "adarx/geometry.hpp"
#include "adarx/interference.hpp"
#include "adarx/ofdm_link.hpp"

namespace adarx {

struct LinkConfig {
    FrameGeometry geometry;
    std::uint64_t pilot_seed = 0x5eed0001;
    std::uint64_t interleaver_seed = 0x5eed0002;
    bool identity_interleaver = false;
};

// Everything the simulator knows about one transmitted frame.
struct Transmission {
    BitVector info;        // num_codewords * k
    BitVector coded;       // num_codewords * n, decoder order
    BitVector filler;      // frame padding, excluded from BER and training
    BitVector frame_bits;  // interleaved bits as mapped onto the grid
    FrameGrid grid;        // x and y
    CMatrix h;
    ChannelParams channel;
    NoiseSpec noise;
};

// Transmitter plus channel for the fixed link configuration: LDPC encoding,
// interleaving, 16-QAM mapping, fading channel, AWGN and optional interference.
class Transceiver {
public:
    explicit Transceiver(LinkConfig config = {}, const LdpcCode &code = LdpcCode::standard());

    const LinkConfig &config() const { return config_; }
    const FrameGeometry &geometry() const { return config_.geometry; }
    const PilotPattern &pilots() const { return pilots_; }
    const FrameCoding &coding() const { return coding_; }
    const LdpcCode &code() const { return coding_.code(); }
    double code_rate() const { return code().rate(); }
    int frame_bits() const { return pilots_.num_data() * kBitsPerSymbol; }

    Transmission transmit(const ChannelParams &channel, double ebn0_db, Rng &rng,
                          const InterferenceSpec &interference = {}) const;

    CMatrix ls_estimate(const Transmission &tx) const { return ls_estimate_at_pilots(tx.grid.y, pilots_); }

    // Information bit errors of a decoded frame.
    std::size_t count_info_errors(const Transmission &tx, std::span<const std::uint8_t> info_hat) const;

private:
    LinkConfig config_;
    PilotPattern pilots_;
    FrameCoding coding_;
};

}  // namespace adarx

#endif
