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

#ifndef ADARX_BASELINE_RX_HPP
#define ADARX_BASELINE_RX_HPP

#include "adarx/channel_model.hpp"
#include "adarx/fec.hpp"
#include "adarx/ofdm_link.hpp"

#include <array>
#include <span>

namespace adarx {

// Second-order channel statistics, separable in time and frequency.
struct CorrelationModel {
    std::vector<double> time;   // r_t(lag) = J0(2 pi f_D lag T_S)
    std::vector<Complex> freq;  // r_f(lag) = E[H_{n+lag} H*_n]
    double noise_var = 0.0;

    Eigen::MatrixXd time_matrix() const;   // R_t(k, k') = r_t(|k - k'|)
    Eigen::MatrixXcd freq_matrix() const;  // R_f(n, n') = r_f(n - n'), Hermitian
};

// Correlation matched to the true channel model parameters.
CorrelationModel genie_correlation(const ChannelParams &params, const FrameGeometry &geometry,
                                   double noise_var);

// Noisy direct observations o = H + e of the channel. Positions without an
// observation carry an infinite variance.
struct Observations {
    CMatrix value;
    RMatrix variance;
};

Observations pilot_observations(const CMatrix &h_ls, const PilotPattern &pattern, double noise_var);

// Soft symbol estimates from bit LLRs (frame order). Pilot positions hold the
// known pilot with zero variance.
struct SoftSymbols {
    CMatrix mean;
    RMatrix variance;
};

SoftSymbols soft_symbols(std::span<const double> frame_llr, const PilotPattern &pattern);

// Pilots plus data symbols used as virtual pilots: o = y / mean with effective
// noise (sigma^2 + symbol variance) / |mean|^2. Symbols with a mean too close
// to zero carry no information and are left unobserved.
Observations data_aided_observations(const CMatrix &y, const PilotPattern &pattern,
                                     const SoftSymbols &symbols, double noise_var);

struct ChannelEstimate {
    CMatrix h;
    RMatrix err_var;
};

// Full-grid LMMSE under the separable prior R_t (x) R_f, computed in the
// low-rank coefficient space of the two factors. The regularization is added
// to every observation variance.
ChannelEstimate lmmse_estimate(const Observations &obs, const CorrelationModel &corr,
                               double regularization = 1e-9);

// Exact APP demapping of one 16-QAM symbol. Returns extrinsic LLRs: the prior
// of each bit is used for the other three bits only. Infinite priors are allowed.
std::array<double, kBitsPerSymbol> app_demap_symbol(Complex y, Complex h, double err_var,
                                                     double noise_var,
                                                     std::span<const double> priors = {});

// APP LLRs for every data bit of a frame (frame order). The effective noise of
// constellation point x is sigma^2 + err_var |x|^2.
std::vector<double> app_demap(const CMatrix &y, const ChannelEstimate &estimate, double sigma,
                              const PilotPattern &pattern, std::span<const double> priors = {});

struct IeddOptions {
    int outer_loops = 4;
    int bp_iterations_per_loop = 5;
    double regularization = 1e-9;
};

// LMMSE iterative estimation, detection and decoding. When `fixed_estimate` is
// given it replaces the LMMSE estimator in every loop.
DecodeResult iedd_receive(const CMatrix &y, const PilotPattern &pattern, const CorrelationModel &corr,
                          double sigma, const FrameCoding &coding, const IeddOptions &options = {},
                          const ChannelEstimate *fixed_estimate = nullptr);

struct IddOptions {
    int iterations = 20;
    bool demapper_feedback = true;
};

// Lower bound: the true H is known; the demapper receives decoder feedback after
// every single BP iteration.
DecodeResult perfect_knowledge_idd(const CMatrix &y, const CMatrix &h, double sigma,
                                   const PilotPattern &pattern, const FrameCoding &coding,
                                   const IddOptions &options = {});

}  // namespace adarx

#endif
