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

#include "adarx/baseline_rx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adarx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest effective noise variance used by the demapper, so that sigma = 0
// still yields finite (very large) LLRs.
constexpr double kMinNoiseVar = 1e-20;

// Soft symbols whose mean energy falls below this are not used as virtual pilots.
constexpr double kMinVirtualPilotEnergy = 1e-4;

// Eigenvalues of the correlation matrices below this fraction of the largest
// are dropped from the low-rank factors.
constexpr double kEigenFloor = 1e-12;

double softplus(double x)
{
    if (x == kInf)
        return kInf;
    if (x == -kInf)
        return 0.0;
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// log P(bit) for an LLR L = log P(0)/P(1).
double log_bit_prob(double llr, int bit) { return bit ? -softplus(llr) : -softplus(-llr); }

double log_sum_exp(const double *v, int count)
{
    double mx = -kInf;
    for (int i = 0; i < count; ++i)
        mx = std::max(mx, v[i]);
    if (mx == -kInf)
        return -kInf;
    double sum = 0.0;
    for (int i = 0; i < count; ++i)
        sum += std::exp(v[i] - mx);
    return mx + std::log(sum);
}

}  // namespace

Eigen::MatrixXd CorrelationModel::time_matrix() const
{
    const int t = static_cast<int>(time.size());
    Eigen::MatrixXd r(t, t);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j)
            r(i, j) = time[std::abs(i - j)];
    return r;
}

Eigen::MatrixXcd CorrelationModel::freq_matrix() const
{
    const int f = static_cast<int>(freq.size());
    Eigen::MatrixXcd r(f, f);
    for (int i = 0; i < f; ++i)
        for (int j = 0; j < f; ++j)
            r(i, j) = i >= j ? freq[i - j] : std::conj(freq[j - i]);
    return r;
}

CorrelationModel genie_correlation(const ChannelParams &params, const FrameGeometry &geometry,
                                   double noise_var)
{
    params.validate();
    geometry.validate();
    CorrelationModel corr;
    const PdpWeights pdp = compute_pdp_weights(params.num_taps, params.decay_total_db);
    corr.freq = frequency_correlation(pdp, params.tap_spacing_s, geometry.subcarrier_spacing_hz(),
                                      geometry.num_subcarriers);
    corr.time = time_correlation(doppler_frequency(params.velocity_kmh, params.carrier_freq_hz),
                                 geometry.symbol_duration_s, geometry.num_symbols);
    corr.noise_var = noise_var;
    return corr;
}

Observations pilot_observations(const CMatrix &h_ls, const PilotPattern &pattern, double noise_var)
{
    Observations obs{CMatrix::Zero(h_ls.rows(), h_ls.cols()),
                     RMatrix::Constant(h_ls.rows(), h_ls.cols(), kInf)};
    for (int pos : pattern.pilot_positions) {
        obs.value.data()[pos] = h_ls.data()[pos];
        obs.variance.data()[pos] = noise_var;
    }
    return obs;
}

SoftSymbols soft_symbols(std::span<const double> frame_llr, const PilotPattern &pattern)
{
    const std::size_t expected = static_cast<std::size_t>(pattern.num_data()) * kBitsPerSymbol;
    if (frame_llr.size() != expected)
        throw InvalidArgument("soft_symbols: expected one LLR per data bit");
    const auto &qam = qam16_constellation();
    SoftSymbols s{pattern.symbols, RMatrix::Zero(pattern.num_symbols, pattern.num_subcarriers)};
    for (int d = 0; d < pattern.num_data(); ++d) {
        double lp[kBitsPerSymbol][2];
        for (int j = 0; j < kBitsPerSymbol; ++j) {
            const double l = frame_llr[static_cast<std::size_t>(d) * kBitsPerSymbol + j];
            lp[j][0] = log_bit_prob(l, 0);
            lp[j][1] = log_bit_prob(l, 1);
        }
        Complex mean{0.0, 0.0};
        double energy = 0.0;
        for (int i = 0; i < 16; ++i) {
            double logp = 0.0;
            for (int j = 0; j < kBitsPerSymbol; ++j)
                logp += lp[j][qam16_bit(i, j)];
            const double p = std::exp(logp);
            mean += p * qam[i];
            energy += p * std::norm(qam[i]);
        }
        const int pos = pattern.data_positions[d];
        s.mean.data()[pos] = mean;
        s.variance.data()[pos] = std::max(0.0, energy - std::norm(mean));
    }
    return s;
}

Observations data_aided_observations(const CMatrix &y, const PilotPattern &pattern,
                                     const SoftSymbols &symbols, double noise_var)
{
    Observations obs{CMatrix::Zero(y.rows(), y.cols()), RMatrix::Constant(y.rows(), y.cols(), kInf)};
    for (int pos : pattern.pilot_positions) {
        obs.value.data()[pos] = y.data()[pos] / pattern.symbols.data()[pos];
        obs.variance.data()[pos] = noise_var;
    }
    for (int pos : pattern.data_positions) {
        const Complex m = symbols.mean.data()[pos];
        const double e = std::norm(m);
        if (e < kMinVirtualPilotEnergy)
            continue;
        obs.value.data()[pos] = y.data()[pos] / m;
        obs.variance.data()[pos] = (noise_var + symbols.variance.data()[pos]) / e;
    }
    return obs;
}

namespace {

// Columns U sqrt(lambda) of a PSD matrix, dropping eigenvalues below a
// relative floor. G G^H reproduces the matrix up to that floor.
template <typename Mat>
Mat low_rank_factor(const Mat &r)
{
    const Eigen::SelfAdjointEigenSolver<Mat> eig(r);
    const auto &lambda = eig.eigenvalues();
    const double floor = kEigenFloor * std::max(lambda.maxCoeff(), 0.0);
    std::vector<int> keep;
    for (int i = 0; i < lambda.size(); ++i)
        if (lambda(i) > floor)
            keep.push_back(i);
    Mat g(r.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c)
        g.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]) * std::sqrt(lambda(keep[c]));
    return g;
}

}  // namespace

ChannelEstimate lmmse_estimate(const Observations &obs, const CorrelationModel &corr, double regularization)
{
    const int nt = static_cast<int>(obs.value.rows());
    const int nf = static_cast<int>(obs.value.cols());
    if (static_cast<int>(corr.time.size()) != nt || static_cast<int>(corr.freq.size()) != nf)
        throw InvalidArgument("lmmse_estimate: correlation model does not match the grid");

    // H = G_t U G_f^T with vec(U) ~ CN(0, I) reproduces R_t (x) R_f. The
    // posterior of U given o = H + e (independent e) is Gaussian with
    // precision Q = I + sum_i w_i g_i^H g_i and mean Q^-1 sum_i w_i g_i^H o_i.
    const Eigen::MatrixXd gt = low_rank_factor(corr.time_matrix());
    const Eigen::MatrixXcd gf = low_rank_factor(corr.freq_matrix());
    const int rt = static_cast<int>(gt.cols());
    const int rf = static_cast<int>(gf.cols());
    const int r = rt * rf;
    if (r == 0)
        throw InvalidArgument("lmmse_estimate: correlation model is zero");

    Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(r, r);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(r);
    Eigen::VectorXd w(nf);
    Eigen::VectorXcd wo(nf);
    bool any = false;
    for (int k = 0; k < nt; ++k) {
        int count = 0;
        for (int n = 0; n < nf; ++n) {
            const double v = obs.variance(k, n);
            w(n) = 0.0;
            wo(n) = 0.0;
            if (!std::isfinite(v))
                continue;
            if (!(v + regularization > 0.0))
                throw InvalidArgument("lmmse_estimate: observation variance plus regularization must be > 0");
            w(n) = 1.0 / (v + regularization);
            wo(n) = w(n) * obs.value(k, n);
            ++count;
        }
        if (count == 0)
            continue;
        any = true;
        const Eigen::MatrixXcd bk = gf.adjoint() * w.asDiagonal() * gf;  // rf x rf
        const Eigen::VectorXcd ck = gf.adjoint() * wo;                   // rf
        for (int a = 0; a < rt; ++a) {
            rhs.segment(a * rf, rf) += gt(k, a) * ck;
            for (int a2 = 0; a2 < rt; ++a2)
                q.block(a * rf, a2 * rf, rf, rf) += (gt(k, a) * gt(k, a2)) * bk;
        }
    }
    if (!any)
        throw InvalidArgument("lmmse_estimate: no observations");

    const Eigen::LLT<Eigen::MatrixXcd> llt(q);
    const Eigen::VectorXcd u = llt.solve(rhs);
    const Eigen::MatrixXcd um = Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        u.data(), rt, rf);

    ChannelEstimate est{CMatrix(gt.cast<Complex>() * um * gf.transpose()), RMatrix::Zero(nt, nf)};

    // Posterior variance of H(k, n) is |L^-1 g^H|^2 with g = G_t(k,:) (x) G_f(n,:).
    Eigen::MatrixXcd gh(r, static_cast<Eigen::Index>(nt) * nf);
    for (int k = 0; k < nt; ++k)
        for (int n = 0; n < nf; ++n)
            for (int a = 0; a < rt; ++a)
                gh.col(k * nf + n).segment(a * rf, rf) = gt(k, a) * gf.row(n).adjoint();
    llt.matrixL().solveInPlace(gh);
    const Eigen::VectorXd var = gh.colwise().squaredNorm().transpose();
    for (int k = 0; k < nt; ++k)
        for (int n = 0; n < nf; ++n)
            est.err_var(k, n) = var(k * nf + n);
    return est;
}

std::array<double, kBitsPerSymbol> app_demap_symbol(Complex y, Complex h, double err_var, double noise_var,
                                                     std::span<const double> priors)
{
    const auto &qam = qam16_constellation();
    double lp[kBitsPerSymbol][2] = {};
    if (!priors.empty()) {
        if (priors.size() != kBitsPerSymbol)
            throw InvalidArgument("app_demap_symbol: need one prior per bit");
        for (int j = 0; j < kBitsPerSymbol; ++j) {
            lp[j][0] = log_bit_prob(priors[j], 0);
            lp[j][1] = log_bit_prob(priors[j], 1);
        }
    }

    double metric[16];
    for (int i = 0; i < 16; ++i) {
        const double var = std::max(noise_var + err_var * std::norm(qam[i]), kMinNoiseVar);
        metric[i] = -std::norm(y - h * qam[i]) / var - std::log(var);
    }

    std::array<double, kBitsPerSymbol> llr{};
    double num[8], den[8];
    for (int j = 0; j < kBitsPerSymbol; ++j) {
        int a = 0, b = 0;
        for (int i = 0; i < 16; ++i) {
            // Priors of the other bits only, so an infinite own prior cannot leak in.
            double v = metric[i];
            for (int o = 0; o < kBitsPerSymbol; ++o)
                if (o != j)
                    v += lp[o][qam16_bit(i, o)];
            if (qam16_bit(i, j) == 0)
                num[a++] = v;
            else
                den[b++] = v;
        }
        llr[j] = log_sum_exp(num, a) - log_sum_exp(den, b);
    }
    return llr;
}

std::vector<double> app_demap(const CMatrix &y, const ChannelEstimate &estimate, double sigma,
                              const PilotPattern &pattern, std::span<const double> priors)
{
    const std::size_t nbits = static_cast<std::size_t>(pattern.num_data()) * kBitsPerSymbol;
    if (!priors.empty() && priors.size() != nbits)
        throw InvalidArgument("app_demap: priors must cover every data bit");
    const double noise_var = sigma * sigma;
    std::vector<double> out(nbits);
    for (int d = 0; d < pattern.num_data(); ++d) {
        const int pos = pattern.data_positions[d];
        const std::size_t off = static_cast<std::size_t>(d) * kBitsPerSymbol;
        const auto llr = app_demap_symbol(
            y.data()[pos], estimate.h.data()[pos], estimate.err_var.data()[pos], noise_var,
            priors.empty() ? std::span<const double>{} : priors.subspan(off, kBitsPerSymbol));
        std::copy(llr.begin(), llr.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
    }
    return out;
}

DecodeResult iedd_receive(const CMatrix &y, const PilotPattern &pattern, const CorrelationModel &corr,
                          double sigma, const FrameCoding &coding, const IeddOptions &options,
                          const ChannelEstimate *fixed_estimate)
{
    if (options.outer_loops < 1 || options.bp_iterations_per_loop < 0)
        throw InvalidArgument("iedd_receive: invalid iteration schedule");
    const double noise_var = sigma * sigma;
    const Observations pilots = pilot_observations(ls_estimate_at_pilots(y, pattern), pattern, noise_var);
    BpDecoder decoder(coding.code(), coding.num_codewords());
    std::vector<double> feedback;

    for (int loop = 0; loop < options.outer_loops; ++loop) {
        ChannelEstimate est;
        if (fixed_estimate) {
            est = *fixed_estimate;
        } else if (loop == 0) {
            est = lmmse_estimate(pilots, corr, options.regularization);
        } else {
            const SoftSymbols sym = soft_symbols(feedback, pattern);
            est = lmmse_estimate(data_aided_observations(y, pattern, sym, noise_var), corr,
                                 options.regularization);
        }
        const auto llr = app_demap(y, est, sigma, pattern, feedback);
        const auto coded_llr = coding.frame_to_coded(llr);
        if (loop == 0)
            decoder.reset(coded_llr);
        else
            decoder.update_channel(coded_llr);
        decoder.iterate(options.bp_iterations_per_loop);
        feedback = coding.coded_to_frame(decoder.extrinsic());
    }
    return decoder.result();
}

DecodeResult perfect_knowledge_idd(const CMatrix &y, const CMatrix &h, double sigma,
                                   const PilotPattern &pattern, const FrameCoding &coding,
                                   const IddOptions &options)
{
    if (options.iterations < 1)
        throw InvalidArgument("perfect_knowledge_idd: need at least one iteration");
    const ChannelEstimate est{h, RMatrix::Zero(h.rows(), h.cols())};
    BpDecoder decoder(coding.code(), coding.num_codewords());
    std::vector<double> feedback;
    for (int it = 0; it < options.iterations; ++it) {
        if (it == 0 || options.demapper_feedback) {
            const auto coded_llr = coding.frame_to_coded(app_demap(y, est, sigma, pattern, feedback));
            if (it == 0)
                decoder.reset(coded_llr);
            else
                decoder.update_channel(coded_llr);
        }
        decoder.iterate(1);
        if (options.demapper_feedback)
            feedback = coding.coded_to_frame(decoder.extrinsic());
    }
    return decoder.result();
}

}  // namespace adarx
