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
#include "adarx/rng.hpp"
#include "adarx/transceiver.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <limits>

using namespace adarx;
using Catch::Approx;

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();

ChannelParams channel(int taps, double v)
{
    ChannelParams p;
    p.num_taps = taps;
    p.velocity_kmh = v;
    return p;
}

// Full-grid LMMSE with the Kronecker covariance, solved directly.
struct DenseLmmse {
    Eigen::VectorXcd h;
    Eigen::VectorXd err;
};

DenseLmmse dense_lmmse(const Observations &obs, const ChannelParams &p, const FrameGeometry &g)
{
    const int nt = g.num_symbols, nf = g.num_subcarriers, n = nt * nf;
    const double fd = p.velocity_kmh / 3.6 * p.carrier_freq_hz / 299792458.0;
    const double df = g.bandwidth_hz / nf;
    double total = 0.0;
    std::vector<double> pw(p.num_taps);
    for (int l = 0; l < p.num_taps; ++l) {
        pw[l] = p.num_taps == 1 ? 1.0 : std::pow(10.0, p.decay_total_db / 10.0 * l / (p.num_taps - 1));
        total += pw[l];
    }
    auto rf = [&](int lag) {
        std::complex<double> s{0.0, 0.0};
        for (int l = 0; l < p.num_taps; ++l)
            s += pw[l] / total * std::exp(std::complex<double>(0.0, -kTwoPi * lag * df * l * p.tap_spacing_s));
        return s;
    };
    auto rt = [&](int lag) { return testref::bessel_j0(kTwoPi * fd * lag * g.symbol_duration_s); };
    Eigen::MatrixXcd r(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            r(a, b) = rt(std::abs(a / nf - b / nf)) * rf(a % nf - b % nf);

    std::vector<int> s;
    for (int i = 0; i < n; ++i)
        if (std::isfinite(obs.variance.data()[i]))
            s.push_back(i);
    const int m = static_cast<int>(s.size());
    Eigen::MatrixXcd rss(m, m), rhs(n, m);
    Eigen::VectorXcd o(m);
    for (int a = 0; a < m; ++a) {
        o(a) = obs.value.data()[s[a]];
        for (int b = 0; b < m; ++b)
            rss(a, b) = r(s[a], s[b]);
        rss(a, a) += obs.variance.data()[s[a]] + 1e-9;
        for (int i = 0; i < n; ++i)
            rhs(i, a) = r(i, s[a]);
    }
    const Eigen::MatrixXcd w = rss.ldlt().solve(rhs.adjoint()).adjoint();
    DenseLmmse out;
    out.h = w * o;
    out.err.resize(n);
    for (int i = 0; i < n; ++i)
        out.err(i) = std::max(0.0, (r(i, i) - (w.row(i) * rhs.row(i).adjoint())(0, 0)).real());
    return out;
}


}  // namespace

TEST_CASE("genie correlation limits")
{
    FrameGeometry g;
    const auto c0 = genie_correlation(channel(8, 0.0), g, 0.1);
    for (double r : c0.time)
        CHECK(r == 1.0);
    const auto c1 = genie_correlation(channel(1, 100.0), g, 0.1);
    for (const auto &r : c1.freq)
        CHECK(std::abs(r - 1.0) < 1e-15);
    CHECK(c1.time[0] == 1.0);
    CHECK(c1.noise_var == 0.1);

    const auto c = genie_correlation(channel(8, 100.0), g, 0.1);
    const auto rt = c.time_matrix();
    const auto rf = c.freq_matrix();
    CHECK(rt.rows() == 36);
    CHECK(rf.rows() == 64);
    CHECK((rt - rt.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((rf - rf.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(rt(0, 0) == 1.0);
    CHECK(std::abs(rf(0, 0) - 1.0) < 1e-12);
    const double fd = 100.0 / 3.6 * 5.9e9 / 299792458.0;
    CHECK(rt(3, 10) == Approx(testref::bessel_j0(kTwoPi * fd * 7 * 8e-6)).margin(1e-12));
}

TEST_CASE("genie frequency correlation matches sampled channels")
{
    FrameGeometry g;
    const auto p = channel(8, 0.0);
    const auto c = genie_correlation(p, g, 0.0);
    Complex s{0.0, 0.0};
    std::size_t n = 0;
    for (int r = 0; r < 20000; ++r) {
        Rng rng = make_stream(31, {static_cast<std::uint64_t>(r)});
        const auto h = sample_channel_matrix(p, g, rng).h;
        for (int k = 0; k + 5 < 64; ++k) {
            s += h(0, k + 5) * std::conj(h(0, k));
            ++n;
        }
    }
    s /= static_cast<double>(n);
    CHECK(std::abs(std::abs(s) - std::abs(c.freq[5])) < 0.02);
    CHECK(std::abs(s - c.freq[5]) < 0.02);
}

TEST_CASE("LMMSE reproduces noiseless pilots")
{
    FrameGeometry g;
    const auto p = channel(8, 100.0);
    const auto pattern = build_pilot_pattern(g, 1);
    Rng rng(2);
    const auto h = sample_channel_matrix(p, g, rng).h;
    const auto ls = ls_estimate_at_pilots(h.cwiseProduct(pattern.symbols), pattern);
    const auto corr = genie_correlation(p, g, 0.0);
    const auto est = lmmse_estimate(pilot_observations(ls, pattern, 0.0), corr);
    double worst = 0.0;
    for (int pos : pattern.pilot_positions)
        worst = std::max(worst, std::abs(est.h.data()[pos] - ls.data()[pos]));
    // Limited by the 1e-9 regularizer, not by the solver.
    CHECK(worst < 1e-6);
}

TEST_CASE("LMMSE with a rank-one correlation averages the pilots")
{
    FrameGeometry g;
    const auto p = channel(1, 0.0);
    const auto pattern = build_pilot_pattern(g, 1);
    const double noise_var = 0.2;
    Rng rng(3);
    CMatrix ls = CMatrix::Zero(g.num_symbols, g.num_subcarriers);
    Complex sum{0.0, 0.0};
    for (int pos : pattern.pilot_positions) {
        ls.data()[pos] = Complex{0.7, -0.4} + complex_normal(rng, noise_var);
        sum += ls.data()[pos];
    }
    const double np = pattern.num_pilots();
    const Complex expected = sum / (np + noise_var);
    const auto est = lmmse_estimate(pilot_observations(ls, pattern, noise_var), genie_correlation(p, g, noise_var));
    for (int i = 0; i < est.h.size(); ++i) {
        CHECK(std::abs(est.h.data()[i] - expected) < 1e-8);
        CHECK(est.err_var.data()[i] == Approx(noise_var / (np + noise_var)).margin(1e-8));
    }
}

TEST_CASE("separable LMMSE equals the dense Wiener solution")
{
    FrameGeometry g;
    g.num_symbols = 12;
    g.num_subcarriers = 16;
    g.pilot_time_spacing = 5;
    g.pilot_freq_spacing = 3;
    const auto pattern = build_pilot_pattern(g, 4);
    for (int taps : {1, 4}) {
        for (double v : {0.0, 150.0}) {
            const auto p = channel(taps, v);
            const auto corr = genie_correlation(p, g, 0.1);
            Rng rng(5 + taps);
            const auto h = sample_channel_matrix(p, g, rng).h;

            // Pilots only, then a data-aided mix of variances with gaps.
            Observations obs = pilot_observations(h, pattern, 0.1);
            for (int pos : pattern.pilot_positions)
                obs.value.data()[pos] += complex_normal(rng, 0.1);
            for (int pass = 0; pass < 2; ++pass) {
                if (pass == 1) {
                    for (int pos : pattern.data_positions) {
                        if (pos % 7 == 3)
                            continue;
                        const double var = uniform_real(rng, 0.05, 2.0);
                        obs.value.data()[pos] = h.data()[pos] + complex_normal(rng, var);
                        obs.variance.data()[pos] = var;
                    }
                }
                const auto est = lmmse_estimate(obs, corr);
                const auto ref = dense_lmmse(obs, p, g);
                double dh = 0.0, de = 0.0;
                for (int i = 0; i < est.h.size(); ++i) {
                    dh = std::max(dh, std::abs(est.h.data()[i] - ref.h(i)));
                    de = std::max(de, std::abs(est.err_var.data()[i] - ref.err(i)));
                }
                INFO("taps " << taps << " v " << v << " pass " << pass);
                CHECK(dh < 1e-6);
                CHECK(de < 1e-6);
            }
        }
    }
}

TEST_CASE("LMMSE beats nearest-pilot LS")
{
    Transceiver link;
    const auto &g = link.geometry();
    const auto &pattern = link.pilots();
    const auto p = channel(8, 100.0);
    double mse_lmmse = 0.0, mse_ls = 0.0;
    for (int f = 0; f < 1000; ++f) {
        Rng rng = make_stream(12, {static_cast<std::uint64_t>(f)});
        const auto tx = link.transmit(p, 12.0, rng);
        const double nv = tx.noise.sigma * tx.noise.sigma;
        const auto ls = link.ls_estimate(tx);
        const auto est = lmmse_estimate(pilot_observations(ls, pattern, nv), genie_correlation(p, g, nv));
        for (int k = 0; k < g.num_symbols; ++k)
            for (int n = 0; n < g.num_subcarriers; ++n) {
                int best = -1;
                double bd = 1e300;
                for (int pos : pattern.pilot_positions) {
                    const double d = std::pow(pos / 64 - k, 2) + std::pow(pos % 64 - n, 2);
                    if (d < bd) {
                        bd = d;
                        best = pos;
                    }
                }
                mse_ls += std::norm(ls.data()[best] - tx.h(k, n));
                mse_lmmse += std::norm(est.h(k, n) - tx.h(k, n));
            }
    }
    CHECK(mse_lmmse < mse_ls);
}

TEST_CASE("LMMSE error variance is calibrated")
{
    Transceiver link;
    const auto &g = link.geometry();
    const auto p = channel(8, 100.0);
    double predicted = 0.0, actual = 0.0;
    for (int f = 0; f < 300; ++f) {
        Rng rng = make_stream(13, {static_cast<std::uint64_t>(f)});
        const auto tx = link.transmit(p, 10.0, rng);
        const double nv = tx.noise.sigma * tx.noise.sigma;
        const auto est = lmmse_estimate(pilot_observations(link.ls_estimate(tx), link.pilots(), nv),
                                        genie_correlation(p, g, nv));
        predicted += est.err_var.sum();
        actual += (est.h - tx.h).cwiseAbs2().sum();
    }
    CHECK(actual / predicted == Approx(1.0).margin(0.1));
}

TEST_CASE("APP demapper equals brute-force enumeration")
{
    Rng rng(17);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const Complex h = complex_normal(rng);
        const int point = uniform_int(rng, 0, 15);
        const double nv = uniform_real(rng, 0.02, 1.0);
        const double ev = t % 3 == 0 ? 0.0 : uniform_real(rng, 0.0, 0.3);
        const Complex y = h * qam16_constellation()[point] + complex_normal(rng, nv);
        std::array<double, 4> prior{};
        if (t % 2)
            for (auto &v : prior)
                v = uniform_real(rng, -6.0, 6.0);
        const auto lib = app_demap_symbol(y, h, ev, nv, prior);
        const auto ref = testref::brute_force_demap(y, h, ev, nv, prior);
        for (int j = 0; j < 4; ++j)
            worst = std::max(worst, std::abs(lib[j] - ref[j]) / std::max(1.0, std::abs(ref[j])));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("infinite priors on three bits leave a binary decision")
{
    Rng rng(18);
    const auto &qam = qam16_constellation();
    for (int t = 0; t < 200; ++t) {
        const Complex h = complex_normal(rng);
        const Complex y = complex_normal(rng);
        const double nv = uniform_real(rng, 0.05, 1.0);
        const int free_bit = t % 4;
        const int known = uniform_int(rng, 0, 15);
        std::array<double, 4> prior{};
        for (int b = 0; b < 4; ++b)
            prior[b] = ((known >> (3 - b)) & 1) ? -kInf : kInf;
        const int p0 = known & ~(1 << (3 - free_bit));
        const int p1 = known | (1 << (3 - free_bit));
        const double expected = (-std::norm(y - h * qam[p0]) + std::norm(y - h * qam[p1])) / nv;
        const auto lib = app_demap_symbol(y, h, 0.0, nv, prior);
        CHECK(lib[free_bit] == Approx(expected).margin(1e-9));
        CHECK(testref::brute_force_demap(y, h, 0.0, nv, prior)[free_bit] == Approx(expected).margin(1e-9));
    }
}

TEST_CASE("noiseless demapping has the transmitted signs")
{
    Rng rng(19);
    for (int point = 0; point < 16; ++point) {
        const Complex h = complex_normal(rng);
        const auto llr = app_demap_symbol(h * qam16_constellation()[point], h, 0.0, 1e-6);
        for (int j = 0; j < 4; ++j)
            CHECK((llr[j] < 0) == (qam16_bit(point, j) == 1));
    }
}

TEST_CASE("demapper LLRs are calibrated")
{
    Rng rng(20);
    const double nv = 0.25;
    constexpr int kBins = 12;
    std::vector<double> ones(kBins, 0.0), count(kBins, 0.0), predicted(kBins, 0.0);
    for (int t = 0; t < 200000; ++t) {
        const int point = uniform_int(rng, 0, 15);
        const Complex y = qam16_constellation()[point] + complex_normal(rng, nv);
        const auto llr = app_demap_symbol(y, 1.0, 0.0, nv);
        for (int j = 0; j < 4; ++j) {
            const int bin = static_cast<int>(std::floor(llr[j] + kBins / 2));
            if (bin < 0 || bin >= kBins)
                continue;
            count[bin] += 1.0;
            ones[bin] += qam16_bit(point, j);
            predicted[bin] += 1.0 / (1.0 + std::exp(llr[j]));
        }
    }
    for (int b = 0; b < kBins; ++b) {
        if (count[b] < 2000)
            continue;
        CHECK(std::abs(ones[b] / count[b] - predicted[b] / count[b]) < 0.03);
    }
}

TEST_CASE("soft symbols from feedback")
{
    Transceiver link;
    const auto &pattern = link.pilots();
    const std::size_t nbits = static_cast<std::size_t>(pattern.num_data()) * 4;
    const auto zero = soft_symbols(std::vector<double>(nbits, 0.0), pattern);
    for (int pos : pattern.data_positions) {
        CHECK(std::abs(zero.mean.data()[pos]) < 1e-12);
        CHECK(zero.variance.data()[pos] == Approx(1.0).margin(1e-12));
    }
    for (int pos : pattern.pilot_positions) {
        CHECK(zero.mean.data()[pos] == pattern.symbols.data()[pos]);
        CHECK(zero.variance.data()[pos] == 0.0);
    }
    Rng rng(21);
    std::vector<double> llr(nbits);
    for (auto &v : llr)
        v = uniform_real(rng, -8.0, 8.0);
    const auto s = soft_symbols(llr, pattern);
    for (int pos : pattern.data_positions) {
        CHECK(s.variance.data()[pos] >= 0.0);
        CHECK(s.variance.data()[pos] <= 1.8 + 1e-12);
        const Complex m = s.mean.data()[pos];
        CHECK(std::abs(m.real()) <= 3.0 / std::sqrt(10.0) + 1e-12);
        CHECK(std::abs(m.imag()) <= 3.0 / std::sqrt(10.0) + 1e-12);
    }
}

TEST_CASE("IEDD first loop is pilot LMMSE, demap and five BP iterations")
{
    Transceiver link;
    const auto p = channel(8, 0.0);
    Rng rng(22);
    const auto tx = link.transmit(p, 10.0, rng);
    const double nv = tx.noise.sigma * tx.noise.sigma;
    const auto corr = genie_correlation(p, link.geometry(), nv);
    IeddOptions one;
    one.outer_loops = 1;
    const auto r = iedd_receive(tx.grid.y, link.pilots(), corr, tx.noise.sigma, link.coding(), one);

    const auto est = lmmse_estimate(pilot_observations(link.ls_estimate(tx), link.pilots(), nv), corr);
    const auto llr = link.coding().frame_to_coded(app_demap(tx.grid.y, est, tx.noise.sigma, link.pilots()));
    BpOptions five;
    five.max_iterations = 5;
    const auto ref = bp_decode(link.code(), llr, five);
    CHECK(r.iterations_run == 5);
    CHECK(r.llr_coded == ref.llr_coded);
}

TEST_CASE("IEDD runs twenty BP iterations in total")
{
    Transceiver link;
    const auto p = channel(8, 0.0);
    Rng rng(23);
    const auto tx = link.transmit(p, 12.0, rng);
    const auto corr = genie_correlation(p, link.geometry(), tx.noise.sigma * tx.noise.sigma);
    const auto r = iedd_receive(tx.grid.y, link.pilots(), corr, tx.noise.sigma, link.coding());
    CHECK(r.iterations_run == 20);
    CHECK(r.hard_info.size() == 3888);
}

TEST_CASE("IEDD with the true channel injected")
{
    Transceiver link;
    const auto p = channel(8, 100.0);
    Rng rng(24);
    const auto tx = link.transmit(p, 8.0, rng);
    const double sigma = tx.noise.sigma;
    const auto corr = genie_correlation(p, link.geometry(), sigma * sigma);
    const ChannelEstimate perfect{tx.h, RMatrix::Zero(tx.h.rows(), tx.h.cols())};
    const auto &coding = link.coding();

    SECTION("matches a hand-written 4 x 5 schedule")
    {
        const auto r = iedd_receive(tx.grid.y, link.pilots(), corr, sigma, coding, {}, &perfect);
        BpDecoder dec(link.code(), coding.num_codewords());
        std::vector<double> fb;
        for (int loop = 0; loop < 4; ++loop) {
            const auto llr = coding.frame_to_coded(app_demap(tx.grid.y, perfect, sigma, link.pilots(), fb));
            if (loop == 0)
                dec.reset(llr);
            else
                dec.update_channel(llr);
            dec.iterate(5);
            fb = coding.coded_to_frame(dec.extrinsic());
        }
        CHECK(r.llr_coded == dec.posterior());
    }

    SECTION("a 20 x 1 schedule is the perfect-knowledge IDD")
    {
        IeddOptions opts;
        opts.outer_loops = 20;
        opts.bp_iterations_per_loop = 1;
        const auto a = iedd_receive(tx.grid.y, link.pilots(), corr, sigma, coding, opts, &perfect);
        const auto b = perfect_knowledge_idd(tx.grid.y, tx.h, sigma, link.pilots(), coding);
        CHECK(a.llr_coded == b.llr_coded);
        CHECK(b.iterations_run == 20);
    }
}

TEST_CASE("perfect-knowledge IDD is error free without noise and at 30 dB")
{
    Transceiver link;
    // Frequency selective, so a single deep fade cannot wipe out a whole frame.
    const auto selective = channel(8, 0.0);
    for (int f = 0; f < 100; ++f) {
        Rng rng = make_stream(25, {static_cast<std::uint64_t>(f)});
        const auto tx = link.transmit(selective, 30.0, rng);
        const auto r = perfect_knowledge_idd(tx.grid.y, tx.h, tx.noise.sigma, link.pilots(), link.coding());
        CHECK(link.count_info_errors(tx, r.hard_info) == 0);
    }
    Rng rng(26);
    auto tx = link.transmit(channel(8, 100.0), 30.0, rng);
    tx.grid.y = tx.h.cwiseProduct(tx.grid.x);
    const auto r = perfect_knowledge_idd(tx.grid.y, tx.h, 1e-4, link.pilots(), link.coding());
    CHECK(link.count_info_errors(tx, r.hard_info) == 0);
}

TEST_CASE("demapper feedback does not hurt")
{
    Transceiver link;
    const auto p = channel(8, 0.0);
    std::size_t with = 0, without = 0;
    IddOptions plain;
    plain.demapper_feedback = false;
    for (int f = 0; f < 120; ++f) {
        Rng rng = make_stream(27, {static_cast<std::uint64_t>(f)});
        const auto tx = link.transmit(p, 8.0, rng);
        const auto a = perfect_knowledge_idd(tx.grid.y, tx.h, tx.noise.sigma, link.pilots(), link.coding());
        const auto b = perfect_knowledge_idd(tx.grid.y, tx.h, tx.noise.sigma, link.pilots(), link.coding(), plain);
        with += link.count_info_errors(tx, a.hard_info);
        without += link.count_info_errors(tx, b.hard_info);
    }
    CHECK(without > 0);
    CHECK(with <= without);
}

TEST_CASE("more IEDD loops do not raise the BER")
{
    // Paired frames at 14 dB, L = 8, v = 0.
    Transceiver link;
    const auto p = channel(8, 0.0);
    std::array<std::size_t, 4> errors{};
    for (int f = 0; f < 1000; ++f) {
        Rng rng = make_stream(28, {static_cast<std::uint64_t>(f)});
        const auto tx = link.transmit(p, 14.0, rng);
        const auto corr = genie_correlation(p, link.geometry(), tx.noise.sigma * tx.noise.sigma);
        for (int loops = 1; loops <= 4; ++loops) {
            IeddOptions o;
            o.outer_loops = loops;
            const auto r = iedd_receive(tx.grid.y, link.pilots(), corr, tx.noise.sigma, link.coding(), o);
            errors[loops - 1] += link.count_info_errors(tx, r.hard_info);
        }
    }
    INFO("errors per loop count: " << errors[0] << " " << errors[1] << " " << errors[2] << " " << errors[3]);
    CHECK(errors[0] > 0);
    for (int i = 1; i < 4; ++i)
        CHECK(static_cast<double>(errors[i]) <= 1.05 * static_cast<double>(errors[i - 1]) + 2.0);
}

TEST_CASE("perfect knowledge bounds LMMSE IEDD on paired frames")
{
    Transceiver link;
    const auto p = channel(8, 0.0);
    std::size_t idd = 0, iedd = 0;
    for (int f = 0; f < 150; ++f) {
        Rng rng = make_stream(29, {static_cast<std::uint64_t>(f)});
        const auto tx = link.transmit(p, 10.0, rng);
        const auto corr = genie_correlation(p, link.geometry(), tx.noise.sigma * tx.noise.sigma);
        idd += link.count_info_errors(
            tx, perfect_knowledge_idd(tx.grid.y, tx.h, tx.noise.sigma, link.pilots(), link.coding()).hard_info);
        iedd += link.count_info_errors(
            tx, iedd_receive(tx.grid.y, link.pilots(), corr, tx.noise.sigma, link.coding()).hard_info);
    }
    CHECK(iedd > 0);
    CHECK(idd <= iedd);
}
