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

#include "adarx/fec.hpp"
#include "adarx/rng.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

using namespace adarx;
using Catch::Approx;

namespace {

const LdpcCode &code() { return LdpcCode::standard(); }

// Direct parity evaluation from the check adjacency.
std::vector<int> syndrome(const LdpcCode &c, std::span<const std::uint8_t> word)
{
    std::vector<int> s(c.num_checks());
    for (int chk = 0; chk < c.num_checks(); ++chk) {
        int parity = 0;
        for (int v : c.check_vars(chk))
            parity ^= word[v] & 1;
        s[chk] = parity;
    }
    return s;
}

std::vector<double> bpsk_llr(std::span<const std::uint8_t> bits, double sigma, Rng &rng)
{
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<double> llr(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const double y = (bits[i] ? -1.0 : 1.0) + noise(rng);
        llr[i] = 2.0 * y / (sigma * sigma);
    }
    return llr;
}

}  // namespace

TEST_CASE("standard code dimensions and rank")
{
    const auto &c = code();
    CHECK(c.n() == 1296);
    CHECK(c.k() == 648);
    CHECK(c.num_checks() == 648);
    CHECK(c.rate() == 0.5);
    CHECK(c.gf2_rank() == c.n() - c.k());
}

TEST_CASE("alist file on disk matches the compiled-in code")
{
    const auto file = LdpcCode::from_alist_file(std::string(ADARX_DATA_DIR) + "/ldpc_1296_648.alist");
    const auto &c = code();
    REQUIRE(file.n() == c.n());
    REQUIRE(file.num_checks() == c.num_checks());
    REQUIRE(file.num_edges() == c.num_edges());
    for (int chk = 0; chk < c.num_checks(); ++chk) {
        auto a = c.check_vars(chk);
        auto b = file.check_vars(chk);
        CHECK(std::vector<int>(a.begin(), a.end()) == std::vector<int>(b.begin(), b.end()));
    }
}

TEST_CASE("alist write and read round trip")
{
    std::ostringstream out;
    code().write_alist(out);
    const auto again = LdpcCode::from_alist(out.str());
    CHECK(again.n() == code().n());
    CHECK(again.num_edges() == code().num_edges());
    std::ostringstream out2;
    again.write_alist(out2);
    CHECK(out.str() == out2.str());
}

TEST_CASE("malformed alist is rejected")
{
    CHECK_THROWS(LdpcCode::from_alist(std::string_view("3 2\n1 2\n")));
    CHECK_THROWS_AS(LdpcCode::from_alist_file("/nonexistent/file.alist"), IoError);
}

TEST_CASE("encoder output")
{
    const auto &c = code();
    Rng rng(1);

    SECTION("zero information gives the zero codeword")
    {
        const BitVector u(648 * 3, 0);
        const auto cw = c.encode(u);
        CHECK(cw.size() == 1296 * 3);
        CHECK(std::all_of(cw.begin(), cw.end(), [](auto b) { return b == 0; }));
    }

    SECTION("random words are systematic codewords")
    {
        for (int t = 0; t < 50; ++t) {
            const auto u = random_bits(rng, 648);
            const auto cw = c.encode(u);
            CHECK(std::equal(u.begin(), u.end(), cw.begin()));
            const auto s = syndrome(c, cw);
            CHECK(std::all_of(s.begin(), s.end(), [](int v) { return v == 0; }));
            CHECK(c.syndrome_fraction(cw) == 1.0);
        }
    }

    SECTION("linearity over GF(2)")
    {
        for (int t = 0; t < 20; ++t) {
            const auto u1 = random_bits(rng, 648);
            const auto u2 = random_bits(rng, 648);
            BitVector u3(648);
            for (int i = 0; i < 648; ++i)
                u3[i] = u1[i] ^ u2[i];
            const auto c1 = c.encode(u1), c2 = c.encode(u2), c3 = c.encode(u3);
            for (int i = 0; i < 1296; ++i)
                CHECK(c3[i] == (c1[i] ^ c2[i]));
        }
    }

    SECTION("length must be a multiple of k")
    {
        CHECK_THROWS_AS(c.encode(BitVector(100, 0)), InvalidArgument);
    }
}

TEST_CASE("syndrome fraction examples")
{
    const auto &c = code();
    Rng rng(2);
    const auto cw = c.encode(random_bits(rng, 648));
    CHECK(c.syndrome_fraction(cw) == 1.0);

    for (int v : {0, 17, 647, 648, 1295}) {
        auto flipped = cw;
        flipped[v] ^= 1;
        const auto s = syndrome(c, flipped);
        const double oracle = 1.0 - static_cast<double>(std::accumulate(s.begin(), s.end(), 0)) / 648.0;
        CHECK(c.syndrome_fraction(flipped) == Approx(oracle).epsilon(1e-15));
        CHECK(c.syndrome_fraction(flipped) == Approx(1.0 - c.var_degree(v) / 648.0).epsilon(1e-15));
    }

    double mean = 0.0;
    for (int t = 0; t < 200; ++t)
        mean += c.syndrome_fraction(random_bits(rng, 1296));
    CHECK(std::abs(mean / 200.0 - 0.5) < 0.05);

    // Several codewords: per-codeword values and their mean.
    auto two = c.encode(random_bits(rng, 1296));
    two[1296 + 5] ^= 1;
    const auto per = c.syndrome_fractions(two);
    REQUIRE(per.size() == 2);
    CHECK(per[0] == 1.0);
    CHECK(per[1] < 1.0);
    CHECK(c.syndrome_fraction(two) == Approx((per[0] + per[1]) / 2.0));
}

TEST_CASE("BP decoding of clean inputs")
{
    const auto &c = code();
    Rng rng(3);

    SECTION("saturated correct signs")
    {
        const auto cw = c.encode(random_bits(rng, 648 * 2));
        std::vector<double> llr(cw.size());
        for (std::size_t i = 0; i < cw.size(); ++i)
            llr[i] = cw[i] ? -kLlrClip : kLlrClip;
        const auto r = bp_decode(c, llr);
        CHECK(r.hard_coded == cw);
        CHECK(r.mean_syndrome_fraction() == 1.0);
        BpOptions stop;
        stop.early_stop = true;
        const auto r2 = bp_decode(c, llr, stop);
        CHECK(r2.iterations_run == 0);
        CHECK(r2.hard_coded == cw);
    }

    SECTION("noiseless round trips")
    {
        for (int t = 0; t < 100; ++t) {
            const auto u = random_bits(rng, 648);
            const auto cw = c.encode(u);
            std::vector<double> llr(cw.size());
            for (std::size_t i = 0; i < cw.size(); ++i)
                llr[i] = cw[i] ? -4.0 : 4.0;
            const auto r = bp_decode(c, llr);
            CHECK(r.hard_info == u);
        }
    }
}

TEST_CASE("zero iterations return the input as posterior")
{
    const auto &c = code();
    Rng rng(4);
    std::uniform_real_distribution<double> d(-15.0, 15.0);
    std::vector<double> llr(1296);
    for (auto &v : llr)
        v = d(rng);
    BpOptions opts;
    opts.max_iterations = 0;
    const auto r = bp_decode(c, llr, opts);
    CHECK(r.iterations_run == 0);
    for (int i = 0; i < 1296; ++i) {
        CHECK(r.llr_coded[i] == llr[i]);
        CHECK(r.llr_extrinsic[i] == 0.0);
    }
    // Zero priors change nothing.
    const std::vector<double> zeros(1296, 0.0);
    CHECK(bp_decode(c, llr, opts, zeros).llr_coded == r.llr_coded);
}

TEST_CASE("posterior is extrinsic plus decoder input")
{
    const auto &c = code();
    Rng rng(5);
    const auto cw = c.encode(random_bits(rng, 648));
    const auto llr = bpsk_llr(cw, 0.9, rng);
    std::vector<double> prior(1296, 0.0);
    prior[3] = 1.5;
    const auto r = bp_decode(c, llr, {}, prior);
    for (int i = 0; i < 1296; ++i) {
        const double input = std::clamp(llr[i] + prior[i], -kLlrClip, kLlrClip);
        CHECK(r.llr_coded[i] == Approx(r.llr_extrinsic[i] + input).margin(1e-12));
    }
    CHECK(r.iterations_run == 20);
}

TEST_CASE("decoder corrects noisy BPSK and BER falls with SNR")
{
    const auto &c = code();
    const std::vector<double> ebn0 = {0.5, 1.0, 1.5, 2.0, 8.0, 10.0, 12.0, 14.0};
    constexpr int kWords = 150;
    std::vector<double> ber;
    for (double db : ebn0) {
        const double sigma = std::sqrt(1.0 / (2.0 * 0.5 * std::pow(10.0, db / 10.0)));
        std::size_t errors = 0;
        for (int w = 0; w < kWords; ++w) {
            // Common random numbers across SNR points.
            Rng rng = make_stream(99, {static_cast<std::uint64_t>(w)});
            const auto u = random_bits(rng, 648);
            const auto cw = c.encode(u);
            const auto r = bp_decode(c, bpsk_llr(cw, sigma, rng));
            for (int i = 0; i < 648; ++i)
                errors += r.hard_info[i] != u[i];
        }
        ber.push_back(static_cast<double>(errors) / (kWords * 648.0));
    }
    CHECK(ber.front() > 0.0);
    for (std::size_t i = 1; i < ber.size(); ++i)
        CHECK(ber[i] <= ber[i - 1] * 1.05 + 1e-12);
    CHECK(ber.back() == 0.0);
}

TEST_CASE("all-zero and random codewords decode alike")
{
    // Flipping the channel LLR signs by a codeword maps the zero-word problem
    // onto the random-word one; a symmetric decoder makes the same errors.
    const auto &c = code();
    const double sigma = std::sqrt(1.0 / (std::pow(10.0, 1.2 / 10.0)));
    std::size_t err_zero = 0, err_rand = 0;
    for (int w = 0; w < 200; ++w) {
        Rng rng = make_stream(7, {static_cast<std::uint64_t>(w)});
        const auto cw = c.encode(random_bits(rng, 648));
        const BitVector zero(1296, 0);
        const auto l0 = bpsk_llr(zero, sigma, rng);
        std::vector<double> l1(1296);
        for (int i = 0; i < 1296; ++i)
            l1[i] = cw[i] ? -l0[i] : l0[i];
        const auto r0 = bp_decode(c, l0);
        const auto r1 = bp_decode(c, l1);
        for (int i = 0; i < 1296; ++i) {
            err_zero += r0.hard_coded[i] != 0;
            err_rand += r1.hard_coded[i] != cw[i];
        }
    }
    REQUIRE(err_zero > 0);
    CHECK(std::abs(static_cast<double>(err_rand) - static_cast<double>(err_zero)) <=
          0.05 * static_cast<double>(err_zero));
}

TEST_CASE("stateful decoder segments")
{
    const auto &c = code();
    Rng rng(8);
    const auto cw = c.encode(random_bits(rng, 648 * 2));
    const auto llr = bpsk_llr(cw, 0.8, rng);
    BpDecoder a(c, 2), b(c, 2);
    a.reset(llr);
    a.iterate(4);
    a.iterate(6);
    b.reset(llr);
    b.iterate(10);
    CHECK(a.posterior() == b.posterior());
    CHECK(a.total_iterations() == 10);
    // Swapping in identical channel values keeps the state.
    a.update_channel(llr);
    CHECK(a.posterior() == b.posterior());
    CHECK_THROWS_AS(a.reset(std::vector<double>(5, 0.0)), InvalidArgument);
    CHECK_THROWS_AS(BpDecoder(c, 0), InvalidArgument);
}

TEST_CASE("interleaver")
{
    const std::size_t n = 9060;
    const auto pi = Interleaver::random(n, 11);
    Rng rng(9);

    SECTION("bijection and round trip")
    {
        std::vector<std::uint32_t> p(pi.permutation().begin(), pi.permutation().end());
        std::sort(p.begin(), p.end());
        for (std::size_t i = 0; i < n; ++i)
            CHECK(p[i] == i);
        for (int t = 0; t < 100; ++t) {
            std::vector<double> x(n);
            for (auto &v : x)
                v = std::normal_distribution<double>()(rng);
            const auto y = pi.interleave<double>(x);
            CHECK(pi.deinterleave<double>(y) == x);
            CHECK(pi.interleave<double>(pi.deinterleave<double>(x)) == x);
        }
    }

    SECTION("seeded permutations are reproducible")
    {
        const auto again = Interleaver::random(n, 11);
        CHECK(std::equal(pi.permutation().begin(), pi.permutation().end(), again.permutation().begin()));
        const auto other = Interleaver::random(n, 12);
        CHECK_FALSE(std::equal(pi.permutation().begin(), pi.permutation().end(), other.permutation().begin()));
    }

    SECTION("identity mode")
    {
        const auto id = Interleaver::identity(n);
        std::vector<int> x(n);
        std::iota(x.begin(), x.end(), 0);
        CHECK(id.interleave<int>(x) == x);
    }

    SECTION("length errors")
    {
        CHECK_THROWS_AS(pi.interleave<int>(std::vector<int>(10)), InvalidArgument);
        CHECK_THROWS_AS(pi.deinterleave<int>(std::vector<int>(10)), InvalidArgument);
    }
}

TEST_CASE("frame coding layout")
{
    const FrameCoding fc(code(), 9060, 5);
    CHECK(fc.num_codewords() == 6);
    CHECK(fc.coded_bits() == 7776);
    CHECK(fc.info_bits() == 3888);
    CHECK(fc.filler_bits() == 1284);
    const auto &mask = fc.label_mask();
    CHECK(std::accumulate(mask.begin(), mask.end(), 0) == 7776);

    Rng rng(10);
    const auto coded = random_bits(rng, 7776);
    const auto filler = random_bits(rng, 1284);
    const auto frame = fc.assemble(coded, filler);
    REQUIRE(frame.size() == 9060);

    // The interleaver acts on [coded | filler].
    BitVector linear(coded);
    linear.insert(linear.end(), filler.begin(), filler.end());
    CHECK(frame == fc.interleaver().interleave<std::uint8_t>(linear));

    std::vector<double> soft(9060);
    for (int i = 0; i < 9060; ++i)
        soft[i] = frame[i] ? -1.0 : 1.0;
    const auto back = fc.frame_to_coded(soft);
    REQUIRE(back.size() == 7776);
    for (int i = 0; i < 7776; ++i)
        CHECK((back[i] < 0) == (coded[i] == 1));

    const auto to_frame = fc.coded_to_frame(back, 0.0);
    for (int i = 0; i < 9060; ++i)
        CHECK(to_frame[i] == (mask[i] ? soft[i] : 0.0));

    const auto labels = fc.labels_from_coded(coded);
    for (int i = 0; i < 9060; ++i)
        CHECK(labels[i] == (mask[i] ? frame[i] : 0));

    CHECK_THROWS_AS(fc.labels_from_coded(BitVector(10)), InvalidArgument);
    CHECK_THROWS_AS(FrameCoding(code(), 1000, 1), InvalidArgument);
}
