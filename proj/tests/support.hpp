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

// Reference computations shared by the tests. They are written directly from
// the underlying formulas and do not call into the library.

#ifndef ADARX_TEST_SUPPORT_HPP
#define ADARX_TEST_SUPPORT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

namespace testref {

// Unit-variance Rayleigh CDF for |a| with E|a|^2 = 1.
inline double rayleigh_cdf(double r) { return 1.0 - std::exp(-r * r); }

// Two-sided Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> sample, Cdf cdf)
{
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

// Asymptotic Kolmogorov distribution tail P(sqrt(n) D > x).
inline double ks_pvalue(double d, std::size_t n)
{
    const double x = d * std::sqrt(static_cast<double>(n));
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * x * x);
        p += term;
        if (std::abs(term) < 1e-16)
            break;
    }
    return std::clamp(p, 0.0, 1.0);
}

// Bessel J0 from its power series; accurate well beyond the arguments used here.
inline double bessel_j0(double x)
{
    double term = 1.0, sum = 1.0;
    const double q = x * x / 4.0;
    for (int k = 1; k < 200; ++k) {
        term *= -q / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-18)
            break;
    }
    return sum;
}

// log(1 + exp(x)) without overflow.
inline double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

inline double log_add(double a, double b)
{
    if (a == -std::numeric_limits<double>::infinity())
        return b;
    if (b == -std::numeric_limits<double>::infinity())
        return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double normal_ci95(double p, double n) { return 1.96 * std::sqrt(p * (1.0 - p) / n); }

// 16-QAM point for label i: in-phase level from bits 0-1, quadrature from
// bits 2-3, levels {-3, -1, 3, 1} / sqrt(10) for 00, 01, 10, 11.
inline std::complex<double> qam16_point(int i)
{
    static const double level[4] = {-3.0, -1.0, 3.0, 1.0};
    const double s = 1.0 / std::sqrt(10.0);
    return {level[i >> 2] * s, level[i & 3] * s};
}

// Bit LLRs (log P0/P1) by enumerating all 16 points. The channel error
// variance inflates the noise per point; each bit's own prior is left out.
inline std::array<double, 4> brute_force_demap(std::complex<double> y, std::complex<double> h, double err_var,
                                               double noise_var, const std::array<double, 4> &prior)
{
    constexpr double kInf = std::numeric_limits<double>::infinity();
    constexpr double kPi = 3.14159265358979323846;
    std::array<double, 4> out{};
    for (int j = 0; j < 4; ++j) {
        double num = -kInf, den = -kInf;
        for (int i = 0; i < 16; ++i) {
            const auto x = qam16_point(i);
            const double v = noise_var + err_var * std::norm(x);
            double metric = -std::norm(y - h * x) / v - std::log(kPi * v);
            bool excluded = false;
            for (int b = 0; b < 4; ++b) {
                if (b == j)
                    continue;
                const int bit = (i >> (3 - b)) & 1;
                if (std::isinf(prior[b]) && ((prior[b] > 0) == (bit == 1)))
                    excluded = true;
                else if (std::isfinite(prior[b]))
                    metric += bit ? -softplus(prior[b]) : -softplus(-prior[b]);
            }
            if (excluded)
                continue;
            if ((i >> (3 - j)) & 1)
                den = log_add(den, metric);
            else
                num = log_add(num, metric);
        }
        out[j] = num - den;
    }
    return out;
}

}  // namespace testref

#endif
