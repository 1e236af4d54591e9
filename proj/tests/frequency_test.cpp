// Copyright 2026 The gptkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "gptkit/frequency.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "gtest/gtest.h"

using namespace gptkit;

namespace {

namespace mp = boost::multiprecision;
using Rational = mp::cpp_rational;
using Float = mp::cpp_bin_float_50;

/// The double q as an exact rational.
Rational exact(double q) {
    int e = 0;
    const double mant = std::frexp(q, &e);
    const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
    Rational r(scaled);
    const int shift = e - 53;
    if (shift >= 0) return r * Rational(mp::cpp_int(1) << shift);
    return r / Rational(mp::cpp_int(1) << -shift);
}

Rational choose(unsigned n, unsigned k) {
    mp::cpp_int c = 1;
    for (unsigned i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return Rational(c);
}

/// C(n,k) q^k (1-q)^(n-k) in exact rational arithmetic.
double exact_pmf(unsigned n, unsigned k, double q) {
    const Rational p = exact(q);
    const mp::cpp_int num = mp::numerator(p);
    const mp::cpp_int den = mp::denominator(p);
    const mp::cpp_int rest = den - num;
    const Rational r = choose(n, k) * Rational(mp::pow(num, k) * mp::pow(rest, n - k), mp::pow(den, n));
    return static_cast<double>(r);
}

/// 50-digit log-gamma route for large n.
double highprec_pmf(unsigned long n, unsigned long k, double q) {
    const Float qq(q);
    const Float lp = boost::math::lgamma(Float(n + 1)) - boost::math::lgamma(Float(k + 1)) -
                     boost::math::lgamma(Float(n - k + 1)) + Float(k) * mp::log(qq) + Float(n - k) * mp::log1p(-qq);
    return static_cast<double>(mp::exp(lp));
}

}  // namespace

TEST(BinomialPmf, Examples) {
    EXPECT_NEAR(binomial_pmf({4, 0.5}, 2), 0.375, 1e-15);
    EXPECT_EQ(binomial_pmf({10, 1.0}, 10), 1.0);
    EXPECT_EQ(binomial_pmf({10, 1.0}, 9), 0.0);
    EXPECT_EQ(binomial_pmf({10, 0.0}, 0), 1.0);
    EXPECT_EQ(binomial_pmf({0, 0.4}, 0), 1.0);
}

TEST(BinomialPmf, PinnedExactRational) {
    // C(100,30) 3^30 7^70 / 10^100, evaluated in exact rational arithmetic.
    const double pinned = 8.67838647534280860363e-02;
    EXPECT_NEAR(binomial_pmf({100, 0.3}, 30) / pinned - 1.0, 0.0, 1e-10);
    EXPECT_NEAR(exact_pmf(100, 30, 0.3) / pinned - 1.0, 0.0, 1e-14);
}

TEST(BinomialPmf, RelativeErrorAgainstExactRationals) {
    for (unsigned n : {1u, 7u, 15u, 16u, 37u, 100u, 250u, 1000u}) {
        for (double q : {0.001, 0.1, 0.3, 0.5, 0.77, 0.999}) {
            for (unsigned k : {0u, 1u, n / 3, n / 2, n - 1, n}) {
                if (k > n) continue;
                const double want = exact_pmf(n, k, q);
                if (want < 1e-300) continue;
                ASSERT_NEAR(binomial_pmf({n, q}, k) / want - 1.0, 0.0, 1e-10) << n << " " << k << " " << q;
            }
        }
    }
}

TEST(BinomialPmf, RelativeErrorLargeN) {
    for (unsigned long n : {10000ul, 100000ul, 1000000ul}) {
        for (double q : {0.3, 0.5, 0.9}) {
            const auto mode = static_cast<unsigned long>(q * static_cast<double>(n));
            const auto sd = static_cast<unsigned long>(std::sqrt(q * (1 - q) * static_cast<double>(n)));
            for (unsigned long k : {mode - 3 * sd, mode, mode + 1, mode + 5 * sd}) {
                const double want = highprec_pmf(n, k, q);
                ASSERT_NEAR(binomial_pmf({n, q}, k) / want - 1.0, 0.0, 1e-10) << n << " " << k << " " << q;
            }
        }
    }
}

TEST(BinomialPmf, Errors) {
    EXPECT_THROW(binomial_pmf({5, 0.5}, 6), Error);
    EXPECT_THROW(BinomialSpec(5, 1.5), Error);
    EXPECT_THROW(BinomialSpec(5, -0.1), Error);
}

TEST(BinomialPmf, SumsToOne) {
    for (std::uint64_t n : {1u, 10u, 100u, 1000u, 10000u}) {
        for (int qi = 0; qi <= 10; ++qi) {
            const BinomialSpec spec(n, qi / 10.0);
            double sum = 0.0;
            for (std::uint64_t k = 0; k <= n; ++k) sum += binomial_pmf(spec, k);
            ASSERT_NEAR(sum, 1.0, 1e-10) << n << " " << qi;
        }
    }
}

TEST(Concentration, WholeSupport) {
    EXPECT_NEAR(concentration_probability({50, 0.37}, 1.0), 1.0, 1e-12);
    EXPECT_NEAR(concentration_probability({50, 0.37}, 3.0), 1.0, 1e-12);
    EXPECT_NEAR(concentration_probability({1, 0.5}, 0.6), 1.0, 1e-15);
}

TEST(Concentration, StrictInequalityExcludesBoundary) {
    // |k/1 - 0.5| = 0.5 for both outcomes.
    EXPECT_EQ(concentration_probability({1, 0.5}, 0.5), 0.0);
    // k = 20 and k = 40 sit exactly at distance 0.1 from 0.3 and are excluded.
    const double with_boundary = concentration_probability({100, 0.3}, 0.1 + 1e-9);
    const double strict = concentration_probability({100, 0.3}, 0.1);
    EXPECT_NEAR(with_boundary - strict, binomial_pmf({100, 0.3}, 20) + binomial_pmf({100, 0.3}, 40), 1e-15);
}

TEST(Concentration, PinnedExactRational) {
    // Sum over k = 21..39 of the exact binomial terms at q = 3/10.
    const double pinned = 9.62548570754205856659e-01;
    EXPECT_NEAR(concentration_probability({100, 0.3}, 0.1), pinned, 1e-12);
    Rational total = 0;
    for (unsigned k = 21; k <= 39; ++k) total += choose(100, k) * Rational(mp::pow(mp::cpp_int(3), k) * mp::pow(mp::cpp_int(7), 100 - k), mp::pow(mp::cpp_int(10), 100));
    EXPECT_NEAR(static_cast<double>(total), pinned, 1e-15);
    EXPECT_GT(pinned, chebyshev_lower_bound({100, 0.3}, 0.1));
    EXPECT_NEAR(chebyshev_lower_bound({100, 0.3}, 0.1), 0.79, 1e-12);
}

TEST(Concentration, ChebyshevBoundHolds) {
    for (std::uint64_t n : {10u, 100u, 1000u}) {
        for (int qi = 1; qi <= 9; ++qi) {
            for (double eps : {0.01, 0.05, 0.1, 0.2, 0.3}) {
                const BinomialSpec spec(n, qi / 10.0);
                ASSERT_GE(concentration_probability(spec, eps), chebyshev_lower_bound(spec, eps) - 1e-12);
            }
        }
    }
}

TEST(Concentration, ApproachesOne) {
    for (int qi = 1; qi <= 9; ++qi) EXPECT_GE(concentration_probability({10000, qi / 10.0}, 0.05), 0.999);
}

TEST(Concentration, RejectsNonPositiveEps) {
    EXPECT_THROW(concentration_probability({10, 0.5}, 0.0), Error);
}

TEST(Simulate, Extremes) {
    const auto m = classical_model(2);
    const auto s = m.state({0.4, 0.6});
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        EXPECT_EQ(simulate_trials(m, s, m.unit_effect(), 1000, seed).k, 1000u);
        EXPECT_EQ(simulate_trials(m, s, EffectVector::zero(2, m.id()), 1000, seed).k, 0u);
    }
}

TEST(Simulate, PinnedRegressionValues) {
    // Frozen from the first run of philox4x32-10/v1, stream 0.
    EXPECT_EQ(simulate_bernoulli(0.5, 10000, 1).k, 5052u);
    EXPECT_EQ(simulate_bernoulli(0.5, 10000, 2).k, 5029u);
    EXPECT_EQ(simulate_bernoulli(0.5, 10000, 3).k, 5048u);
    EXPECT_EQ(simulate_bernoulli(0.5, 10000, 7).k, 4925u);
    EXPECT_EQ(simulate_bernoulli(0.5, 10000, 42).k, 5141u);
    EXPECT_EQ(simulate_bernoulli(0.3, 1000000, 2024).k, 299338u);
}

TEST(Simulate, MeanOverSeeds) {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) mean += empirical_frequency(simulate_bernoulli(0.5, 10000, seed));
    EXPECT_NEAR(mean / 100, 0.5, 0.02);
}

TEST(Simulate, Deterministic) {
    const auto m = quantum_model(2);
    const auto s = random_state(m, 3);
    EXPECT_EQ(simulate_trials(m, s, m.fiducial(2), 500, 9), simulate_trials(m, s, m.fiducial(2), 500, 9));
}

TEST(Simulate, Errors) {
    const auto m = classical_model(2);
    EXPECT_THROW(simulate_trials(m, StateVector({0.5, 0.6}, m.id()), m.unit_effect(), 10, 1), Error);
    EXPECT_THROW(simulate_trials(m, m.state({0.5, 0.5}), m.effect({2, 2}), 10, 1), Error);
    EXPECT_THROW(simulate_bernoulli(0.5, 0, 1), Error);
}

TEST(Simulate, ChiSquaredAgainstBinomial) {
    const std::uint64_t n = 20;
    const double q = 0.3;
    const int seeds = 10000;
    std::vector<double> counts(n + 1, 0.0);
    for (int seed = 0; seed < seeds; ++seed) counts[simulate_bernoulli(q, n, static_cast<std::uint64_t>(seed)).k] += 1;
    // Pool adjacent bins until each expected count reaches 5; leftovers join the last bin.
    std::vector<std::pair<double, double>> bins;
    double obs = 0.0;
    double expct = 0.0;
    for (std::uint64_t k = 0; k <= n; ++k) {
        obs += counts[k];
        expct += seeds * binomial_pmf({n, q}, k);
        if (expct >= 5.0) {
            bins.emplace_back(obs, expct);
            obs = expct = 0.0;
        }
    }
    bins.back().first += obs;
    bins.back().second += expct;
    double stat = 0.0;
    for (const auto& [o, e] : bins) stat += (o - e) * (o - e) / e;
    ASSERT_GE(bins.size(), 5u);
    const boost::math::chi_squared dist(static_cast<double>(bins.size() - 1));
    EXPECT_LT(stat, boost::math::quantile(dist, 0.999));
}

TEST(EmpiricalFrequency, Examples) {
    EXPECT_EQ(empirical_frequency({10, 5, 0.5, 0}), 0.5);
    EXPECT_EQ(empirical_frequency({1, 0, 0.5, 0}), 0.0);
    EXPECT_THROW(empirical_frequency({0, 0, 0.5, 0}), Error);
    EXPECT_THROW(empirical_frequency({3, 4, 0.5, 0}), Error);
}

TEST(EmpiricalFrequency, LargeRun) {
    const auto m = classical_model(2);
    const auto rec = simulate_trials(m, m.state({0.3, 0.7}), m.fiducial(0), 1000000, 2024);
    EXPECT_NEAR(empirical_frequency(rec), 0.3, 0.002);
}

TEST(Tomography, ExactRecords) {
    const auto m = quantum_model(2);
    const std::vector<TrialRecord> recs = {{4, 4, 1, 0}, {4, 0, 0, 0}, {4, 2, 0.5, 0}, {4, 2, 0.5, 0}};
    const auto t = tomographic_estimate(m, recs);
    EXPECT_FALSE(t.projected);
    EXPECT_EQ(t.p_hat, m.state({1, 0, 0.5, 0.5}));
}

TEST(Tomography, SimulatedPureQubit) {
    const auto m = quantum_model(2);
    const auto p = m.state({1, 0, 0.5, 0.5});
    const auto t = tomographic_estimate(m, simulate_fiducials(m, p, 10000, 2024));
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i) d += (t.p_hat[i] - p[i]) * (t.p_hat[i] - p[i]);
    EXPECT_LT(std::sqrt(d), 0.05);
    EXPECT_TRUE(m.contains(t.p_hat));
}

TEST(Tomography, AdversarialRecordsAreProjected) {
    const auto m = quantum_model(2);
    const std::vector<TrialRecord> recs = {{1, 1, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}};
    const auto t = tomographic_estimate(m, recs);
    EXPECT_TRUE(t.projected);
    EXPECT_TRUE(m.contains(t.p_hat));
    // Oracle: the eigenvalue-clipped reconstruction is PSD with unit trace.
    const CMatrix rho = m.frame_inverse(linalg::view(t.p_hat.entries()));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
}

TEST(Tomography, AllZeroRecordsFallBack) {
    const auto m = quantum_model(2);
    const std::vector<TrialRecord> recs(4, TrialRecord{10, 0, 0, 0});
    const auto t = tomographic_estimate(m, recs);
    EXPECT_TRUE(t.projected);
    EXPECT_TRUE(m.contains(t.p_hat));
}

TEST(Tomography, ClassicalProjection) {
    const auto m = classical_model(3);
    const std::vector<TrialRecord> recs = {{10, 6, 0, 0}, {10, 6, 0, 0}, {10, 0, 0, 0}};
    const auto t = tomographic_estimate(m, recs);
    EXPECT_TRUE(t.projected);
    EXPECT_NEAR(t.p_hat[0], 0.5, 1e-12);
    EXPECT_NEAR(t.p_hat[1], 0.5, 1e-12);
    EXPECT_NEAR(t.p_hat[2], 0.0, 1e-12);
}

TEST(Tomography, WrongRecordCount) {
    const auto m = quantum_model(2);
    EXPECT_THROW(tomographic_estimate(m, std::vector<TrialRecord>(3, TrialRecord{1, 0, 0, 0})), Error);
}

TEST(Tomography, MseShrinksWithN) {
    const auto m = quantum_model(2);
    const auto p = random_state(m, 5);
    auto mse = [&](std::uint64_t n) {
        double total = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto t = tomographic_estimate(m, simulate_fiducials(m, p, n, seed));
            for (std::size_t i = 0; i < 4; ++i) total += (t.p_hat[i] - p[i]) * (t.p_hat[i] - p[i]);
        }
        return total / 100;
    };
    const double ratio = mse(1000) / mse(4000);
    EXPECT_GE(ratio, 2.0);
    EXPECT_LE(ratio, 8.0);
}
