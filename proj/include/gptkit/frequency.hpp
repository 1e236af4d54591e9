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
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "gptkit/core.hpp"
#include "gptkit/models.hpp"
#include "gptkit/philox.hpp"

namespace gptkit {

/// Outcome of n yes-no trials: k yes outcomes.
struct TrialRecord {
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    /// Bernoulli parameter used to generate the record (if simulated).
    double q_true = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct BinomialSpec {
    std::uint64_t n = 0;
    double q = 0.0;

    BinomialSpec(std::uint64_t n_, double q_) : n(n_), q(q_) {
        if (!(q >= 0.0 && q <= 1.0)) throw Error("binomial: q must lie in [0, 1]");
    }
};

namespace detail {

/// log(n!) - log(sqrt(2 pi n) (n/e)^n), tabulated below 16.
inline double stirling_error(double n) {
    static constexpr std::array<double, 16> kTable = {
        0.0,
        0.08106146679532725821967026,
        0.04134069595540929409382208,
        0.02767792568499833914878929,
        0.02079067210376509311152277,
        0.01664469118982119216319487,
        0.01387612882307074799874573,
        0.01189670994589177009505572,
        0.01041126526197209649747857,
        0.009255462182712732917728637,
        0.008330563433362871256469319,
        0.007573675487951840794972024,
        0.006942840107209529865664153,
        0.006408994188004207068439631,
        0.005951370112758847735624416,
        0.00555473355196280137103869,
    };
    constexpr double s0 = 1.0 / 12.0;
    constexpr double s1 = 1.0 / 360.0;
    constexpr double s2 = 1.0 / 1260.0;
    constexpr double s3 = 1.0 / 1680.0;
    constexpr double s4 = 1.0 / 1188.0;
    if (n < 16.0) return kTable[static_cast<std::size_t>(n)];
    const double nn = n * n;
    if (n > 500) return (s0 - s1 / nn) / n;
    if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
    if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
    return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

/// Deviance term x log(x / np) + np - x, stable when x is close to np.
inline double deviance(double x, double np) {
    if (std::abs(x - np) < 0.1 * (x + np)) {
        double v = (x - np) / (x + np);
        double s = (x - np) * v;
        double ej = 2.0 * x * v;
        v *= v;
        for (int j = 1; j < 1000; ++j) {
            ej *= v;
            const double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
        return s;
    }
    return x * std::log(x / np) + np - x;
}

}  // namespace detail

/// C(n, k) q^k (1 - q)^(n - k), with 0^0 = 1.
///
/// The log-gamma terms are split into Stirling's leading form plus its error
/// term, and the powers into deviance terms, so no large logarithms cancel.
/// Relative error stays near machine precision for n up to 10^6 and beyond.
inline double binomial_pmf(const BinomialSpec& binom, std::uint64_t k) {
    if (k > binom.n) throw Error("binomial_pmf: k out of range");
    const double n = static_cast<double>(binom.n);
    const double x = static_cast<double>(k);
    const double p = binom.q;
    const double q = 1.0 - binom.q;
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (q == 0.0) return k == binom.n ? 1.0 : 0.0;
    if (k == 0) {
        if (binom.n == 0) return 1.0;
        return std::exp(p < 0.1 ? -detail::deviance(n, n * q) - n * p : n * std::log(q));
    }
    if (k == binom.n) return std::exp(q < 0.1 ? -detail::deviance(n, n * p) - n * q : n * std::log(p));
    const double lc = detail::stirling_error(n) - detail::stirling_error(x) - detail::stirling_error(n - x) -
                      detail::deviance(x, n * p) - detail::deviance(n - x, n * q);
    const double lf = std::log(2.0 * std::numbers::pi) + std::log(x) + std::log1p(-x / n);
    return std::exp(lc - 0.5 * lf);
}

/// Pr(|k/n - q| < eps), evaluated as |k - n q| < n eps and summed
/// smallest term first.
inline double concentration_probability(const BinomialSpec& binom, double eps) {
    if (!(eps > 0.0)) throw Error("concentration_probability: eps must be positive");
    const double n = static_cast<double>(binom.n);
    const double centre = n * binom.q;
    const double radius = n * eps;
    const double lo = std::max(0.0, std::floor(centre - radius));
    const double hi = std::min(n, std::ceil(centre + radius));
    std::vector<double> terms;
    for (auto k = static_cast<std::uint64_t>(lo); k <= static_cast<std::uint64_t>(hi); ++k) {
        if (std::abs(static_cast<double>(k) - centre) < radius) terms.push_back(binomial_pmf(binom, k));
    }
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += t;
    return std::min(sum, 1.0);
}

/// 1 - q(1 - q) / (n eps^2), the Chebyshev lower bound on the concentration.
inline double chebyshev_lower_bound(const BinomialSpec& binom, double eps) {
    return 1.0 - binom.q * (1.0 - binom.q) / (static_cast<double>(binom.n) * eps * eps);
}

/// n independent Bernoulli(q) draws from stream (seed, stream_id).
inline TrialRecord simulate_bernoulli(double q, std::uint64_t n, std::uint64_t seed, std::uint64_t stream_id = 0) {
    if (!(q >= 0.0 && q <= 1.0)) throw Error("simulate: q must lie in [0, 1]");
    if (n < 1) throw Error("simulate: n must be at least 1");
    rng::Stream rng(seed, stream_id);
    TrialRecord rec{n, 0, q, seed};
    for (std::uint64_t t = 0; t < n; ++t) rec.k += rng.bernoulli(q) ? 1 : 0;
    return rec;
}

/// Repeated yes-no measurement on n systems each assigned `state`. The
/// product assignment reduces to i.i.d. Bernoulli draws with
/// q = apply_effect(effect, state).
inline TrialRecord simulate_trials(const ModelDescriptor& model, const StateVector& state, const EffectVector& effect,
                                   std::uint64_t n, std::uint64_t seed, std::uint64_t stream_id = 0,
                                   const Tolerances& tol = kDefaultTolerances) {
    if (!model.contains(state, tol)) throw Error("simulate_trials: state is not a state of " + model.id());
    detail::require_same_model(model.id(), effect.model_id(), "simulate_trials");
    const double q = apply_effect(effect, state);
    if (q < -tol.matrix || q > 1.0 + tol.matrix) throw Error("simulate_trials: effect probability outside [0, 1]");
    return simulate_bernoulli(std::clamp(q, 0.0, 1.0), n, seed, stream_id);
}

/// One record per fiducial measurement, stream id = fiducial index.
inline std::vector<TrialRecord> simulate_fiducials(const ModelDescriptor& model, const StateVector& state,
                                                   std::uint64_t n, std::uint64_t seed,
                                                   const Tolerances& tol = kDefaultTolerances) {
    std::vector<TrialRecord> out;
    for (int i = 0; i < model.k(); ++i) {
        out.push_back(simulate_trials(model, state, model.fiducial(static_cast<std::size_t>(i)), n, seed,
                                      static_cast<std::uint64_t>(i), tol));
    }
    return out;
}

/// k / n.
inline double empirical_frequency(const TrialRecord& rec) {
    if (rec.n == 0) throw Error("empirical_frequency: n must be at least 1");
    if (rec.k > rec.n) throw Error("empirical_frequency: k exceeds n");
    return static_cast<double>(rec.k) / static_cast<double>(rec.n);
}

struct TomographyResult {
    StateVector p_hat;
    /// True when the raw frequencies were not a state and had to be corrected.
    bool projected = false;
};

/// Raw relative frequencies of the fiducial records, corrected onto the
/// state set when necessary: simplex projection (classical) or eigenvalue
/// clipping and trace renormalization (quantum).
inline TomographyResult tomographic_estimate(const ModelDescriptor& model, std::span<const TrialRecord> records,
                                             const Tolerances& tol = kDefaultTolerances) {
    if (records.size() != static_cast<std::size_t>(model.k())) {
        throw Error("tomographic_estimate: expected " + std::to_string(model.k()) + " records, got " +
                    std::to_string(records.size()));
    }
    std::vector<double> raw;
    for (const auto& r : records) raw.push_back(empirical_frequency(r));
    if (model.contains(raw, tol)) return {StateVector(std::move(raw), model.id()), false};

    RVector corrected;
    if (model.commutative()) {
        corrected = linalg::project_to_simplex(linalg::view(raw));
    } else {
        const CMatrix& v = model.support_isometry();
        const CMatrix block = linalg::hermitian_part(v.adjoint() * model.frame_inverse(linalg::view(raw)) * v);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(block);
        RVector lambda = es.eigenvalues().cwiseMax(0.0);
        const double total = lambda.sum();
        // All mass clipped away: fall back to the nearest spectrum.
        lambda = total > tol.support ? RVector(lambda / total) : linalg::project_to_simplex(es.eigenvalues());
        const CMatrix sigma = es.eigenvectors() * lambda.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
        corrected = model.frame_apply(v * sigma * v.adjoint());
    }
    return {StateVector(linalg::to_std(corrected), model.id()), true};
}

}  // namespace gptkit
