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
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gptkit/error.hpp"
#include "gptkit/tolerances.hpp"

namespace gptkit {

/// Vector of yes-probabilities of the fiducial measurements. The K entries
/// determine every other measurement probability for the system.
///
/// A StateVector is a plain immutable value; membership in a particular
/// model's state set is established by ModelDescriptor::state().
class StateVector {
   public:
    StateVector(std::vector<double> entries, std::string model_id)
        : entries_(std::move(entries)), model_id_(std::move(model_id)) {}

    std::span<const double> entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    double operator[](std::size_t i) const { return entries_[i]; }
    const std::string& model_id() const { return model_id_; }

    friend bool operator==(const StateVector&, const StateVector&) = default;

   private:
    std::vector<double> entries_;
    std::string model_id_;
};

/// Linear functional f(p) = coeffs . p realizing a yes-no measurement.
class EffectVector {
   public:
    EffectVector(std::vector<double> coeffs, std::string model_id)
        : coeffs_(std::move(coeffs)), model_id_(std::move(model_id)) {}

    std::span<const double> coeffs() const { return coeffs_; }
    std::size_t size() const { return coeffs_.size(); }
    double operator[](std::size_t i) const { return coeffs_[i]; }
    const std::string& model_id() const { return model_id_; }

    static EffectVector zero(std::size_t k, std::string model_id) {
        return {std::vector<double>(k, 0.0), std::move(model_id)};
    }
    static EffectVector coordinate(std::size_t k, std::size_t i, std::string model_id) {
        std::vector<double> c(k, 0.0);
        c.at(i) = 1.0;
        return {std::move(c), std::move(model_id)};
    }

    friend bool operator==(const EffectVector&, const EffectVector&) = default;

   private:
    std::vector<double> coeffs_;
    std::string model_id_;
};

namespace detail {

inline void require_same_model(const std::string& a, const std::string& b, const char* what) {
    if (a != b) throw Error(std::string(what) + ": model mismatch (" + a + " vs " + b + ")");
}

inline void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw Error(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                    std::to_string(b) + ")");
    }
}

inline EffectVector add(const EffectVector& a, const EffectVector& b) {
    require_same_model(a.model_id(), b.model_id(), "effect sum");
    require_same_length(a.size(), b.size(), "effect sum");
    std::vector<double> c(a.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
    return {std::move(c), a.model_id()};
}

}  // namespace detail

/// f(p): probability of "yes" for the effect on the given state.
inline double apply_effect(const EffectVector& effect, const StateVector& state) {
    detail::require_same_model(effect.model_id(), state.model_id(), "apply_effect");
    detail::require_same_length(effect.size(), state.size(), "apply_effect");
    double sum = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) sum += effect[i] * state[i];
    return sum;
}

/// A device with outcomes l = 1..L, one effect per outcome. The effects sum to
/// the unit effect. Whether the device reports 0 when no system arrives is
/// recorded but carries no probability.
class Measurement {
   public:
    Measurement(std::vector<EffectVector> outcome_effects, const EffectVector& unit_effect,
                bool null_supported = false, double tol = kDefaultTolerances.matrix)
        : effects_(std::move(outcome_effects)), null_supported_(null_supported) {
        if (effects_.empty()) throw Error("measurement: outcome_effects must contain L >= 1 effects");
        EffectVector total = EffectVector::zero(unit_effect.size(), unit_effect.model_id());
        for (const auto& e : effects_) total = detail::add(total, e);
        for (std::size_t i = 0; i < total.size(); ++i) {
            if (std::abs(total[i] - unit_effect[i]) > tol) {
                throw Error("measurement: outcome_effects do not sum to the unit effect (component " +
                            std::to_string(i) + ")");
            }
        }
    }

    std::size_t outcome_count() const { return effects_.size(); }
    /// Outcome labels are 1-based.
    const EffectVector& effect(std::size_t label) const {
        if (label < 1 || label > effects_.size()) {
            throw Error("measurement: outcome label " + std::to_string(label) + " out of range");
        }
        return effects_[label - 1];
    }
    std::span<const EffectVector> effects() const { return effects_; }
    bool null_supported() const { return null_supported_; }
    const std::string& model_id() const { return effects_.front().model_id(); }

   private:
    std::vector<EffectVector> effects_;
    bool null_supported_;
};

/// State assignment conditioned on an event E with Pr(E) = lambda: p_A if E,
/// p_B if not E.
class MixtureSpec {
   public:
    MixtureSpec(double lambda, StateVector state_if_e, StateVector state_if_not_e)
        : lambda_(lambda), a_(std::move(state_if_e)), b_(std::move(state_if_not_e)) {
        if (!(lambda_ >= 0.0 && lambda_ <= 1.0)) throw Error("mixture: lambda must lie in [0, 1]");
        detail::require_same_model(a_.model_id(), b_.model_id(), "mixture");
        detail::require_same_length(a_.size(), b_.size(), "mixture");
    }

    double lambda() const { return lambda_; }
    const StateVector& state_if_e() const { return a_; }
    const StateVector& state_if_not_e() const { return b_; }

   private:
    double lambda_;
    StateVector a_;
    StateVector b_;
};

/// lambda p_A + (1 - lambda) p_B, componentwise.
inline StateVector mix(const MixtureSpec& mixture) {
    const double l = mixture.lambda();
    const auto& a = mixture.state_if_e();
    const auto& b = mixture.state_if_not_e();
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = l * a[i] + (1.0 - l) * b[i];
    return {std::move(out), a.model_id()};
}

struct ConditionReport {
    double pr_yes_given_e;
    double pr_yes_given_not_e;
    double pr_yes;
};

/// (f(p_A), f(p_B), f(mix)). The law of total probability demands
/// pr_yes == lambda * pr_yes_given_e + (1 - lambda) * pr_yes_given_not_e.
inline ConditionReport condition_report(const MixtureSpec& mixture, const EffectVector& effect) {
    return {apply_effect(effect, mixture.state_if_e()), apply_effect(effect, mixture.state_if_not_e()),
            apply_effect(effect, mix(mixture))};
}

/// Effect for "is the outcome in subset?". Labels are 1-based.
inline EffectVector coarse_grain(const Measurement& m, const std::set<std::size_t>& subset) {
    const auto& first = m.effect(1);
    EffectVector out = EffectVector::zero(first.size(), first.model_id());
    for (std::size_t label : subset) out = detail::add(out, m.effect(label));
    return out;
}

}  // namespace gptkit
