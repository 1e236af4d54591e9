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

#include <cstdint>
#include <optional>

#include "gptkit/core.hpp"
#include "gptkit/models.hpp"

namespace gptkit {

struct EffectCheck {
    bool valid = true;
    /// Distance of the worst value outside [-tol, 1 + tol]; 0 when valid.
    double worst_violation = 0.0;
    double min_value = 0.0;
    double max_value = 0.0;
    /// State attaining the worst value (first one found on ties).
    std::optional<StateVector> witness;
    double witness_value = 0.0;
};

/// Sampling test of 0 <= f(p) <= 1 over the model's state set.
///
/// Classical models are probed on every vertex first, quantum models on
/// random pure states; both then on random mixed states. A failure is a
/// certificate, a pass is evidence.
inline EffectCheck check_effect_validity(const EffectVector& effect, const ModelDescriptor& model,
                                         std::size_t n_samples, std::uint64_t seed,
                                         const Tolerances& tol = kDefaultTolerances) {
    model.check_length(effect.size(), "check_effect_validity");
    EffectCheck out;
    out.min_value = std::numeric_limits<double>::infinity();
    out.max_value = -std::numeric_limits<double>::infinity();
    double worst_excess = -std::numeric_limits<double>::infinity();

    auto probe = [&](const StateVector& s) {
        const double f = apply_effect(effect, s);
        out.min_value = std::min(out.min_value, f);
        out.max_value = std::max(out.max_value, f);
        const double excess = std::max(f - 1.0, -f);
        if (excess > worst_excess) {
            worst_excess = excess;
            out.witness = s;
            out.witness_value = f;
        }
    };

    if (model.commutative()) {
        for (int i = 0; i < model.k(); ++i) probe({linalg::to_std(RVector::Unit(model.k(), i)), model.id()});
    }
    rng::Stream rng(seed, 0);
    for (std::size_t s = 0; s < n_samples; ++s) {
        probe(rho_to_p(model, model.commutative() || s % 2 == 1 ? random_density(model, rng)
                                                                 : random_pure_density(model, rng)));
    }
    out.worst_violation = std::max(0.0, worst_excess - tol.matrix);
    out.valid = out.worst_violation == 0.0;
    return out;
}

}  // namespace gptkit
