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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gptkit/core.hpp"
#include "gptkit/models.hpp"
#include "gptkit/simplex_lp.hpp"

namespace gptkit {

/// Outcome of a single-shot perfect discrimination query. "Perfect" means
/// probability one, checked at tolerance.distinguish.
struct DistinguishCertificate {
    struct Overlap {
        std::size_t i = 0;
        std::size_t j = 0;
        /// tr(rho_i rho_j), or sum_k p_i[k] p_j[k] for classical models.
        double overlap = 0.0;
    };

    bool distinguishable = false;
    /// Outcome l identifies state l - 1.
    std::optional<Measurement> measurement;
    std::optional<Overlap> failure_witness;
    /// max_{l,i} |f_l(p_i) - delta_li| of the returned measurement.
    double verification_error = 0.0;
    double tolerance = kDefaultTolerances.distinguish;
};

namespace detail {

inline void require_states_of(const ModelDescriptor& model, std::span<const StateVector> states, const char* what) {
    for (const auto& s : states) {
        require_same_model(model.id(), s.model_id(), what);
        model.check_length(s.size(), what);
    }
}

/// Native operators of the states, projected onto the state set.
inline std::vector<CMatrix> native_states(const ModelDescriptor& model, std::span<const StateVector> states,
                                          const Tolerances& tol) {
    std::vector<CMatrix> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(p_to_rho(model, s, tol).matrix());
    return out;
}

inline double overlap(const CMatrix& a, const CMatrix& b) { return linalg::trace_product(a, b); }

inline bool orthogonal(const ModelDescriptor& model, const CMatrix& a, const CMatrix& b, const Tolerances& tol) {
    if (model.commutative()) {
        for (Eigen::Index k = 0; k < a.rows(); ++k) {
            if (a(k, k).real() > tol.support && b(k, k).real() > tol.support) return false;
        }
        return true;
    }
    return linalg::max_abs(a * b) <= tol.distinguish;
}

/// Projector onto the eigenvectors of rho (restricted to the model support)
/// with eigenvalue above the support threshold.
inline CMatrix support_projector(const ModelDescriptor& model, const CMatrix& rho, const Tolerances& tol) {
    const int d = model.hilbert_dim();
    if (model.commutative()) {
        CMatrix p = CMatrix::Zero(d, d);
        for (int k = 0; k < d; ++k) {
            if (rho(k, k).real() > tol.support) p(k, k) = 1.0;
        }
        return p;
    }
    const CMatrix& v = model.support_isometry();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(v.adjoint() * rho * v);
    CMatrix p = CMatrix::Zero(v.cols(), v.cols());
    for (Eigen::Index c = 0; c < es.eigenvalues().size(); ++c) {
        if (es.eigenvalues()[c] > tol.support) p += linalg::outer(es.eigenvectors().col(c));
    }
    return v * p * v.adjoint();
}

}  // namespace detail

/// Decides whether one measurement identifies each of the given states with
/// certainty, and builds it if so.
///
/// Quantum: supports pairwise orthogonal (||rho_i rho_j||_max small); the
/// measurement projects onto each support, the leftover subspace joining
/// outcome 1. Classical: supports pairwise disjoint; indicator partition.
inline DistinguishCertificate perfectly_distinguishable(const ModelDescriptor& model,
                                                        std::span<const StateVector> states,
                                                        const Tolerances& tol = kDefaultTolerances) {
    if (states.size() < 2) throw Error("perfectly_distinguishable: at least 2 states required");
    detail::require_states_of(model, states, "perfectly_distinguishable");
    const auto rhos = detail::native_states(model, states, tol);

    DistinguishCertificate cert;
    cert.tolerance = tol.distinguish;
    for (std::size_t i = 0; i < rhos.size(); ++i) {
        for (std::size_t j = i + 1; j < rhos.size(); ++j) {
            if (!detail::orthogonal(model, rhos[i], rhos[j], tol)) {
                cert.failure_witness = DistinguishCertificate::Overlap{i, j, detail::overlap(rhos[i], rhos[j])};
                return cert;
            }
        }
    }

    const CMatrix& v = model.support_isometry();
    CMatrix remainder = v * v.adjoint();
    std::vector<CMatrix> projectors;
    for (const auto& rho : rhos) {
        projectors.push_back(detail::support_projector(model, rho, tol));
        remainder -= projectors.back();
    }
    projectors.front() += remainder;

    std::vector<EffectVector> effects;
    for (const auto& p : projectors) effects.push_back(effect_from_operator(model, p));
    for (std::size_t l = 0; l < effects.size(); ++l) {
        for (std::size_t i = 0; i < states.size(); ++i) {
            const double want = l == i ? 1.0 : 0.0;
            cert.verification_error = std::max(cert.verification_error, std::abs(apply_effect(effects[l], states[i]) - want));
        }
    }
    if (cert.verification_error > tol.distinguish) {
        // Orthogonality held only up to the noise floor; report the worst pair.
        DistinguishCertificate::Overlap worst;
        double worst_norm = -1.0;
        for (std::size_t i = 0; i < rhos.size(); ++i) {
            for (std::size_t j = i + 1; j < rhos.size(); ++j) {
                const double nrm = linalg::max_abs(rhos[i] * rhos[j]);
                if (nrm > worst_norm) {
                    worst_norm = nrm;
                    worst = {i, j, detail::overlap(rhos[i], rhos[j])};
                }
            }
        }
        cert.failure_witness = worst;
        return cert;
    }
    cert.distinguishable = true;
    cert.measurement.emplace(std::move(effects), model.unit_effect(), false, tol.matrix);
    return cert;
}

struct SubsetResult {
    std::size_t size = 0;
    /// Ascending; lexicographically smallest among maximum subsets when exact.
    std::vector<std::size_t> indices;
    /// True when the ensemble exceeded the exact-search limit and a greedy
    /// pass was used instead.
    bool approximate = false;
};

inline constexpr std::size_t kExactSearchLimit = 20;

namespace detail {

/// Maximum clique by include-first branch and bound over ascending indices.
/// The first maximum clique reached is the lexicographically smallest one.
class CliqueSearch {
   public:
    explicit CliqueSearch(const std::vector<std::vector<bool>>& adj) : adj_(adj) {}

    std::vector<std::size_t> run() {
        std::vector<std::size_t> all(adj_.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        std::vector<std::size_t> current;
        expand(current, all);
        return best_;
    }

   private:
    void expand(std::vector<std::size_t>& current, const std::vector<std::size_t>& candidates) {
        if (current.size() > best_.size()) best_ = current;
        for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
            if (current.size() + (candidates.size() - idx) <= best_.size()) return;
            const std::size_t v = candidates[idx];
            std::vector<std::size_t> next;
            for (std::size_t r = idx + 1; r < candidates.size(); ++r) {
                if (adj_[v][candidates[r]]) next.push_back(candidates[r]);
            }
            current.push_back(v);
            expand(current, next);
            current.pop_back();
        }
    }

    const std::vector<std::vector<bool>>& adj_;
    std::vector<std::size_t> best_;
};

}  // namespace detail

/// Largest perfectly distinguishable subset of the ensemble. Pairwise
/// orthogonality of supports is equivalent to joint distinguishability, so
/// this is a maximum clique in the orthogonality graph.
inline SubsetResult max_distinguishable_subset(const ModelDescriptor& model, std::span<const StateVector> ensemble,
                                               const Tolerances& tol = kDefaultTolerances) {
    SubsetResult out;
    if (ensemble.empty()) return out;
    detail::require_states_of(model, ensemble, "max_distinguishable_subset");
    const auto rhos = detail::native_states(model, ensemble, tol);
    const std::size_t n = rhos.size();
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) adj[i][j] = adj[j][i] = detail::orthogonal(model, rhos[i], rhos[j], tol);
    }
    if (n <= kExactSearchLimit) {
        out.indices = detail::CliqueSearch(adj).run();
    } else {
        out.approximate = true;
        for (std::size_t v = 0; v < n; ++v) {
            bool ok = true;
            for (std::size_t u : out.indices) ok = ok && adj[u][v];
            if (ok) out.indices.push_back(v);
        }
    }
    out.size = out.indices.size();
    return out;
}

/// Seed of the distractor states used by measured_dimension.
inline constexpr std::uint64_t kDimensionProbeSeed = 20020715;

/// The model's canonical pure ensemble: every vertex (classical) or the
/// computational basis of the support followed by 2N random pure states.
inline std::vector<StateVector> canonical_pure_ensemble(const ModelDescriptor& model,
                                                        std::uint64_t seed = kDimensionProbeSeed) {
    std::vector<StateVector> out;
    const CMatrix& v = model.support_isometry();
    for (Eigen::Index c = 0; c < v.cols(); ++c) out.push_back(rho_to_p(model, DensityMatrix::pure(v.col(c))));
    if (!model.commutative()) {
        rng::Stream rng(seed, detail::kPureStream);
        for (int r = 0; r < 2 * model.n(); ++r) out.push_back(rho_to_p(model, random_pure_density(model, rng)));
    }
    return out;
}

/// Operational dimension: size of the largest perfectly distinguishable
/// subset of the canonical pure ensemble.
inline int measured_dimension(const ModelDescriptor& model, const Tolerances& tol = kDefaultTolerances) {
    const auto ensemble = canonical_pure_ensemble(model);
    return static_cast<int>(max_distinguishable_subset(model, ensemble, tol).size);
}

inline constexpr std::size_t kLpStateLimit = 10;

/// Classical route to the same certificate as a linear feasibility problem:
/// a response matrix R >= 0 (row l is the effect for outcome l) whose columns
/// sum to one and with R p_i = e_i. Empty when infeasible.
inline std::optional<Measurement> lp_discrimination(const ModelDescriptor& model, std::span<const StateVector> states,
                                                    const Tolerances& tol = kDefaultTolerances) {
    if (!model.commutative()) throw Error("lp_discrimination: classical model required");
    if (states.empty() || states.size() > kLpStateLimit) throw Error("lp_discrimination: 1 to 10 states required");
    detail::require_states_of(model, states, "lp_discrimination");
    const auto m = static_cast<Eigen::Index>(states.size());
    const Eigen::Index k = model.k();
    RMatrix a = RMatrix::Zero(k + m * m, m * k);
    RVector b = RVector::Zero(k + m * m);
    for (Eigen::Index c = 0; c < k; ++c) {
        for (Eigen::Index l = 0; l < m; ++l) a(c, l * k + c) = 1.0;
        b[c] = 1.0;
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index l = 0; l < m; ++l) {
            const Eigen::Index row = k + i * m + l;
            for (Eigen::Index c = 0; c < k; ++c) a(row, l * k + c) = states[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            b[row] = i == l ? 1.0 : 0.0;
        }
    }
    const auto result = lp::find_feasible_point(a, b, tol.distinguish);
    if (!result.feasible) return std::nullopt;
    std::vector<EffectVector> effects;
    for (Eigen::Index l = 0; l < m; ++l) {
        effects.push_back(model.effect(linalg::to_std(result.x.segment(l * k, k))));
    }
    for (Eigen::Index l = 0; l < m; ++l) {
        for (Eigen::Index i = 0; i < m; ++i) {
            const double want = i == l ? 1.0 : 0.0;
            if (std::abs(apply_effect(effects[static_cast<std::size_t>(l)], states[static_cast<std::size_t>(i)]) - want) >
                tol.distinguish) {
                return std::nullopt;
            }
        }
    }
    return Measurement(std::move(effects), model.unit_effect(), false, tol.matrix);
}

}  // namespace gptkit
