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

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gptkit/core.hpp"
#include "gptkit/error.hpp"
#include "gptkit/linalg.hpp"
#include "gptkit/philox.hpp"
#include "gptkit/tolerances.hpp"

namespace gptkit {

enum class ModelKind { classical, quantum, composite, subspace };

inline const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::classical: return "classical";
        case ModelKind::quantum: return "quantum";
        case ModelKind::composite: return "composite";
        case ModelKind::subspace: return "subspace";
    }
    return "?";
}

inline constexpr int kMaxQuantumDim = 8;
inline constexpr int kMaxClassicalDim = 256;
inline constexpr int kMaxDegreesOfFreedom = 256;

/// Hermitian, positive semidefinite, unit-trace matrix.
class DensityMatrix {
   public:
    static DensityMatrix from_matrix(const CMatrix& m, const Tolerances& tol = kDefaultTolerances) {
        if (m.rows() != m.cols() || m.rows() == 0) throw Error("density matrix: matrix must be square and non-empty");
        if (linalg::hermiticity_defect(m) > tol.hermitian) throw Error("density matrix: matrix is not Hermitian");
        if (std::abs(m.trace() - Complex{1.0, 0.0}) > tol.trace) throw Error("density matrix: trace differs from 1");
        Eigen::SelfAdjointEigenSolver<CMatrix> es(linalg::hermitian_part(m), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol.psd) throw Error("density matrix: negative eigenvalue");
        return DensityMatrix(linalg::hermitian_part(m));
    }

    /// |psi><psi| for the normalized psi.
    static DensityMatrix pure(const CVector& psi) {
        const double norm = psi.norm();
        if (!(norm > 0.0)) throw Error("density matrix: zero state vector");
        return DensityMatrix(linalg::outer(psi / norm));
    }

    static DensityMatrix maximally_mixed(int n) {
        return DensityMatrix(CMatrix::Identity(n, n) / static_cast<double>(n));
    }

    const CMatrix& matrix() const { return m_; }
    int dim() const { return static_cast<int>(m_.rows()); }
    double purity() const { return linalg::trace_product(m_, m_); }

   private:
    explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {}
    CMatrix m_;
};

/// Hermitian projector P_yes; P_no = 1 - P_yes.
class ProjectorEffect {
   public:
    static ProjectorEffect from_matrix(const CMatrix& p, const Tolerances& tol = kDefaultTolerances) {
        if (p.rows() != p.cols() || p.rows() == 0) throw Error("projector: matrix must be square and non-empty");
        if (linalg::hermiticity_defect(p) > tol.hermitian) throw Error("projector: matrix is not Hermitian");
        if (linalg::max_abs(p * p - p) > tol.projector) throw Error("projector: P^2 differs from P");
        return ProjectorEffect(p);
    }
    static ProjectorEffect onto(const CVector& psi) {
        const double norm = psi.norm();
        if (!(norm > 0.0)) throw Error("projector: zero vector");
        return ProjectorEffect(linalg::outer(psi / norm));
    }
    static ProjectorEffect identity(int n) { return ProjectorEffect(CMatrix::Identity(n, n)); }

    const CMatrix& matrix() const { return p_; }
    int dim() const { return static_cast<int>(p_.rows()); }
    ProjectorEffect complement() const { return ProjectorEffect(CMatrix::Identity(dim(), dim()) - p_); }

   private:
    explicit ProjectorEffect(CMatrix p) : p_(std::move(p)) {}
    CMatrix p_;
};

/// Restriction of quantum(parent_n) to the span of M computational-basis
/// vectors (0-based indices).
struct SubspaceSpec {
    int parent_n = 0;
    std::vector<int> basis_indices;

    int m() const { return static_cast<int>(basis_indices.size()); }

    void validate() const {
        if (m() < 1) throw Error("subspace: basis_indices must not be empty");
        if (m() > parent_n) throw Error("subspace: M exceeds the parent dimension");
        std::vector<bool> seen(static_cast<std::size_t>(parent_n), false);
        for (int i : basis_indices) {
            if (i < 0 || i >= parent_n) throw Error("subspace: basis index " + std::to_string(i) + " out of range");
            if (seen[static_cast<std::size_t>(i)]) throw Error("subspace: duplicate basis index " + std::to_string(i));
            seen[static_cast<std::size_t>(i)] = true;
        }
    }
};

/// A concrete theory: dimension N, K fiducial yes-no measurements, and the
/// linear frame p_i = tr(rho F_i) tying native states to state vectors.
///
/// Classical theories use diagonal native operators, so the same frame code
/// serves both kinds. The state space lives on the range of
/// support_isometry() (the identity except for subspace restrictions).
class ModelDescriptor {
   public:
    struct Factors {
        std::string a_id;
        std::string b_id;
        int n_a = 0;
        int n_b = 0;
        int k_a = 0;
        int k_b = 0;
    };

    /// Extension point: any list of Hermitian fiducial operators. The result
    /// is usable for audits even if the frame is rank deficient; conversions
    /// that need the inverse frame then throw.
    static ModelDescriptor from_fiducials(ModelKind kind, std::string id, int n, bool commutative,
                                          CMatrix support_isometry, std::vector<CMatrix> fiducials,
                                          std::vector<std::string> labels,
                                          std::vector<CMatrix> completeness_ops = {},
                                          std::optional<Factors> factors = std::nullopt,
                                          std::vector<int> support_indices = {}) {
        ModelDescriptor m;
        m.kind_ = kind;
        m.id_ = std::move(id);
        m.n_ = n;
        m.commutative_ = commutative;
        m.support_ = std::move(support_isometry);
        m.fiducials_ = std::move(fiducials);
        m.labels_ = std::move(labels);
        m.completeness_ops_ = completeness_ops.empty() ? m.fiducials_ : std::move(completeness_ops);
        m.factors_ = std::move(factors);
        if (support_indices.empty()) {
            for (int i = 0; i < m.support_.cols(); ++i) support_indices.push_back(i);
        }
        m.support_indices_ = std::move(support_indices);
        m.finish();
        return m;
    }

    ModelKind kind() const { return kind_; }
    const std::string& id() const { return id_; }
    /// Dimension in the single-shot distinguishability sense.
    int n() const { return n_; }
    /// Degrees of freedom: length of every state vector.
    int k() const { return static_cast<int>(fiducials_.size()); }
    /// Dimension of the ambient native space (differs from n() for subspaces).
    int hilbert_dim() const { return static_cast<int>(support_.rows()); }
    bool commutative() const { return commutative_; }

    std::span<const CMatrix> fiducial_operators() const { return fiducials_; }
    std::span<const std::string> fiducial_labels() const { return labels_; }
    std::span<const CMatrix> completeness_operators() const { return completeness_ops_; }
    /// The i-th fiducial measurement as a functional: the i-th coordinate.
    EffectVector fiducial(std::size_t i) const { return EffectVector::coordinate(fiducials_.size(), i, id_); }
    const EffectVector& unit_effect() const { return *unit_; }
    const CMatrix& support_isometry() const { return support_; }
    std::span<const int> support_indices() const { return support_indices_; }
    const std::optional<Factors>& factors() const { return factors_; }
    const RMatrix& gram() const { return gram_; }
    bool frame_invertible() const { return frame_invertible_; }

    /// p_i = Re tr(op F_i).
    RVector frame_apply(const CMatrix& op) const {
        RVector p(k());
        for (int i = 0; i < k(); ++i) p[i] = linalg::trace_product(op, fiducials_[static_cast<std::size_t>(i)]);
        return p;
    }

    /// The unique operator in span{F_i} whose frame coordinates are p.
    CMatrix frame_inverse(const RVector& p) const {
        require_invertible("frame inverse");
        const RVector c = gram_inverse_ * p;
        CMatrix out = CMatrix::Zero(hilbert_dim(), hilbert_dim());
        for (int i = 0; i < k(); ++i) out += c[i] * fiducials_[static_cast<std::size_t>(i)];
        return linalg::hermitian_part(out);
    }

    /// Coefficients r with r . p = tr(rho op) for every rho in the frame span.
    RVector dual_coefficients(const CMatrix& op) const {
        require_invertible("dual coefficients");
        return gram_inverse_ * frame_apply(op);
    }

    /// Nearest valid state under the model-specific projection: Euclidean
    /// simplex projection (classical) or nearest density matrix on the
    /// support (quantum).
    RVector project(std::span<const double> p) const {
        check_length(p.size(), "projection");
        const RVector v = linalg::view(p);
        if (commutative_) return linalg::project_to_simplex(v);
        const CMatrix block = support_.adjoint() * frame_inverse(v) * support_;
        const CMatrix sigma = linalg::project_to_density(block);
        return frame_apply(support_ * sigma * support_.adjoint());
    }

    double distance_to_states(std::span<const double> p) const {
        return (linalg::view(p) - project(p)).norm();
    }

    bool contains(std::span<const double> p, const Tolerances& tol = kDefaultTolerances) const {
        return p.size() == static_cast<std::size_t>(k()) && distance_to_states(p) <= tol.membership;
    }
    bool contains(const StateVector& s, const Tolerances& tol = kDefaultTolerances) const {
        return s.model_id() == id_ && contains(s.entries(), tol);
    }

    /// Validated state vector of this model.
    StateVector state(std::vector<double> entries, const Tolerances& tol = kDefaultTolerances) const {
        check_length(entries.size(), "state");
        for (double x : entries) {
            if (!(x >= -tol.membership && x <= 1.0 + tol.membership)) throw Error("state: entry outside [0, 1]");
        }
        const double d = distance_to_states(entries);
        if (d > tol.membership) {
            throw Error("state: entries are not a state of " + id_ + " (distance " + std::to_string(d) + ")");
        }
        return {std::move(entries), id_};
    }

    EffectVector effect(std::vector<double> coeffs) const {
        check_length(coeffs.size(), "effect");
        return {std::move(coeffs), id_};
    }

    void check_length(std::size_t len, const char* what) const {
        if (len != static_cast<std::size_t>(k())) {
            throw Error(std::string(what) + ": expected K=" + std::to_string(k()) + " entries, got " +
                        std::to_string(len));
        }
    }

    void require_invertible(const char* what) const {
        if (!frame_invertible_) throw Error(std::string(what) + ": fiducial frame of " + id_ + " is singular");
    }

   private:
    ModelDescriptor() = default;

    void finish() {
        const int kk = k();
        if (static_cast<int>(labels_.size()) != kk) labels_.resize(static_cast<std::size_t>(kk));
        gram_.resize(kk, kk);
        for (int i = 0; i < kk; ++i) {
            for (int j = 0; j <= i; ++j) {
                gram_(i, j) = gram_(j, i) = linalg::trace_product(fiducials_[static_cast<std::size_t>(i)],
                                                                  fiducials_[static_cast<std::size_t>(j)]);
            }
        }
        const auto info = linalg::psd_rank(gram_, kDefaultTolerances.rank_relative);
        frame_invertible_ = kk > 0 && info.rank == kk;
        if (frame_invertible_) {
            gram_inverse_ = gram_.ldlt().solve(RMatrix::Identity(kk, kk));
            const RVector unit = dual_coefficients(support_ * support_.adjoint());
            unit_ = EffectVector(linalg::to_std(unit), id_);
        } else {
            unit_ = EffectVector::zero(static_cast<std::size_t>(kk), id_);
        }
    }

    ModelKind kind_ = ModelKind::classical;
    std::string id_;
    int n_ = 0;
    bool commutative_ = true;
    CMatrix support_;
    std::vector<CMatrix> fiducials_;
    std::vector<std::string> labels_;
    std::vector<CMatrix> completeness_ops_;
    std::optional<Factors> factors_;
    std::vector<int> support_indices_;
    RMatrix gram_;
    RMatrix gram_inverse_;
    bool frame_invertible_ = false;
    std::optional<EffectVector> unit_;
};

namespace detail {

inline std::string ket(int j) { return "|" + std::to_string(j) + ">"; }

/// |j><j| for every j, then for each j < k the projectors onto
/// (|j> + |k>)/sqrt2 and (|j> + i|k>)/sqrt2: n^2 operators.
inline std::pair<std::vector<CMatrix>, std::vector<std::string>> tomographic_projectors(int n) {
    std::vector<CMatrix> ops;
    std::vector<std::string> labels;
    for (int j = 0; j < n; ++j) {
        CVector v = CVector::Zero(n);
        v[j] = 1.0;
        ops.push_back(linalg::outer(v));
        labels.push_back(ket(j));
    }
    const double h = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
            CVector v = CVector::Zero(n);
            v[j] = h;
            v[k] = h;
            ops.push_back(linalg::outer(v));
            labels.push_back("(" + ket(j) + "+" + ket(k) + ")/sqrt2");
            v[k] = Complex{0.0, h};
            ops.push_back(linalg::outer(v));
            labels.push_back("(" + ket(j) + "+i" + ket(k) + ")/sqrt2");
        }
    }
    return {std::move(ops), std::move(labels)};
}

/// quantum(n) without the supported-range check; n = 1 is the trivial system.
inline ModelDescriptor quantum_unchecked(int n) {
    auto [ops, labels] = tomographic_projectors(n);
    return ModelDescriptor::from_fiducials(ModelKind::quantum, "quantum(" + std::to_string(n) + ")", n, false,
                                           CMatrix::Identity(n, n), std::move(ops), std::move(labels));
}

}  // namespace detail

/// Probability simplex over N outcomes; fiducial i is "is the outcome i?".
inline ModelDescriptor classical_model(int n) {
    if (n < 1 || n > kMaxClassicalDim) {
        throw Error("classical_model: N=" + std::to_string(n) + " outside [1, " + std::to_string(kMaxClassicalDim) + "]");
    }
    std::vector<CMatrix> ops;
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) {
        CMatrix e = CMatrix::Zero(n, n);
        e(i, i) = 1.0;
        ops.push_back(std::move(e));
        labels.push_back("outcome " + std::to_string(i + 1));
    }
    return ModelDescriptor::from_fiducials(ModelKind::classical, "classical(" + std::to_string(n) + ")", n, true,
                                           CMatrix::Identity(n, n), std::move(ops), std::move(labels));
}

/// Density matrices on C^N with the tomographic projector family as fiducials.
inline ModelDescriptor quantum_model(int n) {
    if (n < 2 || n > kMaxQuantumDim) {
        throw Error("quantum_model: N=" + std::to_string(n) + " outside [2, " + std::to_string(kMaxQuantumDim) + "]");
    }
    return detail::quantum_unchecked(n);
}

inline linalg::RankInfo fiducial_rank(const ModelDescriptor& model, const Tolerances& tol = kDefaultTolerances) {
    const auto ops = model.completeness_operators();
    RMatrix g(ops.size(), ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = linalg::trace_product(ops[i], ops[j]);
        }
    }
    return linalg::psd_rank(g, tol.rank_relative);
}

/// Rank of the Hilbert-Schmidt Gram matrix of the fiducial operators.
inline int fiducial_completeness(const ModelDescriptor& model, const Tolerances& tol = kDefaultTolerances) {
    return fiducial_rank(model, tol).rank;
}

namespace detail {

inline void require_native_dim(const ModelDescriptor& model, const CMatrix& m, const char* what) {
    if (m.rows() != model.hilbert_dim()) {
        throw Error(std::string(what) + ": dimension " + std::to_string(m.rows()) + " does not match " + model.id() +
                    " (native dimension " + std::to_string(model.hilbert_dim()) + ")");
    }
}

inline void require_in_state_space(const ModelDescriptor& model, const CMatrix& rho, const Tolerances& tol) {
    if (model.commutative()) {
        CMatrix off = rho;
        off.diagonal().setZero();
        if (linalg::max_abs(off) > tol.hermitian) throw Error("rho_to_p: classical models need a diagonal rho");
    }
    const CMatrix& v = model.support_isometry();
    if (v.cols() != v.rows()) {
        const CMatrix compressed = v * (v.adjoint() * rho * v) * v.adjoint();
        if (linalg::max_abs(rho - compressed) > tol.psd) throw Error("rho_to_p: rho has weight outside the subspace");
    }
}

}  // namespace detail

/// p_i = tr(rho F_i).
inline StateVector rho_to_p(const ModelDescriptor& model, const DensityMatrix& rho,
                            const Tolerances& tol = kDefaultTolerances) {
    detail::require_native_dim(model, rho.matrix(), "rho_to_p");
    detail::require_in_state_space(model, rho.matrix(), tol);
    return {linalg::to_std(model.frame_apply(rho.matrix())), model.id()};
}

/// Linear inverse of rho_to_p. Vectors within tol.image of the state set but
/// whose inverse is not a valid density matrix map to the nearest one.
inline DensityMatrix p_to_rho(const ModelDescriptor& model, const StateVector& p,
                              const Tolerances& tol = kDefaultTolerances) {
    detail::require_same_model(model.id(), p.model_id(), "p_to_rho");
    model.check_length(p.size(), "p_to_rho");
    const double d = model.distance_to_states(p.entries());
    if (d > tol.image) throw Error("p_to_rho: vector lies outside the state set (distance " + std::to_string(d) + ")");
    const CMatrix rho = model.frame_inverse(linalg::view(p.entries()));
    try {
        return DensityMatrix::from_matrix(rho, tol);
    } catch (const Error&) {
        const CMatrix& v = model.support_isometry();
        return DensityMatrix::from_matrix(v * linalg::project_to_density(v.adjoint() * rho * v) * v.adjoint(), tol);
    }
}

/// Effect for an arbitrary Hermitian operator 0 <= E <= 1 on the native space.
inline EffectVector effect_from_operator(const ModelDescriptor& model, const CMatrix& op) {
    detail::require_native_dim(model, op, "effect_from_operator");
    return {linalg::to_std(model.dual_coefficients(op)), model.id()};
}

/// Dual vector r with r . rho_to_p(rho) = tr(rho P) for every state.
inline EffectVector effect_from_projector(const ModelDescriptor& model, const ProjectorEffect& projector) {
    detail::require_native_dim(model, projector.matrix(), "effect_from_projector");
    return effect_from_operator(model, projector.matrix());
}

namespace detail {

inline constexpr std::uint64_t kMixedStream = 0x6d69786564ULL;  // "mixed"
inline constexpr std::uint64_t kPureStream = 0x70757265ULL;     // "pure"

inline CVector random_support_vector(const ModelDescriptor& model, rng::Stream& rng) {
    const auto m = model.support_isometry().cols();
    CVector g(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double re = rng.normal();
        const double im = rng.normal();
        g[i] = Complex{re, im};
    }
    return model.support_isometry() * (g / g.norm());
}

inline std::vector<double> dirichlet(std::size_t n, rng::Stream& rng) {
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) total += (x = rng.exponential());
    for (auto& x : w) x /= total;
    return w;
}

}  // namespace detail

/// Random pure native state: Gaussian vector on the support (quantum) or a
/// uniformly chosen outcome (classical).
inline DensityMatrix random_pure_density(const ModelDescriptor& model, rng::Stream& rng) {
    if (model.commutative()) {
        const int d = model.hilbert_dim();
        CVector e = CVector::Zero(d);
        e[static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(d)))] = 1.0;
        return DensityMatrix::pure(e);
    }
    return DensityMatrix::pure(detail::random_support_vector(model, rng));
}

/// Random full-support native state: flat Dirichlet weights over the outcomes
/// (classical) or over N random pure states (quantum).
inline DensityMatrix random_density(const ModelDescriptor& model, rng::Stream& rng) {
    const int d = model.hilbert_dim();
    if (model.commutative()) {
        const auto w = detail::dirichlet(static_cast<std::size_t>(d), rng);
        CMatrix rho = CMatrix::Zero(d, d);
        for (int i = 0; i < d; ++i) rho(i, i) = w[static_cast<std::size_t>(i)];
        return DensityMatrix::from_matrix(rho);
    }
    const auto w = detail::dirichlet(static_cast<std::size_t>(model.n()), rng);
    CMatrix rho = CMatrix::Zero(d, d);
    for (double wi : w) rho += wi * linalg::outer(detail::random_support_vector(model, rng));
    rho = linalg::hermitian_part(rho);
    rho /= rho.trace().real();
    return DensityMatrix::from_matrix(rho);
}

inline StateVector random_state(const ModelDescriptor& model, std::uint64_t seed) {
    rng::Stream rng(seed, detail::kMixedStream);
    if (model.commutative()) return {detail::dirichlet(static_cast<std::size_t>(model.k()), rng), model.id()};
    return rho_to_p(model, random_density(model, rng));
}

inline StateVector random_pure(const ModelDescriptor& model, std::uint64_t seed) {
    rng::Stream rng(seed, detail::kPureStream);
    return rho_to_p(model, random_pure_density(model, rng));
}

/// Tensor-product theory: fiducials are all products F^A_i (x) F^B_j, index i * K_B + j.
inline ModelDescriptor compose(const ModelDescriptor& a, const ModelDescriptor& b) {
    auto composable = [](const ModelDescriptor& m) { return m.kind() != ModelKind::subspace; };
    if (!composable(a) || !composable(b)) throw Error("compose: subspace-restricted models cannot be composed");
    if (a.commutative() != b.commutative()) {
        throw Error("compose: kind mismatch (" + a.id() + " with " + b.id() + ")");
    }
    const long k = static_cast<long>(a.k()) * b.k();
    if (k > kMaxDegreesOfFreedom) throw Error("compose: K=" + std::to_string(k) + " exceeds the supported 256");
    std::vector<CMatrix> ops;
    std::vector<std::string> labels;
    ops.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < a.k(); ++i) {
        for (int j = 0; j < b.k(); ++j) {
            ops.push_back(linalg::kron(a.fiducial_operators()[static_cast<std::size_t>(i)],
                                       b.fiducial_operators()[static_cast<std::size_t>(j)]));
            labels.push_back(std::string(a.fiducial_labels()[static_cast<std::size_t>(i)]) + " x " +
                             std::string(b.fiducial_labels()[static_cast<std::size_t>(j)]));
        }
    }
    ModelDescriptor::Factors f{a.id(), b.id(), a.n(), b.n(), a.k(), b.k()};
    return ModelDescriptor::from_fiducials(ModelKind::composite, "composite(" + a.id() + "," + b.id() + ")",
                                           a.n() * b.n(), a.commutative(),
                                           linalg::kron(a.support_isometry(), b.support_isometry()), std::move(ops),
                                           std::move(labels), {}, f);
}

/// States supported on span{|i> : i in subspace_spec.basis_indices}.
///
/// Every parent fiducial is compressed onto the subspace; those compressions
/// span the subspace operator algebra and are the completeness operators.
/// The fiducials of the restricted model are the first linearly independent
/// compressions in parent order.
inline ModelDescriptor restrict_to_subspace(const ModelDescriptor& parent, const SubspaceSpec& subspace_spec,
                                            const Tolerances& tol = kDefaultTolerances) {
    if (parent.commutative() || parent.kind() == ModelKind::subspace) {
        throw Error("restrict_to_subspace: parent must be a quantum model");
    }
    if (subspace_spec.parent_n != parent.hilbert_dim()) {
        throw Error("restrict_to_subspace: parent_n=" + std::to_string(subspace_spec.parent_n) + " does not match " + parent.id());
    }
    subspace_spec.validate();
    const int n = parent.hilbert_dim();
    const int m = subspace_spec.m();
    CMatrix v = CMatrix::Zero(n, m);
    for (int c = 0; c < m; ++c) v(subspace_spec.basis_indices[static_cast<std::size_t>(c)], c) = 1.0;
    const CMatrix proj = v * v.adjoint();

    std::vector<CMatrix> compressed;
    for (const auto& f : parent.fiducial_operators()) compressed.push_back(proj * f * proj);

    std::vector<CMatrix> chosen;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < compressed.size() && static_cast<int>(chosen.size()) < m * m; ++i) {
        if (linalg::max_abs(compressed[i]) <= tol.vector) continue;
        chosen.push_back(compressed[i]);
        RMatrix g(chosen.size(), chosen.size());
        for (std::size_t r = 0; r < chosen.size(); ++r) {
            for (std::size_t c = 0; c <= r; ++c) {
                g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    g(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) =
                        linalg::trace_product(chosen[r], chosen[c]);
            }
        }
        if (linalg::psd_rank(g, tol.rank_relative).rank < static_cast<int>(chosen.size())) {
            chosen.pop_back();
        } else {
            labels.push_back(std::string(parent.fiducial_labels()[i]));
        }
    }
    if (static_cast<int>(chosen.size()) != m * m) {
        throw Error("restrict_to_subspace: compressed fiducials do not span the subspace algebra");
    }
    std::string id = "subspace(" + parent.id() + ";";
    for (int c = 0; c < m; ++c) id += (c ? "," : "") + std::to_string(subspace_spec.basis_indices[static_cast<std::size_t>(c)]);
    id += ")";
    return ModelDescriptor::from_fiducials(ModelKind::subspace, std::move(id), m, false, v, std::move(chosen),
                                           std::move(labels), std::move(compressed), std::nullopt,
                                           subspace_spec.basis_indices);
}

/// |psi><psi| for a pure StateVector; throws if the state is not rank one.
inline CVector pure_vector(const ModelDescriptor& model, const StateVector& p,
                           const Tolerances& tol = kDefaultTolerances) {
    const DensityMatrix rho = p_to_rho(model, p, tol);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
    const Eigen::Index top = es.eigenvalues().size() - 1;
    if (es.eigenvalues()[top] < 1.0 - tol.purity) throw Error("pure state required: input has rank > 1");
    return es.eigenvectors().col(top);
}

}  // namespace gptkit
