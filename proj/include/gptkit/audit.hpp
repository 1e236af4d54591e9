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
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gptkit/distinguish.hpp"
#include "gptkit/io.hpp"
#include "gptkit/models.hpp"

namespace gptkit {

enum class Axiom { simplicity, subspaces, composites, continuity };
enum class Verdict { pass, violated, not_applicable };

inline const char* to_string(Axiom a) {
    switch (a) {
        case Axiom::simplicity: return "simplicity";
        case Axiom::subspaces: return "subspaces";
        case Axiom::composites: return "composites";
        case Axiom::continuity: return "continuity";
    }
    return "?";
}

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::violated: return "violated";
        case Verdict::not_applicable: return "not-applicable";
    }
    return "?";
}

inline Axiom parse_axiom(std::string_view s) {
    for (Axiom a : {Axiom::simplicity, Axiom::subspaces, Axiom::composites, Axiom::continuity}) {
        if (s == to_string(a)) return a;
    }
    throw Error("axiom: unknown name '" + std::string(s) + "'");
}

inline Verdict parse_verdict(std::string_view s) {
    for (Verdict v : {Verdict::pass, Verdict::violated, Verdict::not_applicable}) {
        if (s == to_string(v)) return v;
    }
    throw Error("verdict: unknown value '" + std::string(s) + "'");
}

/// Verdict for one axiom on one model, with the numbers behind it.
/// A violated verdict always carries at least one witness block.
class AuditReport {
   public:
    AuditReport(Axiom axiom, Verdict verdict, std::vector<std::pair<std::string, double>> metrics,
                std::vector<std::string> witnesses, std::string notes = {})
        : axiom_(axiom),
          verdict_(verdict),
          metrics_(std::move(metrics)),
          witnesses_(std::move(witnesses)),
          notes_(std::move(notes)) {
        if (verdict_ == Verdict::violated && witnesses_.empty()) {
            throw Error("audit report: a violated verdict needs a witness");
        }
    }

    Axiom axiom() const { return axiom_; }
    Verdict verdict() const { return verdict_; }
    std::span<const std::pair<std::string, double>> metrics() const { return metrics_; }
    std::span<const std::string> witnesses() const { return witnesses_; }
    const std::string& notes() const { return notes_; }

    std::optional<double> metric(std::string_view name) const {
        for (const auto& [k, v] : metrics_) {
            if (k == name) return v;
        }
        return std::nullopt;
    }

    friend bool operator==(const AuditReport&, const AuditReport&) = default;

   private:
    Axiom axiom_;
    Verdict verdict_;
    std::vector<std::pair<std::string, double>> metrics_;
    std::vector<std::string> witnesses_;
    std::string notes_;
};

/// Header line, one "metric name=value" line per metric, one "note" line,
/// then each witness block introduced by a "witness" line.
inline std::string write_report(const AuditReport& r) {
    std::string out = std::string("axiom=") + to_string(r.axiom()) + " verdict=" + to_string(r.verdict()) + "\n";
    for (const auto& [k, v] : r.metrics()) out += "metric " + k + "=" + io::format_double(v) + "\n";
    if (!r.notes().empty()) out += "note " + r.notes() + "\n";
    for (const auto& w : r.witnesses()) {
        out += "witness\n" + w;
        if (!w.empty() && w.back() != '\n') out += '\n';
    }
    return out;
}

inline AuditReport parse_report(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("report: empty input");
    std::istringstream head(line);
    std::string a;
    std::string v;
    head >> a >> v;
    if (a.rfind("axiom=", 0) != 0 || v.rfind("verdict=", 0) != 0) throw Error("report: malformed header '" + line + "'");
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> witnesses;
    std::string notes;
    while (std::getline(in, line)) {
        if (line.rfind("metric ", 0) == 0) {
            const auto body = line.substr(7);
            const auto eq = body.rfind('=');
            if (eq == std::string::npos) throw Error("report: malformed metric line '" + line + "'");
            metrics.emplace_back(body.substr(0, eq), io::parse_double(body.substr(eq + 1), "report metric"));
        } else if (line.rfind("note ", 0) == 0) {
            notes = line.substr(5);
        } else if (line == "witness") {
            witnesses.emplace_back();
        } else if (!witnesses.empty()) {
            witnesses.back() += line + "\n";
        } else if (!io::trim(line).empty()) {
            throw Error("report: unexpected line '" + line + "'");
        }
    }
    return {parse_axiom(a.substr(6)), parse_verdict(v.substr(8)), std::move(metrics), std::move(witnesses),
            std::move(notes)};
}

namespace detail {

inline std::string write_gram(const ModelDescriptor& m, int rank) {
    std::string out = "gram K=" + std::to_string(m.k()) + " model=" + m.id() + " rank=" + std::to_string(rank) + "\n";
    for (Eigen::Index r = 0; r < m.gram().rows(); ++r) out += io::join(linalg::to_std(m.gram().row(r).transpose())) + "\n";
    return out;
}

inline std::string n_label(std::string_view name, int n) { return std::string(name) + "(N=" + std::to_string(n) + ")"; }

}  // namespace detail

/// K(N) for each given model via fiducial Gram rank; pass iff K = N for
/// classical-type models and K = N^2 for quantum-type ones, with K equal to
/// the fiducial count.
inline AuditReport audit_simplicity(std::span<const ModelDescriptor> models, const Tolerances& tol = kDefaultTolerances) {
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> witnesses;
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& m : models) {
        const auto info = fiducial_rank(m, tol);
        const int expected = m.commutative() ? m.n() : m.n() * m.n();
        metrics.emplace_back(detail::n_label("K", m.n()), info.rank);
        min_margin = std::min(min_margin, info.margin);
        if (info.rank != expected || m.k() != expected) witnesses.push_back(detail::write_gram(m, info.rank));
    }
    metrics.emplace_back("min_rank_margin", min_margin);
    const Verdict v = witnesses.empty() ? Verdict::pass : Verdict::violated;
    return {Axiom::simplicity, v, std::move(metrics), std::move(witnesses),
            "K(N) verified for the instantiated models only; global minimality is not certified"};
}

/// Builds the model for every N up to n_max (classical from 1, quantum from 2).
inline AuditReport audit_simplicity(ModelKind kind, int n_max, const Tolerances& tol = kDefaultTolerances) {
    std::vector<ModelDescriptor> models;
    if (kind == ModelKind::classical) {
        if (n_max < 1 || n_max > 64) throw Error("audit_simplicity: classical N_max must lie in [1, 64]");
        for (int n = 1; n <= n_max; ++n) models.push_back(classical_model(n));
    } else if (kind == ModelKind::quantum) {
        if (n_max < 2 || n_max > kMaxQuantumDim) throw Error("audit_simplicity: quantum N_max must lie in [2, 8]");
        for (int n = 2; n <= n_max; ++n) models.push_back(quantum_model(n));
    } else {
        throw Error("audit_simplicity: kind must be classical or quantum");
    }
    return audit_simplicity(models, tol);
}

inline constexpr std::size_t kSubspaceSamples = 200;

/// Restricts quantum(N) to the first M basis vectors and checks that the
/// result behaves like quantum(M): operator-algebra rank M^2, an invertible
/// linear embedding of quantum(M) state vectors that preserves every effect
/// probability, and operational dimension M.
inline AuditReport audit_subspaces(int n, int m, std::size_t n_samples = kSubspaceSamples, std::uint64_t seed = 1,
                                   const Tolerances& tol = kDefaultTolerances) {
    if (!(1 <= m && m <= n && n <= kMaxQuantumDim)) throw Error("audit_subspaces: need 1 <= M <= N <= 8");
    const ModelDescriptor parent = detail::quantum_unchecked(n);
    SubspaceSpec subspace_spec{n, {}};
    for (int i = 0; i < m; ++i) subspace_spec.basis_indices.push_back(i);
    const ModelDescriptor restricted = restrict_to_subspace(parent, subspace_spec, tol);
    const ModelDescriptor reference = detail::quantum_unchecked(m);
    const CMatrix& v = restricted.support_isometry();

    const int rank = fiducial_completeness(restricted, tol);

    rng::Stream rng(seed, 0);
    const auto km = static_cast<Eigen::Index>(reference.k());
    const auto samples = static_cast<Eigen::Index>(std::max<std::size_t>(n_samples, 1));
    RMatrix p_ref(km, samples);
    RMatrix p_res(restricted.k(), samples);
    double max_dev = 0.0;
    std::optional<std::pair<StateVector, StateVector>> worst;
    for (Eigen::Index s = 0; s < samples; ++s) {
        const DensityMatrix rho = s % 2 ? random_density(reference, rng) : random_pure_density(reference, rng);
        const DensityMatrix embedded = DensityMatrix::from_matrix(v * rho.matrix() * v.adjoint());
        const StateVector a = rho_to_p(reference, rho);
        const StateVector b = rho_to_p(restricted, embedded);
        const StateVector c = rho_to_p(parent, embedded);
        p_ref.col(s) = linalg::view(a.entries());
        p_res.col(s) = linalg::view(b.entries());

        const ProjectorEffect proj = ProjectorEffect::onto(detail::random_support_vector(reference, rng));
        const CMatrix lifted = v * proj.matrix() * v.adjoint();
        const double oracle = linalg::trace_product(rho.matrix(), proj.matrix());
        const double dev = std::max({std::abs(apply_effect(effect_from_projector(reference, proj), a) - oracle),
                                     std::abs(apply_effect(effect_from_operator(restricted, lifted), b) - oracle),
                                     std::abs(apply_effect(effect_from_operator(parent, lifted), c) - oracle)});
        if (dev > max_dev) {
            max_dev = dev;
            worst.emplace(a, b);
        }
    }
    // Embedding map T with T p_ref = p_res, fitted by least squares.
    const RMatrix t = p_ref.transpose().colPivHouseholderQr().solve(p_res.transpose()).transpose();
    const double fit_residual = (t * p_ref - p_res).cwiseAbs().maxCoeff();
    const int t_rank = static_cast<int>(t.rows() == t.cols() ? linalg::psd_rank(t.transpose() * t, tol.rank_relative).rank : -1);
    const int dimension = measured_dimension(restricted, tol);

    const bool ok = rank == m * m && restricted.k() == m * m && fit_residual <= tol.matrix && t_rank == m * m &&
                    max_dev <= tol.matrix && dimension == m;
    std::vector<std::string> witnesses;
    if (!ok) {
        if (worst) {
            witnesses.push_back(io::write_state(worst->first) + io::write_state(worst->second));
        } else {
            witnesses.push_back(detail::write_gram(restricted, rank));
        }
    }
    return {Axiom::subspaces,
            ok ? Verdict::pass : Verdict::violated,
            {{"N", n},
             {"M", m},
             {"restricted_rank", rank},
             {"embedding_rank", t_rank},
             {"embedding_fit_residual", fit_residual},
             {"embedding_max_deviation", max_dev},
             {"measured_dimension", dimension},
             {"samples", static_cast<double>(samples)}},
            std::move(witnesses),
            "behaves-like-M operationalized as rank, embedding, and distinguishability checks"};
}

inline constexpr std::size_t kCompositeSamples = 50;

/// N = N_A N_B, K = K_A K_B, full product-Gram rank, factorization of
/// product-state vectors, and operational dimension of the composite.
inline AuditReport audit_composites(const ModelDescriptor& a, const ModelDescriptor& b, std::uint64_t seed = 1,
                                    const Tolerances& tol = kDefaultTolerances) {
    const ModelDescriptor c = compose(a, b);
    const int rank = fiducial_completeness(c, tol);
    rng::Stream rng(seed, 0);
    double max_dev = 0.0;
    std::optional<StateVector> worst;
    for (std::size_t s = 0; s < kCompositeSamples; ++s) {
        const DensityMatrix ra = random_density(a, rng);
        const DensityMatrix rb = random_density(b, rng);
        const StateVector pa = rho_to_p(a, ra);
        const StateVector pb = rho_to_p(b, rb);
        const StateVector pc = rho_to_p(c, DensityMatrix::from_matrix(linalg::kron(ra.matrix(), rb.matrix())));
        for (int i = 0; i < a.k(); ++i) {
            for (int j = 0; j < b.k(); ++j) {
                const double dev = std::abs(pc[static_cast<std::size_t>(i * b.k() + j)] -
                                            pa[static_cast<std::size_t>(i)] * pb[static_cast<std::size_t>(j)]);
                if (dev > max_dev) {
                    max_dev = dev;
                    worst = pc;
                }
            }
        }
    }
    const int dim_a = measured_dimension(a, tol);
    const int dim_b = measured_dimension(b, tol);
    const int dim_c = measured_dimension(c, tol);
    const bool integers = c.n() == a.n() * b.n() && c.k() == a.k() * b.k();
    const bool ok = integers && rank == a.k() * b.k() && max_dev <= tol.matrix && dim_c == dim_a * dim_b;
    std::vector<std::string> witnesses;
    if (!ok) {
        if (rank != a.k() * b.k() || !worst) {
            witnesses.push_back(detail::write_gram(c, rank));
        } else {
            witnesses.push_back(io::write_state(*worst));
        }
    }
    return {Axiom::composites,
            ok ? Verdict::pass : Verdict::violated,
            {{"N_A", a.n()},
             {"N_B", b.n()},
             {"N", c.n()},
             {"K_A", a.k()},
             {"K_B", b.k()},
             {"K", c.k()},
             {"product_gram_rank", rank},
             {"factorization_max_deviation", max_dev},
             {"measured_dimension_A", dim_a},
             {"measured_dimension_B", dim_b},
             {"measured_dimension", dim_c}},
            std::move(witnesses)};
}

/// Sampled pure path: t_0 = 0 < ... < t_last = 1.
struct PurePath {
    std::vector<double> t_samples;
    std::vector<StateVector> states;
    std::vector<double> purity;
};

namespace detail {

/// Geodesic between two unit vectors: rotation by t * theta in their span,
/// with the global phase of psi1 chosen so that <psi0|psi1> >= 0.
class Geodesic {
   public:
    Geodesic(const CVector& psi0, const CVector& psi1) : psi0_(psi0.normalized()) {
        CVector target = psi1.normalized();
        const Complex ov = psi0_.dot(target);
        if (std::abs(ov) > 0.0) target *= std::conj(ov) / std::abs(ov);
        const double c = std::clamp(psi0_.dot(target).real(), -1.0, 1.0);
        theta_ = std::acos(c);
        const CVector perp = target - c * psi0_;
        const double pn = perp.norm();
        if (pn > 1e-15) {
            perp_ = perp / pn;
        } else {
            theta_ = 0.0;
            perp_ = CVector::Zero(psi0_.size());
        }
    }

    CVector at(double t) const { return std::cos(t * theta_) * psi0_ + std::sin(t * theta_) * perp_; }
    double angle() const { return theta_; }

   private:
    CVector psi0_;
    CVector perp_;
    double theta_ = 0.0;
};

inline void require_quantum(const ModelDescriptor& model, const char* what) {
    if (model.commutative()) throw Error(std::string(what) + ": quantum model required");
}

inline double representation_purity(const ModelDescriptor& model, const StateVector& p) {
    const CMatrix rho = model.frame_inverse(linalg::view(p.entries()));
    return linalg::trace_product(rho, rho);
}

}  // namespace detail

/// Point at parameter t on the continuous reversible path from psi0 to psi1.
/// Both ends must be pure; equal ends give a constant path.
inline StateVector reversible_path(const ModelDescriptor& model, const StateVector& psi0, const StateVector& psi1,
                                   double t, const Tolerances& tol = kDefaultTolerances) {
    detail::require_quantum(model, "reversible_path");
    if (!(t >= 0.0 && t <= 1.0)) throw Error("reversible_path: t must lie in [0, 1]");
    const detail::Geodesic g(pure_vector(model, psi0, tol), pure_vector(model, psi1, tol));
    return rho_to_p(model, DensityMatrix::pure(g.at(t)));
}

/// The path sampled on a uniform grid of `samples` points (at least 2).
inline PurePath sample_path(const ModelDescriptor& model, const StateVector& psi0, const StateVector& psi1,
                            std::size_t samples, const Tolerances& tol = kDefaultTolerances) {
    detail::require_quantum(model, "sample_path");
    if (samples < 2) throw Error("sample_path: at least 2 grid points required");
    const detail::Geodesic g(pure_vector(model, psi0, tol), pure_vector(model, psi1, tol));
    PurePath path;
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = i + 1 == samples ? 1.0 : static_cast<double>(i) / static_cast<double>(samples - 1);
        path.t_samples.push_back(t);
        path.states.push_back(rho_to_p(model, DensityMatrix::pure(g.at(t))));
        path.purity.push_back(detail::representation_purity(model, path.states.back()));
    }
    return path;
}

/// Largest Euclidean distance between adjacent path states.
inline double max_adjacent_step(const PurePath& path) {
    double out = 0.0;
    for (std::size_t i = 1; i < path.states.size(); ++i) {
        out = std::max(out, (linalg::view(path.states[i].entries()) - linalg::view(path.states[i - 1].entries())).norm());
    }
    return out;
}

inline double path_length(const PurePath& path) {
    double out = 0.0;
    for (std::size_t i = 1; i < path.states.size(); ++i) {
        out += (linalg::view(path.states[i].entries()) - linalg::view(path.states[i - 1].entries())).norm();
    }
    return out;
}

/// Geodesic steps have equal Hilbert-Schmidt length; the fiducial frame
/// distorts lengths by at most sqrt(cond(Gram)), which bounds
/// max step / mean step.
inline double continuity_constant(const ModelDescriptor& model) {
    const auto info = fiducial_rank(model);
    return std::sqrt(info.singular_values.front() / info.singular_values[static_cast<std::size_t>(info.rank - 1)]);
}

inline constexpr std::size_t kContinuityPairs = 50;

/// Quantum: geodesic paths between random pure pairs stay pure, hit both
/// endpoints, and move in steps bounded by the continuity modulus.
/// Classical: the pure states are isolated vertices, so the axiom fails; the
/// witness is a pair of vertices and their gap.
inline AuditReport audit_continuity(const ModelDescriptor& model, std::size_t samples = 101,
                                    std::size_t n_pairs = kContinuityPairs, std::uint64_t seed = 1,
                                    const Tolerances& tol = kDefaultTolerances) {
    if (model.n() == 1) {
        return {Axiom::continuity, Verdict::not_applicable, {{"pure_state_count", 1}}, {}, "single pure state"};
    }
    if (model.commutative()) {
        const StateVector e1(linalg::to_std(RVector::Unit(model.k(), 0)), model.id());
        const StateVector e2(linalg::to_std(RVector::Unit(model.k(), 1)), model.id());
        const double gap = (linalg::view(e1.entries()) - linalg::view(e2.entries())).norm();
        return {Axiom::continuity,
                Verdict::violated,
                {{"pure_state_count", model.k()}, {"vertex_gap", gap}},
                {io::write_state(e1) + io::write_state(e2)},
                "pure states are isolated vertices; no continuous pure path joins distinct vertices"};
    }
    if (samples < 2) throw Error("audit_continuity: at least 2 grid points required");
    const double constant = continuity_constant(model);
    double min_purity = std::numeric_limits<double>::infinity();
    double endpoint_error = 0.0;
    double max_step = 0.0;
    double worst_modulus = 0.0;
    std::vector<std::string> witnesses;
    rng::Stream rng(seed, detail::kPureStream);
    for (std::size_t pair = 0; pair < n_pairs; ++pair) {
        const StateVector a = rho_to_p(model, random_pure_density(model, rng));
        const StateVector b = rho_to_p(model, random_pure_density(model, rng));
        const PurePath path = sample_path(model, a, b, samples, tol);
        const double pmin = *std::min_element(path.purity.begin(), path.purity.end());
        const double ends = std::max(
            (linalg::view(path.states.front().entries()) - linalg::view(a.entries())).cwiseAbs().maxCoeff(),
            (linalg::view(path.states.back().entries()) - linalg::view(b.entries())).cwiseAbs().maxCoeff());
        const double step = max_adjacent_step(path);
        const double length = path_length(path);
        const double modulus = length > 0.0 ? step * static_cast<double>(samples - 1) / length : 0.0;
        const bool ok = pmin >= 1.0 - tol.purity && ends <= tol.matrix && modulus <= constant;
        if (!ok && witnesses.empty()) witnesses.push_back(io::write_state(a) + io::write_state(b));
        min_purity = std::min(min_purity, pmin);
        endpoint_error = std::max(endpoint_error, ends);
        max_step = std::max(max_step, step);
        worst_modulus = std::max(worst_modulus, modulus);
    }
    return {Axiom::continuity,
            witnesses.empty() ? Verdict::pass : Verdict::violated,
            {{"pairs", static_cast<double>(n_pairs)},
             {"grid_points", static_cast<double>(samples)},
             {"min_purity", min_purity},
             {"max_endpoint_error", endpoint_error},
             {"max_adjacent_step", max_step},
             {"continuity_modulus", worst_modulus},
             {"continuity_constant", constant}},
            std::move(witnesses)};
}

}  // namespace gptkit
