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

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <numeric>
#include <span>
#include <vector>

namespace gptkit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

namespace linalg {

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline double hermiticity_defect(const CMatrix& m) { return max_abs(m - m.adjoint()); }

inline CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

/// Re tr(a b), without forming the product.
inline double trace_product(const CMatrix& a, const CMatrix& b) {
    return (a.array() * b.transpose().array()).sum().real();
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline CMatrix outer(const CVector& psi) { return psi * psi.adjoint(); }

/// Singular-value rank of a symmetric positive semidefinite matrix.
struct RankInfo {
    int rank = 0;
    /// Descending.
    std::vector<double> singular_values;
    /// Smallest kept singular value over the largest discarded one. When nothing
    /// is discarded, the cut-off itself stands in for the discarded value.
    double margin = 0.0;
};

inline RankInfo psd_rank(const RMatrix& gram, double relative_threshold) {
    RankInfo info;
    if (gram.rows() == 0) return info;
    Eigen::SelfAdjointEigenSolver<RMatrix> es(gram, Eigen::EigenvaluesOnly);
    RVector ev = es.eigenvalues().cwiseAbs();
    info.singular_values.assign(ev.data(), ev.data() + ev.size());
    std::sort(info.singular_values.begin(), info.singular_values.end(), std::greater<>());
    const double cut = relative_threshold * info.singular_values.front();
    double smallest_kept = 0.0;
    double largest_dropped = cut;
    bool dropped = false;
    for (double s : info.singular_values) {
        if (s > cut) {
            ++info.rank;
            smallest_kept = s;
        } else if (!dropped) {
            largest_dropped = s;
            dropped = true;
        }
    }
    info.margin = largest_dropped > 0.0 ? smallest_kept / largest_dropped
                                        : std::numeric_limits<double>::infinity();
    return info;
}

/// Euclidean projection onto the probability simplex {x >= 0, sum x = 1}.
inline RVector project_to_simplex(const RVector& v) {
    const Eigen::Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        cumulative += u[j];
        const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) theta = t;
    }
    return (v.array() - theta).cwiseMax(0.0).matrix();
}

/// Nearest (Frobenius) unit-trace positive semidefinite matrix to a Hermitian one.
inline CMatrix project_to_density(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h));
    const RVector lambda = project_to_simplex(es.eigenvalues());
    return es.eigenvectors() * lambda.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

inline Eigen::Map<const RVector> view(std::span<const double> s) {
    return {s.data(), static_cast<Eigen::Index>(s.size())};
}

inline std::vector<double> to_std(const RVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace linalg
}  // namespace gptkit
