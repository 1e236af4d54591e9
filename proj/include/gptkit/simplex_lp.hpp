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
#include <limits>
#include <vector>

#include "gptkit/error.hpp"
#include "gptkit/linalg.hpp"

namespace gptkit::lp {

struct FeasibilityResult {
    bool feasible = false;
    /// A basic feasible point when feasible; otherwise the phase-one optimum.
    RVector x;
    /// Phase-one optimum: sum of artificial variables.
    double infeasibility = 0.0;
    int pivots = 0;
};

/// Phase one of the dense tableau simplex method: find x >= 0 with A x = b.
///
/// One artificial variable per row; the sum of artificials is minimized.
/// Bland's rule (smallest entering index, smallest leaving basic index on
/// ratio ties) rules out cycling on degenerate problems.
inline FeasibilityResult find_feasible_point(const RMatrix& a, const RVector& b, double feasibility_tol = 1e-9,
                                             double pivot_tol = 1e-11) {
    if (a.rows() != b.size()) throw Error("lp: row count of A does not match b");
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    const Eigen::Index width = n + m + 1;
    const Eigen::Index rhs = width - 1;

    RMatrix t = RMatrix::Zero(m + 1, width);
    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        const double sign = b[i] < 0.0 ? -1.0 : 1.0;
        t.row(i).head(n) = sign * a.row(i);
        t(i, n + i) = 1.0;
        t(i, rhs) = sign * b[i];
        basis[static_cast<std::size_t>(i)] = n + i;
    }
    // Reduced costs of the phase-one objective with the artificial basis.
    for (Eigen::Index i = 0; i < m; ++i) t.row(m) -= t.row(i);
    for (Eigen::Index i = 0; i < m; ++i) t(m, n + i) = 0.0;

    FeasibilityResult out;
    // Bland's rule terminates; the bound only guards against numerical breakdown.
    const int max_pivots = 50 * static_cast<int>(m + n) + 1000;
    while (out.pivots < max_pivots) {
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < n + m; ++j) {
            if (t(m, j) < -pivot_tol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) break;

        Eigen::Index leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i) {
            if (t(i, enter) <= pivot_tol) continue;
            const double ratio = t(i, rhs) / t(i, enter);
            if (leave < 0) {
                leave = i;
                best_ratio = ratio;
                continue;
            }
            const double slack = 1e-12 * std::max(1.0, std::abs(best_ratio));
            if (ratio < best_ratio - slack) {
                leave = i;
                best_ratio = ratio;
            } else if (ratio <= best_ratio + slack &&
                       basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)]) {
                leave = i;
                best_ratio = std::min(ratio, best_ratio);
            }
        }
        // Phase one is bounded below by zero, so an unbounded column cannot occur.
        if (leave < 0) throw Error("lp: phase-one problem reported unbounded");

        t.row(leave) /= t(leave, enter);
        for (Eigen::Index i = 0; i <= m; ++i) {
            if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
        }
        basis[static_cast<std::size_t>(leave)] = enter;
        ++out.pivots;
    }
    if (out.pivots >= max_pivots) throw Error("lp: pivot limit reached");

    out.x = RVector::Zero(n);
    double artificial = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto j = basis[static_cast<std::size_t>(i)];
        if (j < n) {
            out.x[j] = t(i, rhs);
        } else {
            artificial += t(i, rhs);
        }
    }
    out.infeasibility = artificial;
    out.feasible = artificial <= feasibility_tol;
    return out;
}

}  // namespace gptkit::lp
