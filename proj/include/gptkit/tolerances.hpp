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

namespace gptkit {

/// Numerical gates used throughout the library.
///
/// Quantities produced by pure vector arithmetic are compared at `vector`;
/// anything that passed through an eigen-decomposition or a linear inversion is
/// compared at `matrix`.
struct Tolerances {
    double vector = 1e-12;
    double matrix = 1e-9;
    /// Maximum distance from the model's state set for a vector to count as a state.
    double membership = 1e-9;
    /// p_to_rho rejects vectors further than this from the state set.
    double image = 1e-6;
    double hermitian = 1e-12;
    double psd = 1e-10;
    double trace = 1e-12;
    double projector = 1e-10;
    /// Singular values below rank_relative * sigma_max count as zero.
    double rank_relative = 1e-8;
    /// Eigenvalues / entries below this are outside the support.
    double support = 1e-12;
    /// Perfect-discrimination gate: ||rho_i rho_j||_max and |f_l(p_i) - delta_li|.
    double distinguish = 1e-9;
    double purity = 1e-9;
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace gptkit
