/*
 * Copyright 2026 The Fedscan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FEDSCAN_LINALG_HPP
#define FEDSCAN_LINALG_HPP

#include <string>

#include "fedscan/error.hpp"
#include "fedscan/types.hpp"

namespace fedscan::linalg {

/// Thin QR factors of an N x K matrix, N >= K.
///
/// Q has orthonormal columns, R is upper triangular with strictly positive
/// diagonal. The positive diagonal pins down the otherwise sign-ambiguous
/// factorization, so two parties factoring the same matrix get the same R.
struct QRFactors {
  Matrix q;  // N x K
  Matrix r;  // K x K, upper triangular, diag > 0
};

/// Throws NonFiniteData if any entry of `a` is NaN or infinite.
void require_finite(const MatrixRef& a, const std::string& what);

/// Householder QR with diag(R) > 0 enforced by post-hoc sign flips.
///
/// Requires n >= k >= 1 and full column rank. A column-rank check is applied
/// to the diagonal of R: |R_kk| <= 1e-10 * max_column_norm(a) * sqrt(n)
/// raises RankDeficient. Deterministic: identical input bytes give identical
/// output bytes. k == 0 yields empty factors.
QRFactors qr_positive(const MatrixRef& a);

/// a^T * b with a fixed accumulation order: each output entry is a single
/// sequential sum over rows. No blocked, fused, or reordered reductions, so
/// the result is reproducible across machines and independent of how the
/// caller partitions columns.
Matrix gram(const MatrixRef& a, const MatrixRef& b);

/// Per-column squared norms, accumulated in the same sequential row order
/// as gram(); entry m equals gram(a, a)(m, m) bitwise.
Vector column_squared_norms(const MatrixRef& a);

/// Solves R^T x = b by forward substitution (no explicit inverse), i.e.
/// returns (R^-1)^T b for upper-triangular R with positive diagonal.
/// Raises SingularTriangular if any |diag| <= 1e-14 * max |diag|.
Matrix solve_rt_transposed(const MatrixRef& r, const MatrixRef& b);

/// Lower Cholesky factor of a symmetric positive definite matrix.
///
/// Raises NotPositiveDefinite when a pivot is <= 0 or <= 1e-12 * trace / k,
/// which in this codebase signals collinear covariates. The returned factor
/// satisfies L L^T = a and (as the transpose) is the unique upper-triangular
/// R with positive diagonal such that R^T R = a.
Matrix cholesky_lower(const MatrixRef& a);

/// Solves a x = b for SPD `a` via cholesky_lower.
Matrix solve_spd(const MatrixRef& a, const MatrixRef& b);

/// Diagonal of a^{-1} from a precomputed lower Cholesky factor; used for
/// coefficient standard errors.
Vector spd_inverse_diagonal_from_factor(const MatrixRef& l);

}  // namespace fedscan::linalg

#endif  // FEDSCAN_LINALG_HPP
