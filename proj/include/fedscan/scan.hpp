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

#ifndef FEDSCAN_SCAN_HPP
#define FEDSCAN_SCAN_HPP

#include <cstdint>

#include "fedscan/types.hpp"

namespace fedscan::scan {

/// One regression per (feature, response) pair: the response is modeled on
/// [feature column, permanent covariates], but only feature-level dot
/// products are ever formed. Projecting both sides off the covariate space
/// reduces each test to a one-dimensional regression.
struct ScanInputs {
  Matrix y;  // N x T responses
  Matrix x;  // N x M transient covariates (one test each)
  Matrix c;  // N x K permanent covariates (present in every test); K may be 0
  // Covariates absorbed by mean-centering upstream. They are no longer
  // columns of c but still consume degrees of freedom: df = n - k - absorbed - 1.
  Index absorbed = 0;
};

/// Response-side quantities shared by every feature test. Carries the
/// responses themselves so that feature blocks can form X . y locally.
struct ScanCore {
  std::int64_t n = 0;
  Matrix y;       // N x T responses
  Matrix q;       // N x K, orthonormal basis of span(c); N x 0 when K = 0
  Vector yy;      // y . y per response, length T
  Matrix qty;     // Q^T y, K x T
  Vector qty_sq;  // squared column norms of qty, length T
};

/// Per-feature cross statistics for a block of B feature columns.
struct FeatureCross {
  Matrix xty;      // B x T: X_m . y_t
  Vector xx;       // B:     X_m . X_m
  Matrix qtx;      // K x B: Q^T X
  Matrix qtx_qty;  // B x T: Q^T X_m . Q^T y_t
  Vector qtx_sq;   // B:     Q^T X_m . Q^T X_m
};

struct ScanResult {
  Matrix beta_hat;   // M x T
  Matrix se;         // M x T
  Matrix t_stats;    // M x T
  Matrix p_values;   // M x T
  BoolArray valid;   // M x T; invalid cells hold NaN in all four matrices
  std::int64_t df = 0;
};

/// Step 1-2: factor the covariates and project the responses.
/// K = 0 is the empty-projection case (q has zero columns).
ScanCore scan_prepare(const MatrixRef& y, const MatrixRef& c);

/// Step 3: cross statistics for one block of feature columns. Each output
/// column depends only on its own input column, so any partition of the
/// features into blocks produces bitwise-identical statistics.
FeatureCross scan_block(const ScanCore& core, const MatrixRef& x_block);

/// Step 4: closed-form estimates from the cross statistics.
///
/// For feature m with denominator d_m = X.X - |Q^T X|^2:
///   beta  = (X.y - Q^T X . Q^T y) / d_m
///   sigma^2 = ((y.y - |Q^T y|^2) / d_m - beta^2) / df,  df = n - k - absorbed - 1
///
/// Features with d_m <= 1e-10 * X.X (absolute 1e-30 when X.X = 0) lie in the
/// covariate span and are flagged invalid rather than aborting the scan.
/// A sigma^2 that rounds slightly negative is clamped to zero: the fit is
/// perfect, so t is +/-Inf and p = 0 when beta != 0, and the cell is invalid
/// when beta is also 0.
ScanResult scan_finalize(const FeatureCross& cross, const Vector& yy,
                         const Vector& qty_sq, std::int64_t n, Index k,
                         Index absorbed = 0);

/// Full scan: prepare, blocked (optionally parallel) cross statistics,
/// finalize. The result is bitwise independent of block_size and
/// parallelism.
ScanResult scan(const ScanInputs& inputs, Index block_size = 256,
                int parallelism = 1);

}  // namespace fedscan::scan

#endif  // FEDSCAN_SCAN_HPP
