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

#ifndef FEDSCAN_REGRESS_HPP
#define FEDSCAN_REGRESS_HPP

#include <cstdint>
#include <span>

#include "fedscan/types.hpp"

namespace fedscan::regress {

/// Sufficient statistics for linear regression of one response on K
/// covariates. Statistics from disjoint sample sets sum componentwise to
/// the pooled statistics, which is what makes multi-party combination
/// exact rather than a meta-analysis.
struct RegressionSufficient {
  std::int64_t n = 0;  // sample count
  double yty = 0.0;    // y . y
  Vector cty;          // C^T y, length K
  Matrix ctc;          // C^T C, K x K
};

struct RegressionResult {
  Vector gamma_hat;   // coefficient estimates, length K
  double tau2_hat;    // unbiased residual variance estimate
  Vector se;          // standard errors tau * sqrt(diag((C^T C)^-1))
  Vector t_stats;
  Vector p_values;    // two-sided, t distribution with df = n - k
  std::int64_t df;    // n - k
};

/// Reduces (y, C) to covariate-dimension dot products. The output size is
/// independent of the number of rows.
RegressionSufficient compress_regression(const MatrixRef& y, const MatrixRef& c);

/// Componentwise sum over parties holding disjoint samples. All parts must
/// agree on K (shape only; aligning covariate meaning across parties is the
/// caller's contract).
RegressionSufficient combine_regression(std::span<const RegressionSufficient> parts);

/// Full regression output from sufficient statistics. Requires n > k and
/// positive definite C^T C. A residual variance that rounds slightly
/// negative (within 1e-9 * yty) is clamped to zero.
RegressionResult regression_stats(const RegressionSufficient& s);

}  // namespace fedscan::regress

#endif  // FEDSCAN_REGRESS_HPP
