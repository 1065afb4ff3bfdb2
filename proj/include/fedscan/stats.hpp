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

#ifndef FEDSCAN_STATS_HPP
#define FEDSCAN_STATS_HPP

#include <cstdint>

namespace fedscan::stats {

struct TTestOutcome {
  double t = 0.0;
  std::int64_t df = 0;
  double p_two_sided = 1.0;
};

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and
/// x in [0, 1], evaluated with a Lentz continued fraction plus the
/// symmetry transformation I_x(a,b) = 1 - I_{1-x}(b,a) for convergence
/// on both tails. Absolute error is at the 1e-15 convergence tolerance;
/// failure to converge within 300 iterations throws NumericError.
double incomplete_beta_regularized(double a, double b, double x);

/// Two-sided Student-t tail probability
///   p = I_{df/(df+t^2)}(df/2, 1/2)
/// with df >= 1 (InvalidDF otherwise). t = +/-Inf gives p = 0; NaN
/// propagates. Symmetric in +/-t, p(0) = 1, monotone decreasing in |t|.
double t_sf_two_sided(double t, std::int64_t df);

TTestOutcome t_test(double t, std::int64_t df);

}  // namespace fedscan::stats

#endif  // FEDSCAN_STATS_HPP
