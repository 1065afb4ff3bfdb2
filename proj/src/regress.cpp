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

#include "fedscan/regress.hpp"

#include <cmath>
#include <sstream>

#include "fedscan/error.hpp"
#include "fedscan/linalg.hpp"
#include "fedscan/stats.hpp"

namespace fedscan::regress {

namespace {
constexpr double kTau2ClampRel = 1e-9;
}

RegressionSufficient compress_regression(const MatrixRef& y, const MatrixRef& c) {
  if (y.cols() != 1) {
    throw_error(ErrorCode::DimensionMismatch, "response must be a single column");
  }
  if (y.rows() != c.rows()) {
    std::ostringstream msg;
    msg << "response has " << y.rows() << " rows, covariates have " << c.rows();
    throw_error(ErrorCode::DimensionMismatch, msg.str());
  }
  if (y.rows() == 0) {
    throw_error(ErrorCode::EmptyInput, "no samples");
  }
  linalg::require_finite(y, "response");
  linalg::require_finite(c, "covariates");

  RegressionSufficient s;
  s.n = y.rows();
  s.yty = linalg::column_squared_norms(y)(0);
  s.cty = linalg::gram(c, y);
  s.ctc = linalg::gram(c, c);
  return s;
}

RegressionSufficient combine_regression(std::span<const RegressionSufficient> parts) {
  if (parts.empty()) {
    throw_error(ErrorCode::EmptyInput, "no parts to combine");
  }
  const Index k = parts.front().cty.size();
  RegressionSufficient out;
  out.n = 0;
  out.yty = 0.0;
  out.cty = Vector::Zero(k);
  out.ctc = Matrix::Zero(k, k);
  for (const RegressionSufficient& p : parts) {
    if (p.cty.size() != k || p.ctc.rows() != k || p.ctc.cols() != k) {
      throw_error(ErrorCode::ShapeMismatch,
                  "parts disagree on the covariate count");
    }
    out.n += p.n;
    out.yty += p.yty;
    out.cty += p.cty;
    out.ctc += p.ctc;
  }
  return out;
}

RegressionResult regression_stats(const RegressionSufficient& s) {
  const Index k = s.ctc.rows();
  if (s.n <= k) {
    std::ostringstream msg;
    msg << "need more samples than covariates: n=" << s.n << " k=" << k;
    throw_error(ErrorCode::InsufficientSamples, msg.str());
  }

  const Matrix l = linalg::cholesky_lower(s.ctc);
  Matrix gamma = s.cty;
  l.triangularView<Eigen::Lower>().solveInPlace(gamma);
  l.transpose().triangularView<Eigen::Upper>().solveInPlace(gamma);
  const Vector v = linalg::spd_inverse_diagonal_from_factor(l);

  RegressionResult res;
  res.gamma_hat = gamma.col(0);
  res.df = s.n - k;

  // Pythagorean form of the residual sum of squares.
  const double explained = res.gamma_hat.dot(s.ctc * res.gamma_hat);
  double rss = s.yty - explained;
  if (rss < 0.0) {
    if (std::abs(rss) < kTau2ClampRel * s.yty) {
      rss = 0.0;
    } else {
      std::ostringstream msg;
      msg << "residual sum of squares is negative beyond rounding: " << rss;
      throw_error(ErrorCode::NumericError, msg.str());
    }
  }
  res.tau2_hat = rss / double(res.df);

  const double tau = std::sqrt(res.tau2_hat);
  res.se = tau * v.cwiseSqrt();
  res.t_stats.resize(k);
  res.p_values.resize(k);
  for (Index j = 0; j < k; ++j) {
    res.t_stats(j) = res.gamma_hat(j) / res.se(j);
    res.p_values(j) = stats::t_sf_two_sided(res.t_stats(j), res.df);
  }
  return res;
}

}  // namespace fedscan::regress
