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

#include "fedscan/stats.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fedscan/error.hpp"

namespace fedscan::stats {

namespace {

constexpr int kMaxIterations = 300;
constexpr double kConvergenceTol = 1e-15;
constexpr double kTiny = 1e-300;

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;

  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;

  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kConvergenceTol) {
      return h;
    }
  }
  std::ostringstream msg;
  msg << "incomplete beta continued fraction did not converge for a=" << a
      << " b=" << b << " x=" << x;
  throw_error(ErrorCode::NumericError, msg.str());
}

}  // namespace

double incomplete_beta_regularized(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw_error(ErrorCode::NumericError, "incomplete beta needs a, b > 0");
  }
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;

  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_sf_two_sided(double t, std::int64_t df) {
  if (df < 1) {
    std::ostringstream msg;
    msg << "degrees of freedom must be >= 1, got " << df;
    throw_error(ErrorCode::InvalidDF, msg.str());
  }
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const double nu = double(df);
  const double x = nu / (nu + t * t);
  return incomplete_beta_regularized(nu / 2.0, 0.5, x);
}

TTestOutcome t_test(double t, std::int64_t df) {
  return TTestOutcome{t, df, t_sf_two_sided(t, df)};
}

}  // namespace fedscan::stats
