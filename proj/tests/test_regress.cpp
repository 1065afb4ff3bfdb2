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

#include <random>
#include <vector>

#include "doctest.h"
#include "fedscan/error.hpp"
#include "oracles.hpp"

using namespace fedscan;
using regress::combine_regression;
using regress::compress_regression;
using regress::regression_stats;
using regress::RegressionSufficient;

namespace {

// Splits rows into `parts` contiguous chunks, each nonempty.
std::vector<RegressionSufficient> compress_split(const Matrix& y,
                                                 const Matrix& c, int parts) {
  std::vector<RegressionSufficient> out;
  const Index n = y.rows();
  Index start = 0;
  for (int p = 0; p < parts; ++p) {
    const Index rows = p + 1 == parts ? n - start : std::max<Index>(1, n / parts);
    out.push_back(compress_regression(y.middleRows(start, rows),
                                      c.middleRows(start, rows)));
    start += rows;
  }
  return out;
}

}  // namespace

TEST_CASE("compress_regression hand values") {
  Matrix y(2, 1);
  y << 1.0, 1.0;
  const Matrix ones = Matrix::Ones(2, 1);
  const RegressionSufficient s = compress_regression(y, ones);
  CHECK(s.n == 2);
  CHECK(s.yty == 2.0);
  CHECK(s.cty(0) == 2.0);
  CHECK(s.ctc(0, 0) == 2.0);

  const RegressionSufficient zero = compress_regression(Matrix::Zero(3, 1), Matrix::Ones(3, 1));
  CHECK(zero.yty == 0.0);
  CHECK(zero.cty(0) == 0.0);
}

TEST_CASE("compress_regression matches the naive oracle") {
  std::mt19937_64 rng(101);
  const Matrix y = oracle::random_matrix(rng, 50, 1);
  const Matrix c = oracle::random_matrix(rng, 50, 3);
  const RegressionSufficient s = compress_regression(y, c);
  CHECK(std::abs(s.yty - oracle::naive_gram(y, y)(0, 0)) <
        1e-12 * std::abs(s.yty));
  CHECK(oracle::max_rel_diff(s.cty, oracle::naive_gram(c, y)) < 1e-12);
  CHECK(oracle::max_rel_diff(s.ctc, oracle::naive_gram(c, c)) < 1e-12);
}

TEST_CASE("compress_regression validates inputs") {
  CHECK_THROWS_AS(compress_regression(Matrix::Zero(3, 1), Matrix::Ones(4, 1)),
                  Error);
  CHECK_THROWS_AS(compress_regression(Matrix::Zero(3, 2), Matrix::Ones(3, 1)),
                  Error);
}

TEST_CASE("combine_regression identity and sums") {
  std::mt19937_64 rng(103);
  const Matrix y = oracle::random_matrix(rng, 20, 1);
  const Matrix c = oracle::random_matrix(rng, 20, 2);
  const RegressionSufficient s = compress_regression(y, c);

  const std::vector<RegressionSufficient> one{s};
  const RegressionSufficient single = combine_regression(one);
  CHECK(single.n == s.n);
  CHECK(single.yty == s.yty);
  CHECK(oracle::bitwise_equal(single.ctc, s.ctc));

  RegressionSufficient a = s, b = s;
  a.yty = 1.0;
  b.yty = 2.5;
  const std::vector<RegressionSufficient> both{a, b};
  CHECK(combine_regression(both).yty == 3.5);
}

TEST_CASE("combine over a split equals compress of pooled data") {
  std::mt19937_64 rng(107);
  const Matrix y = oracle::random_matrix(rng, 61, 1);
  const Matrix c = oracle::random_matrix(rng, 61, 3);
  const RegressionSufficient pooled = compress_regression(y, c);
  const auto parts = compress_split(y, c, 3);
  const RegressionSufficient merged = combine_regression(parts);
  CHECK(merged.n == pooled.n);
  CHECK(std::abs(merged.yty - pooled.yty) <= 1e-12 * std::abs(pooled.yty));
  CHECK(oracle::max_rel_diff(merged.cty, pooled.cty) < 1e-12);
  CHECK(oracle::max_rel_diff(merged.ctc, pooled.ctc) < 1e-12);
}

TEST_CASE("combine_regression rejects empty and mismatched input") {
  CHECK_THROWS_AS(combine_regression({}), Error);
  std::mt19937_64 rng(109);
  const RegressionSufficient a = compress_regression(
      oracle::random_matrix(rng, 10, 1), oracle::random_matrix(rng, 10, 2));
  const RegressionSufficient b = compress_regression(
      oracle::random_matrix(rng, 10, 1), oracle::random_matrix(rng, 10, 3));
  const std::vector<RegressionSufficient> parts{a, b};
  try {
    combine_regression(parts);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeMismatch);
  }
}

TEST_CASE("regression_stats on a perfect fit") {
  Matrix c(3, 1);
  c << 1.0, 2.0, 3.0;
  const Matrix y = 2.0 * c;
  const auto res = regression_stats(compress_regression(y, c));
  CHECK(res.gamma_hat(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(res.tau2_hat == 0.0);
  CHECK(res.df == 2);
  CHECK(res.p_values(0) == 0.0);  // infinite t on a perfect fit
}

TEST_CASE("regression_stats hand arithmetic") {
  Matrix y(2, 1);
  y << 0.0, 2.0;
  const auto res = regression_stats(compress_regression(y, Matrix::Ones(2, 1)));
  CHECK(res.gamma_hat(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(res.tau2_hat == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(res.df == 1);
  CHECK(res.se(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(res.t_stats(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(res.p_values(0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("regression_stats matches the textbook OLS oracle") {
  std::mt19937_64 rng(113);
  const Matrix c = oracle::random_matrix(rng, 200, 4);
  Vector truth(4);
  truth << 1.0, -0.5, 0.25, 2.0;
  Vector y = c * truth;
  for (Index i = 0; i < y.size(); ++i) {
    y(i) += 0.3 * std::normal_distribution<double>()(rng);
  }
  const auto res = regression_stats(compress_regression(y, c));
  const auto fit = oracle::ols_fit(y, c);
  CHECK(oracle::max_rel_diff(res.gamma_hat, fit.beta) < 1e-9);
  CHECK(oracle::max_rel_diff(res.se, fit.se) < 1e-9);
  CHECK(std::abs(res.tau2_hat - fit.tau2) < 1e-9 * fit.tau2);
  CHECK(res.df == fit.df);

  // Normal equations hold.
  const RegressionSufficient s = compress_regression(y, c);
  const Vector lhs = s.ctc * res.gamma_hat;
  CHECK(oracle::max_rel_diff(lhs, s.cty) < 1e-9);
}

TEST_CASE("party-count invariance for one to five parties") {
  std::mt19937_64 rng(127);
  const Matrix y = oracle::random_matrix(rng, 83, 1);
  const Matrix c = oracle::random_matrix(rng, 83, 3);
  const auto reference = regression_stats(compress_regression(y, c));
  for (int parties = 1; parties <= 5; ++parties) {
    const auto parts = compress_split(y, c, parties);
    const auto res = regression_stats(combine_regression(parts));
    CHECK(oracle::max_rel_diff(res.gamma_hat, reference.gamma_hat) < 1e-10);
    CHECK(oracle::max_rel_diff(res.se, reference.se) < 1e-10);
    CHECK(std::abs(res.tau2_hat - reference.tau2_hat) <=
          1e-10 * std::abs(reference.tau2_hat));
  }
}

TEST_CASE("tau2 equals the directly computed mean squared residual") {
  std::mt19937_64 rng(131);
  const Matrix c = oracle::random_matrix(rng, 90, 5);
  const Vector y = oracle::random_matrix(rng, 90, 1);
  const auto res = regression_stats(compress_regression(y, c));
  const Vector residual = y - c * res.gamma_hat;
  const double direct = residual.squaredNorm() / double(y.size() - 5);
  CHECK(std::abs(res.tau2_hat - direct) < 1e-9 * direct);
}

TEST_CASE("scaling the response scales the estimates but not t") {
  std::mt19937_64 rng(137);
  const Matrix c = oracle::random_matrix(rng, 70, 3);
  const Vector y = oracle::random_matrix(rng, 70, 1);
  const auto base = regression_stats(compress_regression(y, c));
  const double s = 3.75;
  const auto scaled = regression_stats(compress_regression(Matrix(s * y), c));
  CHECK(oracle::max_rel_diff(scaled.gamma_hat, Matrix(s * base.gamma_hat)) <
        1e-10);
  CHECK(std::abs(scaled.tau2_hat - s * s * base.tau2_hat) <=
        1e-10 * scaled.tau2_hat);
  CHECK(oracle::max_rel_diff(scaled.t_stats, base.t_stats) < 1e-10);
}

TEST_CASE("regression_stats error paths") {
  std::mt19937_64 rng(139);
  RegressionSufficient s = compress_regression(oracle::random_matrix(rng, 3, 1),
                                               oracle::random_matrix(rng, 3, 3));
  try {
    regression_stats(s);
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientSamples);
  }

  Matrix c(5, 2);
  c.col(0) << 1.0, 2.0, 3.0, 4.0, 5.0;
  c.col(1) = c.col(0);
  const Matrix y = oracle::random_matrix(rng, 5, 1);
  try {
    regression_stats(compress_regression(y, c));
    FAIL("expected NotPositiveDefinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPositiveDefinite);
  }
}
