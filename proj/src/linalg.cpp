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

#include "fedscan/linalg.hpp"

#include <cmath>
#include <sstream>

namespace fedscan::linalg {

namespace {

constexpr double kRankTolScale = 1e-10;
constexpr double kTriangularTol = 1e-14;
constexpr double kCholeskyPivotTol = 1e-12;
constexpr double kSymmetryTol = 1e-10;

}  // namespace

void require_finite(const MatrixRef& a, const std::string& what) {
  if (!a.allFinite()) {
    throw_error(ErrorCode::NonFiniteData, what + " contains NaN or Inf entries");
  }
}

QRFactors qr_positive(const MatrixRef& a) {
  const Index n = a.rows();
  const Index k = a.cols();
  if (k == 0) {
    return QRFactors{Matrix(n, 0), Matrix(0, 0)};
  }
  if (n < k) {
    std::ostringstream msg;
    msg << "need at least as many rows as columns for a thin QR, got " << n
        << " x " << k;
    throw_error(ErrorCode::RankDeficient, msg.str());
  }

  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();

  double max_col_norm = 0.0;
  for (Index j = 0; j < k; ++j) {
    max_col_norm = std::max(max_col_norm, a.col(j).norm());
  }
  const double rank_tol = kRankTolScale * max_col_norm * std::sqrt(double(n));
  for (Index j = 0; j < k; ++j) {
    if (std::abs(r(j, j)) <= rank_tol) {
      std::ostringstream msg;
      msg << "column " << j << " is numerically dependent on earlier columns"
          << " (|R_" << j << j << "| = " << std::abs(r(j, j)) << " <= "
          << rank_tol << ")";
      throw_error(ErrorCode::RankDeficient, msg.str());
    }
    if (r(j, j) < 0.0) {
      // Negate only the stored upper part, keeping structural zeros +0.0.
      r.row(j).tail(k - j) = -r.row(j).tail(k - j);
      q.col(j) = -q.col(j);
    }
  }
  return QRFactors{std::move(q), std::move(r)};
}

Matrix gram(const MatrixRef& a, const MatrixRef& b) {
  if (a.rows() != b.rows()) {
    std::ostringstream msg;
    msg << "row counts differ: " << a.rows() << " vs " << b.rows();
    throw_error(ErrorCode::DimensionMismatch, msg.str());
  }
  const Index n = a.rows();
  Matrix out(a.cols(), b.cols());
  for (Index l = 0; l < b.cols(); ++l) {
    const double* bl = b.col(l).data();
    for (Index j = 0; j < a.cols(); ++j) {
      const double* aj = a.col(j).data();
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        acc += aj[i] * bl[i];
      }
      out(j, l) = acc;
    }
  }
  return out;
}

Vector column_squared_norms(const MatrixRef& a) {
  const Index n = a.rows();
  Vector out(a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    const double* aj = a.col(j).data();
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) {
      acc += aj[i] * aj[i];
    }
    out(j) = acc;
  }
  return out;
}

Matrix solve_rt_transposed(const MatrixRef& r, const MatrixRef& b) {
  const Index k = r.rows();
  if (r.cols() != k) {
    throw_error(ErrorCode::DimensionMismatch, "triangular factor must be square");
  }
  if (b.rows() != k) {
    std::ostringstream msg;
    msg << "right-hand side has " << b.rows() << " rows, expected " << k;
    throw_error(ErrorCode::DimensionMismatch, msg.str());
  }
  if (k == 0) {
    return Matrix(0, b.cols());
  }
  const double max_diag = r.diagonal().cwiseAbs().maxCoeff();
  for (Index j = 0; j < k; ++j) {
    if (std::abs(r(j, j)) <= kTriangularTol * max_diag) {
      std::ostringstream msg;
      msg << "diagonal entry " << j << " too small: " << r(j, j);
      throw_error(ErrorCode::SingularTriangular, msg.str());
    }
  }
  Matrix x = b;
  r.transpose().triangularView<Eigen::Lower>().solveInPlace(x);
  return x;
}

Matrix cholesky_lower(const MatrixRef& a) {
  const Index k = a.rows();
  if (a.cols() != k) {
    throw_error(ErrorCode::DimensionMismatch, "matrix must be square");
  }
  if (k == 0) {
    return Matrix(0, 0);
  }
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1.0);
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw_error(ErrorCode::DimensionMismatch, "matrix is not symmetric");
  }
  const double pivot_tol = kCholeskyPivotTol * a.trace() / double(k);

  Matrix l = Matrix::Zero(k, k);
  for (Index j = 0; j < k; ++j) {
    double diag = a(j, j);
    for (Index p = 0; p < j; ++p) {
      diag -= l(j, p) * l(j, p);
    }
    if (diag <= 0.0 || diag <= pivot_tol) {
      std::ostringstream msg;
      msg << "pivot " << j << " is " << diag
          << "; matrix is not positive definite (collinear columns?)";
      throw_error(ErrorCode::NotPositiveDefinite, msg.str());
    }
    l(j, j) = std::sqrt(diag);
    for (Index i = j + 1; i < k; ++i) {
      double acc = a(i, j);
      for (Index p = 0; p < j; ++p) {
        acc -= l(i, p) * l(j, p);
      }
      l(i, j) = acc / l(j, j);
    }
  }
  return l;
}

Matrix solve_spd(const MatrixRef& a, const MatrixRef& b) {
  if (b.rows() != a.rows()) {
    std::ostringstream msg;
    msg << "right-hand side has " << b.rows() << " rows, expected " << a.rows();
    throw_error(ErrorCode::DimensionMismatch, msg.str());
  }
  const Matrix l = cholesky_lower(a);
  Matrix x = b;
  l.triangularView<Eigen::Lower>().solveInPlace(x);
  l.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

Vector spd_inverse_diagonal_from_factor(const MatrixRef& l) {
  const Index k = l.rows();
  // diag(a^-1)_j = || L^-1 e_j ||^2, via one forward solve per column.
  Matrix inv_l = Matrix::Identity(k, k);
  l.triangularView<Eigen::Lower>().solveInPlace(inv_l);
  Vector out(k);
  for (Index j = 0; j < k; ++j) {
    double acc = 0.0;
    for (Index i = j; i < k; ++i) {
      acc += inv_l(i, j) * inv_l(i, j);
    }
    out(j) = acc;
  }
  return out;
}

}  // namespace fedscan::linalg
