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

#include "fedscan/federate.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <vector>

#include "fedscan/error.hpp"
#include "fedscan/linalg.hpp"

namespace fedscan::federate {

namespace {

constexpr double kFactorCheckTol = 1e-9;

void check_same_shape(const PartyCompressed& a, Index k, Index m, Index t) {
  if (a.k() != k || a.m() != m || a.t() != t) {
    std::ostringstream msg;
    msg << "party '" << a.party_id << "' has shape (k=" << a.k()
        << ", m=" << a.m() << ", t=" << a.t() << "), expected (k=" << k
        << ", m=" << m << ", t=" << t << ")";
    throw_error(ErrorCode::ShapeMismatch, msg.str());
  }
}

// qty = (R^-1)^T (C^T Y), qtx = (R^-1)^T (C^T X)
void derive_projections(CombinedStats& cs) {
  cs.qty = linalg::solve_rt_transposed(cs.r, cs.cty);
  cs.qtx = linalg::solve_rt_transposed(cs.r, cs.ctx);
}

}  // namespace

PartyCompressed compress_party(const MatrixRef& y, const MatrixRef& x,
                               const MatrixRef& c, std::string party_id,
                               Index absorbed) {
  const Index n = y.rows();
  if (x.rows() != n || (c.cols() > 0 && c.rows() != n)) {
    throw_error(ErrorCode::DimensionMismatch,
                "responses, features and covariates must share the row count");
  }
  if (n == 0 || y.cols() == 0) {
    throw_error(ErrorCode::EmptyInput, "party has no samples or no responses");
  }
  linalg::require_finite(y, "responses");
  linalg::require_finite(x, "features");
  linalg::require_finite(c, "covariates");

  PartyCompressed part;
  part.party_id = std::move(party_id);
  part.n_p = n;
  part.absorbed = absorbed;
  part.yty = linalg::gram(y, y);
  part.xty = linalg::gram(x, y);
  part.xx = linalg::column_squared_norms(x);
  part.cty = linalg::gram(c, y);
  part.ctx = linalg::gram(c, x);
  part.r_p = linalg::qr_positive(c).r;

  if (c.cols() > 0) {
    const Matrix ctc = linalg::gram(c, c);
    const Matrix rtr = part.r_p.transpose() * part.r_p;
    const double scale = std::max(ctc.cwiseAbs().maxCoeff(), 1e-300);
    if ((rtr - ctc).cwiseAbs().maxCoeff() > kFactorCheckTol * scale) {
      throw_error(ErrorCode::NumericError,
                  "R^T R does not reproduce C^T C within tolerance");
    }
  }
  return part;
}

CombinedStats combine(std::span<const PartyCompressed> parts) {
  if (parts.empty()) {
    throw_error(ErrorCode::EmptyInput, "no parties to combine");
  }

  std::vector<const PartyCompressed*> ordered;
  ordered.reserve(parts.size());
  for (const PartyCompressed& p : parts) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(),
            [](const PartyCompressed* a, const PartyCompressed* b) {
              return a->party_id < b->party_id;
            });
  for (size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i - 1]->party_id == ordered[i]->party_id) {
      throw_error(ErrorCode::DuplicateParty,
                  "duplicate party id '" + ordered[i]->party_id + "'");
    }
  }

  const Index k = ordered.front()->k();
  const Index m = ordered.front()->m();
  const Index t = ordered.front()->t();

  CombinedStats cs;
  cs.n = 0;
  cs.absorbed = 0;
  cs.yty = Matrix::Zero(t, t);
  cs.xty = Matrix::Zero(m, t);
  cs.xx = Vector::Zero(m);
  cs.cty = Matrix::Zero(k, t);
  cs.ctx = Matrix::Zero(k, m);

  Matrix stacked(Index(ordered.size()) * k, k);
  Index row = 0;
  for (const PartyCompressed* p : ordered) {
    check_same_shape(*p, k, m, t);
    cs.n += p->n_p;
    cs.absorbed += p->absorbed;
    cs.yty += p->yty;
    cs.xty += p->xty;
    cs.xx += p->xx;
    cs.cty += p->cty;
    cs.ctx += p->ctx;
    stacked.middleRows(row, k) = p->r_p;
    row += k;
  }

  // The stack of per-party R factors has the same R as the pooled covariate
  // matrix; each R_p has positive diagonal, so the stack has full rank.
  cs.r = linalg::qr_positive(stacked).r;
  derive_projections(cs);
  return cs;
}

CombinedStats merge_combined(const CombinedStats& existing,
                             const PartyCompressed& new_part) {
  if (new_part.k() != existing.k() || new_part.m() != existing.m() ||
      new_part.t() != existing.t()) {
    std::ostringstream msg;
    msg << "new party '" << new_part.party_id << "' has shape (k="
        << new_part.k() << ", m=" << new_part.m() << ", t=" << new_part.t()
        << "), expected (k=" << existing.k() << ", m=" << existing.m()
        << ", t=" << existing.t() << ")";
    throw_error(ErrorCode::ShapeMismatch, msg.str());
  }
  const Index k = existing.k();

  CombinedStats cs;
  cs.n = existing.n + new_part.n_p;
  cs.absorbed = existing.absorbed + new_part.absorbed;
  cs.yty = existing.yty + new_part.yty;
  cs.xty = existing.xty + new_part.xty;
  cs.xx = existing.xx + new_part.xx;
  cs.cty = existing.cty + new_part.cty;
  cs.ctx = existing.ctx + new_part.ctx;

  Matrix stacked(2 * k, k);
  stacked.topRows(k) = existing.r;
  stacked.bottomRows(k) = new_part.r_p;
  cs.r = linalg::qr_positive(stacked).r;
  derive_projections(cs);
  return cs;
}

scan::ScanResult finalize_scan(const CombinedStats& cs) {
  scan::FeatureCross cross;
  cross.xty = cs.xty;
  cross.xx = cs.xx;
  cross.qtx = cs.qtx;
  cross.qtx_qty = linalg::gram(cs.qtx, cs.qty);
  cross.qtx_sq = linalg::column_squared_norms(cs.qtx);
  const Vector yy = cs.yty.diagonal();
  const Vector qty_sq = linalg::column_squared_norms(cs.qty);
  return scan::scan_finalize(cross, yy, qty_sq, cs.n, cs.k(), cs.absorbed);
}

PartyPool compress_pool(const MatrixRef& z, const MatrixRef& x,
                        std::string party_id) {
  if (z.rows() != x.rows()) {
    throw_error(ErrorCode::DimensionMismatch,
                "pooled columns and features must share the row count");
  }
  linalg::require_finite(z, "pooled columns");
  linalg::require_finite(x, "features");
  PartyPool pool;
  pool.party_id = std::move(party_id);
  pool.n_p = z.rows();
  pool.ztz = linalg::gram(z, z);
  pool.xtz = linalg::gram(x, z);
  pool.xx = linalg::column_squared_norms(x);
  return pool;
}

PartyCompressed swap_roles(const PartyPool& pool,
                           std::span<const Index> response_cols,
                           std::span<const Index> covariate_cols) {
  const Index s = pool.s();
  if (response_cols.empty()) {
    throw_error(ErrorCode::EmptyInput, "at least one response column required");
  }
  std::set<Index> seen;
  for (std::span<const Index> group : {response_cols, covariate_cols}) {
    for (Index idx : group) {
      if (idx < 0 || idx >= s) {
        std::ostringstream msg;
        msg << "column index " << idx << " out of range [0, " << s << ")";
        throw_error(ErrorCode::DimensionMismatch, msg.str());
      }
      if (!seen.insert(idx).second) {
        std::ostringstream msg;
        msg << "column " << idx << " designated more than once";
        throw_error(ErrorCode::DuplicateColumn, msg.str());
      }
    }
  }

  const Index t = Index(response_cols.size());
  const Index k = Index(covariate_cols.size());

  PartyCompressed part;
  part.party_id = pool.party_id;
  part.n_p = pool.n_p;
  part.absorbed = 0;
  part.yty.resize(t, t);
  part.cty.resize(k, t);
  part.xty.resize(pool.m(), t);
  part.ctx.resize(k, pool.m());
  part.xx = pool.xx;

  for (Index j = 0; j < t; ++j) {
    part.xty.col(j) = pool.xtz.col(response_cols[j]);
    for (Index i = 0; i < t; ++i) {
      part.yty(i, j) = pool.ztz(response_cols[i], response_cols[j]);
    }
    for (Index i = 0; i < k; ++i) {
      part.cty(i, j) = pool.ztz(covariate_cols[i], response_cols[j]);
    }
  }
  Matrix ctc(k, k);
  for (Index j = 0; j < k; ++j) {
    part.ctx.row(j) = pool.xtz.col(covariate_cols[j]).transpose();
    for (Index i = 0; i < k; ++i) {
      ctc(i, j) = pool.ztz(covariate_cols[i], covariate_cols[j]);
    }
  }

  part.r_p = linalg::cholesky_lower(ctc).transpose();
  return part;
}

RowVector column_means(const MatrixRef& data) {
  const Index n = data.rows();
  RowVector means = RowVector::Zero(data.cols());
  if (n == 0) return means;
  for (Index j = 0; j < data.cols(); ++j) {
    const double* col = data.col(j).data();
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) acc += col[i];
    means(j) = acc / double(n);
  }
  return means;
}

RowVector pooled_column_means(std::span<const MatrixRef> parts) {
  if (parts.empty()) {
    throw_error(ErrorCode::EmptyInput, "no parts");
  }
  const Index cols = parts.front().cols();
  RowVector sums = RowVector::Zero(cols);
  std::int64_t n = 0;
  for (const MatrixRef& part : parts) {
    if (part.cols() != cols) {
      throw_error(ErrorCode::ShapeMismatch, "parts disagree on column count");
    }
    for (Index j = 0; j < cols; ++j) {
      const double* col = part.col(j).data();
      double acc = 0.0;
      for (Index i = 0; i < part.rows(); ++i) acc += col[i];
      sums(j) += acc;
    }
    n += part.rows();
  }
  if (n == 0) {
    throw_error(ErrorCode::EmptyInput, "no samples");
  }
  return sums / double(n);
}

CenterResult center_columns(const MatrixRef& data) {
  CenterResult res;
  res.means = column_means(data);
  res.data = data.rowwise() - res.means;
  return res;
}

Matrix center_with_means(const MatrixRef& data, const RowVector& means) {
  if (data.cols() != means.size()) {
    throw_error(ErrorCode::DimensionMismatch,
                "means length does not match column count");
  }
  return data.rowwise() - means;
}

}  // namespace fedscan::federate
