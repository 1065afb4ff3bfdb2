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

#include "fedscan/scan.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "fedscan/error.hpp"
#include "fedscan/linalg.hpp"
#include "fedscan/stats.hpp"

namespace fedscan::scan {

namespace {

constexpr double kDegeneracyRelTol = 1e-10;
constexpr double kDegeneracyAbsTol = 1e-30;
constexpr double kSigma2ClampRel = 1e-9;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_sample_count(std::int64_t n, Index k, Index absorbed) {
  if (n <= k + absorbed + 1) {
    std::ostringstream msg;
    msg << "need n > k + absorbed + 1, got n=" << n << " k=" << k
        << " absorbed=" << absorbed;
    throw_error(ErrorCode::InsufficientSamples, msg.str());
  }
}

}  // namespace

ScanCore scan_prepare(const MatrixRef& y, const MatrixRef& c) {
  if (c.cols() > 0 && y.rows() != c.rows()) {
    std::ostringstream msg;
    msg << "responses have " << y.rows() << " rows, covariates have "
        << c.rows();
    throw_error(ErrorCode::DimensionMismatch, msg.str());
  }
  ScanCore core;
  core.n = y.rows();
  core.y = y;
  core.q = c.cols() > 0 ? linalg::qr_positive(c).q : Matrix(y.rows(), 0);
  core.yy = linalg::column_squared_norms(y);
  core.qty = linalg::gram(core.q, y);
  core.qty_sq = linalg::column_squared_norms(core.qty);
  return core;
}

FeatureCross scan_block(const ScanCore& core, const MatrixRef& x_block) {
  if (x_block.rows() != core.n) {
    std::ostringstream msg;
    msg << "feature block has " << x_block.rows() << " rows, expected "
        << core.n;
    throw_error(ErrorCode::DimensionMismatch, msg.str());
  }
  FeatureCross cross;
  cross.xty = linalg::gram(x_block, core.y);
  cross.xx = linalg::column_squared_norms(x_block);
  cross.qtx = linalg::gram(core.q, x_block);
  cross.qtx_qty = linalg::gram(cross.qtx, core.qty);
  cross.qtx_sq = linalg::column_squared_norms(cross.qtx);
  return cross;
}

ScanResult scan_finalize(const FeatureCross& cross, const Vector& yy,
                         const Vector& qty_sq, std::int64_t n, Index k,
                         Index absorbed) {
  check_sample_count(n, k, absorbed);
  const Index m = cross.xx.size();
  const Index t = yy.size();
  if (cross.xty.rows() != m || cross.xty.cols() != t ||
      cross.qtx_qty.rows() != m || cross.qtx_qty.cols() != t ||
      cross.qtx_sq.size() != m || qty_sq.size() != t) {
    throw_error(ErrorCode::DimensionMismatch,
                "cross statistics disagree on (m, t)");
  }
  const std::int64_t df = n - k - absorbed - 1;

  ScanResult res;
  res.df = df;
  res.beta_hat = Matrix::Constant(m, t, kNaN);
  res.se = Matrix::Constant(m, t, kNaN);
  res.t_stats = Matrix::Constant(m, t, kNaN);
  res.p_values = Matrix::Constant(m, t, kNaN);
  res.valid = BoolArray::Constant(m, t, false);

  for (Index j = 0; j < m; ++j) {
    const double xx = cross.xx(j);
    const double denom = xx - cross.qtx_sq(j);
    const double tol = xx > 0.0 ? kDegeneracyRelTol * xx : kDegeneracyAbsTol;
    if (denom <= tol) {
      continue;  // feature lies in the covariate span; leave the row invalid
    }
    for (Index r = 0; r < t; ++r) {
      const double beta = (cross.xty(j, r) - cross.qtx_qty(j, r)) / denom;
      const double resid_ratio = (yy(r) - qty_sq(r)) / denom;
      double sigma2 = (resid_ratio - beta * beta) / double(df);
      if (sigma2 < 0.0) {
        const double scale =
            (std::abs(resid_ratio) + beta * beta) / double(df);
        if (sigma2 >= -kSigma2ClampRel * scale) {
          sigma2 = 0.0;
        } else {
          continue;  // cancellation beyond rounding; refuse to emit a number
        }
      }
      const double sigma = std::sqrt(sigma2);
      if (sigma == 0.0 && beta == 0.0) {
        continue;  // 0/0: no signal and no noise, nothing to report
      }
      const double t_stat = beta / sigma;  // +/-Inf on a perfect fit
      res.beta_hat(j, r) = beta;
      res.se(j, r) = sigma;
      res.t_stats(j, r) = t_stat;
      res.p_values(j, r) = stats::t_sf_two_sided(t_stat, df);
      res.valid(j, r) = true;
    }
  }
  return res;
}

ScanResult scan(const ScanInputs& inputs, Index block_size, int parallelism) {
  const Index n = inputs.y.rows();
  const Index m = inputs.x.cols();
  const Index t = inputs.y.cols();
  const Index k = inputs.c.cols();
  if (inputs.x.rows() != n || (k > 0 && inputs.c.rows() != n)) {
    throw_error(ErrorCode::DimensionMismatch,
                "responses, features and covariates must share the row count");
  }
  if (t == 0) {
    throw_error(ErrorCode::EmptyInput, "at least one response is required");
  }
  if (block_size < 1) {
    throw_error(ErrorCode::DimensionMismatch, "block size must be positive");
  }
  linalg::require_finite(inputs.y, "responses");
  linalg::require_finite(inputs.x, "features");
  linalg::require_finite(inputs.c, "covariates");
  check_sample_count(n, k, inputs.absorbed);

  const ScanCore core = scan_prepare(inputs.y, inputs.c);

  FeatureCross cross;
  cross.xty.resize(m, t);
  cross.xx.resize(m);
  cross.qtx.resize(k, m);
  cross.qtx_qty.resize(m, t);
  cross.qtx_sq.resize(m);

  const Index num_blocks = m == 0 ? 0 : (m + block_size - 1) / block_size;
  std::atomic<Index> next_block{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    try {
      while (true) {
        const Index b = next_block.fetch_add(1);
        if (b >= num_blocks) break;
        const Index start = b * block_size;
        const Index width = std::min(block_size, m - start);
        const FeatureCross part = scan_block(core, inputs.x.middleCols(start, width));
        cross.xty.middleRows(start, width) = part.xty;
        cross.xx.segment(start, width) = part.xx;
        cross.qtx.middleCols(start, width) = part.qtx;
        cross.qtx_qty.middleRows(start, width) = part.qtx_qty;
        cross.qtx_sq.segment(start, width) = part.qtx_sq;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  const int threads = std::max(1, std::min<int>(parallelism, int(num_blocks)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  return scan_finalize(cross, core.yy, core.qty_sq, core.n, k, inputs.absorbed);
}

}  // namespace fedscan::scan
