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

#ifndef FEDSCAN_FEDERATE_HPP
#define FEDSCAN_FEDERATE_HPP

#include <cstdint>
#include <span>
#include <string>

#include "fedscan/scan.hpp"
#include "fedscan/types.hpp"

namespace fedscan::federate {

/// One party's compressed statistics: everything downstream analysis needs,
/// in O((M + K + T) * (K + T)) numbers regardless of the party's sample
/// count. This is the only object that ever crosses a party boundary.
struct PartyCompressed {
  std::string party_id;
  std::int64_t n_p = 0;
  Index absorbed = 0;  // 1 when the party mean-centered its columns locally
  Matrix yty;          // T x T: Y^T Y
  Matrix xty;          // M x T: X^T Y
  Vector xx;           // M:     per-feature squared norms
  Matrix cty;          // K x T: C^T Y
  Matrix ctx;          // K x M: C^T X
  Matrix r_p;          // K x K upper triangular, diag > 0, R^T R = C^T C

  Index k() const { return r_p.rows(); }
  Index m() const { return xx.size(); }
  Index t() const { return yty.rows(); }
};

/// Across-party sums plus the global R factor. qty and qtx are the pooled
/// Q^T Y and Q^T X, recovered without any party revealing its Q.
struct CombinedStats {
  std::int64_t n = 0;
  Index absorbed = 0;
  Matrix yty;
  Matrix xty;
  Vector xx;
  Matrix cty;
  Matrix ctx;
  Matrix r;    // K x K: R factor of the pooled covariate matrix
  Matrix qty;  // K x T: (R^-1)^T C^T Y
  Matrix qtx;  // K x M: (R^-1)^T C^T X

  Index k() const { return r.rows(); }
  Index m() const { return xx.size(); }
  Index t() const { return yty.rows(); }
};

/// Gram statistics over a pooled block of columns Z = [designatable columns]
/// whose response-vs-covariate roles are decided later, plus the feature
/// cross terms. Stores the full Z^T Z block so any re-designation needs no
/// access to the raw data.
struct PartyPool {
  std::string party_id;
  std::int64_t n_p = 0;
  Matrix ztz;  // S x S
  Matrix xtz;  // M x S
  Vector xx;   // M

  Index s() const { return ztz.rows(); }
  Index m() const { return xx.size(); }
};

struct CenterResult {
  Matrix data;      // input minus column means
  RowVector means;  // the means that were subtracted
};

/// Compresses one party's raw data. Requires n_p >= k and full column rank
/// of c (RankDeficient otherwise); verifies r_p^T r_p = C^T C as a sanity
/// check on the factorization.
PartyCompressed compress_party(const MatrixRef& y, const MatrixRef& x,
                               const MatrixRef& c, std::string party_id,
                               Index absorbed = 0);

/// Sums the per-party statistics and derives the pooled R by QR-factoring
/// the vertical stack of the per-party R factors. Parties are processed in
/// sorted party_id order so the summation is deterministic. Requires
/// distinct party ids and agreeing (k, m, t).
CombinedStats combine(std::span<const PartyCompressed> parts);

/// Folds one more party (or batch) into existing statistics. Cost depends
/// only on (K, M, T), never on how many samples are already accumulated:
/// the new R comes from the 2K x K stack of the old R over the new R_p.
CombinedStats merge_combined(const CombinedStats& existing,
                             const PartyCompressed& new_part);

/// Scan statistics from combined statistics, exactly as in the single-party
/// scan: yy = diag(yty), df = n - k - absorbed - 1.
scan::ScanResult finalize_scan(const CombinedStats& cs);

/// Compresses the designatable columns z (future responses and/or
/// covariates) together with the feature block x.
PartyPool compress_pool(const MatrixRef& z, const MatrixRef& x,
                        std::string party_id);

/// Re-slices a pool under a new role designation without touching raw data.
/// Only r_p needs recomputing: R^T R = C^T C with positive diagonal makes R
/// unique, so it is recovered by Cholesky of the stored C^T C block.
/// Raises NotPositiveDefinite if the chosen covariate subset is collinear.
PartyCompressed swap_roles(const PartyPool& pool,
                           std::span<const Index> response_cols,
                           std::span<const Index> covariate_cols);

/// Column means accumulated in fixed sequential order.
RowVector column_means(const MatrixRef& data);

/// Pooled column means across parties (the global centering mode). Note
/// that pooling means reveals per-party aggregate sums to whoever combines
/// them; per-party centering is the privacy-preserving default.
RowVector pooled_column_means(std::span<const MatrixRef> parts);

/// Subtracts the party's own column means (per-party mode). One absorbed
/// degree of freedom per party.
CenterResult center_columns(const MatrixRef& data);

/// Subtracts externally supplied means (global mode). One absorbed degree
/// of freedom in total.
Matrix center_with_means(const MatrixRef& data, const RowVector& means);

}  // namespace fedscan::federate

#endif  // FEDSCAN_FEDERATE_HPP
