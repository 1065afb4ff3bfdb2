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

#include "fedscan/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fedscan/error.hpp"
#include "fedscan/federate.hpp"

namespace fedscan::sim {

SimData generate(const SimConfig& config) {
  if (config.parties < 1 || config.samples < 1 || config.features < 1 ||
      config.covariates < 1 || config.responses < 1) {
    throw_error(ErrorCode::EmptyInput,
                "parties, samples, features, covariates and responses must be "
                "positive");
  }
  const Index n = config.samples;
  const Index m = config.features;
  const Index k = config.covariates;
  const Index t = config.responses;
  const Index p = config.parties;
  // Every party needs enough rows for a full-rank covariate block and a
  // positive degree-of-freedom budget after combining.
  const Index min_rows = k + 2;
  if (n < p * min_rows) {
    std::ostringstream msg;
    msg << "need at least " << p * min_rows << " samples for " << p
        << " parties with " << k << " covariates";
    throw_error(ErrorCode::InsufficientSamples, msg.str());
  }

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SimData data;
  data.x.resize(n, m);
  for (Index j = 0; j < m; ++j) {
    const double freq = 0.05 + 0.45 * unif(rng);
    for (Index i = 0; i < n; ++i) {
      const double count =
          (unif(rng) < freq ? 1.0 : 0.0) + (unif(rng) < freq ? 1.0 : 0.0);
      data.x(i, j) = count;
    }
  }

  data.c.resize(n, k);
  data.c.col(0).setOnes();
  for (Index j = 1; j < k; ++j) {
    for (Index i = 0; i < n; ++i) data.c(i, j) = gauss(rng);
  }

  data.y.resize(n, t);
  const Index causal = std::max<Index>(1, std::min<Index>(10, m / 10));
  for (Index r = 0; r < t; ++r) {
    Vector signal = Vector::Zero(n);
    for (Index cidx = 0; cidx < causal; ++cidx) {
      const Index feature = Index(rng() % std::uint64_t(m));
      const double effect = 0.3 * gauss(rng);
      signal += effect * data.x.col(feature);
    }
    for (Index j = 0; j < k; ++j) {
      const double effect = gauss(rng);
      signal += effect * data.c.col(j);
    }
    for (Index i = 0; i < n; ++i) data.y(i, r) = signal(i) + gauss(rng);
  }

  // Uneven split: party sizes jitter around n / p but stay above min_rows.
  data.party_sizes.assign(std::size_t(p), 0);
  Index assigned = 0;
  for (Index q = 0; q < p - 1; ++q) {
    const Index base = (n - assigned) / (p - q);
    const Index slack = std::max<Index>(0, base - min_rows);
    const Index jitter =
        slack > 0 ? Index(rng() % std::uint64_t(2 * slack / 3 + 1)) -
                        slack / 3
                  : 0;
    const Index size = std::max(min_rows, base + jitter);
    data.party_sizes[std::size_t(q)] = size;
    assigned += size;
  }
  data.party_sizes[std::size_t(p - 1)] = n - assigned;

  Index offset = 0;
  for (Index q = 0; q < p; ++q) {
    data.party_offsets.push_back(offset);
    offset += data.party_sizes[std::size_t(q)];
    data.party_ids.push_back("party" + std::to_string(q + 1));
  }
  return data;
}

secure::SeedTable derive_seed_table(const SimData& data, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5eed5eed5eed5eedULL);
  secure::SeedTable table;
  for (std::size_t a = 0; a < data.party_ids.size(); ++a) {
    for (std::size_t b = a + 1; b < data.party_ids.size(); ++b) {
      secure::Seed pair_seed{};
      for (std::size_t i = 0; i < 32; i += 8) {
        const std::uint64_t word = rng();
        for (std::size_t byte = 0; byte < 8; ++byte) {
          pair_seed[i + byte] = std::uint8_t(word >> (8 * byte));
        }
      }
      table.insert(data.party_ids[a], data.party_ids[b], pair_seed);
    }
  }
  return table;
}

double relative_difference(double a, double b) {
  if (a == b) return 0.0;  // covers 0/0 and exact matches, incl. infinities
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) / scale;
}

double max_relative_difference(const Matrix& a, const Matrix& b,
                               const BoolArray& valid_a,
                               const BoolArray& valid_b) {
  double worst = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (valid_a(i, j) && valid_b(i, j)) {
        worst = std::max(worst, relative_difference(a(i, j), b(i, j)));
      }
    }
  }
  return worst;
}

PipelineReport run_pipeline(const SimConfig& config, bool run_secure) {
  const SimData data = generate(config);

  scan::ScanInputs inputs{data.y, data.x, data.c, 0};
  const scan::ScanResult pooled = scan::scan(inputs);

  std::vector<federate::PartyCompressed> parts;
  for (std::size_t q = 0; q < data.party_ids.size(); ++q) {
    const Index off = data.party_offsets[q];
    const Index rows = data.party_sizes[q];
    parts.push_back(federate::compress_party(
        data.y.middleRows(off, rows), data.x.middleRows(off, rows),
        data.c.middleRows(off, rows), data.party_ids[q]));
  }
  const federate::CombinedStats combined = federate::combine(parts);
  const scan::ScanResult federated = federate::finalize_scan(combined);

  PipelineReport report;
  report.valid_cells = Index(pooled.valid.count());
  report.valid_mismatches =
      Index((pooled.valid != federated.valid).count());
  report.max_rel_beta = max_relative_difference(
      pooled.beta_hat, federated.beta_hat, pooled.valid, federated.valid);
  report.max_rel_se = max_relative_difference(pooled.se, federated.se,
                                              pooled.valid, federated.valid);
  report.max_rel_t = max_relative_difference(
      pooled.t_stats, federated.t_stats, pooled.valid, federated.valid);

  if (run_secure) {
    const secure::SeedTable seeds = derive_seed_table(data, config.seed);
    const federate::CombinedStats secure_combined =
        secure::secure_combine(parts, seeds, /*round_id=*/1);
    const scan::ScanResult secure_result =
        federate::finalize_scan(secure_combined);
    report.secure_max_rel_t = max_relative_difference(
        pooled.t_stats, secure_result.t_stats, pooled.valid,
        secure_result.valid);
    report.valid_mismatches +=
        Index((pooled.valid != secure_result.valid).count());
  }
  return report;
}

}  // namespace fedscan::sim
