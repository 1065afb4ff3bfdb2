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

#ifndef FEDSCAN_SIMULATE_HPP
#define FEDSCAN_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fedscan/scan.hpp"
#include "fedscan/secure.hpp"
#include "fedscan/types.hpp"

namespace fedscan::sim {

/// Synthetic multi-party cohort: discrete {0,1,2} feature counts with random
/// per-feature frequencies, an intercept plus standard normal covariates,
/// and responses from a sparse linear signal plus Gaussian noise.
struct SimConfig {
  int parties = 3;
  Index samples = 3000;
  Index features = 500;
  Index covariates = 5;  // first column is an intercept
  Index responses = 1;
  std::uint64_t seed = 1;
};

struct SimData {
  Matrix y;  // N x T
  Matrix x;  // N x M
  Matrix c;  // N x K
  std::vector<Index> party_offsets;  // P entries, row offset per party
  std::vector<Index> party_sizes;    // P entries, uneven by construction
  std::vector<std::string> party_ids;
};

SimData generate(const SimConfig& config);

/// Deterministic pairwise seed table over the generated party ids.
secure::SeedTable derive_seed_table(const SimData& data, std::uint64_t seed);

struct PipelineReport {
  double max_rel_beta = 0.0;
  double max_rel_se = 0.0;
  double max_rel_t = 0.0;
  double secure_max_rel_t = -1.0;  // -1 when the secure path was not run
  Index valid_cells = 0;
  Index valid_mismatches = 0;

  bool passes(double tolerance, double secure_tolerance) const {
    return valid_mismatches == 0 && max_rel_beta <= tolerance &&
           max_rel_se <= tolerance && max_rel_t <= tolerance &&
           (secure_max_rel_t < 0.0 || secure_max_rel_t <= secure_tolerance);
  }
};

/// |a - b| / max(|a|, |b|) with 0/0 counting as 0.
double relative_difference(double a, double b);

/// Entrywise max relative difference over cells valid in both results;
/// cells whose validity disagrees are counted separately by the caller.
double max_relative_difference(const Matrix& a, const Matrix& b,
                               const BoolArray& valid_a,
                               const BoolArray& valid_b);

/// Runs the pooled single-party scan and the compress/combine/finalize
/// pipeline over the same synthetic cohort and reports the worst relative
/// discrepancies. With run_secure, the masked-aggregation combine is run as
/// well and compared against the pooled scan.
PipelineReport run_pipeline(const SimConfig& config, bool run_secure);

}  // namespace fedscan::sim

#endif  // FEDSCAN_SIMULATE_HPP
