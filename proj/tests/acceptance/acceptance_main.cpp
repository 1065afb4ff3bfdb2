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

// Acceptance suite: one self-contained check per release criterion, each
// printing a single [PASS]/[FAIL] line. Run with no arguments for the full
// suite or name the criteria to run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fedscan/federate.hpp"
#include "fedscan/io.hpp"
#include "fedscan/linalg.hpp"
#include "fedscan/scan.hpp"
#include "fedscan/secure.hpp"
#include "fedscan/simulate.hpp"
#include "fedscan/stats.hpp"
#include "oracles.hpp"

namespace {

using namespace fedscan;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string details;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// --------------------------------------------------------------------------
// 1. Federated exactness: the multi-party pipeline reproduces the pooled
//    scan's t statistics to 1e-8 relative, across 20 random cohorts.
// --------------------------------------------------------------------------
Outcome federated_exactness() {
  const auto start = Clock::now();
  double worst = 0.0;
  Index mismatches = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    sim::SimConfig config;
    config.parties = 3;
    config.samples = 3000;
    config.features = 500;
    config.covariates = 5;
    config.responses = 2;
    config.seed = seed;
    const sim::PipelineReport report = sim::run_pipeline(config, false);
    worst = std::max(worst, report.max_rel_t);
    mismatches += report.valid_mismatches;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream details;
  details << "max |dt|/|t| = " << worst << " over 20 seeds (tol 1e-8), "
          << "valid-flag mismatches = " << mismatches << ", " << elapsed
          << " s (limit 10 s)";
  return {worst <= 1e-8 && mismatches == 0 && elapsed < 10.0, details.str()};
}

// --------------------------------------------------------------------------
// 2. Closed-form scan statistics equal brute-force per-feature least squares.
// --------------------------------------------------------------------------
Outcome scan_vs_ols_oracle() {
  const auto start = Clock::now();
  double worst_beta = 0.0, worst_se = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed * 7919);
    const Index k = Index(seed % 9);           // 0..8
    const Index n = 50 + Index(rng() % 151);   // 50..200
    const Index m = 5 + Index(rng() % 96);     // 5..100
    scan::ScanInputs in;
    in.y = oracle::random_matrix(rng, n, 1);
    in.x = oracle::random_matrix(rng, n, m);
    in.c.resize(n, k);
    if (k > 0) {
      in.c.col(0).setOnes();
      for (Index j = 1; j < k; ++j)
        in.c.col(j) = oracle::random_matrix(rng, n, 1);
    }
    const scan::ScanResult res = scan::scan(in);
    for (Index j = 0; j < m; ++j) {
      if (!res.valid(j, 0)) return {false, "unexpected invalid feature"};
      const auto fit = oracle::per_feature_ols(in.y.col(0), in.x.col(j), in.c);
      worst_beta = std::max(
          worst_beta, sim::relative_difference(res.beta_hat(j, 0), fit.beta));
      worst_se =
          std::max(worst_se, sim::relative_difference(res.se(j, 0), fit.se));
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream details;
  details << "max rel diff: beta " << worst_beta << ", se " << worst_se
          << " (tol 1e-8), " << elapsed << " s (limit 5 s)";
  return {worst_beta <= 1e-8 && worst_se <= 1e-8 && elapsed < 5.0,
          details.str()};
}

// --------------------------------------------------------------------------
// 3. The R factor of vertically stacked per-party R factors equals the R
//    factor of the pooled covariate matrix.
// --------------------------------------------------------------------------
Outcome stacked_qr_factor() {
  double worst = 0.0;
  for (int parties : {2, 3, 5}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      std::mt19937_64 rng(seed * 104729 + std::uint64_t(parties));
      const Index k = 4;
      const Index rows_per_party = 25;
      const Matrix c = oracle::random_matrix(rng, rows_per_party * parties, k);

      Matrix stacked(Index(parties) * k, k);
      for (int p = 0; p < parties; ++p) {
        stacked.middleRows(Index(p) * k, k) =
            linalg::qr_positive(
                c.middleRows(Index(p) * rows_per_party, rows_per_party))
                .r;
      }
      const Matrix from_stack = linalg::qr_positive(stacked).r;
      const Matrix pooled = linalg::qr_positive(c).r;
      worst = std::max(worst, oracle::max_rel_diff(from_stack, pooled));
    }
  }
  std::ostringstream details;
  details << "max entrywise rel diff = " << worst
          << " over P in {2,3,5} x 10 seeds (tol 1e-9)";
  return {worst <= 1e-9, details.str()};
}

// --------------------------------------------------------------------------
// 4. Incremental merge equals one-shot combine on every field, and the
//    inputs it consumes do not grow with the accumulated sample count.
// --------------------------------------------------------------------------
Outcome incremental_merge() {
  std::mt19937_64 rng(65537);
  const Index m = 40, k = 4, t = 2;

  auto make_part = [&](Index rows, const std::string& id) {
    return federate::compress_party(oracle::random_matrix(rng, rows, t),
                                    oracle::random_matrix(rng, rows, m),
                                    oracle::random_matrix(rng, rows, k), id);
  };

  std::vector<federate::PartyCompressed> parts;
  parts.push_back(make_part(200, "a"));
  parts.push_back(make_part(57, "b"));
  parts.push_back(make_part(683, "c"));
  parts.push_back(make_part(120, "d"));

  const federate::CombinedStats oneshot = federate::combine(parts);
  federate::CombinedStats incremental =
      federate::combine(std::vector<federate::PartyCompressed>{parts[0]});
  for (std::size_t p = 1; p < parts.size(); ++p) {
    incremental = federate::merge_combined(incremental, parts[p]);
  }

  double worst = 0.0;
  worst = std::max(worst, oracle::max_rel_diff(incremental.yty, oneshot.yty));
  worst = std::max(worst, oracle::max_rel_diff(incremental.xty, oneshot.xty));
  worst = std::max(worst, oracle::max_rel_diff(incremental.xx, oneshot.xx));
  worst = std::max(worst, oracle::max_rel_diff(incremental.cty, oneshot.cty));
  worst = std::max(worst, oracle::max_rel_diff(incremental.ctx, oneshot.ctx));
  worst = std::max(worst, oracle::max_rel_diff(incremental.r, oneshot.r));
  worst = std::max(worst, oracle::max_rel_diff(incremental.qty, oneshot.qty));
  worst = std::max(worst, oracle::max_rel_diff(incremental.qtx, oneshot.qtx));
  const bool fields_match = incremental.n == oneshot.n && worst <= 1e-10;

  // Merge inputs are one CombinedStats plus one PartyCompressed message;
  // their serialized sizes depend on (K, M, T) only, never on n.
  const std::size_t small_combined =
      io::encode_message(
          federate::combine(std::vector<federate::PartyCompressed>{
              make_part(k + 2, "tiny")}))
          .size();
  const std::size_t large_combined =
      io::encode_message(
          federate::combine(std::vector<federate::PartyCompressed>{
              make_part(20000, "vast")}))
          .size();
  const std::size_t small_party =
      io::encode_message(make_part(k + 2, "x")).size();
  const std::size_t large_party =
      io::encode_message(make_part(20000, "y")).size();
  const bool size_independent =
      small_combined == large_combined && small_party == large_party;

  std::ostringstream details;
  details << "max field rel diff = " << worst
          << " (tol 1e-10); merge input bytes at n=" << (k + 2)
          << " vs n=20000: combined " << small_combined << "/"
          << large_combined << ", party " << small_party << "/" << large_party;
  return {fields_match && size_independent, details.str()};
}

// --------------------------------------------------------------------------
// 5. Secure aggregation fidelity: masked combine matches the plaintext
//    pipeline to 1e-5 on t statistics, and mask cancellation is exact in
//    the ring.
// --------------------------------------------------------------------------
Outcome secure_fidelity() {
  sim::SimConfig config;
  config.parties = 3;
  config.samples = 10000;
  config.features = 1000;
  config.covariates = 10;
  config.responses = 1;
  config.seed = 12345;
  const sim::SimData data = sim::generate(config);

  std::vector<federate::PartyCompressed> parts;
  for (std::size_t q = 0; q < data.party_ids.size(); ++q) {
    parts.push_back(federate::compress_party(
        data.y.middleRows(data.party_offsets[q], data.party_sizes[q]),
        data.x.middleRows(data.party_offsets[q], data.party_sizes[q]),
        data.c.middleRows(data.party_offsets[q], data.party_sizes[q]),
        data.party_ids[q]));
  }
  const secure::SeedTable seeds = sim::derive_seed_table(data, config.seed);

  const scan::ScanResult plain =
      federate::finalize_scan(federate::combine(parts));
  const scan::ScanResult masked = federate::finalize_scan(
      secure::secure_combine(parts, seeds, /*round_id=*/2026));
  const double worst = sim::max_relative_difference(
      plain.t_stats, masked.t_stats, plain.valid, masked.valid);
  const Index mismatches = Index((plain.valid != masked.valid).count());

  // Ring-exact cancellation: the sum of masked payloads equals the sum of
  // unmasked encodings bit for bit.
  const secure::FixedPointCodec codec;
  std::mt19937_64 rng(999);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  const std::size_t length = 5000;
  std::vector<std::uint64_t> expected(length, 0);
  std::vector<secure::MaskedShare> shares;
  for (const std::string& id : data.party_ids) {
    std::vector<double> values(length);
    for (std::size_t i = 0; i < length; ++i) {
      values[i] = dist(rng);
      expected[i] += codec.encode(values[i]);
    }
    shares.push_back(secure::mask(values, seeds.peers_of(id), id, 7, codec));
  }
  bool cancellation_exact = true;
  for (std::size_t i = 0; i < length; ++i) {
    std::uint64_t sum = 0;
    for (const auto& share : shares) sum += share.payload[i];
    cancellation_exact = cancellation_exact && sum == expected[i];
  }

  std::ostringstream details;
  details << "max |dt|/|t| secure vs plaintext = " << worst
          << " (tol 1e-5), valid mismatches = " << mismatches
          << ", ring cancellation exact = "
          << (cancellation_exact ? "yes" : "NO");
  return {worst <= 1e-5 && mismatches == 0 && cancellation_exact,
          details.str()};
}

// --------------------------------------------------------------------------
// 6. Message size depends on (K, M, T) only, not on the sample count.
// --------------------------------------------------------------------------
Outcome message_size() {
  const Index k = 3, m = 4, t = 2;
  std::vector<std::size_t> sizes;
  for (const Index n : {Index(10), Index(10000), Index(1000000)}) {
    std::mt19937_64 rng{std::uint64_t(n)};
    const federate::PartyCompressed part = federate::compress_party(
        oracle::random_matrix(rng, n, t), oracle::random_matrix(rng, n, m),
        oracle::random_matrix(rng, n, k), "p");
    sizes.push_back(io::encode_message(part).size());
  }
  std::ostringstream details;
  details << "bytes at n=10 / 1e4 / 1e6: " << sizes[0] << " / " << sizes[1]
          << " / " << sizes[2];
  return {sizes[0] == sizes[1] && sizes[1] == sizes[2], details.str()};
}

// --------------------------------------------------------------------------
// 7. Scan wall time scales linearly in the feature count at fixed N and K.
// --------------------------------------------------------------------------
Outcome linear_scaling() {
  const Index n = 10000, k = 10, m_small = 600;
  std::mt19937_64 rng(31337);
  scan::ScanInputs in;
  in.y = oracle::random_matrix(rng, n, 1);
  in.x = oracle::random_matrix(rng, n, 2 * m_small);
  in.c.resize(n, k);
  in.c.col(0).setOnes();
  for (Index j = 1; j < k; ++j) in.c.col(j) = oracle::random_matrix(rng, n, 1);

  scan::ScanInputs small = in;
  small.x = in.x.leftCols(m_small);

  auto median_time = [](auto&& fn) {
    std::vector<double> times;
    for (int rep = 0; rep < 3; ++rep) {
      const auto start = Clock::now();
      fn();
      times.push_back(seconds_since(start));
    }
    std::sort(times.begin(), times.end());
    return times[1];
  };

  scan::scan(small);  // warm up
  const double time_small = median_time([&] { scan::scan(small); });
  const double time_large = median_time([&] { scan::scan(in); });
  const double ratio = time_large / time_small;

  std::ostringstream details;
  details << "median scan time at M=" << m_small << ": " << time_small
          << " s, at M=" << 2 * m_small << ": " << time_large
          << " s, ratio = " << ratio << " (accept 1.5 .. 2.5)";
  return {ratio >= 1.5 && ratio <= 2.5, details.str()};
}

// --------------------------------------------------------------------------
// 8. Statistical calibration: null p-values are uniform (KS at 0.001) and
//    the t tail function matches quadrature to 1e-9 on a grid.
// --------------------------------------------------------------------------
Outcome calibration() {
  const Index n = 500, m = 2000, k = 3;
  std::mt19937_64 rng(271828);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  scan::ScanInputs in;
  in.x.resize(n, m);
  for (Index j = 0; j < m; ++j) {
    const double freq = 0.05 + 0.45 * unif(rng);
    for (Index i = 0; i < n; ++i) {
      in.x(i, j) =
          (unif(rng) < freq ? 1.0 : 0.0) + (unif(rng) < freq ? 1.0 : 0.0);
    }
  }
  in.c.resize(n, k);
  in.c.col(0).setOnes();
  for (Index j = 1; j < k; ++j) in.c.col(j) = oracle::random_matrix(rng, n, 1);
  // Null responses: independent of every feature and covariate.
  in.y.resize(n, 1);
  for (Index i = 0; i < n; ++i) in.y(i, 0) = gauss(rng);

  const scan::ScanResult res = scan::scan(in);
  std::vector<double> p_values;
  for (Index j = 0; j < m; ++j) {
    if (res.valid(j, 0)) p_values.push_back(res.p_values(j, 0));
  }
  const double ks = oracle::ks_uniform_statistic(p_values);
  const double crit = oracle::ks_critical_value(p_values.size(), 0.001);

  double worst_tail = 0.0;
  for (std::int64_t df : {1, 2, 5, 30, 1000}) {
    for (double t = 0.0; t <= 8.0; t += 0.5) {
      const double diff =
          std::abs(stats::t_sf_two_sided(t, df) -
                   oracle::t_sf_two_sided_quadrature(t, double(df)));
      worst_tail = std::max(worst_tail, diff);
    }
  }

  std::ostringstream details;
  details << "KS = " << ks << " (crit " << crit << " at alpha 0.001, "
          << p_values.size() << " p-values); max |t_sf - quadrature| = "
          << worst_tail << " (tol 1e-9)";
  return {ks < crit && worst_tail <= 1e-9, details.str()};
}

// --------------------------------------------------------------------------
// 9. Centering equivalences: per-party centering == party indicators;
//    global centering == intercept covariate.
// --------------------------------------------------------------------------
Outcome centering() {
  std::mt19937_64 rng(1618);
  const Index n = 400, m = 20, k = 3;
  const int parties = 3;

  Matrix y = oracle::random_matrix(rng, n, 1);
  Matrix x = oracle::random_matrix(rng, n, m);
  Matrix c = oracle::random_matrix(rng, n, k);  // no intercept column
  std::vector<Index> offsets{0, 130, 270};
  std::vector<Index> sizes{130, 140, 130};

  // (a) per-party centering vs explicit party indicator covariates
  Matrix indicators = Matrix::Zero(n, parties);
  for (int p = 0; p < parties; ++p) {
    indicators.col(p)
        .segment(offsets[std::size_t(p)], sizes[std::size_t(p)])
        .setOnes();
  }
  Matrix c_ind(n, k + parties);
  c_ind.leftCols(k) = c;
  c_ind.rightCols(parties) = indicators;
  const scan::ScanResult indicator_scan = scan::scan({y, x, c_ind, 0});

  std::vector<federate::PartyCompressed> parts;
  for (int p = 0; p < parties; ++p) {
    const Index off = offsets[std::size_t(p)];
    const Index rows = sizes[std::size_t(p)];
    parts.push_back(federate::compress_party(
        federate::center_columns(y.middleRows(off, rows)).data,
        federate::center_columns(x.middleRows(off, rows)).data,
        federate::center_columns(c.middleRows(off, rows)).data,
        "p" + std::to_string(p), /*absorbed=*/1));
  }
  const scan::ScanResult centered_scan =
      federate::finalize_scan(federate::combine(parts));

  double worst_per_party = 0.0;
  bool df_match = centered_scan.df == indicator_scan.df;
  for (Index j = 0; j < m; ++j) {
    worst_per_party = std::max(
        worst_per_party,
        sim::relative_difference(centered_scan.t_stats(j, 0),
                                 indicator_scan.t_stats(j, 0)));
  }

  // (b) global centering vs explicit intercept covariate
  Matrix c_int(n, k + 1);
  c_int.col(0).setOnes();
  c_int.rightCols(k) = c;
  const scan::ScanResult intercept_scan = scan::scan({y, x, c_int, 0});
  const scan::ScanResult global_scan = scan::scan(
      {federate::center_with_means(y, federate::column_means(y)),
       federate::center_with_means(x, federate::column_means(x)),
       federate::center_with_means(c, federate::column_means(c)), 1});
  double worst_global = 0.0;
  df_match = df_match && global_scan.df == intercept_scan.df;
  for (Index j = 0; j < m; ++j) {
    worst_global = std::max(
        worst_global, sim::relative_difference(global_scan.t_stats(j, 0),
                                               intercept_scan.t_stats(j, 0)));
  }

  std::ostringstream details;
  details << "max |dt|/|t|: per-party vs indicators " << worst_per_party
          << ", global vs intercept " << worst_global
          << " (tol 1e-8); df bookkeeping "
          << (df_match ? "consistent" : "BROKEN");
  return {worst_per_party <= 1e-8 && worst_global <= 1e-8 && df_match,
          details.str()};
}

// --------------------------------------------------------------------------
// 10. Determinism: identical inputs give byte-identical scan tables and
//     byte-identical serialized messages, run to run.
// --------------------------------------------------------------------------
Outcome determinism() {
  std::mt19937_64 rng(424242);
  const Index n = 500, m = 60, k = 4, t = 2;
  scan::ScanInputs in;
  in.y = oracle::random_matrix(rng, n, t);
  in.x = oracle::random_matrix(rng, n, m);
  in.c.resize(n, k);
  in.c.col(0).setOnes();
  for (Index j = 1; j < k; ++j) in.c.col(j) = oracle::random_matrix(rng, n, 1);
  in.x.col(7).setZero();  // keep one degenerate feature in the table

  std::vector<std::string> features, responses;
  for (Index j = 0; j < m; ++j) features.push_back("x" + std::to_string(j));
  for (Index j = 0; j < t; ++j) responses.push_back("y" + std::to_string(j));

  const std::string table_a =
      io::scan_result_tsv(scan::scan(in, 16, 4), features, responses);
  const std::string table_b =
      io::scan_result_tsv(scan::scan(in, 16, 4), features, responses);
  const bool tables_equal = table_a == table_b;

  auto compress_bytes = [&] {
    return io::encode_message(
        federate::compress_party(in.y, in.x, in.c, "alice"));
  };
  const bool messages_equal = compress_bytes() == compress_bytes();

  auto combined_bytes = [&] {
    std::vector<federate::PartyCompressed> parts{
        federate::compress_party(in.y.topRows(250), in.x.topRows(250),
                                 in.c.topRows(250), "a"),
        federate::compress_party(in.y.bottomRows(250), in.x.bottomRows(250),
                                 in.c.bottomRows(250), "b")};
    return io::encode_message(federate::combine(parts));
  };
  const bool combined_equal = combined_bytes() == combined_bytes();

  std::ostringstream details;
  details << "scan tables byte-identical: " << (tables_equal ? "yes" : "NO")
          << "; party messages: " << (messages_equal ? "yes" : "NO")
          << "; combined messages: " << (combined_equal ? "yes" : "NO");
  return {tables_equal && messages_equal && combined_equal, details.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"federated-exactness", federated_exactness},
      {"scan-vs-ols-oracle", scan_vs_ols_oracle},
      {"stacked-qr-factor", stacked_qr_factor},
      {"incremental-merge", incremental_merge},
      {"secure-fidelity", secure_fidelity},
      {"message-size", message_size},
      {"linear-scaling", linear_scaling},
      {"calibration", calibration},
      {"centering", centering},
      {"determinism", determinism},
  };

  std::vector<std::string> requested;
  for (int i = 1; i < argc; ++i) requested.emplace_back(argv[i]);

  int failures = 0;
  int ran = 0;
  for (const auto& [name, fn] : criteria) {
    if (!requested.empty() &&
        std::find(requested.begin(), requested.end(), name) ==
            requested.end()) {
      continue;
    }
    ++ran;
    Outcome outcome;
    try {
      outcome = fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << name << ": "
              << outcome.details << std::endl;
    if (!outcome.pass) ++failures;
  }
  if (ran == 0) {
    std::cerr << "no matching criteria; known names:" << '\n';
    for (const auto& [name, fn] : criteria) std::cerr << "  " << name << '\n';
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
