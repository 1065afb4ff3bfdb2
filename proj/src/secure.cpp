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

#include "fedscan/secure.hpp"

#include <sodium.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <set>
#include <sstream>

#include "fedscan/error.hpp"
#include "fedscan/linalg.hpp"

namespace fedscan::secure {

namespace {

void ensure_sodium_ready() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) {
      throw_error(ErrorCode::NumericError, "libsodium initialization failed");
    }
  });
}

std::int64_t decode_count(double value, const char* what) {
  const double rounded = std::nearbyint(value);
  if (std::abs(value - rounded) > 0.25 || rounded < 0) {
    std::ostringstream msg;
    msg << what << " decoded to a non-integer: " << value;
    throw_error(ErrorCode::NumericError, msg.str());
  }
  return std::int64_t(rounded);
}

// Field order of a flattened PartyCompressed; mirrors the wire payload
// order. Matrices are row-major. Policy kMaskedGram appends the upper
// triangle of R_p^T R_p.
std::vector<double> flatten_party(const federate::PartyCompressed& p,
                                  bool include_gram) {
  std::vector<double> flat;
  const Index k = p.k(), m = p.m(), t = p.t();
  flat.reserve(std::size_t(2 + t * t + m * t + m + k * t + k * m +
                           (include_gram ? k * (k + 1) / 2 : 0)));
  flat.push_back(double(p.n_p));
  flat.push_back(double(p.absorbed));
  for (Index i = 0; i < t; ++i)
    for (Index j = 0; j < t; ++j) flat.push_back(p.yty(i, j));
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < t; ++j) flat.push_back(p.xty(i, j));
  for (Index i = 0; i < m; ++i) flat.push_back(p.xx(i));
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < t; ++j) flat.push_back(p.cty(i, j));
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < m; ++j) flat.push_back(p.ctx(i, j));
  if (include_gram) {
    const Matrix gram = p.r_p.transpose() * p.r_p;  // C^T C of this party
    for (Index i = 0; i < k; ++i)
      for (Index j = i; j < k; ++j) flat.push_back(gram(i, j));
  }
  return flat;
}

}  // namespace

double FixedPointCodec::max_abs_value() const {
  return std::ldexp(1.0, 62 - fractional_bits);
}

std::uint64_t FixedPointCodec::encode(long double x) const {
  if (!std::isfinite(double(x)) || fabsl(x) >= (long double)max_abs_value()) {
    std::ostringstream msg;
    msg << "value " << double(x) << " outside encodable range (|x| < "
        << max_abs_value() << ")";
    throw_error(ErrorCode::RangeOverflow, msg.str());
  }
  // x * 2^fb is exact (power-of-two scaling); only the final round loses
  // anything, and that at most 2^-(fb+1).
  const long double scaled = x * std::ldexp(1.0L, fractional_bits);
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(llrintl(scaled)));
}

long double FixedPointCodec::decode_exact(std::uint64_t v) const {
  const auto signed_value = static_cast<std::int64_t>(v);
  return static_cast<long double>(signed_value) *
         std::ldexp(1.0L, -fractional_bits);
}

double FixedPointCodec::decode(std::uint64_t v) const {
  return static_cast<double>(decode_exact(v));
}

std::vector<std::uint64_t> prg_stream(const Seed& seed, std::uint64_t round_id,
                                      std::size_t count) {
  ensure_sodium_ready();
  std::vector<std::uint64_t> words(count, 0);
  if (count == 0) return words;
  std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> nonce{};
  for (std::size_t i = 0; i < 8; ++i) {
    nonce[i] = std::uint8_t(round_id >> (8 * i));
  }
  std::vector<std::uint8_t> bytes(count * 8);
  crypto_stream_chacha20(bytes.data(), bytes.size(), nonce.data(), seed.data());
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t w = 0;
    for (std::size_t b = 0; b < 8; ++b) {
      w |= std::uint64_t(bytes[i * 8 + b]) << (8 * b);
    }
    words[i] = w;
  }
  return words;
}

MaskedShare mask(std::span<const double> values,
                 const std::map<std::string, Seed>& peer_seeds,
                 const std::string& self_id, std::uint64_t round_id,
                 const FixedPointCodec& codec) {
  MaskedShare share;
  share.party_id = self_id;
  share.round_id = round_id;
  share.fractional_bits = codec.fractional_bits;
  share.payload.reserve(values.size());
  for (double v : values) {
    share.payload.push_back(codec.encode(v));
  }
  for (const auto& [peer, seed] : peer_seeds) {
    if (peer == self_id) {
      throw_error(ErrorCode::DuplicateParty,
                  "peer seed list contains the masking party itself");
    }
    const std::vector<std::uint64_t> stream =
        prg_stream(seed, round_id, values.size());
    if (self_id < peer) {
      for (std::size_t i = 0; i < stream.size(); ++i) {
        share.payload[i] += stream[i];
      }
    } else {
      for (std::size_t i = 0; i < stream.size(); ++i) {
        share.payload[i] -= stream[i];
      }
    }
  }
  return share;
}

std::vector<double> aggregate_unmask(std::span<const MaskedShare> shares,
                                     std::span<const std::string> expected_parties,
                                     const FixedPointCodec& codec) {
  if (shares.empty()) {
    throw_error(ErrorCode::EmptyInput, "no shares to aggregate");
  }
  const std::uint64_t round_id = shares.front().round_id;
  const std::size_t length = shares.front().payload.size();

  std::set<std::string> expected(expected_parties.begin(), expected_parties.end());
  std::set<std::string> received;
  for (const MaskedShare& share : shares) {
    if (!received.insert(share.party_id).second) {
      throw_error(ErrorCode::DuplicateShare,
                  "two shares from party '" + share.party_id + "'");
    }
    if (!expected.count(share.party_id)) {
      throw_error(ErrorCode::MissingParty,
                  "share from unexpected party '" + share.party_id + "'");
    }
    if (share.round_id != round_id) {
      throw_error(ErrorCode::ShapeMismatch, "shares span different rounds");
    }
    if (share.fractional_bits != codec.fractional_bits) {
      throw_error(ErrorCode::ShapeMismatch,
                  "shares disagree on fixed-point precision");
    }
    if (share.payload.size() != length) {
      throw_error(ErrorCode::ShapeMismatch, "shares have different lengths");
    }
  }
  for (const std::string& party : expected) {
    if (!received.count(party)) {
      throw_error(ErrorCode::MissingParty,
                  "no share from party '" + party + "'; masks cannot cancel");
    }
  }

  std::vector<std::uint64_t> ring_sum(length, 0);
  for (const MaskedShare& share : shares) {
    for (std::size_t i = 0; i < length; ++i) {
      ring_sum[i] += share.payload[i];
    }
  }
  std::vector<double> out(length);
  for (std::size_t i = 0; i < length; ++i) {
    out[i] = codec.decode(ring_sum[i]);
  }
  return out;
}

void SeedTable::insert(const std::string& a, const std::string& b,
                       const Seed& seed) {
  if (a == b) {
    throw_error(ErrorCode::DuplicateParty,
                "seed pair must name two distinct parties, got '" + a + "'");
  }
  auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  if (!seeds.emplace(std::move(key), seed).second) {
    throw_error(ErrorCode::DuplicateShare,
                "duplicate seed for pair (" + a + ", " + b + ")");
  }
}

const Seed& SeedTable::pair_seed(const std::string& a,
                                 const std::string& b) const {
  auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  auto it = seeds.find(key);
  if (it == seeds.end()) {
    throw_error(ErrorCode::MissingSeed,
                "no pairwise seed for (" + a + ", " + b + ")");
  }
  return it->second;
}

std::map<std::string, Seed> SeedTable::peers_of(const std::string& self) const {
  std::map<std::string, Seed> peers;
  for (const auto& [pair, seed] : seeds) {
    if (pair.first == self) peers.emplace(pair.second, seed);
    if (pair.second == self) peers.emplace(pair.first, seed);
  }
  return peers;
}

std::vector<std::string> SeedTable::parties() const {
  std::set<std::string> names;
  for (const auto& [pair, seed] : seeds) {
    names.insert(pair.first);
    names.insert(pair.second);
  }
  return {names.begin(), names.end()};
}

federate::CombinedStats secure_combine(
    std::span<const federate::PartyCompressed> parts, const SeedTable& seeds,
    std::uint64_t round_id, RPolicy policy, const FixedPointCodec& codec) {
  if (parts.empty()) {
    throw_error(ErrorCode::EmptyInput, "no parties to combine");
  }
  const bool masked_gram = policy == RPolicy::kMaskedGram;
  const Index k = parts.front().k();
  const Index m = parts.front().m();
  const Index t = parts.front().t();

  std::vector<const federate::PartyCompressed*> ordered;
  for (const federate::PartyCompressed& p : parts) ordered.push_back(&p);
  std::sort(ordered.begin(), ordered.end(),
            [](auto* a, auto* b) { return a->party_id < b->party_id; });

  std::vector<std::string> party_ids;
  std::vector<MaskedShare> shares;
  for (const federate::PartyCompressed* p : ordered) {
    if (p->k() != k || p->m() != m || p->t() != t) {
      throw_error(ErrorCode::ShapeMismatch, "parties disagree on (k, m, t)");
    }
    party_ids.push_back(p->party_id);
    const std::vector<double> flat = flatten_party(*p, masked_gram);
    shares.push_back(
        mask(flat, seeds.peers_of(p->party_id), p->party_id, round_id, codec));
  }
  const std::vector<double> sums =
      aggregate_unmask(shares, party_ids, codec);

  federate::CombinedStats cs;
  std::size_t pos = 0;
  cs.n = decode_count(sums[pos++], "sample count");
  cs.absorbed = Index(decode_count(sums[pos++], "absorbed covariate count"));
  cs.yty.resize(t, t);
  for (Index i = 0; i < t; ++i)
    for (Index j = 0; j < t; ++j) cs.yty(i, j) = sums[pos++];
  cs.xty.resize(m, t);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < t; ++j) cs.xty(i, j) = sums[pos++];
  cs.xx.resize(m);
  for (Index i = 0; i < m; ++i) cs.xx(i) = sums[pos++];
  cs.cty.resize(k, t);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < t; ++j) cs.cty(i, j) = sums[pos++];
  cs.ctx.resize(k, m);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < m; ++j) cs.ctx(i, j) = sums[pos++];

  if (masked_gram) {
    Matrix ctc(k, k);
    for (Index i = 0; i < k; ++i) {
      for (Index j = i; j < k; ++j) {
        ctc(i, j) = sums[pos];
        ctc(j, i) = sums[pos];
        ++pos;
      }
    }
    cs.r = linalg::cholesky_lower(ctc).transpose();
  } else {
    Matrix stacked(Index(ordered.size()) * k, k);
    Index row = 0;
    for (const federate::PartyCompressed* p : ordered) {
      stacked.middleRows(row, k) = p->r_p;
      row += k;
    }
    cs.r = linalg::qr_positive(stacked).r;
  }
  cs.qty = linalg::solve_rt_transposed(cs.r, cs.cty);
  cs.qtx = linalg::solve_rt_transposed(cs.r, cs.ctx);
  return cs;
}

}  // namespace fedscan::secure
