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

#ifndef FEDSCAN_SECURE_HPP
#define FEDSCAN_SECURE_HPP

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fedscan/federate.hpp"

namespace fedscan::secure {

// Honest-but-curious additive masking: every pair of parties shares a seed
// (provisioned out of band), each party offsets its encoded statistics by
// pairwise pseudorandom streams that cancel in the global sum, and the
// aggregator learns nothing but that sum. No dropout recovery, no integrity
// protection, and the released sums themselves still reveal pooled Gram
// information; see the README for the full threat model.

/// Two's-complement fixed-point map between reals and the ring Z_{2^64}.
/// encode(x) = round(x * 2^fractional_bits); values with
/// |x| >= 2^(62 - fractional_bits) raise RangeOverflow so that sums over a
/// few parties cannot hit the sign boundary.
struct FixedPointCodec {
  int fractional_bits = 24;

  double max_abs_value() const;
  // Takes long double so that encode(decode_exact(v)) == v holds for every
  // in-range ring element; double arguments promote exactly.
  std::uint64_t encode(long double x) const;
  double decode(std::uint64_t v) const;
  // Exact ring inverse of encode (the extended-precision mantissa keeps
  // every ring element distinct); decode() is this value rounded to double.
  long double decode_exact(std::uint64_t v) const;
};

using Seed = std::array<std::uint8_t, 32>;

/// Deterministic mask stream: word i of the ChaCha20 keystream keyed by
/// `seed` with the round id as nonce, read little-endian. Both holders of a
/// seed derive bit-identical streams on any platform.
std::vector<std::uint64_t> prg_stream(const Seed& seed, std::uint64_t round_id,
                                      std::size_t count);

struct MaskedShare {
  std::string party_id;
  std::uint64_t round_id = 0;
  int fractional_bits = 24;
  std::vector<std::uint64_t> payload;
};

/// payload_i = encode(v_i) + sum_{peer id > self} prg_i - sum_{peer id < self} prg_i
/// in the ring. Peer order is by party id string, so the two holders of a
/// pairwise seed take opposite signs and the masks cancel exactly in the sum.
MaskedShare mask(std::span<const double> values,
                 const std::map<std::string, Seed>& peer_seeds,
                 const std::string& self_id, std::uint64_t round_id,
                 const FixedPointCodec& codec = {});

/// Ring-sums the payloads of exactly the expected party set and decodes.
/// An incomplete or inconsistent set means the masks will not cancel, so it
/// aborts (MissingParty / DuplicateShare) rather than emit garbage.
std::vector<double> aggregate_unmask(std::span<const MaskedShare> shares,
                                     std::span<const std::string> expected_parties,
                                     const FixedPointCodec& codec = {});

/// Symmetric pairwise seed table; the key is the sorted id pair.
struct SeedTable {
  std::map<std::pair<std::string, std::string>, Seed> seeds;

  void insert(const std::string& a, const std::string& b, const Seed& seed);
  const Seed& pair_seed(const std::string& a, const std::string& b) const;
  std::map<std::string, Seed> peers_of(const std::string& self) const;
  std::vector<std::string> parties() const;
};

/// What happens to the covariate factor in the secure path.
///   kMaskedGram: parties mask R_p^T R_p alongside the other statistics and
///     the aggregator takes a Cholesky factor of the decoded sum, so no R_p
///     ever leaves a party in plaintext (default).
///   kPlaintextStack: parties reveal R_p to the aggregator, which stacks and
///     re-factors them as in the plaintext combine.
/// Both produce the same R up to fixed-point quantization.
enum class RPolicy { kMaskedGram, kPlaintextStack };

/// Drives mask / aggregate_unmask over every party's compressed statistics
/// and rebuilds CombinedStats from the decoded sums. Output matches the
/// plaintext federate::combine up to fixed-point quantization.
federate::CombinedStats secure_combine(
    std::span<const federate::PartyCompressed> parts, const SeedTable& seeds,
    std::uint64_t round_id, RPolicy policy = RPolicy::kMaskedGram,
    const FixedPointCodec& codec = {});

}  // namespace fedscan::secure

#endif  // FEDSCAN_SECURE_HPP
