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

#ifndef FEDSCAN_IO_HPP
#define FEDSCAN_IO_HPP

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fedscan/federate.hpp"
#include "fedscan/regress.hpp"
#include "fedscan/scan.hpp"
#include "fedscan/secure.hpp"
#include "fedscan/types.hpp"

namespace fedscan::io {

// ---------------------------------------------------------------------------
// Datasets: delimited text (TSV by default) with a header row. Cells must be
// finite numbers; "NA"/"NaN"/empty cells raise MissingValue with the row and
// column named. No imputation happens anywhere downstream.
// ---------------------------------------------------------------------------

/// Column-role assignment. Each selector is either an exact column name or a
/// 'prefix*' glob (expanded in file column order). Roles must not overlap.
struct DatasetSchema {
  std::vector<std::string> responses;
  std::vector<std::string> features;
  std::vector<std::string> covariates;
  std::string sample_id_column = "sample_id";  // used when present in the file
  char delimiter = '\t';
};

struct PartyDataset {
  std::vector<std::string> sample_ids;
  std::vector<std::string> response_names;
  std::vector<std::string> feature_names;
  std::vector<std::string> covariate_names;
  Matrix y;  // N x T
  Matrix x;  // N x M
  Matrix c;  // N x K

  Index n() const { return y.rows(); }
};

PartyDataset load_dataset(const std::string& path, const DatasetSchema& schema);

/// Writes a dataset back out with 17-significant-digit floats, so a
/// save/load round trip is value-exact.
void save_dataset(const std::string& path, const PartyDataset& dataset,
                  char delimiter = '\t');

// ---------------------------------------------------------------------------
// Binary messages ("DASH" format). Fixed little-endian layout:
//   magic "DASH" | u16 version | u16 kind | u32 aux | u16 id_len | id bytes |
//   u64 n | u64 round_id | u32 k | u32 m | u32 t | u32 absorbed |
//   u64 payload_count | payload (8-byte words) | u32 crc32
// The payload is IEEE f64 words except for masked shares (u64 ring
// elements); aux carries the fixed-point precision for masked shares. The
// crc32 covers every preceding byte. Messages are bit-exact across
// platforms; a claimed size inconsistent with the header dimensions, a bad
// checksum, or truncation is rejected as CorruptMessage.
// ---------------------------------------------------------------------------

inline constexpr std::uint16_t kWireVersion = 1;

enum class MessageKind : std::uint16_t {
  kPartyCompressed = 1,
  kMaskedShare = 2,
  kScanResult = 3,
  kCombinedStats = 4,
};

/// Scan output as a message (df travels in the header's n slot).
struct ScanResultMessage {
  scan::ScanResult result;
};

using Message = std::variant<federate::PartyCompressed, secure::MaskedShare,
                             federate::CombinedStats, ScanResultMessage>;

std::vector<std::uint8_t> encode_message(const federate::PartyCompressed& part);
std::vector<std::uint8_t> encode_message(const secure::MaskedShare& share);
std::vector<std::uint8_t> encode_message(const federate::CombinedStats& cs);
std::vector<std::uint8_t> encode_message(const ScanResultMessage& msg);

Message decode_message(std::span<const std::uint8_t> bytes);

/// Typed decode helpers; wrong kind raises CorruptMessage.
federate::PartyCompressed decode_party(std::span<const std::uint8_t> bytes);
federate::CombinedStats decode_combined(std::span<const std::uint8_t> bytes);
secure::MaskedShare decode_masked_share(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_binary_file_atomic(const std::string& path,
                              std::span<const std::uint8_t> bytes);
void write_text_file_atomic(const std::string& path, const std::string& text);

// ---------------------------------------------------------------------------
// Seeds file: TSV rows of (party_a, party_b, 64 hex chars); '#' comments and
// blank lines are skipped.
// ---------------------------------------------------------------------------

secure::SeedTable load_seeds(const std::string& path);

// ---------------------------------------------------------------------------
// Result tables. Floats are rendered with %.17g so identical results are
// byte-identical files and every value round-trips exactly.
// ---------------------------------------------------------------------------

std::string format_double(double v);

std::string scan_result_tsv(const scan::ScanResult& result,
                            std::span<const std::string> feature_names,
                            std::span<const std::string> response_names);

std::string regression_result_tsv(const regress::RegressionResult& result,
                                  std::span<const std::string> covariate_names);

}  // namespace fedscan::io

#endif  // FEDSCAN_IO_HPP
