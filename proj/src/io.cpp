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

#include "fedscan/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "fedscan/error.hpp"
#include "fedscan/linalg.hpp"

namespace fedscan::io {

namespace {

// ----------------------------- text helpers -------------------------------

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

bool is_missing_token(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" ||
         cell == "nan" || cell == "N/A";
}

double parse_cell(const std::string& cell, std::size_t line_no,
                  const std::string& column) {
  if (is_missing_token(cell)) {
    std::ostringstream msg;
    msg << "missing value at line " << line_no << ", column '" << column << "'";
    throw_error(ErrorCode::MissingValue, msg.str());
  }
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << "cannot parse numeric cell '" << cell << "' at line " << line_no
        << ", column '" << column << "'";
    throw_error(ErrorCode::ParseError, msg.str());
  }
  return value;
}

// Expands selectors (exact names or 'prefix*') against the header, in
// selector order; glob matches keep file column order.
std::vector<std::string> expand_selectors(
    std::span<const std::string> selectors,
    const std::vector<std::string>& header, const char* role) {
  std::vector<std::string> out;
  for (const std::string& sel : selectors) {
    if (!sel.empty() && sel.back() == '*') {
      const std::string prefix = sel.substr(0, sel.size() - 1);
      std::size_t before = out.size();
      for (const std::string& name : header) {
        if (name.compare(0, prefix.size(), prefix) == 0) {
          out.push_back(name);
        }
      }
      if (out.size() == before) {
        std::ostringstream msg;
        msg << role << " selector '" << sel << "' matched no columns";
        throw_error(ErrorCode::ParseError, msg.str());
      }
    } else {
      if (std::find(header.begin(), header.end(), sel) == header.end()) {
        std::ostringstream msg;
        msg << role << " column '" << sel << "' not found in header";
        throw_error(ErrorCode::ParseError, msg.str());
      }
      out.push_back(sel);
    }
  }
  return out;
}

// --------------------------- binary primitives -----------------------------

struct ByteWriter {
  std::vector<std::uint8_t> bytes;

  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) bytes.push_back(std::uint8_t(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(std::uint8_t(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(std::uint8_t(v >> (8 * i)));
  }
  void f64(double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  void raw(const void* data, std::size_t size) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    bytes.insert(bytes.end(), p, p + size);
  }
};

struct ByteReader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  void need(std::size_t count) const {
    if (pos + count > bytes.size()) {
      throw_error(ErrorCode::CorruptMessage, "message truncated");
    }
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= std::uint16_t(bytes[pos + i]) << (8 * i);
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(bytes[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v = 0.0;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string str(std::size_t count) {
    need(count);
    std::string s(reinterpret_cast<const char*>(bytes.data() + pos), count);
    pos += count;
    return s;
  }
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  return std::uint32_t(
      ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()),
              uInt(bytes.size())));
}

struct Header {
  MessageKind kind;
  std::uint32_t aux = 0;
  std::string party_id;
  std::uint64_t n = 0;
  std::uint64_t round_id = 0;
  std::uint32_t k = 0, m = 0, t = 0, absorbed = 0;
  std::uint64_t payload_count = 0;
};

void write_header(ByteWriter& w, const Header& h) {
  w.raw("DASH", 4);
  w.u16(kWireVersion);
  w.u16(std::uint16_t(h.kind));
  w.u32(h.aux);
  if (h.party_id.size() > 0xffff) {
    throw_error(ErrorCode::ShapeMismatch, "party id longer than 65535 bytes");
  }
  w.u16(std::uint16_t(h.party_id.size()));
  w.raw(h.party_id.data(), h.party_id.size());
  w.u64(h.n);
  w.u64(h.round_id);
  w.u32(h.k);
  w.u32(h.m);
  w.u32(h.t);
  w.u32(h.absorbed);
  w.u64(h.payload_count);
}

std::vector<std::uint8_t> seal(ByteWriter& w) {
  const std::uint32_t crc = crc32_of(w.bytes);
  w.u32(crc);
  return std::move(w.bytes);
}

Header read_header(ByteReader& r) {
  if (r.str(4) != "DASH") {
    throw_error(ErrorCode::CorruptMessage, "bad magic bytes");
  }
  const std::uint16_t version = r.u16();
  if (version != kWireVersion) {
    std::ostringstream msg;
    msg << "unsupported format version " << version << " (expected "
        << kWireVersion << ")";
    throw_error(ErrorCode::VersionMismatch, msg.str());
  }
  Header h;
  const std::uint16_t kind = r.u16();
  if (kind < 1 || kind > 4) {
    std::ostringstream msg;
    msg << "unknown message kind " << kind;
    throw_error(ErrorCode::CorruptMessage, msg.str());
  }
  h.kind = MessageKind(kind);
  h.aux = r.u32();
  const std::uint16_t id_len = r.u16();
  h.party_id = r.str(id_len);
  h.n = r.u64();
  h.round_id = r.u64();
  h.k = r.u32();
  h.m = r.u32();
  h.t = r.u32();
  h.absorbed = r.u32();
  h.payload_count = r.u64();

  // Bound every allocation by the actual message length before trusting any
  // header-derived size; keeps dimension products overflow-free as well.
  const std::uint32_t dim_limit = 1u << 31;
  if (h.k >= dim_limit || h.m >= dim_limit || h.t >= dim_limit) {
    throw_error(ErrorCode::CorruptMessage, "implausible header dimensions");
  }
  const std::size_t remaining = r.bytes.size() - r.pos;
  if (remaining < 4 || (remaining - 4) / 8 != h.payload_count ||
      (remaining - 4) % 8 != 0) {
    throw_error(ErrorCode::CorruptMessage,
                "claimed payload length does not match the message size");
  }
  return h;
}

void check_crc_and_length(ByteReader& r) {
  // reader is positioned right after the payload
  const std::size_t body_end = r.pos;
  const std::uint32_t stored = r.u32();
  if (r.pos != r.bytes.size()) {
    throw_error(ErrorCode::CorruptMessage, "trailing bytes after message");
  }
  const std::uint32_t computed = crc32_of(r.bytes.subspan(0, body_end));
  if (stored != computed) {
    throw_error(ErrorCode::CorruptMessage, "checksum mismatch");
  }
}

void write_row_major(ByteWriter& w, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) w.f64(m(i, j));
}

Matrix read_row_major(ByteReader& r, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = r.f64();
  return m;
}

void write_upper_triangle(ByteWriter& w, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = i; j < m.cols(); ++j) w.f64(m(i, j));
}

Matrix read_upper_triangle(ByteReader& r, Index k) {
  Matrix m = Matrix::Zero(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = i; j < k; ++j) m(i, j) = r.f64();
  return m;
}

void check_triangular_factor(const Matrix& r_factor) {
  for (Index j = 0; j < r_factor.rows(); ++j) {
    if (!(r_factor(j, j) > 0.0)) {
      throw_error(ErrorCode::CorruptMessage,
                  "triangular factor lacks a positive diagonal");
    }
  }
}

std::uint64_t party_payload_count(Index k, Index m, Index t) {
  return std::uint64_t(t) * t + std::uint64_t(m) * t + std::uint64_t(m) +
         std::uint64_t(k) * t + std::uint64_t(k) * m +
         std::uint64_t(k) * (k + 1) / 2;
}

std::uint64_t combined_payload_count(Index k, Index m, Index t) {
  return party_payload_count(k, m, t) + std::uint64_t(k) * t +
         std::uint64_t(k) * m;
}

federate::PartyCompressed read_party_body(ByteReader& r, const Header& h) {
  const Index k = h.k, m = h.m, t = h.t;
  if (h.payload_count != party_payload_count(k, m, t)) {
    throw_error(ErrorCode::CorruptMessage,
                "payload length inconsistent with header dimensions");
  }
  federate::PartyCompressed p;
  p.party_id = h.party_id;
  p.n_p = std::int64_t(h.n);
  p.absorbed = Index(h.absorbed);
  p.yty = read_row_major(r, t, t);
  p.xty = read_row_major(r, m, t);
  p.xx = read_row_major(r, m, 1);
  p.cty = read_row_major(r, k, t);
  p.ctx = read_row_major(r, k, m);
  p.r_p = read_upper_triangle(r, k);
  check_crc_and_length(r);
  linalg::require_finite(p.yty, "yty");
  linalg::require_finite(p.xty, "xty");
  linalg::require_finite(p.xx, "xx");
  linalg::require_finite(p.cty, "cty");
  linalg::require_finite(p.ctx, "ctx");
  linalg::require_finite(p.r_p, "r_p");
  check_triangular_factor(p.r_p);
  return p;
}

federate::CombinedStats read_combined_body(ByteReader& r, const Header& h) {
  const Index k = h.k, m = h.m, t = h.t;
  if (h.payload_count != combined_payload_count(k, m, t)) {
    throw_error(ErrorCode::CorruptMessage,
                "payload length inconsistent with header dimensions");
  }
  federate::CombinedStats cs;
  cs.n = std::int64_t(h.n);
  cs.absorbed = Index(h.absorbed);
  cs.yty = read_row_major(r, t, t);
  cs.xty = read_row_major(r, m, t);
  cs.xx = read_row_major(r, m, 1);
  cs.cty = read_row_major(r, k, t);
  cs.ctx = read_row_major(r, k, m);
  cs.r = read_upper_triangle(r, k);
  cs.qty = read_row_major(r, k, t);
  cs.qtx = read_row_major(r, k, m);
  check_crc_and_length(r);
  linalg::require_finite(cs.yty, "yty");
  linalg::require_finite(cs.xty, "xty");
  linalg::require_finite(cs.xx, "xx");
  linalg::require_finite(cs.cty, "cty");
  linalg::require_finite(cs.ctx, "ctx");
  linalg::require_finite(cs.r, "r");
  linalg::require_finite(cs.qty, "qty");
  linalg::require_finite(cs.qtx, "qtx");
  check_triangular_factor(cs.r);
  return cs;
}

secure::MaskedShare read_masked_body(ByteReader& r, const Header& h) {
  secure::MaskedShare share;
  share.party_id = h.party_id;
  share.round_id = h.round_id;
  share.fractional_bits = int(h.aux);
  share.payload.reserve(h.payload_count);
  for (std::uint64_t i = 0; i < h.payload_count; ++i) {
    share.payload.push_back(r.u64());
  }
  check_crc_and_length(r);
  return share;
}

ScanResultMessage read_scan_body(ByteReader& r, const Header& h) {
  const Index m = h.m, t = h.t;
  if (h.payload_count != 5 * std::uint64_t(m) * t) {
    throw_error(ErrorCode::CorruptMessage,
                "payload length inconsistent with header dimensions");
  }
  ScanResultMessage msg;
  msg.result.df = std::int64_t(h.n);
  msg.result.beta_hat = read_row_major(r, m, t);
  msg.result.se = read_row_major(r, m, t);
  msg.result.t_stats = read_row_major(r, m, t);
  msg.result.p_values = read_row_major(r, m, t);
  const Matrix valid = read_row_major(r, m, t);
  msg.result.valid = valid.array() != 0.0;
  check_crc_and_length(r);
  return msg;
}

}  // namespace

// ------------------------------- datasets ----------------------------------

PartyDataset load_dataset(const std::string& path, const DatasetSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_error(ErrorCode::ParseError, "cannot open '" + path + "'");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) {
    throw_error(ErrorCode::EmptyFile, "'" + path + "' has no header row");
  }

  const std::vector<std::string> header = split_line(lines[0], schema.delimiter);
  {
    std::set<std::string> seen;
    for (const std::string& name : header) {
      if (!seen.insert(name).second) {
        throw_error(ErrorCode::DuplicateColumn,
                    "duplicate column '" + name + "' in '" + path + "'");
      }
    }
  }
  if (lines.size() == 1) {
    throw_error(ErrorCode::EmptyFile, "'" + path + "' has no data rows");
  }

  PartyDataset ds;
  ds.response_names = expand_selectors(schema.responses, header, "response");
  ds.feature_names = expand_selectors(schema.features, header, "feature");
  ds.covariate_names = expand_selectors(schema.covariates, header, "covariate");

  std::unordered_map<std::string, Index> column_index;
  for (std::size_t j = 0; j < header.size(); ++j) {
    column_index.emplace(header[j], Index(j));
  }
  {
    std::set<std::string> roles;
    for (const auto* group :
         {&ds.response_names, &ds.feature_names, &ds.covariate_names}) {
      for (const std::string& name : *group) {
        if (!roles.insert(name).second) {
          throw_error(ErrorCode::DuplicateColumn,
                      "column '" + name + "' assigned to more than one role");
        }
      }
    }
  }

  const Index n = Index(lines.size()) - 1;
  ds.y.resize(n, Index(ds.response_names.size()));
  ds.x.resize(n, Index(ds.feature_names.size()));
  ds.c.resize(n, Index(ds.covariate_names.size()));
  ds.sample_ids.reserve(n);

  const auto id_it = column_index.find(schema.sample_id_column);
  const Index id_col = id_it == column_index.end() ? -1 : id_it->second;

  for (Index i = 0; i < n; ++i) {
    const std::size_t line_no = std::size_t(i) + 2;
    const std::vector<std::string> cells =
        split_line(lines[std::size_t(i) + 1], schema.delimiter);
    if (cells.size() != header.size()) {
      std::ostringstream msg;
      msg << "line " << line_no << " has " << cells.size()
          << " cells, header has " << header.size();
      throw_error(ErrorCode::ParseError, msg.str());
    }
    ds.sample_ids.push_back(id_col >= 0 ? cells[std::size_t(id_col)]
                                        : std::to_string(i + 1));
    for (std::size_t j = 0; j < ds.response_names.size(); ++j) {
      const std::string& name = ds.response_names[j];
      ds.y(i, Index(j)) =
          parse_cell(cells[std::size_t(column_index.at(name))], line_no, name);
    }
    for (std::size_t j = 0; j < ds.feature_names.size(); ++j) {
      const std::string& name = ds.feature_names[j];
      ds.x(i, Index(j)) =
          parse_cell(cells[std::size_t(column_index.at(name))], line_no, name);
    }
    for (std::size_t j = 0; j < ds.covariate_names.size(); ++j) {
      const std::string& name = ds.covariate_names[j];
      ds.c(i, Index(j)) =
          parse_cell(cells[std::size_t(column_index.at(name))], line_no, name);
    }
  }
  return ds;
}

void save_dataset(const std::string& path, const PartyDataset& dataset,
                  char delimiter) {
  std::ostringstream out;
  out << "sample_id";
  for (const std::string& name : dataset.response_names) out << delimiter << name;
  for (const std::string& name : dataset.feature_names) out << delimiter << name;
  for (const std::string& name : dataset.covariate_names) out << delimiter << name;
  out << '\n';
  for (Index i = 0; i < dataset.n(); ++i) {
    out << dataset.sample_ids[std::size_t(i)];
    for (Index j = 0; j < dataset.y.cols(); ++j)
      out << delimiter << format_double(dataset.y(i, j));
    for (Index j = 0; j < dataset.x.cols(); ++j)
      out << delimiter << format_double(dataset.x(i, j));
    for (Index j = 0; j < dataset.c.cols(); ++j)
      out << delimiter << format_double(dataset.c(i, j));
    out << '\n';
  }
  write_text_file_atomic(path, out.str());
}

// ------------------------------- messages ----------------------------------

std::vector<std::uint8_t> encode_message(const federate::PartyCompressed& part) {
  Header h;
  h.kind = MessageKind::kPartyCompressed;
  h.party_id = part.party_id;
  h.n = std::uint64_t(part.n_p);
  h.k = std::uint32_t(part.k());
  h.m = std::uint32_t(part.m());
  h.t = std::uint32_t(part.t());
  h.absorbed = std::uint32_t(part.absorbed);
  h.payload_count = party_payload_count(part.k(), part.m(), part.t());
  ByteWriter w;
  write_header(w, h);
  write_row_major(w, part.yty);
  write_row_major(w, part.xty);
  write_row_major(w, part.xx);
  write_row_major(w, part.cty);
  write_row_major(w, part.ctx);
  write_upper_triangle(w, part.r_p);
  return seal(w);
}

std::vector<std::uint8_t> encode_message(const secure::MaskedShare& share) {
  Header h;
  h.kind = MessageKind::kMaskedShare;
  h.aux = std::uint32_t(share.fractional_bits);
  h.party_id = share.party_id;
  h.round_id = share.round_id;
  h.payload_count = share.payload.size();
  ByteWriter w;
  write_header(w, h);
  for (std::uint64_t word : share.payload) w.u64(word);
  return seal(w);
}

std::vector<std::uint8_t> encode_message(const federate::CombinedStats& cs) {
  Header h;
  h.kind = MessageKind::kCombinedStats;
  h.n = std::uint64_t(cs.n);
  h.k = std::uint32_t(cs.k());
  h.m = std::uint32_t(cs.m());
  h.t = std::uint32_t(cs.t());
  h.absorbed = std::uint32_t(cs.absorbed);
  h.payload_count = combined_payload_count(cs.k(), cs.m(), cs.t());
  ByteWriter w;
  write_header(w, h);
  write_row_major(w, cs.yty);
  write_row_major(w, cs.xty);
  write_row_major(w, cs.xx);
  write_row_major(w, cs.cty);
  write_row_major(w, cs.ctx);
  write_upper_triangle(w, cs.r);
  write_row_major(w, cs.qty);
  write_row_major(w, cs.qtx);
  return seal(w);
}

std::vector<std::uint8_t> encode_message(const ScanResultMessage& msg) {
  const scan::ScanResult& res = msg.result;
  Header h;
  h.kind = MessageKind::kScanResult;
  h.n = std::uint64_t(res.df);
  h.m = std::uint32_t(res.beta_hat.rows());
  h.t = std::uint32_t(res.beta_hat.cols());
  h.payload_count = 5 * std::uint64_t(h.m) * h.t;
  ByteWriter w;
  write_header(w, h);
  write_row_major(w, res.beta_hat);
  write_row_major(w, res.se);
  write_row_major(w, res.t_stats);
  write_row_major(w, res.p_values);
  write_row_major(w, res.valid.cast<double>().matrix());
  return seal(w);
}

Message decode_message(std::span<const std::uint8_t> bytes) {
  ByteReader r{bytes};
  const Header h = read_header(r);
  switch (h.kind) {
    case MessageKind::kPartyCompressed:
      return read_party_body(r, h);
    case MessageKind::kMaskedShare:
      return read_masked_body(r, h);
    case MessageKind::kScanResult:
      return read_scan_body(r, h);
    case MessageKind::kCombinedStats:
      return read_combined_body(r, h);
  }
  throw_error(ErrorCode::CorruptMessage, "unknown message kind");
}

federate::PartyCompressed decode_party(std::span<const std::uint8_t> bytes) {
  Message msg = decode_message(bytes);
  if (auto* p = std::get_if<federate::PartyCompressed>(&msg)) {
    return std::move(*p);
  }
  throw_error(ErrorCode::CorruptMessage,
              "expected a compressed-party message");
}

federate::CombinedStats decode_combined(std::span<const std::uint8_t> bytes) {
  Message msg = decode_message(bytes);
  if (auto* p = std::get_if<federate::CombinedStats>(&msg)) {
    return std::move(*p);
  }
  throw_error(ErrorCode::CorruptMessage, "expected a combined-stats message");
}

secure::MaskedShare decode_masked_share(std::span<const std::uint8_t> bytes) {
  Message msg = decode_message(bytes);
  if (auto* p = std::get_if<secure::MaskedShare>(&msg)) {
    return std::move(*p);
  }
  throw_error(ErrorCode::CorruptMessage, "expected a masked-share message");
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw_error(ErrorCode::ParseError, "cannot open '" + path + "'");
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

namespace {
void write_file_atomic_impl(const std::string& path, const void* data,
                            std::size_t size) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw_error(ErrorCode::ParseError, "cannot write '" + tmp.string() + "'");
    }
    out.write(static_cast<const char*>(data), std::streamsize(size));
    if (!out) {
      throw_error(ErrorCode::ParseError, "short write to '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, target);
}
}  // namespace

void write_binary_file_atomic(const std::string& path,
                              std::span<const std::uint8_t> bytes) {
  write_file_atomic_impl(path, bytes.data(), bytes.size());
}

void write_text_file_atomic(const std::string& path, const std::string& text) {
  write_file_atomic_impl(path, text.data(), text.size());
}

// -------------------------------- seeds ------------------------------------

secure::SeedTable load_seeds(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw_error(ErrorCode::ParseError, "cannot open '" + path + "'");
  }
  secure::SeedTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> cells = split_line(line, '\t');
    if (cells.size() != 3) {
      std::ostringstream msg;
      msg << "seeds line " << line_no << " needs (party_a, party_b, hex seed)";
      throw_error(ErrorCode::ParseError, msg.str());
    }
    const std::string& hex = cells[2];
    if (hex.size() != 64) {
      std::ostringstream msg;
      msg << "seeds line " << line_no << ": seed must be 64 hex chars, got "
          << hex.size();
      throw_error(ErrorCode::ParseError, msg.str());
    }
    secure::Seed seed{};
    for (std::size_t i = 0; i < 32; ++i) {
      const auto nibble = [&](char ch) -> unsigned {
        if (ch >= '0' && ch <= '9') return unsigned(ch - '0');
        if (ch >= 'a' && ch <= 'f') return unsigned(ch - 'a' + 10);
        if (ch >= 'A' && ch <= 'F') return unsigned(ch - 'A' + 10);
        std::ostringstream msg;
        msg << "seeds line " << line_no << ": invalid hex character '" << ch
            << "'";
        throw_error(ErrorCode::ParseError, msg.str());
      };
      seed[i] = std::uint8_t(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    }
    table.insert(cells[0], cells[1], seed);
  }
  return table;
}

// ------------------------------- tables ------------------------------------

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string scan_result_tsv(const scan::ScanResult& result,
                            std::span<const std::string> feature_names,
                            std::span<const std::string> response_names) {
  const Index m = result.beta_hat.rows();
  const Index t = result.beta_hat.cols();
  if (Index(feature_names.size()) != m || Index(response_names.size()) != t) {
    throw_error(ErrorCode::DimensionMismatch,
                "name lists do not match result dimensions");
  }
  std::ostringstream out;
  out << "feature\tresponse\tbeta\tse\tt\tp\tdf\tvalid\n";
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < t; ++j) {
      out << feature_names[std::size_t(i)] << '\t'
          << response_names[std::size_t(j)] << '\t'
          << format_double(result.beta_hat(i, j)) << '\t'
          << format_double(result.se(i, j)) << '\t'
          << format_double(result.t_stats(i, j)) << '\t'
          << format_double(result.p_values(i, j)) << '\t' << result.df << '\t'
          << (result.valid(i, j) ? '1' : '0') << '\n';
    }
  }
  return out.str();
}

std::string regression_result_tsv(const regress::RegressionResult& result,
                                  std::span<const std::string> covariate_names) {
  const Index k = result.gamma_hat.size();
  if (Index(covariate_names.size()) != k) {
    throw_error(ErrorCode::DimensionMismatch,
                "name list does not match coefficient count");
  }
  std::ostringstream out;
  out << "# df=" << result.df << "\ttau2=" << format_double(result.tau2_hat)
      << '\n';
  out << "covariate\tgamma\tse\tt\tp\n";
  for (Index j = 0; j < k; ++j) {
    out << covariate_names[std::size_t(j)] << '\t'
        << format_double(result.gamma_hat(j)) << '\t'
        << format_double(result.se(j)) << '\t'
        << format_double(result.t_stats(j)) << '\t'
        << format_double(result.p_values(j)) << '\n';
  }
  return out.str();
}

}  // namespace fedscan::io
