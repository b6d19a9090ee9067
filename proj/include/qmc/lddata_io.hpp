#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qmc/dnet.hpp"
#include "qmc/errors.hpp"
#include "qmc/lattice.hpp"
#include "qmc/point_batch.hpp"

namespace qmc {
namespace io {

// ---------------------------------------------------------------------------
// Plain-text artifact files. Header lines start with '#' and hold
// 'key: value' pairs; the payload follows. Readers reject trailing garbage,
// writers emit exactly what the readers accept.
//
//   lattice-vector:  kind, base, d, m_max, source; payload = d integers.
//   dnet-matrices:   kind, base(=2), d, m, t_max, source; payload = d lines
//                    of m column integers, row 0 at the most significant bit.
// ---------------------------------------------------------------------------

namespace detail {

struct HeaderInfo {
  std::map<std::string, std::string> kv;
  std::vector<std::string> payload;     // non-header, non-empty lines
  std::vector<std::size_t> payload_ln;  // their 1-based line numbers
};

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline HeaderInfo read_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open " + path);
  HeaderInfo h;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      std::string body = trim(t.substr(1));
      std::size_t colon = body.find(':');
      if (colon != std::string::npos)
        h.kv[trim(body.substr(0, colon))] = trim(body.substr(colon + 1));
      continue;
    }
    h.payload.push_back(t);
    h.payload_ln.push_back(ln);
  }
  return h;
}

inline std::uint64_t parse_u64(const std::string& tok, std::size_t ln) {
  try {
    std::size_t used = 0;
    if (!tok.empty() && tok[0] == '-') throw std::invalid_argument("negative");
    std::uint64_t v = std::stoull(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw parse_error("expected a nonnegative integer, got '" + tok + "'", ln);
  }
}

inline std::uint64_t header_u64(const HeaderInfo& h, const std::string& key) {
  auto it = h.kv.find(key);
  if (it == h.kv.end()) throw parse_error("missing header field '" + key + "'");
  return parse_u64(it->second, 0);
}

inline std::vector<std::uint64_t> tokens_u64(const std::string& line, std::size_t ln) {
  std::istringstream ss(line);
  std::vector<std::uint64_t> out;
  std::string tok;
  while (ss >> tok) out.push_back(parse_u64(tok, ln));
  return out;
}

}  // namespace detail

inline void write_lattice_vector(const LatticeGeneratingVector& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot write " + path);
  out << "# kind: lattice-vector\n# base: 2\n# d: " << g.g.size() << "\n# m_max: " << g.m_max
      << "\n# source: " << (g.source.empty() ? "unspecified" : g.source) << "\n";
  for (std::size_t j = 0; j < g.g.size(); ++j) out << g.g[j] << (j + 1 < g.g.size() ? ' ' : '\n');
  if (!out) throw parse_error("write failed: " + path);
}

inline LatticeGeneratingVector read_lattice_vector(const std::string& path) {
  auto h = detail::read_header(path);
  if (auto it = h.kv.find("kind"); it != h.kv.end() && it->second != "lattice-vector")
    throw parse_error("file is not a lattice-vector (kind: " + it->second + ")");
  const std::uint64_t d = detail::header_u64(h, "d");
  LatticeGeneratingVector g;
  g.m_max = static_cast<unsigned>(detail::header_u64(h, "m_max"));
  if (auto it = h.kv.find("source"); it != h.kv.end()) g.source = it->second;
  for (std::size_t li = 0; li < h.payload.size(); ++li) {
    auto toks = detail::tokens_u64(h.payload[li], h.payload_ln[li]);
    for (std::uint64_t v : toks) {
      if (v == 0) throw parse_error("lattice components must be positive", h.payload_ln[li]);
      g.g.push_back(v);
    }
  }
  if (g.g.empty()) throw parse_error("empty lattice-vector payload");
  if (g.g.size() != d)
    throw parse_error("payload has " + std::to_string(g.g.size()) + " components, header says d=" +
                      std::to_string(d));
  return g;
}

inline void write_dnet_matrices(const GeneratingMatrixSet& C, const std::string& path) {
  C.validate();
  std::ofstream out(path);
  if (!out) throw parse_error("cannot write " + path);
  out << "# kind: dnet-matrices\n# base: 2\n# d: " << C.dimension() << "\n# m: " << C.m
      << "\n# t_max: " << C.t_max << "\n# source: "
      << (C.source.empty() ? "unspecified" : C.source) << "\n";
  for (const auto& cols : C.cols) {
    for (unsigned k = 0; k < C.m; ++k) out << cols[k] << (k + 1 < C.m ? ' ' : '\n');
  }
  if (!out) throw parse_error("write failed: " + path);
}

inline GeneratingMatrixSet read_dnet_matrices(const std::string& path) {
  auto h = detail::read_header(path);
  if (auto it = h.kv.find("kind"); it != h.kv.end() && it->second != "dnet-matrices")
    throw parse_error("file is not dnet-matrices (kind: " + it->second + ")");
  if (auto it = h.kv.find("base"); it != h.kv.end() && it->second != "2")
    throw parse_error("matrix nets are base 2 only (base: " + it->second + ")");
  GeneratingMatrixSet C;
  const std::uint64_t d = detail::header_u64(h, "d");
  C.m = static_cast<unsigned>(detail::header_u64(h, "m"));
  C.t_max = static_cast<unsigned>(detail::header_u64(h, "t_max"));
  if (C.t_max == 0 || C.t_max > 64) throw parse_error("t_max out of [1, 64]");
  if (auto it = h.kv.find("source"); it != h.kv.end()) C.source = it->second;
  if (h.payload.size() != d)
    throw parse_error("expected " + std::to_string(d) + " matrix lines, found " +
                      std::to_string(h.payload.size()));
  const std::uint64_t cap = C.t_max == 64 ? ~std::uint64_t{0}
                                          : ((std::uint64_t{1} << C.t_max) - 1);
  for (std::size_t j = 0; j < h.payload.size(); ++j) {
    auto toks = detail::tokens_u64(h.payload[j], h.payload_ln[j]);
    if (toks.size() != C.m)
      throw parse_error("expected " + std::to_string(C.m) + " columns, found " +
                        std::to_string(toks.size()), h.payload_ln[j]);
    for (std::uint64_t v : toks)
      if (v > cap) throw std::out_of_range("column value exceeds 2^t_max at line " +
                                           std::to_string(h.payload_ln[j]));
    C.cols.push_back(std::move(toks));
  }
  C.validate();
  return C;
}

// ---------------------------------------------------------------------------
// Point batches: CSV (replication index column, then coordinates) and a
// binary format with a 16-byte magic+version header followed by three u64
// dims and little-endian binary64 payload in (r, i, j) order.
// ---------------------------------------------------------------------------

inline constexpr char kBatchMagic[12] = {'q', 'm', 'c', '-', 'p', 't', 'b', 'a', 't', 'c', 'h', '\0'};
inline constexpr std::uint32_t kBatchVersion = 1;

enum class BatchFormat { csv, binary };

inline void write_point_batch(const PointBatch& b, const std::string& path, BatchFormat fmt) {
  if (b.R == 0 || b.n == 0 || b.d == 0) throw std::invalid_argument("write_point_batch: empty batch");
  if (fmt == BatchFormat::csv) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write " + path);
    out.precision(17);
    for (std::size_t r = 0; r < b.R; ++r)
      for (std::size_t i = 0; i < b.n; ++i) {
        out << r;
        for (std::size_t j = 0; j < b.d; ++j) out << ',' << b.at(r, i, j);
        out << '\n';
      }
    if (!out) throw parse_error("write failed: " + path);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw parse_error("cannot write " + path);
  out.write(kBatchMagic, sizeof(kBatchMagic));
  out.write(reinterpret_cast<const char*>(&kBatchVersion), sizeof(kBatchVersion));
  const std::uint64_t dims[3] = {b.R, b.n, b.d};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(b.x.data()),
            static_cast<std::streamsize>(b.x.size() * sizeof(double)));
  if (!out) throw parse_error("write failed: " + path);
}

inline PointBatch read_point_batch(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw parse_error("cannot open " + path);
  char magic[sizeof(kBatchMagic)] = {};
  probe.read(magic, sizeof(magic));
  PointBatch b;
  if (probe.gcount() == sizeof(magic) && std::memcmp(magic, kBatchMagic, sizeof(magic)) == 0) {
    std::uint32_t version = 0;
    probe.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (version != kBatchVersion) throw parse_error("unsupported point-batch version");
    std::uint64_t dims[3] = {};
    probe.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!probe) throw parse_error("truncated point-batch header");
    b.R = dims[0];
    b.n = dims[1];
    b.d = dims[2];
    b.x.resize(b.R * b.n * b.d);
    probe.read(reinterpret_cast<char*>(b.x.data()),
               static_cast<std::streamsize>(b.x.size() * sizeof(double)));
    if (static_cast<std::size_t>(probe.gcount()) != b.x.size() * sizeof(double))
      throw parse_error("truncated point-batch payload");
    probe.get();
    if (!probe.eof()) throw parse_error("trailing bytes after point-batch payload");
    return b;
  }
  // CSV fallback
  probe.close();
  std::ifstream in(path);
  std::string line;
  std::size_t ln = 0;
  std::vector<double> vals;
  std::size_t d = 0, rows = 0;
  std::size_t max_r = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    std::istringstream ss(t);
    std::string tok;
    std::vector<double> row;
    while (std::getline(ss, tok, ',')) {
      try {
        row.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw parse_error("bad CSV value '" + tok + "'", ln);
      }
    }
    if (row.size() < 2) throw parse_error("CSV row needs an index and coordinates", ln);
    if (d == 0) d = row.size() - 1;
    if (row.size() - 1 != d) throw parse_error("ragged CSV row", ln);
    max_r = std::max(max_r, static_cast<std::size_t>(row[0]));
    vals.insert(vals.end(), row.begin() + 1, row.end());
    ++rows;
  }
  if (rows == 0) throw parse_error("empty point-batch CSV");
  b.R = max_r + 1;
  if (rows % b.R != 0) throw parse_error("CSV rows do not tile replications evenly");
  b.n = rows / b.R;
  b.d = d;
  b.x = std::move(vals);
  return b;
}

// ---------------------------------------------------------------------------
// Best-effort import of the external LDData text layouts. Heuristic and
// lossy: the native header format above remains authoritative.
// ---------------------------------------------------------------------------

/// Lattice import. Accepts either the native format or a bare token stream;
/// a bare stream of N integers is taken as a d=N generating vector, except
/// that a leading triple (b, n, d) followed by exactly d values (one per
/// line, the LDData convention) is unwrapped.
inline LatticeGeneratingVector import_lattice_vector(const std::string& path) {
  auto h = detail::read_header(path);
  if (h.kv.count("kind")) return read_lattice_vector(path);
  std::vector<std::uint64_t> toks;
  for (std::size_t li = 0; li < h.payload.size(); ++li)
    for (std::uint64_t v : detail::tokens_u64(h.payload[li], h.payload_ln[li]))
      toks.push_back(v);
  if (toks.empty()) throw parse_error("no integers found in " + path);
  LatticeGeneratingVector g;
  g.source = "lddata-import-unverified";
  if (toks.size() >= 4 && toks[0] == 2 && toks.size() == 3 + toks[2]) {
    // (base, n, d, g_1..g_d)
    std::uint64_t n = toks[1];
    unsigned m = 0;
    while ((std::uint64_t{1} << m) < n && m < 63) ++m;
    g.m_max = m;
    g.g.assign(toks.begin() + 3, toks.end());
  } else {
    g.m_max = 20;
    g.g = std::move(toks);
  }
  for (std::uint64_t v : g.g)
    if (v == 0) throw parse_error("lattice components must be positive");
  return g;
}

}  // namespace io
}  // namespace qmc
