#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "dpspectra/errors.hpp"
#include "dpspectra/matrix.hpp"

namespace dpspectra {

/// Result of ingesting a matrix file. Square inputs that are exactly symmetric
/// (or tagged symmetric) come back as SymmetricMatrix; everything else is a
/// RectMatrix flagged for the dilation path.
struct IngestResult {
  std::variant<SymmetricMatrix, RectMatrix> matrix;
  bool symmetric = false;
  std::string format;  // "matrix-market-coordinate", "matrix-market-array", "csv"

  const SymmetricMatrix& as_symmetric() const { return std::get<SymmetricMatrix>(matrix); }
  const RectMatrix& as_rect() const { return std::get<RectMatrix>(matrix); }
};

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline double parse_value(const std::string& tok, long line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError("cannot parse numeric value '" + tok + "'", line);
  }
  if (pos != tok.size()) throw ParseError("trailing garbage in numeric value '" + tok + "'", line);
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + tok + "' rejected", line);
  return v;
}

inline long parse_index(const std::string& tok, long line) {
  try {
    return std::stol(tok);
  } catch (const std::exception&) {
    throw ParseError("cannot parse index '" + tok + "'", line);
  }
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream iss(s);
  std::vector<std::string> out;
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

inline IngestResult finish_rect(RectMatrix A, std::string format) {
  IngestResult res{std::move(A), false, std::move(format)};
  const RectMatrix& R = res.as_rect();
  if (R.rows() == R.cols() && R.exactly_symmetric()) {
    res.matrix = R.to_symmetric();
    res.symmetric = true;
  }
  return res;
}

}  // namespace detail

/// Matrix Market reader: coordinate and array formats, real or integer
/// fields, general or symmetric storage. Symmetric-tagged files are validated
/// exactly (duplicate or upper-triangular coordinate entries are rejected);
/// general-tagged square files are returned symmetric only if they are
/// symmetric to the bit, never symmetrized.
inline IngestResult ingest_matrix_market(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("empty file", 1);
  const auto head = detail::split_ws(detail::lower(header));
  if (head.size() < 5 || head[0] != "%%matrixmarket" || head[1] != "matrix")
    throw ParseError("missing '%%MatrixMarket matrix' banner", 1);
  const std::string layout = head[2];   // coordinate | array
  const std::string field = head[3];    // real | integer
  const std::string symmetry = head[4]; // general | symmetric
  if (layout != "coordinate" && layout != "array")
    throw ParseError("unsupported layout '" + layout + "'", 1);
  if (field != "real" && field != "integer")
    throw ParseError("unsupported field '" + field + "'", 1);
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError("unsupported symmetry '" + symmetry + "'", 1);
  const bool tagged_symmetric = symmetry == "symmetric";

  long line_no = 1;
  std::string line;
  auto next_content_line = [&]() -> std::vector<std::string> {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '%') continue;
      auto toks = detail::split_ws(line);
      if (!toks.empty()) return toks;
    }
    return {};
  };

  const auto size_toks = next_content_line();
  if (size_toks.empty()) throw ParseError("missing size line", line_no);

  if (layout == "coordinate") {
    if (size_toks.size() != 3) throw ParseError("coordinate size line needs 'm n nnz'", line_no);
    const long m = detail::parse_index(size_toks[0], line_no);
    const long n = detail::parse_index(size_toks[1], line_no);
    const long nnz = detail::parse_index(size_toks[2], line_no);
    if (m < 1 || n < 1 || nnz < 0) throw ParseError("invalid dimensions", line_no);
    if (tagged_symmetric && m != n) throw ParseError("symmetric matrix must be square", line_no);

    CooMatrix coo;
    coo.m = static_cast<int>(m);
    coo.n = static_cast<int>(n);
    std::set<std::pair<long, long>> seen;
    for (long k = 0; k < nnz; ++k) {
      const auto toks = next_content_line();
      if (toks.empty()) throw ParseError("unexpected end of file: fewer entries than nnz", line_no);
      if (toks.size() != 3) throw ParseError("coordinate entry needs 'i j value'", line_no);
      const long i = detail::parse_index(toks[0], line_no);
      const long j = detail::parse_index(toks[1], line_no);
      const double v = detail::parse_value(toks[2], line_no);
      if (i < 1 || i > m || j < 1 || j > n) throw ParseError("entry index out of range", line_no);
      if (!seen.insert({i, j}).second) throw ParseError("duplicate entry", line_no);
      if (tagged_symmetric && j > i)
        throw ParseError("symmetric coordinate files store the lower triangle only", line_no);
      coo.entries.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
      if (tagged_symmetric && i != j)
        coo.entries.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), v);
    }
    IngestResult res = detail::finish_rect(coo.to_dense(), "matrix-market-coordinate");
    if (tagged_symmetric && !res.symmetric)
      throw ParseError("symmetric-tagged file failed exact symmetry validation", line_no);
    return res;
  }

  // array layout: column-major dense values
  if (size_toks.size() != 2) throw ParseError("array size line needs 'm n'", line_no);
  const long m = detail::parse_index(size_toks[0], line_no);
  const long n = detail::parse_index(size_toks[1], line_no);
  if (m < 1 || n < 1) throw ParseError("invalid dimensions", line_no);
  if (tagged_symmetric && m != n) throw ParseError("symmetric matrix must be square", line_no);

  RectMatrix A(static_cast<int>(m), static_cast<int>(n));
  if (tagged_symmetric) {
    // lower triangle, column-major
    for (long j = 0; j < n; ++j) {
      for (long i = j; i < m; ++i) {
        const auto toks = next_content_line();
        if (toks.empty() || toks.size() != 1)
          throw ParseError("expected one value per line in array format", line_no);
        const double v = detail::parse_value(toks[0], line_no);
        A.set(static_cast<int>(i), static_cast<int>(j), v);
        A.set(static_cast<int>(j), static_cast<int>(i), v);
      }
    }
  } else {
    for (long j = 0; j < n; ++j) {
      for (long i = 0; i < m; ++i) {
        const auto toks = next_content_line();
        if (toks.empty() || toks.size() != 1)
          throw ParseError("expected one value per line in array format", line_no);
        A.set(static_cast<int>(i), static_cast<int>(j), detail::parse_value(toks[0], line_no));
      }
    }
  }
  if (!next_content_line().empty()) throw ParseError("trailing data after matrix entries", line_no);
  return detail::finish_rect(std::move(A), "matrix-market-array");
}

/// Headerless CSV: one row per line, comma-separated, all rows equal length.
inline IngestResult ingest_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      // trim whitespace
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      if (b == std::string::npos) throw ParseError("empty cell", line_no);
      row.push_back(detail::parse_value(cell.substr(b, e - b + 1), line_no));
    }
    if (row.empty()) throw ParseError("empty row", line_no);
    if (!rows.empty() && row.size() != rows[0].size())
      throw ParseError("ragged rows: expected " + std::to_string(rows[0].size()) + " columns",
                       line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty file", 1);
  const int m = static_cast<int>(rows.size());
  const int n = static_cast<int>(rows[0].size());
  std::vector<double> buf;
  buf.reserve(static_cast<std::size_t>(m) * n);
  for (const auto& r : rows) buf.insert(buf.end(), r.begin(), r.end());
  return detail::finish_rect(RectMatrix::from_rows(m, n, buf), "csv");
}

/// Dispatch by format tag: "matrix-market", "csv", or "auto" (by extension,
/// falling back to the Matrix Market banner).
inline IngestResult ingest_path(const std::string& path, const std::string& format = "auto") {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file '" + path + "'");
  std::string fmt = format;
  if (fmt == "auto") {
    if (path.size() >= 4 && detail::lower(path.substr(path.size() - 4)) == ".csv") {
      fmt = "csv";
    } else {
      fmt = "matrix-market";
    }
  }
  if (fmt == "matrix-market" || fmt == "mm" || fmt == "mtx") return ingest_matrix_market(in);
  if (fmt == "csv") return ingest_csv(in);
  throw std::invalid_argument("unknown matrix format tag '" + format + "'");
}

}  // namespace dpspectra
