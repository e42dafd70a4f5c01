// Copyright 2026 The lindblad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// File formats.
//
// Matrices are JSON arrays of rows, each entry an [re, im] pair (a bare
// number is read as a real entry). A matrix file is either such an array or
// an object {"matrix": ...}; a Kraus file may instead hold {"kraus": [m, ...]}.
//
// Model file:
//   { "dim": 2,
//     "hamiltonian": [[[0,0],[1,0]], [[1,0],[1,0]]],
//     "jumps": [ {"rate": 0.1, "operator": [[[0,0],[1,0]], [[0,0],[0,0]]]} ],
//     "label": "optional" }
//
// CSV output uses "," separators, "." decimals and 17 significant digits,
// independent of the process locale. Lines starting with '#' are comments.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lindblad/evolution.hpp"
#include "lindblad/liouville.hpp"
#include "lindblad/matrix_core.hpp"

namespace lindblad::io {

using json = nlohmann::json;

/// Malformed input file; the message carries a line/column or a field path.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Shortest form that still carries 17 significant digits, locale independent.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (res.ec != std::errc{}) throw Error("format_number: conversion failed");
  return std::string(buf, res.ptr);
}

inline double parse_number(const std::string& s) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw ParseError("not a number: '" + s + "'");
  return v;
}

inline Index parse_index(const std::string& s) {
  Index v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || v < 0) throw ParseError("not an index: '" + s + "'");
  return v;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parses JSON text, converting byte offsets of syntax errors into line:column.
inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" + e.what() + ")");
  }
}

inline Complex complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  throw ParseError(where + ": expected a number or an [re, im] pair");
}

/// Reads a JSON matrix; `expected_dim` < 0 accepts any square shape.
inline ComplexMatrix matrix_from_json(const json& j, const std::string& where, Index expected_dim = -1) {
  if (!j.is_array() || j.empty()) throw ParseError(where + ": expected a non-empty array of rows");
  const auto rows = static_cast<Index>(j.size());
  if (expected_dim >= 0 && rows != expected_dim)
    throw ParseError(where + ": expected " + std::to_string(expected_dim) + " rows, got " + std::to_string(rows));
  ComplexMatrix m(rows, rows);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    const std::string rw = where + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != rows)
      throw ParseError(rw + ": expected a row of " + std::to_string(rows) + " entries");
    for (Index c = 0; c < rows; ++c)
      m(i, c) = complex_from_json(row[static_cast<std::size_t>(c)], rw + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back({m(i, c).real(), m(i, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Model file contents before the physical invariants are checked.
struct ModelDocument {
  Index dim = 0;
  ComplexMatrix hamiltonian;
  std::vector<JumpOperator> jumps;
  std::string label;
};

inline ModelDocument model_document_from_json(const json& j, const std::string& source) {
  if (!j.is_object()) throw ParseError(source + ": top level must be an object");
  ModelDocument doc;
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() <= 0)
    throw ParseError(source + ": field 'dim' must be a positive integer");
  doc.dim = static_cast<Index>(j["dim"].get<long long>());
  if (!j.contains("hamiltonian")) throw ParseError(source + ": missing field 'hamiltonian'");
  doc.hamiltonian = matrix_from_json(j["hamiltonian"], source + ": hamiltonian", doc.dim);
  if (j.contains("jumps")) {
    const auto& jumps = j["jumps"];
    if (!jumps.is_array()) throw ParseError(source + ": field 'jumps' must be an array");
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      const std::string where = source + ": jumps[" + std::to_string(k) + "]";
      const auto& e = jumps[k];
      if (!e.is_object()) throw ParseError(where + ": expected an object");
      if (!e.contains("rate") || !e["rate"].is_number()) throw ParseError(where + ".rate: expected a number");
      if (!e.contains("operator")) throw ParseError(where + ": missing field 'operator'");
      doc.jumps.push_back({e["rate"].get<double>(), matrix_from_json(e["operator"], where + ".operator", doc.dim)});
    }
  }
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw ParseError(source + ": field 'label' must be a string");
    doc.label = j["label"].get<std::string>();
  }
  return doc;
}

inline ModelDocument read_model_document(const std::string& path) {
  return model_document_from_json(parse_json(read_text(path), path), path);
}

/// Checks the physical invariants; throws ModelError/DimensionError.
inline LindbladModel to_model(const ModelDocument& doc) {
  return LindbladModel(doc.hamiltonian, doc.jumps, doc.label);
}

inline LindbladModel read_model(const std::string& path) { return to_model(read_model_document(path)); }

inline json model_to_json(const LindbladModel& model) {
  json j;
  j["dim"] = model.dim();
  j["hamiltonian"] = matrix_to_json(model.hamiltonian());
  j["jumps"] = json::array();
  for (const auto& jump : model.jumps()) j["jumps"].push_back({{"rate", jump.rate}, {"operator", matrix_to_json(jump.op)}});
  if (!model.label().empty()) j["label"] = model.label();
  return j;
}

/// A single matrix from a matrix file.
inline ComplexMatrix read_matrix(const std::string& path) {
  const json j = parse_json(read_text(path), path);
  if (j.is_object()) {
    if (!j.contains("matrix")) throw ParseError(path + ": expected a matrix array or an object with field 'matrix'");
    return matrix_from_json(j["matrix"], path + ": matrix");
  }
  return matrix_from_json(j, path);
}

/// One or more Kraus operators from a file holding a matrix or {"kraus": [...]}.
inline std::vector<ComplexMatrix> read_kraus(const std::string& path) {
  const json j = parse_json(read_text(path), path);
  if (j.is_object() && j.contains("kraus")) {
    if (!j["kraus"].is_array()) throw ParseError(path + ": field 'kraus' must be an array");
    std::vector<ComplexMatrix> out;
    for (std::size_t k = 0; k < j["kraus"].size(); ++k)
      out.push_back(matrix_from_json(j["kraus"][k], path + ": kraus[" + std::to_string(k) + "]"));
    return out;
  }
  if (j.is_object() && j.contains("matrix")) return {matrix_from_json(j["matrix"], path + ": matrix")};
  return {matrix_from_json(j, path)};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open for writing");
  out << text;
}

/// Compact JSON; nlohmann serializes doubles in shortest round-trip form.
inline std::string dump(const json& j) { return j.dump() + "\n"; }

/// Header "t,<obs...>,trace_drift,purity", one row per recorded time.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (const auto& [name, _] : traj.observables) os << "," << name;
  os << ",trace_drift,purity\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << format_number(traj.times[i]);
    for (const auto& [_, series] : traj.observables) os << "," << format_number(series[i]);
    os << "," << format_number(traj.trace_drift[i]) << "," << format_number(traj.purity[i]) << "\n";
  }
}

/// Long format "row,col,re,im".
inline void write_matrix_csv(std::ostream& os, const ComplexMatrix& m) {
  os << "row,col,re,im\n";
  for (Index i = 0; i < m.rows(); ++i)
    for (Index c = 0; c < m.cols(); ++c)
      os << i << "," << c << "," << format_number(m(i, c).real()) << "," << format_number(m(i, c).imag()) << "\n";
}

/// Reads the "row,col,re,im" form back (comments and header skipped).
inline ComplexMatrix read_matrix_csv(std::istream& is) {
  std::vector<std::tuple<Index, Index, Complex>> entries;
  Index n = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("row,", 0) == 0) continue;
    std::stringstream ss(line);
    std::string a, b, re, im;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, re, ',');
    std::getline(ss, im, ',');
    const Index i = parse_index(a), c = parse_index(b);
    entries.emplace_back(i, c, Complex(parse_number(re), parse_number(im)));
    n = std::max({n, i + 1, c + 1});
  }
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (const auto& [i, c, v] : entries) m(i, c) = v;
  return m;
}

}  // namespace lindblad::io
