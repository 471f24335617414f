// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pmfgw/graph_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pmfgw/errors.hpp"

namespace pmfgw {

namespace {

using nlohmann::json;

void append_matrix(std::string& s, const Matrix& m) {
  s += '[';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) s += ',';
    s += '[';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) s += ',';
      s += format_double(m(i, j));
    }
    s += ']';
  }
  s += ']';
}

void append_vector(std::string& s, const Vector& v) {
  s += '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v(i));
  }
  s += ']';
}

std::string header(const char* kind, Eigen::Index n, Eigen::Index d) {
  return std::string("{\"kind\":\"") + kind + "\",\"n\":" + std::to_string(n) + ",\"d\":" + std::to_string(d);
}

const json& require(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line, std::string("missing \"") + key + "\" key");
  return *it;
}

double number(const json& v, std::size_t line, const char* what) {
  if (!v.is_number()) throw ParseError(line, std::string(what) + " entries must be numbers");
  return v.get<double>();
}

Matrix read_matrix(const json& v, Eigen::Index rows, Eigen::Index cols, std::size_t line, const char* what) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows)
    throw ParseError(line, std::string("\"") + what + "\" must have " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = v[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(line, std::string("\"") + what + "\" row " + std::to_string(i) + " must have " +
                                 std::to_string(cols) + " entries");
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = number(row[j], line, what);
  }
  return m;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_line(const DiscreteGraph& g) {
  std::string s = header("discrete", g.size(), g.dim());
  s += ",\"features\":";
  append_matrix(s, g.features);
  s += ",\"adjacency\":";
  append_matrix(s, g.adjacency);
  s += '}';
  return s;
}

std::string to_line(const ContinuousGraph& g) {
  std::string s = header("continuous", g.size(), g.dim());
  s += ",\"features\":";
  append_matrix(s, g.features);
  s += ",\"adjacency\":";
  append_matrix(s, g.edges);
  s += ",\"mask\":";
  append_vector(s, g.mask);
  s += '}';
  return s;
}

std::string to_line(const GraphRecord& record) {
  std::string s = record.is_discrete() ? to_line(record.discrete()) : to_line(record.continuous());
  if (record.input) {
    s.pop_back();
    s += ",\"input\":";
    s += record.input->dump();
    s += '}';
  }
  return s;
}

GraphRecord parse_record(const std::string& line, std::size_t line_number) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_number, std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError(line_number, "record must be a JSON object");

  const json& kind = require(obj, "kind", line_number);
  const json& n_field = require(obj, "n", line_number);
  const json& d_field = require(obj, "d", line_number);
  if (!n_field.is_number_integer() || n_field.get<long long>() < 0) throw ParseError(line_number, "\"n\" must be a non-negative integer");
  if (!d_field.is_number_integer() || d_field.get<long long>() < 0) throw ParseError(line_number, "\"d\" must be a non-negative integer");
  const auto n = static_cast<Eigen::Index>(n_field.get<long long>());
  const auto d = static_cast<Eigen::Index>(d_field.get<long long>());

  Matrix features = read_matrix(require(obj, "features", line_number), n, d, line_number, "features");
  Matrix adjacency = read_matrix(require(obj, "adjacency", line_number), n, n, line_number, "adjacency");

  GraphRecord rec;
  if (kind == "discrete") {
    DiscreteGraph g{std::move(features), std::move(adjacency)};
    try {
      g.validate();
    } catch (const Error& e) {
      throw ParseError(line_number, e.what());
    }
    rec.graph = std::move(g);
  } else if (kind == "continuous") {
    const json& mask = require(obj, "mask", line_number);
    if (!mask.is_array() || static_cast<Eigen::Index>(mask.size()) != n)
      throw ParseError(line_number, "\"mask\" must have n entries");
    Vector h(n);
    for (Eigen::Index i = 0; i < n; ++i) h(i) = number(mask[i], line_number, "mask");
    ContinuousGraph g{std::move(h), std::move(features), std::move(adjacency)};
    try {
      g.validate();
    } catch (const Error& e) {
      throw ParseError(line_number, e.what());
    }
    rec.graph = std::move(g);
  } else {
    throw ParseError(line_number, "\"kind\" must be \"discrete\" or \"continuous\"");
  }
  if (auto it = obj.find("input"); it != obj.end()) rec.input = *it;
  return rec;
}

void write_graph(std::ostream& out, const GraphRecord& record) { out << to_line(record) << '\n'; }

std::optional<GraphRecord> DatasetReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return parse_record(line, line_);
  }
  return std::nullopt;
}

GraphRecord read_graph(std::istream& in) {
  DatasetReader reader(in);
  auto rec = reader.next();
  if (!rec) throw ParseError(reader.line() + 1, "no graph record found");
  return std::move(*rec);
}

void write_dataset(std::ostream& out, const std::vector<GraphRecord>& records) {
  for (const auto& r : records) write_graph(out, r);
}

std::vector<GraphRecord> read_dataset(std::istream& in) {
  DatasetReader reader(in);
  std::vector<GraphRecord> out;
  while (auto rec = reader.next()) out.push_back(std::move(*rec));
  return out;
}

void write_dataset_file(const std::string& path, const std::vector<GraphRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_dataset(out, records);
  if (!out) throw Error("failed writing '" + path + "'");
}

std::vector<GraphRecord> read_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_dataset(in);
}

}  // namespace pmfgw
