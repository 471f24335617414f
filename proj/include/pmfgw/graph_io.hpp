// Copyright 2026 The pmfgw Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pmfgw/graph.hpp"

namespace pmfgw {

/// One line of a graph or dataset file. `input` carries task inputs such as
/// a Coloring image and is written verbatim.
struct GraphRecord {
  std::variant<DiscreteGraph, ContinuousGraph> graph;
  std::optional<nlohmann::json> input;

  bool is_discrete() const { return std::holds_alternative<DiscreteGraph>(graph); }
  const DiscreteGraph& discrete() const { return std::get<DiscreteGraph>(graph); }
  const ContinuousGraph& continuous() const { return std::get<ContinuousGraph>(graph); }
};

/// Formats a double with 17 significant digits ("%.17g").
std::string format_double(double x);

std::string to_line(const GraphRecord& record);
std::string to_line(const DiscreteGraph& g);
std::string to_line(const ContinuousGraph& g);

/// Parses one record; `line_number` is reported in ParseError.
GraphRecord parse_record(const std::string& line, std::size_t line_number = 1);

void write_graph(std::ostream& out, const GraphRecord& record);
GraphRecord read_graph(std::istream& in);

void write_dataset(std::ostream& out, const std::vector<GraphRecord>& records);
std::vector<GraphRecord> read_dataset(std::istream& in);

void write_dataset_file(const std::string& path, const std::vector<GraphRecord>& records);
std::vector<GraphRecord> read_dataset_file(const std::string& path);

/// Streams records one at a time in file order, skipping blank lines.
class DatasetReader {
 public:
  explicit DatasetReader(std::istream& in) : in_(in) {}
  std::optional<GraphRecord> next();
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

}  // namespace pmfgw
