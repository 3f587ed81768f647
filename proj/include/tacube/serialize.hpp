#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tacube/cube.hpp"
#include "tacube/ranking.hpp"
#include "tacube/table.hpp"

namespace tacube {

// Integers render without a decimal point; everything else with up to four
// decimals, trailing zeros trimmed, leading '-' for negatives.
std::string format_number(double value);

// Backslash-escapes '\' and '|' so pipe-separated sequences stay parseable.
std::string escape_field(std::string_view field);
std::string unescape_field(std::string_view field);

// T* = [HEAD] | c1 | ... | cN [ROW] 1 | r1... [ROW] 2 | r2...
std::string linearize_table(const Table& table);

// C* = [CUBE] OPERATOR CH.. RH.. op1 .. opM [ANSWER] : answer
std::string linearize_cube_item(const CubeItem& item);

struct Segment {
  enum class Kind { question, context, table, cube };
  Kind kind;
  size_t begin = 0;  // byte offsets into SerializedInput::text
  size_t end = 0;    // each segment owns its leading separator
};

std::string_view to_string(Segment::Kind kind);

struct SerializedInput {
  std::string text;
  std::vector<Segment> segments;  // contiguous, non-overlapping, covering text
};

// question [context] T* C*1 | C*2 ...: cubes joined by " | ", everything
// else by single spaces. An empty cube degenerates to the baseline input.
SerializedInput build_model_input(std::string_view question,
                                  const std::optional<std::string>& context, const Table& table,
                                  const RankedCube& ranked);

struct ParsedTable {
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> rows;
};

std::optional<ParsedTable> parse_linearized_table(std::string_view text);

struct ParsedCubeItem {
  OperatorKind op = OperatorKind::count;
  std::vector<std::string> col_headers;
  std::vector<std::string> row_headers;
  std::vector<double> operand_values;
  double answer = 0.0;
};

// Companion parser for linearize_cube_item output. Space-joined fields are
// not self-delimiting, so the caller supplies the header vocabulary (column
// headers and row-header cells of the source table); fields are resolved by
// longest-match with backtracking. Items with non-numeric operand texts are
// not recoverable and yield nullopt.
std::optional<ParsedCubeItem> parse_cube_item(std::string_view text,
                                              std::span<const std::string> col_header_vocab,
                                              std::span<const std::string> row_header_vocab);

}  // namespace tacube
