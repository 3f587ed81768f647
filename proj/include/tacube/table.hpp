#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tacube/numeric.hpp"

namespace tacube {

class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CellRef {
  int row = 0;
  int col = 0;
  auto operator<=>(const CellRef&) const = default;
};

struct Cell {
  std::string raw;
  std::optional<NumericValue> numeric;  // present iff parse_numeric(raw) succeeds
  int row_index = 0;
  int col_index = 0;

  bool is_numeric() const { return numeric.has_value(); }
  // Non-empty after trimming whitespace; counted by the count operator.
  bool is_nonempty() const;
};

struct Row {
  std::vector<Cell> cells;
};

// Normalized in-memory table: one designated column-header row (already
// stripped off into column_headers) and a row-header column (default 0).
// Immutable after construction; safe to share across threads.
class Table {
 public:
  Table(std::string id, std::vector<std::string> column_headers,
        const std::vector<std::vector<std::string>>& cell_rows, int row_header_col = 0);

  const std::string& id() const { return id_; }
  int n_rows() const { return static_cast<int>(rows_.size()); }
  int n_cols() const { return static_cast<int>(column_headers_.size()); }
  int row_header_col() const { return row_header_col_; }

  const std::vector<std::string>& column_headers() const { return column_headers_; }
  const std::string& header(int col) const { return column_headers_.at(col); }
  const std::vector<Row>& rows() const { return rows_; }
  const Cell& cell(int row, int col) const { return rows_.at(row).cells.at(col); }
  const Cell& cell(CellRef ref) const { return cell(ref.row, ref.col); }
  const std::string& row_header(int row) const { return cell(row, row_header_col_).raw; }

  bool in_bounds(CellRef ref) const {
    return ref.row >= 0 && ref.row < n_rows() && ref.col >= 0 && ref.col < n_cols();
  }

 private:
  std::string id_;
  std::vector<std::string> column_headers_;
  std::vector<Row> rows_;
  int row_header_col_ = 0;
};

using TablePtr = std::shared_ptr<const Table>;

// Builds a Table from a raw grid whose first `header_rows` rows are headers.
// Stacked header strings are flattened by joining with a space.
TablePtr table_from_grid(std::string id, const std::vector<std::vector<std::string>>& grid,
                         int header_rows = 1);

enum class AnswerType { span, multi_span, count, arithmetic };

std::string_view to_string(AnswerType type);
std::optional<AnswerType> answer_type_from_string(std::string_view text);

struct GoldAnswer {
  std::vector<std::string> values;          // non-empty when present
  std::optional<std::string> scale;         // e.g. "million", "percent"
  std::optional<std::string> derivation;    // e.g. "(608-541)/541"
  std::optional<std::string> sql;           // annotated query, when a sidecar provides one
  AnswerType answer_type = AnswerType::span;
};

struct QAInstance {
  std::string id;
  std::string question;
  TablePtr table;
  std::optional<std::string> context;  // paragraph text, passed through untouched
  std::optional<GoldAnswer> gold;      // absent in inference mode
};

}  // namespace tacube
