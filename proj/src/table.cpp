#include "tacube/table.hpp"

#include <algorithm>
#include <cctype>

namespace tacube {

bool Cell::is_nonempty() const {
  return std::any_of(raw.begin(), raw.end(),
                     [](unsigned char c) { return !std::isspace(c); });
}

Table::Table(std::string id, std::vector<std::string> column_headers,
             const std::vector<std::vector<std::string>>& cell_rows, int row_header_col)
    : id_(std::move(id)),
      column_headers_(std::move(column_headers)),
      row_header_col_(row_header_col) {
  if (column_headers_.empty()) throw TableError("table has zero columns");
  if (cell_rows.empty()) throw TableError("table has zero data rows");
  if (row_header_col_ < 0 || row_header_col_ >= static_cast<int>(column_headers_.size())) {
    throw TableError("row header column out of bounds");
  }

  const size_t n = column_headers_.size();
  rows_.reserve(cell_rows.size());
  for (size_t i = 0; i < cell_rows.size(); ++i) {
    if (cell_rows[i].size() != n) {
      throw TableError("row " + std::to_string(i + 1) + " has " +
                       std::to_string(cell_rows[i].size()) + " cells, expected " +
                       std::to_string(n));
    }
    Row row;
    row.cells.reserve(n);
    for (size_t j = 0; j < n; ++j) {
      Cell cell;
      cell.raw = cell_rows[i][j];
      cell.numeric = parse_numeric(cell.raw);
      cell.row_index = static_cast<int>(i);
      cell.col_index = static_cast<int>(j);
      row.cells.push_back(std::move(cell));
    }
    rows_.push_back(std::move(row));
  }
}

TablePtr table_from_grid(std::string id, const std::vector<std::vector<std::string>>& grid,
                         int header_rows) {
  if (header_rows < 1) throw TableError("at least one header row required");
  if (static_cast<int>(grid.size()) <= header_rows) {
    throw TableError("table has zero data rows");
  }

  const size_t n = grid.front().size();
  std::vector<std::string> headers(n);
  for (int h = 0; h < header_rows; ++h) {
    if (grid[h].size() != n) throw TableError("ragged header row");
    for (size_t j = 0; j < n; ++j) {
      if (grid[h][j].empty()) continue;
      if (!headers[j].empty()) headers[j] += ' ';
      headers[j] += grid[h][j];
    }
  }

  std::vector<std::vector<std::string>> data(grid.begin() + header_rows, grid.end());
  return std::make_shared<Table>(std::move(id), std::move(headers), data);
}

std::string_view to_string(AnswerType type) {
  switch (type) {
    case AnswerType::span: return "span";
    case AnswerType::multi_span: return "multi-span";
    case AnswerType::count: return "count";
    case AnswerType::arithmetic: return "arithmetic";
  }
  return "span";
}

std::optional<AnswerType> answer_type_from_string(std::string_view text) {
  if (text == "span") return AnswerType::span;
  if (text == "multi-span") return AnswerType::multi_span;
  if (text == "count") return AnswerType::count;
  if (text == "arithmetic") return AnswerType::arithmetic;
  return std::nullopt;
}

}  // namespace tacube
