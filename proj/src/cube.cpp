#include "tacube/cube.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace tacube {

std::string_view to_string(Pattern pattern) {
  switch (pattern) {
    case Pattern::same_column: return "same_column";
    case Pattern::same_row: return "same_row";
    case Pattern::all_row: return "all_row";
    case Pattern::all_column: return "all_column";
    case Pattern::top_k_row: return "top_k_row";
  }
  return "same_column";
}

std::optional<Pattern> pattern_from_string(std::string_view name) {
  for (Pattern p : {Pattern::same_column, Pattern::same_row, Pattern::all_row,
                    Pattern::all_column, Pattern::top_k_row}) {
    if (name == to_string(p)) return p;
  }
  return std::nullopt;
}

bool CubeItem::axis_aligned() const {
  if (operands.empty()) return false;
  bool same_col = true, same_row = true;
  for (const auto& op : operands) {
    same_col = same_col && op.ref.col == operands.front().ref.col;
    same_row = same_row && op.ref.row == operands.front().ref.row;
  }
  return same_col || same_row;
}

std::optional<double> compute(OperatorKind op, std::span<const double> operands) {
  auto require = [&](bool ok) {
    if (!ok) {
      throw std::invalid_argument("operand arity mismatch for operator " +
                                  std::string(to_string(op)));
    }
  };
  switch (op) {
    case OperatorKind::count:
      require(!operands.empty());
      return static_cast<double>(operands.size());
    case OperatorKind::sum:
    case OperatorKind::add: {
      require(!operands.empty());
      double total = 0.0;
      for (double x : operands) total += x;
      return total;
    }
    case OperatorKind::average: {
      require(!operands.empty());
      double total = 0.0;
      for (double x : operands) total += x;
      return total / static_cast<double>(operands.size());
    }
    case OperatorKind::diff:
      require(operands.size() == 2);
      return operands[0] - operands[1];
    case OperatorKind::div:
      require(operands.size() == 2);
      if (operands[1] == 0.0) return std::nullopt;
      return operands[0] / operands[1];
    case OperatorKind::change_ratio:
      require(operands.size() == 2);
      if (operands[1] == 0.0) return std::nullopt;
      return (operands[0] - operands[1]) / operands[1];
  }
  return std::nullopt;
}

namespace {

bool is_commutative(OperatorKind op) {
  switch (op) {
    case OperatorKind::count:
    case OperatorKind::sum:
    case OperatorKind::average:
    case OperatorKind::add:
      return true;
    default:
      return false;
  }
}

Operand make_operand(const Table& table, CellRef ref) {
  const Cell& cell = table.cell(ref);
  Operand op;
  op.ref = ref;
  op.text = cell.raw;
  if (cell.numeric) op.value = cell.numeric->value();
  return op;
}

// Deduplication key: operand cell refs are sorted for commutative operators
// and kept in order otherwise.
struct ItemKey {
  OperatorKind op;
  std::vector<CellRef> refs;
  auto operator<=>(const ItemKey&) const = default;
};

class ItemBuilder {
 public:
  ItemBuilder(const Table& table, int max_items) : table_(table), max_items_(max_items) {}

  bool full() const { return static_cast<int>(items_.size()) >= max_items_; }
  std::vector<CubeItem> take() && { return std::move(items_); }

  // Builds, dedups, computes. Returns false only when the cap is reached.
  bool add(OperatorKind op, Pattern pattern, std::vector<CellRef> refs) {
    if (full()) return false;
    if (is_commutative(op)) std::sort(refs.begin(), refs.end());

    ItemKey key{op, refs};
    if (!seen_.insert(std::move(key)).second) return true;

    CubeItem item;
    item.op = op;
    item.pattern = pattern;
    item.operands.reserve(refs.size());
    std::vector<double> values;
    values.reserve(refs.size());
    bool scale_consistent = true;
    Scale scale = Scale::none;
    for (CellRef ref : refs) {
      Operand operand = make_operand(table_, ref);
      if (operand.value) values.push_back(*operand.value);
      const Cell& cell = table_.cell(ref);
      if (cell.numeric) {
        Scale s = cell.numeric->scale;
        if (scale == Scale::none) {
          scale = s;
        } else if (s != Scale::none && s != scale) {
          scale_consistent = false;
        }
      }
      item.operands.push_back(std::move(operand));
    }
    // count tallies cells; value operators consume the numeric magnitudes.
    std::optional<double> result;
    if (op == OperatorKind::count) {
      std::vector<double> counted(refs.size(), 0.0);
      result = compute(op, counted);
    } else {
      result = compute(op, values);
    }
    if (!result) return true;  // undefined item (division by zero): drop silently
    item.result = *result;
    item.scale_hint = scale_consistent ? scale : Scale::none;

    for (const auto& operand : item.operands) {
      append_unique(item.col_headers, table_.header(operand.ref.col));
      append_unique(item.row_headers, table_.row_header(operand.ref.row));
    }
    items_.push_back(std::move(item));
    return !full();
  }

 private:
  static void append_unique(std::vector<std::string>& list, const std::string& value) {
    if (std::find(list.begin(), list.end(), value) == list.end()) list.push_back(value);
  }

  const Table& table_;
  int max_items_;
  std::set<ItemKey> seen_;
  std::vector<CubeItem> items_;
};

std::vector<CellRef> numeric_cells(const Table& table, std::span<const CellRef> selection) {
  std::vector<CellRef> out;
  for (CellRef ref : selection) {
    if (table.cell(ref).is_numeric()) out.push_back(ref);
  }
  return out;
}

std::vector<CellRef> nonempty_cells(const Table& table, std::span<const CellRef> selection) {
  std::vector<CellRef> out;
  for (CellRef ref : selection) {
    if (table.cell(ref).is_nonempty()) out.push_back(ref);
  }
  return out;
}

// Emits the items for one pattern selection: a single aggregate per selection
// for count/sum/average/add, ordered pairs for the 2-operand operators.
void emit_for_selection(ItemBuilder& builder, const Table& table, OperatorKind op,
                        Pattern pattern, std::span<const CellRef> selection) {
  if (op == OperatorKind::count) {
    std::vector<CellRef> cells = nonempty_cells(table, selection);
    if (!cells.empty()) builder.add(op, pattern, std::move(cells));
    return;
  }
  std::vector<CellRef> cells = numeric_cells(table, selection);
  if (group_of(op) == OperatorGroup::aggr || op == OperatorKind::add) {
    if (!cells.empty()) builder.add(op, pattern, std::move(cells));
    return;
  }
  // diff / div / change_ratio: both orders; the question's phrasing decides
  // the direction and ranking arbitrates.
  for (size_t a = 0; a < cells.size(); ++a) {
    for (size_t b = 0; b < cells.size(); ++b) {
      if (a == b) continue;
      if (!builder.add(op, pattern, {cells[a], cells[b]})) return;
    }
  }
}

std::vector<int> truncated(const std::vector<int>& indices, int cap) {
  if (static_cast<int>(indices.size()) <= cap) return indices;
  return std::vector<int>(indices.begin(), indices.begin() + cap);
}

std::vector<int> iota_indices(int n) {
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) out[i] = i;
  return out;
}

}  // namespace

std::vector<CubeItem> enumerate_items(const QuestionAnalysis& analysis, const Table& table,
                                      const GenerationOptions& options) {
  const GenerationLimits& limits = options.limits;

  std::vector<OperatorKind> ops;
  for (OperatorKind op : analysis.operators) {
    if (std::find(options.enabled_operators.begin(), options.enabled_operators.end(), op) !=
        options.enabled_operators.end()) {
      ops.push_back(op);
    }
  }
  if (ops.empty() && options.operator_fallback) ops = options.enabled_operators;
  if (ops.empty()) return {};

  std::vector<int> cand_rows = truncated(analysis.candidate_rows, limits.max_candidate_rows);
  std::vector<int> cand_cols = truncated(analysis.candidate_cols, limits.max_candidate_cols);
  if (cand_rows.empty() && options.fallback_all_rows) {
    cand_rows = truncated(iota_indices(table.n_rows()), limits.max_candidate_rows);
  }
  if (cand_cols.empty() && options.fallback_all_cols) {
    cand_cols = truncated(iota_indices(table.n_cols()), limits.max_candidate_cols);
  }

  ItemBuilder builder(table, limits.max_items);

  for (OperatorKind op : ops) {
    const bool two_operand = group_of(op) == OperatorGroup::ext && op != OperatorKind::add;
    for (Pattern pattern : {Pattern::same_column, Pattern::same_row, Pattern::all_row,
                            Pattern::all_column, Pattern::top_k_row}) {
      if (builder.full()) break;
      // Pair operators need both operands question-aligned; the whole-axis
      // patterns are aggregation-shaped selections.
      if (two_operand && pattern != Pattern::same_column && pattern != Pattern::same_row) {
        continue;
      }
      switch (pattern) {
        case Pattern::same_column:
          for (int c : cand_cols) {
            std::vector<CellRef> sel;
            for (int r : cand_rows) sel.push_back({r, c});
            emit_for_selection(builder, table, op, pattern, sel);
          }
          break;
        case Pattern::same_row:
          for (int r : cand_rows) {
            std::vector<CellRef> sel;
            for (int c : cand_cols) sel.push_back({r, c});
            emit_for_selection(builder, table, op, pattern, sel);
          }
          break;
        case Pattern::all_row:
          for (int c : cand_cols) {
            std::vector<CellRef> sel;
            for (int r = 0; r < table.n_rows(); ++r) sel.push_back({r, c});
            emit_for_selection(builder, table, op, pattern, sel);
          }
          break;
        case Pattern::all_column:
          for (int r : cand_rows) {
            std::vector<CellRef> sel;
            for (int c = 0; c < table.n_cols(); ++c) sel.push_back({r, c});
            emit_for_selection(builder, table, op, pattern, sel);
          }
          break;
        case Pattern::top_k_row:
          for (int c : cand_cols) {
            for (int k : limits.top_k_row_values) {
              std::vector<CellRef> sel;
              for (int r = 0; r < std::min(k, table.n_rows()); ++r) sel.push_back({r, c});
              emit_for_selection(builder, table, op, pattern, sel);
            }
          }
          break;
      }
    }
  }
  return std::move(builder).take();
}

std::vector<CubeItem> generate_cube(std::string_view question, const Table& table,
                                    const AnalysisOptions& analysis_options,
                                    const GenerationOptions& generation_options) {
  QuestionAnalysis analysis = analyze_question(question, table, analysis_options);
  return enumerate_items(analysis, table, generation_options);
}

std::vector<CubeItem> brute_force_cube(const Table& table, std::span<const OperatorKind> operators,
                                       const BruteForceLimits& limits) {
  if (table.n_rows() > limits.max_rows || table.n_cols() > limits.max_cols) {
    throw OracleBoundsError("table exceeds oracle bounds (" + std::to_string(table.n_rows()) +
                            "x" + std::to_string(table.n_cols()) + ")");
  }

  // Collect every line (each row, each column) as a cell sequence in ascending
  // position order.
  struct Line {
    std::vector<CellRef> cells;
    Pattern pattern;
  };
  std::vector<Line> lines;
  for (int r = 0; r < table.n_rows(); ++r) {
    Line line{{}, Pattern::same_row};
    for (int c = 0; c < table.n_cols(); ++c) line.cells.push_back({r, c});
    lines.push_back(std::move(line));
  }
  for (int c = 0; c < table.n_cols(); ++c) {
    Line line{{}, Pattern::same_column};
    for (int r = 0; r < table.n_rows(); ++r) line.cells.push_back({r, c});
    lines.push_back(std::move(line));
  }

  ItemBuilder builder(table, std::numeric_limits<int>::max());
  for (OperatorKind op : operators) {
    const bool two_operand = group_of(op) == OperatorGroup::ext && op != OperatorKind::add;
    for (const auto& line : lines) {
      std::vector<CellRef> cells = op == OperatorKind::count
                                       ? nonempty_cells(table, line.cells)
                                       : numeric_cells(table, line.cells);
      if (two_operand) {
        for (size_t a = 0; a < cells.size(); ++a) {
          for (size_t b = 0; b < cells.size(); ++b) {
            if (a != b) builder.add(op, line.pattern, {cells[a], cells[b]});
          }
        }
      } else {
        const size_t n = cells.size();
        if (n == 0 || n > 20) continue;  // 2^20 guardrail; bounds above keep n <= 8
        for (uint32_t mask = 1; mask < (1u << n); ++mask) {
          std::vector<CellRef> subset;
          for (size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) subset.push_back(cells[i]);
          }
          builder.add(op, line.pattern, std::move(subset));
        }
      }
    }
  }
  return std::move(builder).take();
}

}  // namespace tacube
