#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tacube/question.hpp"
#include "tacube/table.hpp"

namespace tacube {

// Operand-selection templates. Column-axis patterns pick cells inside one
// column; row-axis patterns pick cells inside one row.
enum class Pattern { same_column, same_row, all_row, all_column, top_k_row };

std::string_view to_string(Pattern pattern);
std::optional<Pattern> pattern_from_string(std::string_view name);

struct Operand {
  CellRef ref;
  std::string text;             // raw cell string
  std::optional<double> value;  // interpreted numeric value; absent for text cells
};

// One pre-computed result. All operands lie in a single row or a single
// column, so they share either the column header or the row header.
struct CubeItem {
  OperatorKind op = OperatorKind::count;
  Pattern pattern = Pattern::same_column;
  std::vector<std::string> col_headers;  // CH set in operand order, deduped
  std::vector<std::string> row_headers;  // RH set in operand order, deduped
  std::vector<Operand> operands;
  double result = 0.0;
  Scale scale_hint = Scale::none;  // carried from operands when they agree

  bool axis_aligned() const;  // structural check of the shared-axis invariant
};

struct GenerationLimits {
  int max_candidate_rows = 8;
  int max_candidate_cols = 8;
  std::vector<int> top_k_row_values = {2, 3};
  int max_items = 512;  // items beyond the cap are dropped in enumeration order
};

struct GenerationOptions {
  GenerationLimits limits;
  // Operators allowed to fire (both from triggers and from the fallback).
  std::vector<OperatorKind> enabled_operators{kAllOperators.begin(), kAllOperators.end()};
  // When no trigger fires, enumerate with the full enabled operator set and
  // let ranking arbitrate.
  bool operator_fallback = true;
  // When one candidate axis is empty, widen it to the whole axis.
  bool fallback_all_rows = true;
  bool fallback_all_cols = true;
};

// Applies the operator formula to operand magnitudes:
//   count = |operands|, sum/add = left-fold sum, average = sum / |operands|,
//   diff = a - b, div = a / b, change_ratio = (a - b) / b.
// Throws std::invalid_argument on an arity mismatch (>=1 for aggregates and
// add, exactly 2 otherwise); returns nullopt when the denominator is zero and
// the item must be dropped.
std::optional<double> compute(OperatorKind op, std::span<const double> operands);

// Step (iii): instantiate every detected (or fallback) operator over every
// applicable pattern and candidate row/column combination.
std::vector<CubeItem> enumerate_items(const QuestionAnalysis& analysis, const Table& table,
                                      const GenerationOptions& options = {});

// Steps (i)-(iii) composed: analyze the question, then enumerate.
std::vector<CubeItem> generate_cube(std::string_view question, const Table& table,
                                    const AnalysisOptions& analysis_options = {},
                                    const GenerationOptions& generation_options = {});

struct BruteForceLimits {
  int max_rows = 8;
  int max_cols = 8;
};

// Test oracle: every axis-aligned first-order combination, i.e. all non-empty
// subsets along one row or one column for aggregates/add, all ordered pairs
// for 2-operand operators. Exponential; refuses tables beyond the limits.
std::vector<CubeItem> brute_force_cube(const Table& table, std::span<const OperatorKind> operators,
                                       const BruteForceLimits& limits = {});

class OracleBoundsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tacube
