#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tacube/cube.hpp"
#include "tacube/ranking.hpp"
#include "tacube/table.hpp"

namespace tacube {

struct Tolerance {
  double abs = 1e-4;
  double rel = 1e-3;
};

// |x - v| <= max(tol.abs, tol.rel * |v|)
bool within_tolerance(double x, double v, const Tolerance& tol);

// Gold values that parse as numbers, as (magnitude, embedded scale) pairs.
std::vector<NumericValue> gold_numeric_values(const GoldAnswer& gold);

// A question can enter the coverage denominator only when at least one gold
// value is numeric ("4 years" never matches a computed number).
bool coverage_eligible(const GoldAnswer& gold);

// True iff some numeric gold value matches the result under one of three
// normalizations: the value as written, the value with its scale applied
// (embedded or dataset-level), or result*100 when the gold carries a percent
// scale and the operator is a ratio (div / change_ratio).
bool answer_matches(const GoldAnswer& gold, double result, OperatorKind op,
                    const Tolerance& tol = {});
bool answer_matches(const GoldAnswer& gold, const CubeItem& item, const Tolerance& tol = {});

// Aggregation/arithmetic subset membership for annotated datasets:
// answer_type arithmetic or count, or a derivation holding an arithmetic
// expression.
bool is_arithmetic_case(const QAInstance& instance);

// Derivation-shape classifier: "(a-b)/b" -> change_ratio, "(a+..+z)/n" with
// n equal to the addend count -> average, then '/' -> div, '+' -> sum,
// '-' between numbers -> diff.
std::optional<OperatorKind> operator_from_derivation(std::string_view derivation);

// SQL keyword classifier: count( / sum( / avg(.
std::optional<OperatorKind> operator_from_sql(std::string_view sql);

// answer_type and derivation first, annotated SQL second; absent when
// unclassifiable.
std::optional<OperatorKind> extract_gold_operator(const QAInstance& instance);

struct EvaluateOptions {
  Tolerance tol;
  // Restrict the eligible set to arithmetic/aggregation cases (answer_type /
  // derivation annotations). Off for datasets without those annotations.
  bool arithmetic_subset_only = true;
  // Which denominator the headline `coverage` ratio uses.
  enum class Denominator { eligible, extracted } denominator = Denominator::eligible;
};

// Per-instance verdict; the pipeline computes one per worker and aggregates.
struct InstanceEvaluation {
  bool has_gold = false;
  bool eligible = false;   // in the coverage denominator
  bool extracted = false;  // at least one generated item
  bool covered = false;    // some full-cube item matches the gold answer
  int first_covering_rank = 0;  // 1-based rank in the ranked list; 0 = none
  std::optional<OperatorKind> gold_op;
};

InstanceEvaluation evaluate_instance(const QAInstance& instance,
                                     std::span<const CubeItem> full_cube,
                                     const RankedCube* ranked, const EvaluateOptions& options = {});

struct OperatorStats {
  int total = 0;
  int covered = 0;
};

struct CoverageReport {
  int ingested = 0;
  int processed = 0;
  int skipped = 0;

  int total = 0;           // processed instances carrying a gold answer
  int eligible = 0;        // coverage denominator (arithmetic subset when on)
  int cube_extracted = 0;  // eligible instances with a non-empty cube
  int covered = 0;         // eligible instances whose full cube matches gold

  bool no_eligible_cases = false;
  double coverage = 0.0;            // headline ratio per options.denominator
  double coverage_eligible = 0.0;   // covered / eligible
  double coverage_extracted = 0.0;  // covered / cube_extracted

  std::map<std::string, OperatorStats> per_operator;  // keyed by gold operator
  std::vector<std::pair<int, double>> per_k;          // ranked coverage at k = 1..k_max
  std::map<std::string, int> failure_tags;            // manual-annotation tallies
};

CoverageReport aggregate_coverage(std::span<const InstanceEvaluation> evaluations,
                                  const EvaluateOptions& options = {}, int k_max = 0);

// Convenience wrapper: evaluate then aggregate. `ranked` may be empty (no
// per_k curve) or parallel to `instances`.
CoverageReport evaluate_coverage(std::span<const QAInstance> instances,
                                 std::span<const std::vector<CubeItem>> cubes,
                                 std::span<const RankedCube> ranked,
                                 const EvaluateOptions& options = {});

// Manual failure-annotation CSV: `id,tag` per line, optional header. Tags are
// tallied into report.failure_tags for uncovered eligible instances.
std::map<std::string, std::string> load_failure_annotations(const std::filesystem::path& path);

void tally_failure_tags(CoverageReport& report,
                        const std::map<std::string, std::string>& annotations,
                        std::span<const std::string> uncovered_ids);

}  // namespace tacube
