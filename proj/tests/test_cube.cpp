#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "tacube/cube.hpp"
#include "tacube/oracle.hpp"

using namespace tacube;

namespace {

std::string key_of(const CubeItem& item) {
  std::string key{to_string(item.op)};
  for (const auto& op : item.operands) {
    key += "|" + std::to_string(op.ref.row) + ":" + std::to_string(op.ref.col);
  }
  return key;
}

int count_op(const std::vector<CubeItem>& items, OperatorKind op) {
  return static_cast<int>(std::count_if(items.begin(), items.end(),
                                        [&](const CubeItem& i) { return i.op == op; }));
}

}  // namespace

TEST_CASE("compute applies the operator formulas") {
  std::vector<double> two{608.0, 541.0};
  std::vector<double> three{1.0, 2.0, 3.0};

  CHECK(compute(OperatorKind::count, three) == 3.0);
  CHECK(compute(OperatorKind::sum, three) == 6.0);
  CHECK(compute(OperatorKind::add, three) == 6.0);
  CHECK(compute(OperatorKind::average, three) == 2.0);
  CHECK(compute(OperatorKind::diff, two) == 67.0);
  CHECK(compute(OperatorKind::div, two) == doctest::Approx(608.0 / 541.0));
  CHECK(compute(OperatorKind::change_ratio, two) ==
        doctest::Approx(0.12384473197781885));
}

TEST_CASE("compute rejects arity mismatches and undefined divisions") {
  std::vector<double> one{5.0};
  std::vector<double> three{1.0, 2.0, 3.0};
  std::vector<double> none;

  CHECK_THROWS_AS(compute(OperatorKind::diff, one), std::invalid_argument);
  CHECK_THROWS_AS(compute(OperatorKind::div, three), std::invalid_argument);
  CHECK_THROWS_AS(compute(OperatorKind::change_ratio, one), std::invalid_argument);
  CHECK_THROWS_AS(compute(OperatorKind::sum, none), std::invalid_argument);
  CHECK_THROWS_AS(compute(OperatorKind::count, none), std::invalid_argument);

  std::vector<double> zero_denominator{5.0, 0.0};
  CHECK_FALSE(compute(OperatorKind::div, zero_denominator).has_value());
  CHECK_FALSE(compute(OperatorKind::change_ratio, zero_denominator).has_value());
}

TEST_CASE("arithmetic identities hold across operators") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> value(-1e4, 1e4);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> xs(2 + trial % 5);
    for (double& x : xs) x = value(rng);

    CHECK(*compute(OperatorKind::sum, xs) == *compute(OperatorKind::add, xs));
    double avg = *compute(OperatorKind::average, xs);
    double total = *compute(OperatorKind::sum, xs);
    CHECK(avg * static_cast<double>(xs.size()) == doctest::Approx(total).epsilon(1e-12));

    std::vector<double> pair{xs[0], xs[1]};
    if (pair[1] != 0.0) {
      double ratio = *compute(OperatorKind::change_ratio, pair);
      double difference = *compute(OperatorKind::diff, pair);
      CHECK(ratio == doctest::Approx(difference / pair[1]).epsilon(1e-12));
    }
  }
}

TEST_CASE("hand-enumerated cube for the worked example") {
  Table t = test_helpers::airlines_table();
  auto items = generate_cube(
      "What is the difference in passengers between Los Angles and Toronto?", t);

  // Only diff is triggered; candidates are rows {0,1} and columns {0,1}.
  // Column 0 holds text, rows hold a single numeric candidate cell each, so
  // the only selections with two numeric cells are the ordered pairs inside
  // column 1.
  REQUIRE(items.size() == 2);

  const CubeItem& first = items[0];
  CHECK(first.op == OperatorKind::diff);
  CHECK(first.pattern == Pattern::same_column);
  CHECK(first.col_headers == std::vector<std::string>{"Passengers"});
  CHECK(first.row_headers == std::vector<std::string>{"Los Angles", "Toronto"});
  REQUIRE(first.operands.size() == 2);
  CHECK(first.operands[0].ref == CellRef{0, 1});
  CHECK(first.operands[1].ref == CellRef{1, 1});
  CHECK(first.operands[0].value == 1.2);
  CHECK(first.operands[1].value == 0.5);
  CHECK(first.result == 1.2 - 0.5);

  const CubeItem& second = items[1];
  CHECK(second.operands[0].ref == CellRef{1, 1});
  CHECK(second.operands[1].ref == CellRef{0, 1});
  CHECK(second.result == 0.5 - 1.2);

  for (const auto& item : items) CHECK(item.axis_aligned());
}

TEST_CASE("aggregates use one selection per pattern") {
  Table t = test_helpers::make_table(
      {"Metric", "2019"}, {{"Revenue", "608"}, {"Profit", "100"}, {"Cost", "50"}});
  QuestionAnalysis analysis;
  analysis.operators = {OperatorKind::sum};
  analysis.candidate_rows = {0, 1};
  analysis.candidate_cols = {1};

  GenerationOptions options;
  options.limits.top_k_row_values = {2};
  auto items = enumerate_items(analysis, t, options);

  // same_column over candidate rows: 608+100. same_row per candidate row:
  // single numeric cells 608 and 100. all_row: the full column 608+100+50.
  // top_k_row with k=2 duplicates the same_column refs and is deduplicated.
  std::multiset<double> results;
  for (const auto& item : items) results.insert(item.result);
  CHECK(results == std::multiset<double>{100.0, 608.0, 708.0, 758.0});
}

TEST_CASE("top_k_row prefixes and whole-axis fallbacks") {
  Table t = test_helpers::make_table(
      {"Name", "Value"}, {{"a", "1"}, {"b", "2"}, {"c", "4"}, {"d", "8"}});
  QuestionAnalysis analysis;  // no candidates at all
  analysis.operators = {OperatorKind::sum};

  GenerationOptions options;
  options.limits.top_k_row_values = {2, 3};
  auto items = enumerate_items(analysis, t, options);

  std::set<std::string> keys;
  std::set<double> results;
  for (const auto& item : items) {
    keys.insert(key_of(item));
    results.insert(item.result);
  }
  // Candidate axes fall back to every row and every column; the k=2 and k=3
  // prefixes of the Value column add 1+2 and 1+2+4.
  CHECK(results.count(3.0) == 1);
  CHECK(results.count(7.0) == 1);
  CHECK(results.count(15.0) == 1);
  CHECK(keys.count("sum|0:1|1:1") == 1);
  CHECK(keys.count("sum|0:1|1:1|2:1") == 1);

  options.fallback_all_rows = false;
  options.fallback_all_cols = false;
  CHECK(enumerate_items(analysis, t, options).empty());
}

TEST_CASE("count tallies non-empty cells, value operators skip text") {
  Table t = test_helpers::make_table({"Name", "Score"},
                                     {{"a", "1"}, {"b", "DNF"}, {"", ""}});
  QuestionAnalysis analysis;
  analysis.operators = {OperatorKind::count, OperatorKind::sum};
  analysis.candidate_rows = {0, 1, 2};
  analysis.candidate_cols = {1};

  auto items = enumerate_items(analysis, t, {});

  // count over the Score column sees "1" and "DNF" but not the empty cell;
  // sum sees only the numeric "1". all_column selections reach the Name text.
  std::map<std::string, double> by_key;
  for (const auto& item : items) by_key[key_of(item)] = item.result;
  CHECK(by_key.at("count|0:1|1:1") == 2.0);
  CHECK(by_key.at("count|0:0|0:1") == 2.0);
  CHECK(by_key.at("sum|0:1") == 1.0);
  CHECK(count_op(items, OperatorKind::count) == 5);
  CHECK(count_op(items, OperatorKind::sum) == 1);
}

TEST_CASE("operator fallback enumerates the full set") {
  Table t = test_helpers::revenue_table();
  auto with_trigger = generate_cube("What is the total revenue?", t);
  for (const auto& item : with_trigger) {
    CHECK((item.op == OperatorKind::sum || item.op == OperatorKind::add));
  }

  auto fallback = generate_cube("Tell me about 2019.", t);
  std::set<OperatorKind> seen;
  for (const auto& item : fallback) seen.insert(item.op);
  CHECK(seen.count(OperatorKind::count) == 1);
  CHECK(seen.count(OperatorKind::sum) == 1);

  GenerationOptions no_fallback;
  no_fallback.operator_fallback = false;
  QuestionAnalysis analysis = analyze_question("Tell me about 2019.", t);
  CHECK(enumerate_items(analysis, t, no_fallback).empty());
}

TEST_CASE("max_items caps enumeration") {
  Table t = test_helpers::make_table(
      {"A", "B", "C"}, {{"1", "2", "3"}, {"4", "5", "6"}, {"7", "8", "9"}});
  QuestionAnalysis analysis;
  analysis.operators = {OperatorKind::diff};
  analysis.candidate_rows = {0, 1, 2};
  analysis.candidate_cols = {0, 1, 2};

  GenerationOptions options;
  options.limits.max_items = 5;
  CHECK(enumerate_items(analysis, t, options).size() == 5);
}

TEST_CASE("scale hints carry over only when consistent") {
  Table t = test_helpers::make_table(
      {"Name", "Value"}, {{"a", "2 million"}, {"b", "3 million"}, {"c", "4 thousand"}});
  QuestionAnalysis analysis;
  analysis.operators = {OperatorKind::sum};
  analysis.candidate_cols = {1};

  analysis.candidate_rows = {0, 1};
  auto consistent = enumerate_items(analysis, t, {});
  REQUIRE_FALSE(consistent.empty());
  CHECK(consistent[0].scale_hint == Scale::million);

  analysis.candidate_rows = {0, 2};
  auto mixed = enumerate_items(analysis, t, {});
  REQUIRE_FALSE(mixed.empty());
  CHECK(mixed[0].scale_hint == Scale::none);
}

TEST_CASE("brute force matches the closed-form item counts") {
  Table t = test_helpers::make_table(
      {"A", "B", "C"}, {{"1", "2", "3"}, {"4", "5", "6"}, {"7", "8", "9"}});
  auto items = brute_force_cube(t, kAllOperators);

  // Per commutative operator on an all-numeric m x n table: every non-empty
  // subset of each row and each column, minus the m*n singletons counted
  // twice: m(2^n - 1) + n(2^m - 1) - m*n = 33 for 3x3. Per pair operator:
  // ordered pairs inside rows and columns, m*n*(n-1) + n*m*(m-1) = 36.
  CHECK(count_op(items, OperatorKind::count) == 33);
  CHECK(count_op(items, OperatorKind::sum) == 33);
  CHECK(count_op(items, OperatorKind::average) == 33);
  CHECK(count_op(items, OperatorKind::add) == 33);
  CHECK(count_op(items, OperatorKind::diff) == 36);
  CHECK(count_op(items, OperatorKind::div) == 36);
  CHECK(count_op(items, OperatorKind::change_ratio) == 36);
  CHECK(items.size() == 4 * 33 + 3 * 36);

  std::set<std::string> keys;
  for (const auto& item : items) keys.insert(key_of(item));
  CHECK(keys.size() == items.size());  // deduplication leaves no aliases
}

TEST_CASE("brute force drops division by zero") {
  Table t = test_helpers::make_table({"A", "B"}, {{"0", "5"}});
  std::vector<OperatorKind> div_only{OperatorKind::div};
  auto items = brute_force_cube(t, div_only);
  REQUIRE(items.size() == 1);  // 5/0 dropped, 0/5 kept
  CHECK(items[0].result == 0.0);
}

TEST_CASE("brute force refuses oversized tables") {
  std::vector<std::vector<std::string>> rows(9, std::vector<std::string>{"1", "2"});
  Table t = test_helpers::make_table({"A", "B"}, rows);
  CHECK_THROWS_AS(brute_force_cube(t, kAllOperators), OracleBoundsError);
}

TEST_CASE("every generated item appears in the exhaustive enumeration") {
  OracleCheckOptions options;
  options.tables = 60;
  options.max_rows = 5;
  options.max_cols = 5;
  options.seed = 20260815;
  OracleCheckResult result = oracle_check(options);
  CHECK(result.tables == 60);
  CHECK(result.items_checked > 0);
  CHECK(result.violations == 0);
  CHECK(result.examples.empty());
}

TEST_CASE("enumeration is deterministic") {
  Table t = test_helpers::airlines_table();
  auto a = generate_cube("What is the total of passengers for Toronto and Boston?", t);
  auto b = generate_cube("What is the total of passengers for Toronto and Boston?", t);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(key_of(a[i]) == key_of(b[i]));
    CHECK(a[i].result == b[i].result);
    CHECK(a[i].pattern == b[i].pattern);
  }
}

TEST_CASE("pattern names round-trip") {
  for (Pattern p : {Pattern::same_column, Pattern::same_row, Pattern::all_row,
                    Pattern::all_column, Pattern::top_k_row}) {
    CHECK(pattern_from_string(to_string(p)) == p);
  }
  CHECK_FALSE(pattern_from_string("diagonal").has_value());
}
