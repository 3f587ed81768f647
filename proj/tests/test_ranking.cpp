#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "tacube/ranking.hpp"
#include "tacube/serialize.hpp"

using namespace tacube;

namespace {

CubeItem make_item(OperatorKind op, std::vector<std::string> col_headers,
                   std::vector<std::string> row_headers,
                   std::vector<std::pair<CellRef, double>> operands, double result,
                   Pattern pattern = Pattern::same_column) {
  CubeItem item;
  item.op = op;
  item.pattern = pattern;
  item.col_headers = std::move(col_headers);
  item.row_headers = std::move(row_headers);
  for (auto& [ref, value] : operands) {
    Operand operand;
    operand.ref = ref;
    operand.value = value;
    operand.text = format_number(value);
    item.operands.push_back(std::move(operand));
  }
  item.result = result;
  return item;
}

// Two items over disjoint vocabulary: A shares "revenue oslo rome" with the
// question, B shares nothing.
struct TfidfFixture {
  CubeItem a = make_item(OperatorKind::sum, {"Revenue"}, {"Oslo", "Rome"},
                         {{{0, 1}, 10.0}, {{1, 1}, 20.0}}, 30.0);
  CubeItem b = make_item(OperatorKind::sum, {"Cost"}, {"Lima", "Kiev"},
                         {{{0, 2}, 5.0}, {{1, 2}, 6.0}}, 11.0);
  std::string question = "total revenue for oslo and rome";
  std::vector<CubeItem> items() const { return {a, b}; }
};

}  // namespace

TEST_CASE("tf-idf scores match hand-computed cosines") {
  TfidfFixture fx;
  auto items = fx.items();
  HeuristicScorer scorer(fx.question, items);

  // Hand derivation over the three-document universe {question, A, B}:
  // shared terms revenue/oslo/rome carry idf ln(2.5), the dot product is
  // 3 ln(2.5)^2, the norms are sqrt(3 ln4^2 + 3 ln2.5^2) and
  // sqrt(6 ln2.5^2 + 3 ln4^2), giving 0.2662508126258559.
  CHECK(scorer.score(0) == doctest::Approx(0.2662508126258559).epsilon(1e-12));
  CHECK(scorer.score(1) == 0.0);
  CHECK(score_heuristic(fx.question, items[0], items) ==
        doctest::Approx(0.2662508126258559).epsilon(1e-12));

  // A non-member item joins the universe as a fourth document, which raises
  // the shared document frequencies and dilutes the cosine.
  CHECK(score_heuristic(fx.question, fx.a, items) ==
        doctest::Approx(0.24279842966965762).epsilon(1e-12));
}

TEST_CASE("a question identical to the item sequence scores 1") {
  TfidfFixture fx;
  auto items = fx.items();
  std::string question = linearize_cube_item(fx.a);
  HeuristicScorer scorer(question, items);
  CHECK(scorer.score(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empty or disjoint questions score 0 and never throw") {
  TfidfFixture fx;
  auto items = fx.items();
  HeuristicScorer scorer("", items);
  CHECK(scorer.score(0) == 0.0);
  CHECK(scorer.score(1) == 0.0);
}

TEST_CASE("heuristic ranking orders by score with stable ties") {
  TfidfFixture fx;
  auto items = fx.items();
  RankOutcome outcome = rank(fx.question, items, 10, RankerMode::heuristic);
  CHECK(outcome.warnings.empty());
  CHECK_FALSE(outcome.fell_back_to_heuristic);
  REQUIRE(outcome.cube.items.size() == 2);
  CHECK(outcome.cube.items[0].item.col_headers == std::vector<std::string>{"Revenue"});
  CHECK(outcome.cube.items[0].score > outcome.cube.items[1].score);
  CHECK(outcome.cube.k == 10);
  CHECK(outcome.cube.ranker == RankerMode::heuristic);

  // Identical items tie; generation order decides.
  std::vector<CubeItem> twins{fx.b, fx.b, fx.a};
  RankOutcome tied = rank(fx.question, twins, 10, RankerMode::heuristic);
  REQUIRE(tied.cube.items.size() == 3);
  CHECK(tied.cube.items[0].item.col_headers == std::vector<std::string>{"Revenue"});
  CHECK(tied.cube.items[1].item.operands[0].ref == CellRef{0, 2});
  CHECK(tied.cube.items[2].item.operands[0].ref == CellRef{0, 2});
}

TEST_CASE("ranking truncates to k and validates it") {
  TfidfFixture fx;
  auto items = fx.items();
  RankOutcome outcome = rank(fx.question, items, 1, RankerMode::heuristic);
  CHECK(outcome.cube.items.size() == 1);
  CHECK(outcome.cube.items[0].item.col_headers == std::vector<std::string>{"Revenue"});

  CHECK_THROWS_AS(rank(fx.question, items, 0, RankerMode::heuristic), std::invalid_argument);

  RankOutcome empty = rank(fx.question, {}, 3, RankerMode::heuristic);
  CHECK(empty.cube.items.empty());
}

TEST_CASE("fingerprints are stable and ref-sensitive") {
  TfidfFixture fx;
  // FNV-1a over "diff|same_column|0:1|1:1", computed independently.
  CubeItem diff_item = make_item(OperatorKind::diff, {"Revenue"}, {"Oslo", "Rome"},
                                 {{{0, 1}, 10.0}, {{1, 1}, 20.0}}, -10.0);
  CHECK(item_fingerprint(diff_item) == "2a5d284d69033390");

  CubeItem count_item = make_item(OperatorKind::count, {"Name", "Value"}, {"x"},
                                  {{{2, 0}, 0.0}, {{2, 1}, 0.0}}, 2.0, Pattern::same_row);
  CHECK(item_fingerprint(count_item) == "dd5d4f79b04c9ebe");

  CHECK(item_fingerprint(fx.a) != item_fingerprint(fx.b));
  CHECK(item_fingerprint(diff_item) != item_fingerprint(fx.a));
  CHECK(item_fingerprint(diff_item).size() == 16);
}

TEST_CASE("external score files load and rank by label then logit") {
  TfidfFixture fx;
  auto items = fx.items();
  std::string fp_a = item_fingerprint(fx.a);
  std::string fp_b = item_fingerprint(fx.b);

  auto path = std::filesystem::temp_directory_path() / "tacube_scores_test.jsonl";
  test_helpers::write_file(
      path, "{\"id\": \"q1\", \"scores\": [{\"fp\": \"" + fp_a +
                "\", \"label\": 0, \"logit\": 5.0}, {\"fp\": \"" + fp_b +
                "\", \"label\": 1, \"logit\": -2.0}]}\n"
                "{\"id\": \"q2\", \"scores\": []}\n");
  ExternalScoreSet scores = ExternalScoreSet::load(path);
  CHECK(scores.has("q1"));
  CHECK(scores.has("q2"));
  CHECK_FALSE(scores.has("q3"));

  // A positive label beats any logit of a negative one.
  RankOutcome outcome =
      rank(fx.question, items, 10, RankerMode::external, &scores, "q1");
  CHECK_FALSE(outcome.fell_back_to_heuristic);
  CHECK(outcome.cube.ranker == RankerMode::external);
  REQUIRE(outcome.cube.items.size() == 2);
  CHECK(outcome.cube.items[0].item.col_headers == std::vector<std::string>{"Cost"});
  CHECK(outcome.cube.items[0].score > outcome.cube.items[1].score);
  CHECK(outcome.warnings.empty());
  std::filesystem::remove(path);
}

TEST_CASE("external mode falls back to the heuristic for unknown instances") {
  TfidfFixture fx;
  auto items = fx.items();
  ExternalScoreSet scores;  // empty
  RankOutcome outcome =
      rank(fx.question, items, 10, RankerMode::external, &scores, "missing-id");
  CHECK(outcome.fell_back_to_heuristic);
  CHECK(outcome.cube.ranker == RankerMode::heuristic);
  REQUIRE_FALSE(outcome.warnings.empty());
  REQUIRE(outcome.cube.items.size() == 2);
  CHECK(outcome.cube.items[0].item.col_headers == std::vector<std::string>{"Revenue"});
}

TEST_CASE("unresolved fingerprints warn and unscored items sink") {
  TfidfFixture fx;
  auto items = fx.items();
  ExternalScoreSet scores;
  scores.by_instance["q1"] = {{item_fingerprint(fx.b), 0, -3.0},
                              {"feedfeedfeedfeed", 1, 2.0}};

  RankOutcome outcome =
      rank(fx.question, items, 10, RankerMode::external, &scores, "q1");
  CHECK_FALSE(outcome.fell_back_to_heuristic);
  REQUIRE(outcome.cube.items.size() == 2);
  // B is the only scored item; unscored A sinks below every scored item.
  CHECK(outcome.cube.items[0].item.col_headers == std::vector<std::string>{"Cost"});
  REQUIRE(outcome.warnings.size() == 1);
  CHECK(outcome.warnings[0].find("feedfeedfeedfeed") != std::string::npos);
}

TEST_CASE("malformed score files throw with line numbers")
{
  auto path = std::filesystem::temp_directory_path() / "tacube_scores_bad.jsonl";
  test_helpers::write_file(path, "{\"id\": \"q1\", \"scores\": []}\nnot json\n");
  CHECK_THROWS_AS(ExternalScoreSet::load(path), std::runtime_error);
  try {
    ExternalScoreSet::load(path);
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(ExternalScoreSet::load(path), std::runtime_error);
}

TEST_CASE("ranker mode names") {
  CHECK(to_string(RankerMode::heuristic) == "heuristic");
  CHECK(to_string(RankerMode::external) == "external");
}
