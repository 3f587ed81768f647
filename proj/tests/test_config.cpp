#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "helpers.hpp"
#include "tacube/config.hpp"

using namespace tacube;
using test_helpers::fixture_path;
using test_helpers::write_file;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "tacube_config_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<OperatorKind> ops_of(const std::string& question, const TriggerLexicon& lexicon) {
  return detect_operators(normalize(question), lexicon);
}

}  // namespace

TEST_CASE("json config sets flat and nested keys") {
  PipelineConfig config;
  apply_config_json(config, R"({
    "dataset": "tables.csv",
    "format": "csv",
    "split": "train",
    "ranker": "external",
    "scores": "s.jsonl",
    "sql_sidecar": "gold.jsonl",
    "annotations": "tags.csv",
    "lexicon": "lex.json",
    "k": 3,
    "workers": 2,
    "idf_smooth": false,
    "arithmetic_subset_only": true,
    "denominator": "extracted",
    "out_dir": "results",
    "data_root": "/tmp/data",
    "tolerance": {"abs": 0.01, "rel": 0.002},
    "match": {"fuzzy_threshold": 0.9},
    "limits": {"max_candidate_rows": 4, "max_candidate_cols": 5,
               "max_items": 64, "top_k_row": [2, 4]}
  })",
                    "test");

  CHECK(config.dataset == "tables.csv");
  CHECK(config.format == DatasetFormat::csv);
  CHECK(config.split == "train");
  CHECK(config.ranker == RankerMode::external);
  CHECK(config.scores == std::filesystem::path("s.jsonl"));
  CHECK(config.sql_sidecar == std::filesystem::path("gold.jsonl"));
  CHECK(config.annotations == std::filesystem::path("tags.csv"));
  CHECK(config.lexicon == std::filesystem::path("lex.json"));
  CHECK(config.k == 3);
  CHECK(config.workers == 2);
  CHECK_FALSE(config.idf_smooth);
  CHECK(config.arithmetic_subset_only == true);
  CHECK(config.denominator == EvaluateOptions::Denominator::extracted);
  CHECK(config.out_dir == std::filesystem::path("results"));
  CHECK(config.tol.abs == 0.01);
  CHECK(config.tol.rel == 0.002);
  CHECK(config.match.fuzzy_threshold == 0.9);
  CHECK(config.limits.max_candidate_rows == 4);
  CHECK(config.limits.max_candidate_cols == 5);
  CHECK(config.limits.max_items == 64);
  CHECK(config.limits.top_k_row_values == std::vector<int>{2, 4});
}

TEST_CASE("config rejects unknown keys and bad values") {
  PipelineConfig config;
  CHECK_THROWS_WITH_AS(apply_config_json(config, R"({"banana": 1})", "test"),
                       "test: unknown config key: banana", std::runtime_error);
  CHECK_THROWS_WITH_AS(apply_config_json(config, R"({"format": "parquet"})", "test"),
                       "test: unknown format: parquet", std::runtime_error);
  CHECK_THROWS_WITH_AS(apply_config_json(config, R"({"ranker": "llm"})", "test"),
                       "test: unknown ranker: llm", std::runtime_error);
  CHECK_THROWS_WITH_AS(apply_config_json(config, R"({"denominator": "all"})", "test"),
                       "test: unknown denominator: all", std::runtime_error);
  CHECK_THROWS_WITH_AS(apply_config_json(config, R"({"tolerance": {"eps": 1}})", "test"),
                       "test: unknown tolerance key: eps", std::runtime_error);
  CHECK_THROWS_AS(apply_config_json(config, R"({"k": "ten"})", "test"), std::runtime_error);
  CHECK_THROWS_AS(apply_config_json(config, "{nope", "test"), std::runtime_error);
  CHECK_THROWS_AS(apply_config_json(config, R"(["list"])", "test"), std::runtime_error);
}

TEST_CASE("toml subset parses sections, comments and arrays") {
  auto path = temp_dir() / "settings.toml";
  write_file(path,
             "# pipeline\n"
             "dataset = \"tables.csv\"  # trailing comment\n"
             "k = 7\n"
             "idf_smooth = false\n"
             "out_dir = \"artifacts\"\n"
             "\n"
             "[tolerance]\n"
             "abs = 0.5\n"
             "rel = 1e-2\n"
             "\n"
             "[limits]\n"
             "max_items = 99\n"
             "top_k_row = [2, 4, 6]\n"
             "\n"
             "[match]\n"
             "fuzzy_threshold = 0.75\n");

  PipelineConfig config = load_config(path);
  CHECK(config.dataset == "tables.csv");
  CHECK(config.k == 7);
  CHECK_FALSE(config.idf_smooth);
  CHECK(config.out_dir == std::filesystem::path("artifacts"));
  CHECK(config.tol.abs == 0.5);
  CHECK(config.tol.rel == 0.01);
  CHECK(config.limits.max_items == 99);
  CHECK(config.limits.top_k_row_values == std::vector<int>{2, 4, 6});
  CHECK(config.match.fuzzy_threshold == 0.75);
}

TEST_CASE("toml subset reports the offending line") {
  auto dir = temp_dir();
  auto check_fails = [&](const std::string& text, const std::string& needle) {
    auto path = dir / "bad.toml";
    write_file(path, text);
    try {
      load_config(path);
      FAIL("expected failure for: " << text);
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
      CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
  };
  check_fails("k = 1\nno equals sign\n", "expected key = value");
  check_fails("name = \"open\n", "unterminated string");
  check_fails("[section\nk = 1\n", "unterminated section");
  check_fails("k = one\n", "unsupported value");
}

TEST_CASE("json detection works without a json extension") {
  auto path = temp_dir() / "settings.cfg";
  write_file(path, "  {\"k\": 4}\n");
  CHECK(load_config(path).k == 4);
  CHECK_THROWS_AS(load_config(temp_dir() / "absent.toml"), std::runtime_error);

  // A leading section header must not be mistaken for JSON.
  auto sectioned = temp_dir() / "sectioned.toml";
  write_file(sectioned, "[tolerance]\nabs = 0.25\n");
  CHECK(load_config(sectioned).tol.abs == 0.25);
}

TEST_CASE("the shipped example config loads") {
  PipelineConfig config = load_config(fixture_path("../../config/example.toml"));
  CHECK(config.dataset == "tatqa");
  CHECK(config.k == 10);
  CHECK(config.workers == 4);
  CHECK(config.tol.abs == 1e-4);
  CHECK(config.limits.max_items == 512);
  CHECK(config.limits.top_k_row_values == std::vector<int>{2, 3});
}

TEST_CASE("resolve applies per-format defaults") {
  PipelineConfig config;
  config.dataset = fixture_path("tatqa_mini.json").string();

  ResolvedConfig tatqa = resolve_config(config);
  CHECK(tatqa.format == DatasetFormat::tatqa);
  CHECK(tatqa.k == 10);
  CHECK(tatqa.eval.arithmetic_subset_only);
  CHECK(tatqa.eval.denominator == EvaluateOptions::Denominator::eligible);
  CHECK(tatqa.workers >= 1);

  config.dataset = fixture_path("wtq_mini/data/mini-dev.tsv").string();
  ResolvedConfig wtq = resolve_config(config);
  CHECK(wtq.format == DatasetFormat::wtq);
  CHECK(wtq.k == 5);
  CHECK_FALSE(wtq.eval.arithmetic_subset_only);
  CHECK(wtq.eval.denominator == EvaluateOptions::Denominator::extracted);

  config.dataset = fixture_path("sales.csv").string();
  config.workers = 3;
  ResolvedConfig csv = resolve_config(config);
  CHECK(csv.format == DatasetFormat::csv);
  CHECK(csv.k == 10);
  CHECK_FALSE(csv.eval.arithmetic_subset_only);
  CHECK(csv.eval.denominator == EvaluateOptions::Denominator::eligible);
  CHECK(csv.workers == 3);

  // Explicit settings beat the defaults.
  config.k = 2;
  config.format = DatasetFormat::wtq;
  config.arithmetic_subset_only = true;
  config.denominator = EvaluateOptions::Denominator::extracted;
  ResolvedConfig overridden = resolve_config(config);
  CHECK(overridden.format == DatasetFormat::wtq);
  CHECK(overridden.k == 2);
  CHECK(overridden.eval.arithmetic_subset_only);
  CHECK(overridden.eval.denominator == EvaluateOptions::Denominator::extracted);
}

TEST_CASE("resolve validates settings") {
  PipelineConfig config;
  CHECK_THROWS_WITH_AS(resolve_config(config), "config: no dataset given", std::runtime_error);

  config.dataset = fixture_path("sales.csv").string();
  config.k = 0;
  CHECK_THROWS_WITH_AS(resolve_config(config), "config: k must be >= 1", std::runtime_error);
  config.k.reset();

  config.workers = -1;
  CHECK_THROWS_AS(resolve_config(config), std::runtime_error);
  config.workers = 0;

  config.tol.abs = -1.0;
  CHECK_THROWS_WITH_AS(resolve_config(config), "config: tolerances must be >= 0",
                       std::runtime_error);
  config.tol.abs = 1e-4;

  config.match.fuzzy_threshold = 1.5;
  CHECK_THROWS_AS(resolve_config(config), std::runtime_error);
  config.match.fuzzy_threshold = 0.85;

  config.limits.max_items = 0;
  CHECK_THROWS_WITH_AS(resolve_config(config), "config: limits must be >= 1",
                       std::runtime_error);
  config.limits.max_items = 512;

  config.ranker = RankerMode::external;
  CHECK_THROWS_WITH_AS(resolve_config(config), "config: --ranker external requires --scores",
                       std::runtime_error);
  config.scores = "scores.jsonl";
  CHECK(resolve_config(config).scores == std::filesystem::path("scores.jsonl"));

  config.ranker = RankerMode::heuristic;
  config.dataset = "/nowhere/missing.csv";
  try {
    resolve_config(config);
    FAIL("expected missing-dataset failure");
  } catch (const std::runtime_error& e) {
    std::string what = e.what();
    CHECK(what.find("dataset file not found") != std::string::npos);
    CHECK(what.find("/nowhere/missing.csv") != std::string::npos);
  }

  config.dataset = "/nowhere/table.parquet";
  try {
    resolve_config(config);
    FAIL("expected format-inference failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("cannot infer format") != std::string::npos);
  }
}

TEST_CASE("dataset names resolve against the data root") {
  auto root = temp_dir() / "data_root";
  std::filesystem::create_directories(root / "tatqa");
  std::filesystem::create_directories(root / "wtq" / "data");
  std::filesystem::copy_file(fixture_path("tatqa_mini.json"),
                             root / "tatqa" / "tatqa_dataset_dev.json",
                             std::filesystem::copy_options::overwrite_existing);
  std::filesystem::copy_file(fixture_path("wtq_mini/data/mini-dev.tsv"),
                             root / "wtq" / "data" / "random-split-1-train.tsv",
                             std::filesystem::copy_options::overwrite_existing);

  PipelineConfig config;
  config.dataset = "tatqa";
  config.data_root = root;
  ResolvedConfig tatqa = resolve_config(config);
  CHECK(tatqa.format == DatasetFormat::tatqa);
  CHECK(tatqa.dataset_file == root / "tatqa" / "tatqa_dataset_dev.json");

  config.dataset = "wtq";
  config.split = "train";
  ResolvedConfig wtq = resolve_config(config);
  CHECK(wtq.format == DatasetFormat::wtq);
  CHECK(wtq.dataset_file == root / "wtq" / "data" / "random-split-1-train.tsv");

  // The test split maps onto the unseen-tables file.
  config.split = "test";
  try {
    resolve_config(config);
    FAIL("expected missing-dataset failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("pristine-unseen-tables.tsv") != std::string::npos);
  }

  // An empty data_root falls back to $TACUBE_DATA.
  config.dataset = "tatqa";
  config.split = "dev";
  config.data_root.clear();
  REQUIRE(setenv("TACUBE_DATA", root.string().c_str(), 1) == 0);
  CHECK(resolve_config(config).dataset_file == root / "tatqa" / "tatqa_dataset_dev.json");
  REQUIRE(unsetenv("TACUBE_DATA") == 0);
}

TEST_CASE("lexicon files replace the default triggers") {
  auto path = temp_dir() / "lexicon.json";
  write_file(path, R"({
    "phrases": {
      "count": [["how", "many"]],
      "sum": ["grand total of"]
    },
    "pair_triggers": [
      {"op": "change_ratio", "first_any": ["grew"], "second_any": ["percent"]}
    ]
  })");

  TriggerLexicon lexicon = load_lexicon(path);
  CHECK(ops_of("How many cities?", lexicon) == std::vector<OperatorKind>{OperatorKind::count});
  CHECK(ops_of("The grand total of sales?", lexicon) ==
        std::vector<OperatorKind>{OperatorKind::sum});
  CHECK(ops_of("It grew by five percent.", lexicon) ==
        std::vector<OperatorKind>{OperatorKind::change_ratio});
  // Default-only triggers no longer fire.
  CHECK(ops_of("What is the difference?", lexicon).empty());
}

TEST_CASE("lexicon files are validated") {
  auto dir = temp_dir();
  auto path = dir / "bad_lexicon.json";
  write_file(path, "{}");
  CHECK_THROWS_AS(load_lexicon(path), std::runtime_error);
  write_file(path, R"({"phrases": {"multiply": [["times"]]}})");
  CHECK_THROWS_AS(load_lexicon(path), std::runtime_error);
  write_file(path, R"({"phrases": {"sum": [[]]}})");
  CHECK_THROWS_AS(load_lexicon(path), std::runtime_error);
  CHECK_THROWS_AS(load_lexicon(dir / "absent.json"), std::runtime_error);
}

TEST_CASE("the shipped lexicon matches the built-in defaults") {
  TriggerLexicon shipped = load_lexicon(fixture_path("../../config/lexicon.json"));
  TriggerLexicon defaults = TriggerLexicon::defaults();
  for (const std::string question : {
           "How many flights are there?",
           "What was the total revenue?",
           "What is the average score?",
           "What is the difference between 2018 and 2019?",
           "What is the ratio of profit to revenue?",
           "What was the percentage change in revenue?",
           "Has revenue increased as a percentage of sales?",
           "Which city is largest?",
       }) {
    auto tokens = normalize(question);
    CHECK_MESSAGE(detect_operators(tokens, shipped) == detect_operators(tokens, defaults),
                  question);
  }
}
