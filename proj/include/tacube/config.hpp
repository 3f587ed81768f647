#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "tacube/cube.hpp"
#include "tacube/eval.hpp"
#include "tacube/ingest.hpp"
#include "tacube/question.hpp"
#include "tacube/ranking.hpp"

namespace tacube {

// Raw settings as given by config file + CLI flags. Dataset-dependent fields
// stay unset here and get their format defaults in resolve_config.
struct PipelineConfig {
  std::string dataset;  // file path, or a known dataset name (tatqa / wtq)
  std::optional<DatasetFormat> format;
  std::string split = "dev";

  RankerMode ranker = RankerMode::heuristic;
  std::optional<std::filesystem::path> scores;       // external ranker JSONL
  std::optional<std::filesystem::path> sql_sidecar;  // gold-operator SQL JSONL
  std::optional<std::filesystem::path> annotations;  // failure-tag CSV
  std::optional<std::filesystem::path> lexicon;      // trigger lexicon JSON

  std::optional<int> k;  // default: 10 (tatqa), 5 (wtq), 10 otherwise
  int workers = 0;       // 0 = hardware concurrency

  GenerationLimits limits;
  MatchOptions match;
  Tolerance tol;
  bool idf_smooth = true;

  // Coverage accounting; defaults depend on the dataset's annotations.
  std::optional<bool> arithmetic_subset_only;  // tatqa: true, else false
  std::optional<EvaluateOptions::Denominator> denominator;  // wtq: extracted

  std::filesystem::path out_dir = "out";
  std::filesystem::path data_root;  // default $TACUBE_DATA, else ./data
};

// Everything concrete: paths resolved, defaults applied, lexicon loaded.
struct ResolvedConfig {
  std::filesystem::path dataset_file;
  DatasetFormat format = DatasetFormat::csv;
  std::string split;
  RankerMode ranker = RankerMode::heuristic;
  std::optional<std::filesystem::path> scores;
  std::optional<std::filesystem::path> sql_sidecar;
  std::optional<std::filesystem::path> annotations;
  int k = 10;
  int workers = 1;
  GenerationOptions generation;
  AnalysisOptions analysis;
  EvaluateOptions eval;
  bool idf_smooth = true;
  std::filesystem::path out_dir;
};

// Validates and concretizes: resolves dataset names against the data root,
// infers the format from the name/extension, applies per-format defaults for
// k and the coverage accounting, loads the lexicon. Throws std::runtime_error
// on invalid settings (k < 1, unknown format, missing dataset file).
ResolvedConfig resolve_config(const PipelineConfig& config);

// JSON (.json / leading '{') or a flat TOML subset: `key = value` lines,
// [tolerance] / [limits] / [match] sections, strings, numbers, booleans and
// integer arrays. Unknown keys are rejected.
PipelineConfig load_config(const std::filesystem::path& path);
void apply_config_json(PipelineConfig& config, const std::string& text,
                       const std::string& origin);

// {"phrases": {op: [[token, ...], ...]}, "pair_triggers": [{"op": ...,
//  "first_any": [...], "second_any": [...]}]}
TriggerLexicon load_lexicon(const std::filesystem::path& path);

}  // namespace tacube
