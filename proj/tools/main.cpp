#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "tacube/config.hpp"
#include "tacube/oracle.hpp"
#include "tacube/pipeline.hpp"

namespace {

using namespace tacube;

struct CommonFlags {
  std::optional<std::string> config_path;
  std::optional<std::string> dataset;
  std::optional<std::string> format;
  std::optional<std::string> split;
  std::optional<std::string> ranker;
  std::optional<std::string> scores;
  std::optional<std::string> sql_sidecar;
  std::optional<std::string> annotations;
  std::optional<std::string> lexicon;
  std::optional<std::string> out_dir;
  std::optional<std::string> data_root;
  std::optional<int> k;
  std::optional<int> workers;
  std::optional<double> tol_abs;
  std::optional<double> tol_rel;
  std::optional<double> match_threshold;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "config file (JSON or TOML subset); default $TACUBE_CONFIG");
  cmd->add_option("--dataset", flags.dataset, "dataset file path, or name: tatqa | wtq");
  cmd->add_option("--format", flags.format, "dataset schema: tatqa | wtq | csv")
      ->check(CLI::IsMember({"tatqa", "wtq", "csv"}));
  cmd->add_option("--split", flags.split, "dataset split (dev | train | test)");
  cmd->add_option("--ranker", flags.ranker, "ranking mode")
      ->check(CLI::IsMember({"heuristic", "external"}));
  cmd->add_option("--scores", flags.scores, "external score JSONL (with --ranker external)");
  cmd->add_option("--sql-sidecar", flags.sql_sidecar, "JSONL {id, sql} for gold operators");
  cmd->add_option("--annotations", flags.annotations, "failure-tag CSV (id,tag)");
  cmd->add_option("--lexicon", flags.lexicon, "trigger lexicon JSON");
  cmd->add_option("-k,--top-k", flags.k, "cube items kept per instance");
  cmd->add_option("--tol-abs", flags.tol_abs, "absolute answer tolerance");
  cmd->add_option("--tol-rel", flags.tol_rel, "relative answer tolerance");
  cmd->add_option("--workers", flags.workers, "worker threads (0 = hardware)");
  cmd->add_option("--match-threshold", flags.match_threshold,
                  "fuzzy candidate-match threshold in [0, 1]");
  cmd->add_option("--out-dir", flags.out_dir, "artifact directory");
  cmd->add_option("--data-root", flags.data_root, "root for named datasets; default $TACUBE_DATA");
}

PipelineConfig build_config(const CommonFlags& flags) {
  PipelineConfig config;
  std::optional<std::string> config_path = flags.config_path;
  if (!config_path) {
    const char* env = std::getenv("TACUBE_CONFIG");
    if (env != nullptr && *env != '\0') config_path = env;
  }
  if (config_path) config = load_config(*config_path);

  if (flags.dataset) config.dataset = *flags.dataset;
  if (flags.format) config.format = *dataset_format_from_string(*flags.format);
  if (flags.split) config.split = *flags.split;
  if (flags.ranker)
    config.ranker = *flags.ranker == "external" ? RankerMode::external : RankerMode::heuristic;
  if (flags.scores) config.scores = *flags.scores;
  if (flags.sql_sidecar) config.sql_sidecar = *flags.sql_sidecar;
  if (flags.annotations) config.annotations = *flags.annotations;
  if (flags.lexicon) config.lexicon = *flags.lexicon;
  if (flags.out_dir) config.out_dir = *flags.out_dir;
  if (flags.data_root) config.data_root = *flags.data_root;
  if (flags.k) config.k = *flags.k;
  if (flags.workers) config.workers = *flags.workers;
  if (flags.tol_abs) config.tol.abs = *flags.tol_abs;
  if (flags.tol_rel) config.tol.rel = *flags.tol_rel;
  if (flags.match_threshold) config.match.fuzzy_threshold = *flags.match_threshold;
  return config;
}

int run_command(const CommonFlags& flags, bool write_augmented) {
  ResolvedConfig config = resolve_config(build_config(flags));
  PipelineResult result = run_pipeline(config);
  if (write_augmented) {
    write_artifacts(result, config);
  } else {
    std::filesystem::create_directories(config.out_dir);
    std::ofstream coverage(config.out_dir / "coverage.json", std::ios::binary);
    coverage << coverage_report_json(result.report);
    std::ofstream summary(config.out_dir / "summary.txt", std::ios::binary);
    summary << summary_text(result, config);
  }
  std::cout << summary_text(result, config);
  return 0;
}

// The built-in reference instance; goldens regenerated from here must stay
// byte-identical to tests/fixtures/golden/.
int goldens_command(const std::optional<std::string>& out_dir) {
  Table airlines("flights",
                 {"City", "Passengers"},
                 {{"Los Angles", "1.2"}, {"Toronto", "0.5"}, {"Boston", "2.0"}});
  std::string question = "What is the difference in passengers between Los Angles and Toronto?";

  Table revenue("revenue", {"Year", "Revenue"}, {{"2019", "100"}});
  std::string table_line = linearize_table(revenue);

  std::vector<CubeItem> items = generate_cube(question, airlines);
  std::optional<CubeItem> diff_item;
  for (const auto& item : items) {
    if (item.op == OperatorKind::diff && item.operands.size() == 2 &&
        item.operands[0].ref == CellRef{0, 1} && item.operands[1].ref == CellRef{1, 1}) {
      diff_item = item;
      break;
    }
  }
  if (!diff_item) {
    std::cerr << "golden diff item was not generated\n";
    return 1;
  }
  std::string item_line = linearize_cube_item(*diff_item);

  RankedCube ranked;
  ranked.k = 1;
  ranked.items.push_back({*diff_item, 1.0});
  SerializedInput input = build_model_input(question, std::nullopt, airlines, ranked);

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    std::ofstream(std::filesystem::path(*out_dir) / "table.txt", std::ios::binary)
        << table_line << "\n";
    std::ofstream(std::filesystem::path(*out_dir) / "cube_item.txt", std::ios::binary)
        << item_line << "\n";
    std::ofstream(std::filesystem::path(*out_dir) / "model_input.txt", std::ios::binary)
        << input.text << "\n";
    std::cout << "wrote table.txt, cube_item.txt, model_input.txt to " << *out_dir << "\n";
  } else {
    std::cout << table_line << "\n" << item_line << "\n" << input.text << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tacube: pre-computed aggregation/arithmetic cubes over tables"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run the pipeline and write augmented JSONL");
  add_common_flags(run, run_flags);

  CommonFlags coverage_flags;
  CLI::App* coverage =
      app.add_subcommand("coverage", "run the pipeline and report coverage only");
  add_common_flags(coverage, coverage_flags);

  CLI::App* oracle = app.add_subcommand("oracle-check",
                                        "compare generated items against the exhaustive oracle");
  OracleCheckOptions oracle_options;
  oracle->add_option("--tables", oracle_options.tables, "number of random tables")
      ->check(CLI::PositiveNumber);
  oracle->add_option("--max-rows", oracle_options.max_rows, "max random rows")
      ->check(CLI::Range(1, 8));
  oracle->add_option("--max-cols", oracle_options.max_cols, "max random columns")
      ->check(CLI::Range(1, 8));
  oracle->add_option("--seed", oracle_options.seed, "RNG seed");

  CLI::App* goldens = app.add_subcommand("goldens", "emit the reference serialization outputs");
  std::optional<std::string> goldens_out;
  goldens->add_option("--out-dir", goldens_out, "write files instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(run_flags, true);
    if (coverage->parsed()) return run_command(coverage_flags, false);
    if (oracle->parsed()) {
      OracleCheckResult result = oracle_check(oracle_options);
      std::cout << "tables: " << result.tables << ", items checked: " << result.items_checked
                << ", violations: " << result.violations << "\n";
      for (const auto& example : result.examples) std::cout << "  " << example << "\n";
      return result.violations == 0 ? 0 : 1;
    }
    if (goldens->parsed()) return goldens_command(goldens_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
