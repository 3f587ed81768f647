#include "tacube/pipeline.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace tacube {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json segments_json(const SerializedInput& input) {
  ordered_json segments = ordered_json::object();
  ordered_json cubes = ordered_json::array();
  for (const auto& segment : input.segments) {
    ordered_json span = ordered_json::array({segment.begin, segment.end});
    if (segment.kind == Segment::Kind::cube) {
      cubes.push_back(std::move(span));
    } else {
      segments[std::string(to_string(segment.kind))] = std::move(span);
    }
  }
  segments["cubes"] = std::move(cubes);
  return segments;
}

ordered_json cube_item_json(const ScoredItem& scored) {
  const CubeItem& item = scored.item;
  ordered_json operands = ordered_json::array();
  for (const auto& operand : item.operands) {
    ordered_json o;
    o["row"] = operand.ref.row;
    o["col"] = operand.ref.col;
    o["text"] = operand.text;
    if (operand.value) o["value"] = *operand.value;
    operands.push_back(std::move(o));
  }
  ordered_json out;
  out["operator"] = to_string(item.op);
  out["pattern"] = to_string(item.pattern);
  out["col_headers"] = item.col_headers;
  out["row_headers"] = item.row_headers;
  out["operands"] = std::move(operands);
  out["result"] = item.result;
  out["score"] = scored.score;
  out["fp"] = item_fingerprint(item);
  return out;
}

}  // namespace

InstanceArtifact process_instance(const QAInstance& instance, const ResolvedConfig& config,
                                  const ExternalScoreSet* external) {
  InstanceArtifact artifact;
  artifact.id = instance.id;
  try {
    QuestionAnalysis analysis = analyze_question(instance.question, *instance.table,
                                                 config.analysis);
    artifact.full_cube = enumerate_items(analysis, *instance.table, config.generation);
    RankOutcome outcome = rank(instance.question, artifact.full_cube, config.k, config.ranker,
                               external, instance.id, config.idf_smooth);
    artifact.ranked = std::move(outcome.cube);
    artifact.warnings = std::move(outcome.warnings);
    artifact.input =
        build_model_input(instance.question, instance.context, *instance.table, artifact.ranked);
    artifact.evaluation =
        evaluate_instance(instance, artifact.full_cube, &artifact.ranked, config.eval);
  } catch (const std::exception& e) {
    artifact.failed = true;
    artifact.warnings.push_back(std::string("processing failed: ") + e.what());
  }
  return artifact;
}

PipelineResult run_pipeline(const ResolvedConfig& config) {
  IngestOptions ingest_options;
  ingest_options.sql_sidecar = config.sql_sidecar;
  IngestReport ingest = ingest_dataset(config.dataset_file, config.format, ingest_options);

  ExternalScoreSet scores;
  const ExternalScoreSet* external = nullptr;
  if (config.scores) {
    scores = ExternalScoreSet::load(*config.scores);
    external = &scores;
  }

  PipelineResult result;
  result.issues = std::move(ingest.issues);
  const auto& instances = ingest.instances;
  result.artifacts.resize(instances.size());

  int n_workers = std::max(1, std::min<int>(config.workers,
                                            static_cast<int>(instances.size())));
  if (n_workers <= 1) {
    for (size_t i = 0; i < instances.size(); ++i)
      result.artifacts[i] = process_instance(instances[i], config, external);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (size_t i = next.fetch_add(1); i < instances.size(); i = next.fetch_add(1))
        result.artifacts[i] = process_instance(instances[i], config, external);
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<InstanceEvaluation> evaluations;
  evaluations.reserve(result.artifacts.size());
  int failed = 0;
  for (const auto& artifact : result.artifacts) {
    if (artifact.failed) {
      ++failed;
      continue;
    }
    evaluations.push_back(artifact.evaluation);
  }
  result.report = aggregate_coverage(evaluations, config.eval, config.k);
  result.report.ingested = ingest.records_seen;
  result.report.processed = static_cast<int>(result.artifacts.size()) - failed;
  result.report.skipped = static_cast<int>(result.issues.size()) + failed;

  if (config.annotations) {
    auto annotations = load_failure_annotations(*config.annotations);
    std::vector<std::string> uncovered;
    for (const auto& artifact : result.artifacts) {
      if (!artifact.failed && artifact.evaluation.eligible && !artifact.evaluation.covered)
        uncovered.push_back(artifact.id);
    }
    tally_failure_tags(result.report, annotations, uncovered);
  }
  return result;
}

std::string instance_record_json(const InstanceArtifact& artifact) {
  ordered_json record;
  record["id"] = artifact.id;
  record["input"] = artifact.input.text;
  record["segments"] = segments_json(artifact.input);
  ordered_json items = ordered_json::array();
  for (const auto& scored : artifact.ranked.items) items.push_back(cube_item_json(scored));
  record["cube_items"] = std::move(items);
  if (artifact.evaluation.eligible) {
    record["covered"] = artifact.evaluation.first_covering_rank > 0;
  } else {
    record["covered"] = nullptr;
  }
  return record.dump();
}

std::string coverage_report_json(const CoverageReport& report) {
  ordered_json out;
  out["ingested"] = report.ingested;
  out["processed"] = report.processed;
  out["skipped"] = report.skipped;
  out["total"] = report.total;
  out["eligible"] = report.eligible;
  out["cube_extracted"] = report.cube_extracted;
  out["covered"] = report.covered;
  out["no_eligible_cases"] = report.no_eligible_cases;
  out["coverage"] = report.coverage;
  out["coverage_eligible"] = report.coverage_eligible;
  out["coverage_extracted"] = report.coverage_extracted;
  ordered_json per_operator = ordered_json::object();
  for (const auto& [op, stats] : report.per_operator) {
    per_operator[op] = ordered_json{{"total", stats.total}, {"covered", stats.covered}};
  }
  out["per_operator"] = std::move(per_operator);
  ordered_json per_k = ordered_json::array();
  for (const auto& [k, ratio] : report.per_k) per_k.push_back(ordered_json::array({k, ratio}));
  out["per_k"] = std::move(per_k);
  out["failure_tags"] = report.failure_tags;
  return out.dump(2) + "\n";
}

std::string summary_text(const PipelineResult& result, const ResolvedConfig& config) {
  std::ostringstream out;
  const CoverageReport& r = result.report;
  out << "dataset: " << config.dataset_file.string() << " (" << to_string(config.format)
      << ", split " << config.split << ")\n";
  out << "ranker: " << to_string(config.ranker) << ", k=" << config.k
      << ", workers=" << config.workers << "\n";
  out << "records: ingested " << r.ingested << ", processed " << r.processed << ", skipped "
      << r.skipped << "\n";
  out << "gold-bearing: " << r.total << "; eligible: " << r.eligible
      << "; cube-extracted: " << r.cube_extracted << "; covered: " << r.covered << "\n";
  if (r.no_eligible_cases) {
    out << "coverage: no eligible cases\n";
  } else {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", r.coverage);
    out << "coverage: " << buf;
    std::snprintf(buf, sizeof(buf), "%.4f", r.coverage_eligible);
    out << " (eligible denominator " << buf;
    std::snprintf(buf, sizeof(buf), "%.4f", r.coverage_extracted);
    out << ", extracted denominator " << buf << ")\n";
  }
  if (!r.per_k.empty()) {
    out << "coverage at k:";
    for (const auto& [k, ratio] : r.per_k) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), " %d:%.4f", k, ratio);
      out << buf;
    }
    out << "\n";
  }
  if (!r.per_operator.empty()) {
    out << "per-operator (gold operator: covered/total):";
    for (const auto& [op, stats] : r.per_operator)
      out << " " << op << ":" << stats.covered << "/" << stats.total;
    out << "\n";
  }
  if (!r.failure_tags.empty()) {
    out << "failure tags:";
    for (const auto& [tag, count] : r.failure_tags) out << " " << tag << ":" << count;
    out << "\n";
  }
  if (!result.issues.empty()) {
    out << "skipped records:\n";
    for (const auto& issue : result.issues)
      out << "  " << issue.record << ": " << issue.message << "\n";
  }
  size_t warning_count = 0;
  for (const auto& artifact : result.artifacts) warning_count += artifact.warnings.size();
  if (warning_count > 0) {
    out << "warnings (" << warning_count << "):\n";
    for (const auto& artifact : result.artifacts)
      for (const auto& warning : artifact.warnings) out << "  " << warning << "\n";
  }
  return out.str();
}

void write_artifacts(const PipelineResult& result, const ResolvedConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  {
    std::ofstream out(config.out_dir / "augmented.jsonl", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write to " + config.out_dir.string());
    for (const auto& artifact : result.artifacts) out << instance_record_json(artifact) << "\n";
  }
  {
    std::ofstream out(config.out_dir / "coverage.json", std::ios::binary);
    out << coverage_report_json(result.report);
  }
  {
    std::ofstream out(config.out_dir / "summary.txt", std::ios::binary);
    out << summary_text(result, config);
  }
}

}  // namespace tacube
