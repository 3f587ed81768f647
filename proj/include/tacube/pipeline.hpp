#pragma once

#include <string>
#include <vector>

#include "tacube/config.hpp"
#include "tacube/eval.hpp"
#include "tacube/ingest.hpp"
#include "tacube/serialize.hpp"

namespace tacube {

struct InstanceArtifact {
  std::string id;
  SerializedInput input;
  std::vector<CubeItem> full_cube;  // pre-ranking, feeds the coverage headline
  RankedCube ranked;
  InstanceEvaluation evaluation;
  std::vector<std::string> warnings;
  bool failed = false;  // processing threw; counted as skipped
};

struct PipelineResult {
  std::vector<InstanceArtifact> artifacts;  // dataset order, independent of workers
  CoverageReport report;
  std::vector<IngestIssue> issues;
};

// analyze -> enumerate -> rank -> serialize -> evaluate for one instance.
// Pure given its arguments; safe to call from concurrent workers.
InstanceArtifact process_instance(const QAInstance& instance, const ResolvedConfig& config,
                                  const ExternalScoreSet* external);

// The full batch: ingest, process through an instance-indexed worker pool,
// aggregate the coverage report. Throws on fatal errors (unreadable dataset
// or score file); per-record problems become issues/warnings.
PipelineResult run_pipeline(const ResolvedConfig& config);

// One augmented JSONL record:
// {"id", "input", "segments", "cube_items": [...], "covered": bool|null}.
// covered describes the emitted top-k items; the report's headline coverage
// uses the full pre-ranking cube.
std::string instance_record_json(const InstanceArtifact& artifact);

std::string coverage_report_json(const CoverageReport& report);

std::string summary_text(const PipelineResult& result, const ResolvedConfig& config);

// augmented.jsonl + coverage.json + summary.txt under config.out_dir.
void write_artifacts(const PipelineResult& result, const ResolvedConfig& config);

}  // namespace tacube
