#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tacube/table.hpp"

namespace tacube {

enum class DatasetFormat { tatqa, wtq, csv };

std::string_view to_string(DatasetFormat format);
std::optional<DatasetFormat> dataset_format_from_string(std::string_view name);

struct IngestIssue {
  std::string record;   // id or positional label of the skipped record
  std::string message;
};

struct IngestReport {
  std::vector<QAInstance> instances;
  std::vector<IngestIssue> issues;  // one per skipped record
  int records_seen = 0;             // instances.size() + issues.size()
};

struct IngestOptions {
  // JSONL sidecar {"id": ..., "sql": ...} attaching annotated queries to
  // instances (used for gold-operator extraction on WTQ-style data).
  std::optional<std::filesystem::path> sql_sidecar;
  // Plain-text sidecar for csv format, one question per line. When absent,
  // "<table stem>.questions.txt" next to the csv is tried automatically.
  std::optional<std::filesystem::path> questions_sidecar;
};

// One QAInstance per dataset question record. I/O or whole-file syntax
// failures throw; malformed records are skipped and reported.
IngestReport ingest_dataset(const std::filesystem::path& path, DatasetFormat format,
                            const IngestOptions& options = {});

// RFC 4180: quoted fields, doubled-quote escapes, embedded delimiters and
// newlines, CRLF tolerance.
std::vector<std::vector<std::string>> parse_csv(std::istream& in, char delimiter = ',');

}  // namespace tacube
