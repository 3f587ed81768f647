#include "tacube/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace tacube {

namespace {

using nlohmann::json;

std::string json_as_string(const json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

std::vector<std::string> answer_values(const json& answer) {
  std::vector<std::string> values;
  if (answer.is_array()) {
    for (const auto& v : answer) values.push_back(json_as_string(v));
  } else if (!answer.is_null()) {
    values.push_back(json_as_string(answer));
  }
  return values;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());
  return in;
}

std::unordered_map<std::string, std::string> load_sql_sidecar(
    const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::unordered_map<std::string, std::string> by_id;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      json record = json::parse(line);
      by_id[json_as_string(record.at("id"))] = record.at("sql").get<std::string>();
    } catch (const json::exception& e) {
      throw std::runtime_error("sql sidecar " + path.string() + " line " +
                               std::to_string(line_no) + ": " + e.what());
    }
  }
  return by_id;
}

IngestReport ingest_tatqa(const std::filesystem::path& path, const IngestOptions&) {
  auto in = open_or_throw(path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("invalid JSON in " + path.string() + ": " + e.what());
  }
  if (!root.is_array()) throw std::runtime_error(path.string() + ": top level must be an array");

  IngestReport report;
  int block_no = 0;
  for (const auto& block : root) {
    ++block_no;
    std::string block_label = "block " + std::to_string(block_no);
    TablePtr table;
    try {
      const auto& table_obj = block.at("table");
      std::string table_id = table_obj.contains("uid") ? json_as_string(table_obj.at("uid"))
                                                       : block_label;
      std::vector<std::vector<std::string>> grid;
      for (const auto& row : table_obj.at("table")) {
        std::vector<std::string> cells;
        for (const auto& cell : row) cells.push_back(json_as_string(cell));
        grid.push_back(std::move(cells));
      }
      table = table_from_grid(std::move(table_id), grid);
    } catch (const std::exception& e) {
      ++report.records_seen;
      report.issues.push_back({block_label, std::string("table rejected: ") + e.what()});
      continue;
    }

    std::optional<std::string> context;
    if (block.contains("paragraphs") && block.at("paragraphs").is_array()) {
      std::vector<std::pair<int, std::string>> paragraphs;
      for (const auto& p : block.at("paragraphs")) {
        if (!p.contains("text")) continue;
        int order = p.contains("order") && p.at("order").is_number()
                        ? p.at("order").get<int>()
                        : static_cast<int>(paragraphs.size()) + 1;
        paragraphs.emplace_back(order, json_as_string(p.at("text")));
      }
      std::stable_sort(paragraphs.begin(), paragraphs.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      std::string joined;
      for (const auto& [_, text] : paragraphs) {
        if (!joined.empty()) joined += ' ';
        joined += text;
      }
      if (!joined.empty()) context = std::move(joined);
    }

    if (!block.contains("questions") || !block.at("questions").is_array()) {
      ++report.records_seen;
      report.issues.push_back({block_label, "missing questions array"});
      continue;
    }
    int q_no = 0;
    for (const auto& q : block.at("questions")) {
      ++q_no;
      ++report.records_seen;
      std::string q_label = q.contains("uid") ? json_as_string(q.at("uid"))
                                              : block_label + " question " + std::to_string(q_no);
      try {
        QAInstance instance;
        instance.id = q_label;
        instance.question = q.at("question").get<std::string>();
        if (instance.question.empty()) throw std::runtime_error("empty question");
        instance.table = table;
        instance.context = context;
        GoldAnswer gold;
        gold.values = answer_values(q.at("answer"));
        if (gold.values.empty()) throw std::runtime_error("empty answer");
        if (q.contains("scale")) gold.scale = json_as_string(q.at("scale"));
        if (q.contains("derivation")) gold.derivation = json_as_string(q.at("derivation"));
        if (q.contains("answer_type")) {
          auto type = answer_type_from_string(json_as_string(q.at("answer_type")));
          if (!type) throw std::runtime_error("unknown answer_type");
          gold.answer_type = *type;
        }
        instance.gold = std::move(gold);
        report.instances.push_back(std::move(instance));
      } catch (const std::exception& e) {
        report.issues.push_back({q_label, e.what()});
      }
    }
  }
  return report;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  for (size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == '\t') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

IngestReport ingest_wtq(const std::filesystem::path& path, const IngestOptions& options) {
  auto in = open_or_throw(path);
  std::unordered_map<std::string, std::string> sql_by_id;
  if (options.sql_sidecar) sql_by_id = load_sql_sidecar(*options.sql_sidecar);

  IngestReport report;
  std::map<std::string, TablePtr> table_cache;
  const std::filesystem::path base = path.parent_path();

  std::string line;
  bool header = true;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {  // id\tutterance\tcontext\ttargetValue
      header = false;
      continue;
    }
    ++report.records_seen;
    std::string label = "line " + std::to_string(line_no);
    auto fields = split_tabs(line);
    if (fields.size() < 4) {
      report.issues.push_back({label, "expected 4 tab-separated fields"});
      continue;
    }
    const std::string& id = fields[0];
    const std::string& question = fields[1];
    const std::string& rel_table = fields[2];
    const std::string& target = fields[3];
    if (question.empty()) {
      report.issues.push_back({id, "empty question"});
      continue;
    }

    TablePtr table;
    auto cached = table_cache.find(rel_table);
    if (cached != table_cache.end()) {
      table = cached->second;
    } else {
      std::filesystem::path resolved = base / rel_table;
      if (!std::filesystem::exists(resolved)) resolved = base / ".." / rel_table;
      try {
        auto csv_in = open_or_throw(resolved);
        auto grid = parse_csv(csv_in);
        table = table_from_grid(rel_table, grid);
      } catch (const std::exception& e) {
        report.issues.push_back({id, std::string("table ") + rel_table + ": " + e.what()});
        table_cache[rel_table] = nullptr;
        continue;
      }
      table_cache[rel_table] = table;
    }
    if (table == nullptr) {
      report.issues.push_back({id, "table " + rel_table + ": rejected earlier"});
      continue;
    }

    QAInstance instance;
    instance.id = id;
    instance.question = question;
    instance.table = table;
    GoldAnswer gold;
    gold.values = split_on(target, '|');
    std::erase_if(gold.values, [](const std::string& v) { return v.empty(); });
    if (gold.values.empty()) {
      report.issues.push_back({id, "empty targetValue"});
      continue;
    }
    auto sql = sql_by_id.find(id);
    if (sql != sql_by_id.end()) gold.sql = sql->second;
    instance.gold = std::move(gold);
    report.instances.push_back(std::move(instance));
  }
  return report;
}

IngestReport ingest_plain_csv(const std::filesystem::path& path, const IngestOptions& options) {
  auto in = open_or_throw(path);
  IngestReport report;
  TablePtr table;
  try {
    auto grid = parse_csv(in);
    table = table_from_grid(path.stem().string(), grid);
  } catch (const std::exception& e) {
    ++report.records_seen;
    report.issues.push_back({path.stem().string(), e.what()});
    return report;
  }

  std::filesystem::path sidecar;
  if (options.questions_sidecar) {
    sidecar = *options.questions_sidecar;
  } else {
    sidecar = path;
    sidecar.replace_extension(".questions.txt");
  }
  std::vector<std::string> questions;
  if (std::filesystem::exists(sidecar)) {
    std::ifstream qin(sidecar);
    std::string q;
    while (std::getline(qin, q)) {
      if (!q.empty() && q.back() == '\r') q.pop_back();
      if (!q.empty()) questions.push_back(q);
    }
  }

  if (questions.empty()) {
    // Inference mode without questions: a single instance whose analysis
    // relies entirely on the operator fallback.
    ++report.records_seen;
    QAInstance instance;
    instance.id = path.stem().string();
    instance.table = table;
    report.instances.push_back(std::move(instance));
    return report;
  }
  for (size_t i = 0; i < questions.size(); ++i) {
    ++report.records_seen;
    QAInstance instance;
    instance.id = path.stem().string() + "#q" + std::to_string(i + 1);
    instance.question = questions[i];
    instance.table = table;
    report.instances.push_back(std::move(instance));
  }
  return report;
}

}  // namespace

std::string_view to_string(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::tatqa: return "tatqa";
    case DatasetFormat::wtq: return "wtq";
    case DatasetFormat::csv: return "csv";
  }
  return "csv";
}

std::optional<DatasetFormat> dataset_format_from_string(std::string_view name) {
  if (name == "tatqa") return DatasetFormat::tatqa;
  if (name == "wtq") return DatasetFormat::wtq;
  if (name == "csv") return DatasetFormat::csv;
  return std::nullopt;
}

IngestReport ingest_dataset(const std::filesystem::path& path, DatasetFormat format,
                            const IngestOptions& options) {
  switch (format) {
    case DatasetFormat::tatqa: return ingest_tatqa(path, options);
    case DatasetFormat::wtq: return ingest_wtq(path, options);
    case DatasetFormat::csv: return ingest_plain_csv(path, options);
  }
  throw std::runtime_error("unknown dataset format");
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in, char delimiter) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;  // true once the current row has any content
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
      field_started = true;
      continue;
    }
    if (c == delimiter) {
      row.push_back(std::move(field));
      field.clear();
      field_started = true;
      continue;
    }
    if (c == '\n' || c == '\r') {
      if (c == '\r' && in.peek() == '\n') in.get(c);
      if (field_started || !field.empty()) {
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        field_started = false;
      }
      continue;
    }
    field += c;
    field_started = true;
  }
  if (field_started || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tacube
