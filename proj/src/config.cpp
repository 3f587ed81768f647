#include "tacube/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace tacube {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& message) {
  throw std::runtime_error(origin + ": " + message);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> phrase_tokens(const json& phrase, const std::string& origin) {
  std::vector<std::string> tokens;
  if (phrase.is_string()) {  // "how many" == ["how", "many"]
    std::istringstream words(phrase.get<std::string>());
    std::string word;
    while (words >> word) tokens.push_back(word);
  } else if (phrase.is_array()) {
    for (const auto& token : phrase) {
      if (!token.is_string()) fail(origin, "phrase tokens must be strings");
      tokens.push_back(token.get<std::string>());
    }
  } else {
    fail(origin, "a phrase must be a string or an array of tokens");
  }
  if (tokens.empty()) fail(origin, "empty phrase");
  return tokens;
}

std::vector<std::string> string_list(const json& value, const std::string& origin) {
  if (!value.is_array()) fail(origin, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& item : value) {
    if (!item.is_string()) fail(origin, "expected an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

// Flat TOML subset -> the same JSON object shape apply_config_json takes.
json toml_subset_to_json(const std::string& text, const std::string& origin) {
  json root = json::object();
  json* section = &root;
  std::istringstream lines(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const std::string where = origin + " line " + std::to_string(line_no);
    // Strip comments outside quotes.
    bool in_quotes = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quotes = !in_quotes;
      if (line[i] == '#' && !in_quotes) {
        line.erase(i);
        break;
      }
    }
    auto trim = [](std::string s) {
      size_t b = s.find_first_not_of(" \t\r");
      size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(where, "unterminated section header");
      std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) fail(where, "empty section name");
      section = &root[name];
      *section = json::object();
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) fail(where, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail(where, "expected key = value");
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') fail(where, "unterminated string");
      (*section)[key] = value.substr(1, value.size() - 2);
    } else if (value == "true" || value == "false") {
      (*section)[key] = value == "true";
    } else if (value.front() == '[') {
      if (value.back() != ']') fail(where, "unterminated array");
      json array = json::array();
      std::istringstream items(value.substr(1, value.size() - 2));
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
          array.push_back(json::parse(item));
        } catch (const json::exception&) {
          fail(where, "unsupported array element: " + item);
        }
      }
      (*section)[key] = std::move(array);
    } else {
      try {
        (*section)[key] = json::parse(value);
      } catch (const json::exception&) {
        fail(where, "unsupported value: " + value);
      }
    }
  }
  return root;
}

void apply_config_object(PipelineConfig& config, const json& root, const std::string& origin) {
  if (!root.is_object()) fail(origin, "config must be an object");
  for (const auto& [key, value] : root.items()) {
    try {
      if (key == "dataset") {
        config.dataset = value.get<std::string>();
      } else if (key == "format") {
        auto format = dataset_format_from_string(value.get<std::string>());
        if (!format) fail(origin, "unknown format: " + value.get<std::string>());
        config.format = *format;
      } else if (key == "split") {
        config.split = value.get<std::string>();
      } else if (key == "ranker") {
        std::string name = value.get<std::string>();
        if (name == "heuristic") config.ranker = RankerMode::heuristic;
        else if (name == "external") config.ranker = RankerMode::external;
        else fail(origin, "unknown ranker: " + name);
      } else if (key == "scores") {
        config.scores = value.get<std::string>();
      } else if (key == "sql_sidecar") {
        config.sql_sidecar = value.get<std::string>();
      } else if (key == "annotations") {
        config.annotations = value.get<std::string>();
      } else if (key == "lexicon") {
        config.lexicon = value.get<std::string>();
      } else if (key == "k") {
        config.k = value.get<int>();
      } else if (key == "workers") {
        config.workers = value.get<int>();
      } else if (key == "idf_smooth") {
        config.idf_smooth = value.get<bool>();
      } else if (key == "arithmetic_subset_only") {
        config.arithmetic_subset_only = value.get<bool>();
      } else if (key == "denominator") {
        std::string name = value.get<std::string>();
        if (name == "eligible") config.denominator = EvaluateOptions::Denominator::eligible;
        else if (name == "extracted") config.denominator = EvaluateOptions::Denominator::extracted;
        else fail(origin, "unknown denominator: " + name);
      } else if (key == "tol_abs") {
        config.tol.abs = value.get<double>();
      } else if (key == "tol_rel") {
        config.tol.rel = value.get<double>();
      } else if (key == "match_threshold") {
        config.match.fuzzy_threshold = value.get<double>();
      } else if (key == "out_dir") {
        config.out_dir = value.get<std::string>();
      } else if (key == "data_root") {
        config.data_root = value.get<std::string>();
      } else if (key == "tolerance") {
        for (const auto& [tkey, tvalue] : value.items()) {
          if (tkey == "abs") config.tol.abs = tvalue.get<double>();
          else if (tkey == "rel") config.tol.rel = tvalue.get<double>();
          else fail(origin, "unknown tolerance key: " + tkey);
        }
      } else if (key == "match") {
        for (const auto& [mkey, mvalue] : value.items()) {
          if (mkey == "fuzzy_threshold") config.match.fuzzy_threshold = mvalue.get<double>();
          else fail(origin, "unknown match key: " + mkey);
        }
      } else if (key == "limits") {
        for (const auto& [lkey, lvalue] : value.items()) {
          if (lkey == "max_candidate_rows") config.limits.max_candidate_rows = lvalue.get<int>();
          else if (lkey == "max_candidate_cols")
            config.limits.max_candidate_cols = lvalue.get<int>();
          else if (lkey == "max_items") config.limits.max_items = lvalue.get<int>();
          else if (lkey == "top_k_row") config.limits.top_k_row_values =
              lvalue.get<std::vector<int>>();
          else fail(origin, "unknown limits key: " + lkey);
        }
      } else {
        fail(origin, "unknown config key: " + key);
      }
    } catch (const json::exception& e) {
      fail(origin, "key '" + key + "': " + e.what());
    }
  }
}

}  // namespace

void apply_config_json(PipelineConfig& config, const std::string& text,
                       const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(origin, e.what());
  }
  apply_config_object(config, root, origin);
}

PipelineConfig load_config(const std::filesystem::path& path) {
  PipelineConfig config;
  std::string text = read_file(path);
  size_t first = text.find_first_not_of(" \t\r\n");
  bool looks_json =
      path.extension() == ".json" || (first != std::string::npos && text[first] == '{');
  if (looks_json) {
    apply_config_json(config, text, path.string());
  } else {
    apply_config_object(config, toml_subset_to_json(text, path.string()), path.string());
  }
  return config;
}

TriggerLexicon load_lexicon(const std::filesystem::path& path) {
  const std::string origin = path.string();
  json root;
  try {
    root = json::parse(read_file(path));
  } catch (const json::exception& e) {
    fail(origin, e.what());
  }
  TriggerLexicon lexicon;
  if (root.contains("phrases")) {
    for (const auto& [op_name, phrases] : root.at("phrases").items()) {
      auto op = operator_from_string(op_name);
      if (!op) fail(origin, "unknown operator: " + op_name);
      if (!phrases.is_array()) fail(origin, "phrases for " + op_name + " must be an array");
      for (const auto& phrase : phrases)
        lexicon.phrases[*op].push_back(phrase_tokens(phrase, origin));
    }
  }
  if (root.contains("pair_triggers")) {
    for (const auto& trigger : root.at("pair_triggers")) {
      auto op = operator_from_string(trigger.at("op").get<std::string>());
      if (!op) fail(origin, "unknown operator in pair trigger");
      lexicon.pair_triggers.push_back(
          {*op, string_list(trigger.at("first_any"), origin),
           string_list(trigger.at("second_any"), origin)});
    }
  }
  if (lexicon.phrases.empty() && lexicon.pair_triggers.empty())
    fail(origin, "lexicon defines no triggers");
  return lexicon;
}

ResolvedConfig resolve_config(const PipelineConfig& config) {
  ResolvedConfig resolved;
  resolved.split = config.split;
  resolved.ranker = config.ranker;
  resolved.scores = config.scores;
  resolved.sql_sidecar = config.sql_sidecar;
  resolved.annotations = config.annotations;
  resolved.out_dir = config.out_dir;
  resolved.idf_smooth = config.idf_smooth;

  if (config.dataset.empty()) throw std::runtime_error("config: no dataset given");

  std::filesystem::path root = config.data_root;
  if (root.empty()) {
    const char* env = std::getenv("TACUBE_DATA");
    root = env != nullptr && *env != '\0' ? std::filesystem::path(env)
                                          : std::filesystem::path("data");
  }

  if (config.dataset == "tatqa") {
    resolved.format = DatasetFormat::tatqa;
    resolved.dataset_file = root / "tatqa" / ("tatqa_dataset_" + config.split + ".json");
  } else if (config.dataset == "wtq") {
    resolved.format = DatasetFormat::wtq;
    std::string file = config.split == "test" ? "pristine-unseen-tables.tsv"
                                              : "random-split-1-" + config.split + ".tsv";
    resolved.dataset_file = root / "wtq" / "data" / file;
  } else {
    resolved.dataset_file = config.dataset;
    if (config.format) {
      resolved.format = *config.format;
    } else {
      auto ext = resolved.dataset_file.extension();
      if (ext == ".json") resolved.format = DatasetFormat::tatqa;
      else if (ext == ".tsv") resolved.format = DatasetFormat::wtq;
      else if (ext == ".csv") resolved.format = DatasetFormat::csv;
      else
        throw std::runtime_error("config: cannot infer format of " +
                                 resolved.dataset_file.string() + "; pass --format");
    }
  }
  if (config.format) resolved.format = *config.format;
  if (!std::filesystem::exists(resolved.dataset_file))
    throw std::runtime_error("config: dataset file not found: " +
                             resolved.dataset_file.string());

  resolved.k = config.k.value_or(resolved.format == DatasetFormat::wtq ? 5 : 10);
  if (resolved.k < 1) throw std::runtime_error("config: k must be >= 1");

  resolved.workers = config.workers;
  if (resolved.workers < 0) throw std::runtime_error("config: workers must be >= 0");
  if (resolved.workers == 0) {
    unsigned hw = std::thread::hardware_concurrency();
    resolved.workers = hw == 0 ? 1 : static_cast<int>(hw);
  }

  if (config.tol.abs < 0 || config.tol.rel < 0)
    throw std::runtime_error("config: tolerances must be >= 0");
  if (config.match.fuzzy_threshold < 0.0 || config.match.fuzzy_threshold > 1.0)
    throw std::runtime_error("config: match_threshold must be in [0, 1]");
  if (config.limits.max_candidate_rows < 1 || config.limits.max_candidate_cols < 1 ||
      config.limits.max_items < 1)
    throw std::runtime_error("config: limits must be >= 1");

  resolved.generation.limits = config.limits;
  resolved.analysis.match = config.match;
  if (config.lexicon) resolved.analysis.lexicon = load_lexicon(*config.lexicon);

  resolved.eval.tol = config.tol;
  resolved.eval.arithmetic_subset_only =
      config.arithmetic_subset_only.value_or(resolved.format == DatasetFormat::tatqa);
  resolved.eval.denominator =
      config.denominator.value_or(resolved.format == DatasetFormat::wtq
                                      ? EvaluateOptions::Denominator::extracted
                                      : EvaluateOptions::Denominator::eligible);

  if (resolved.ranker == RankerMode::external && !resolved.scores)
    throw std::runtime_error("config: --ranker external requires --scores");

  return resolved;
}

}  // namespace tacube
