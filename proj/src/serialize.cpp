#include "tacube/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "tacube/question.hpp"

namespace tacube {

namespace {

std::optional<double> parse_double(std::string_view text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

// -?digits(.digits)? with full consumption; the shape format_number emits.
bool is_plain_number(std::string_view word) {
  size_t i = 0;
  if (i < word.size() && word[i] == '-') ++i;
  size_t digits = 0;
  while (i < word.size() && word[i] >= '0' && word[i] <= '9') ++i, ++digits;
  if (digits == 0) return false;
  if (i == word.size()) return true;
  if (word[i] != '.') return false;
  ++i;
  size_t frac = 0;
  while (i < word.size() && word[i] >= '0' && word[i] <= '9') ++i, ++frac;
  return frac > 0 && i == word.size();
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  size_t start = 0;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ' ') {
      words.emplace_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return words;
}

}  // namespace

std::string format_number(double value) {
  if (!std::isfinite(value)) {
    if (std::isnan(value)) return "nan";
    return value > 0 ? "inf" : "-inf";
  }
  char buf[512];
  int len = std::snprintf(buf, sizeof(buf), "%.4f", value);
  std::string out(buf, static_cast<size_t>(len));
  size_t dot = out.find('.');
  if (dot != std::string::npos) {
    size_t last = out.find_last_not_of('0');
    out.erase(last == dot ? dot : last + 1);
  }
  if (out == "-0") out = "0";
  return out;
}

std::string escape_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (char c : field) {
    if (c == '\\' || c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string unescape_field(std::string_view field) {
  std::string out;
  out.reserve(field.size());
  for (size_t i = 0; i < field.size(); ++i) {
    if (field[i] == '\\' && i + 1 < field.size()) ++i;
    out += field[i];
  }
  return out;
}

std::string linearize_table(const Table& table) {
  std::string out = "[HEAD]";
  for (const auto& header : table.column_headers()) {
    out += " | ";
    out += escape_field(header);
  }
  for (int i = 0; i < table.n_rows(); ++i) {
    out += " [ROW] ";
    out += std::to_string(i + 1);
    for (int j = 0; j < table.n_cols(); ++j) {
      out += " | ";
      out += escape_field(table.cell(i, j).raw);
    }
  }
  return out;
}

std::string linearize_cube_item(const CubeItem& item) {
  std::string out = "[CUBE] ";
  out += to_string(item.op);
  for (const auto& header : item.col_headers) {
    out += ' ';
    out += escape_field(header);
  }
  for (const auto& header : item.row_headers) {
    out += ' ';
    out += escape_field(header);
  }
  for (const auto& operand : item.operands) {
    out += ' ';
    out += operand.value ? format_number(*operand.value) : escape_field(operand.text);
  }
  out += " [ANSWER] : ";
  out += format_number(item.result);
  return out;
}

std::string_view to_string(Segment::Kind kind) {
  switch (kind) {
    case Segment::Kind::question: return "question";
    case Segment::Kind::context: return "context";
    case Segment::Kind::table: return "table";
    case Segment::Kind::cube: return "cube";
  }
  return "question";
}

SerializedInput build_model_input(std::string_view question,
                                  const std::optional<std::string>& context, const Table& table,
                                  const RankedCube& ranked) {
  SerializedInput out;
  auto append = [&](Segment::Kind kind, std::string_view separator, std::string_view piece) {
    size_t begin = out.text.size();
    out.text += separator;
    out.text += piece;
    out.segments.push_back(Segment{kind, begin, out.text.size()});
  };
  append(Segment::Kind::question, "", question);
  if (context && !context->empty()) append(Segment::Kind::context, " ", *context);
  append(Segment::Kind::table, " ", linearize_table(table));
  for (size_t i = 0; i < ranked.items.size(); ++i) {
    append(Segment::Kind::cube, i == 0 ? " " : " | ", linearize_cube_item(ranked.items[i].item));
  }
  return out;
}

std::optional<ParsedTable> parse_linearized_table(std::string_view text) {
  constexpr std::string_view kHead = "[HEAD]";
  if (!text.starts_with(kHead)) return std::nullopt;

  // Escape-aware scan: fields may contain "\|", so separators are only the
  // unescaped " | " and " [ROW] " byte runs.
  enum class Sep { pipe, row };
  std::vector<std::pair<Sep, std::string>> units;
  size_t i = kHead.size();
  std::optional<Sep> pending;
  std::string current;
  auto flush = [&]() {
    if (pending) units.emplace_back(*pending, current);
    current.clear();
  };
  while (i < text.size()) {
    if (text[i] == '\\' && i + 1 < text.size()) {
      current += text[i];
      current += text[i + 1];
      i += 2;
      continue;
    }
    if (text.compare(i, 3, " | ") == 0) {
      flush();
      pending = Sep::pipe;
      i += 3;
      continue;
    }
    if (text.compare(i, 7, " [ROW] ") == 0) {
      flush();
      pending = Sep::row;
      i += 7;
      continue;
    }
    if (!pending) return std::nullopt;  // junk between [HEAD] and first separator
    current += text[i];
    ++i;
  }
  flush();

  ParsedTable parsed;
  size_t u = 0;
  while (u < units.size() && units[u].first == Sep::pipe) {
    parsed.headers.push_back(unescape_field(units[u].second));
    ++u;
  }
  if (parsed.headers.empty()) return std::nullopt;
  while (u < units.size()) {
    const auto& label = units[u].second;
    if (label.empty() ||
        !std::all_of(label.begin(), label.end(), [](char c) { return c >= '0' && c <= '9'; }))
      return std::nullopt;
    if (label != std::to_string(parsed.rows.size() + 1)) return std::nullopt;
    ++u;
    std::vector<std::string> cells;
    while (u < units.size() && units[u].first == Sep::pipe) {
      cells.push_back(unescape_field(units[u].second));
      ++u;
    }
    if (cells.size() != parsed.headers.size()) return std::nullopt;
    parsed.rows.push_back(std::move(cells));
  }
  if (parsed.rows.empty()) return std::nullopt;
  return parsed;
}

namespace {

struct VocabEntry {
  std::vector<std::string> words;  // escaped form, as it appears in the flat text
  const std::string* original;
};

std::vector<VocabEntry> prepare_vocab(std::span<const std::string> entries) {
  std::vector<VocabEntry> vocab;
  vocab.reserve(entries.size());
  for (const auto& entry : entries) vocab.push_back({split_words(escape_field(entry)), &entry});
  std::stable_sort(vocab.begin(), vocab.end(), [](const VocabEntry& a, const VocabEntry& b) {
    return a.words.size() > b.words.size();
  });
  return vocab;
}

struct CubeItemParser {
  const std::vector<std::string>& words;
  const std::vector<VocabEntry>& col_vocab;
  const std::vector<VocabEntry>& row_vocab;
  std::vector<bool> numeric_suffix;  // [i] = words[i..] all plain numbers
  ParsedCubeItem result;

  bool matches(size_t pos, const VocabEntry& entry) const {
    if (pos + entry.words.size() > words.size()) return false;
    return std::equal(entry.words.begin(), entry.words.end(), words.begin() + pos);
  }

  bool parse_operands(size_t pos) {
    if (pos >= words.size() || !numeric_suffix[pos]) return false;
    for (size_t i = pos; i < words.size(); ++i) {
      auto value = parse_double(words[i]);
      if (!value) return false;
      result.operand_values.push_back(*value);
    }
    return true;
  }

  bool parse_row_headers(size_t pos) {
    for (const auto& entry : row_vocab) {
      if (!matches(pos, entry)) continue;
      result.row_headers.push_back(*entry.original);
      if (parse_row_headers(pos + entry.words.size())) return true;
      result.row_headers.pop_back();
    }
    size_t mark = result.operand_values.size();
    if (parse_operands(pos)) return true;
    result.operand_values.resize(mark);
    return false;
  }

  bool parse_col_headers(size_t pos) {
    for (const auto& entry : col_vocab) {
      if (!matches(pos, entry)) continue;
      result.col_headers.push_back(*entry.original);
      if (parse_col_headers(pos + entry.words.size())) return true;
      result.col_headers.pop_back();
    }
    return parse_row_headers(pos);
  }
};

}  // namespace

std::optional<ParsedCubeItem> parse_cube_item(std::string_view text,
                                              std::span<const std::string> col_header_vocab,
                                              std::span<const std::string> row_header_vocab) {
  constexpr std::string_view kCube = "[CUBE] ";
  constexpr std::string_view kAnswer = " [ANSWER] : ";
  if (!text.starts_with(kCube)) return std::nullopt;
  size_t answer_at = text.rfind(kAnswer);
  if (answer_at == std::string_view::npos || answer_at < kCube.size()) return std::nullopt;
  auto answer = parse_double(text.substr(answer_at + kAnswer.size()));
  if (!answer) return std::nullopt;

  std::vector<std::string> words =
      split_words(text.substr(kCube.size(), answer_at - kCube.size()));
  if (words.empty()) return std::nullopt;
  auto op = operator_from_string(words[0]);
  if (!op) return std::nullopt;

  auto col_vocab = prepare_vocab(col_header_vocab);
  auto row_vocab = prepare_vocab(row_header_vocab);
  CubeItemParser parser{words, col_vocab, row_vocab, {}, {}};
  parser.numeric_suffix.assign(words.size() + 1, false);
  for (size_t i = words.size(); i-- > 1;) {
    parser.numeric_suffix[i] =
        is_plain_number(words[i]) && (i + 1 == words.size() || parser.numeric_suffix[i + 1]);
  }
  parser.result.op = *op;
  parser.result.answer = *answer;
  if (!parser.parse_col_headers(1)) return std::nullopt;
  return parser.result;
}

}  // namespace tacube
