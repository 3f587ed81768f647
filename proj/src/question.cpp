#include "tacube/question.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>

namespace tacube {

OperatorGroup group_of(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::count:
    case OperatorKind::sum:
    case OperatorKind::average:
      return OperatorGroup::aggr;
    case OperatorKind::add:
    case OperatorKind::diff:
    case OperatorKind::div:
    case OperatorKind::change_ratio:
      return OperatorGroup::ext;
  }
  return OperatorGroup::aggr;
}

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::count: return "count";
    case OperatorKind::sum: return "sum";
    case OperatorKind::average: return "average";
    case OperatorKind::add: return "add";
    case OperatorKind::diff: return "diff";
    case OperatorKind::div: return "div";
    case OperatorKind::change_ratio: return "change_ratio";
  }
  return "count";
}

std::optional<OperatorKind> operator_from_string(std::string_view name) {
  for (OperatorKind kind : kAllOperators) {
    if (name == to_string(kind)) return kind;
  }
  if (name == "change ratio") return OperatorKind::change_ratio;
  return std::nullopt;
}

namespace {

std::vector<std::vector<std::string>> split_phrases(std::initializer_list<const char*> list) {
  std::vector<std::vector<std::string>> out;
  for (const char* phrase : list) {
    out.push_back(normalize(phrase));
  }
  return out;
}

}  // namespace

TriggerLexicon TriggerLexicon::defaults() {
  TriggerLexicon lex;
  lex.phrases[OperatorKind::count] = split_phrases({"how many", "number of", "count"});
  // Sum-group triggers emit both sum and add; question text cannot tell the
  // aggregation apart from the filtered addition.
  auto sum_like = split_phrases({"total", "sum", "combined", "altogether", "in all"});
  lex.phrases[OperatorKind::sum] = sum_like;
  lex.phrases[OperatorKind::add] = sum_like;
  lex.phrases[OperatorKind::average] = split_phrases({"average", "mean"});
  lex.phrases[OperatorKind::diff] = split_phrases(
      {"difference", "differences", "more than", "less than", "fewer", "change", "changed",
       "increase", "increased", "decrease", "decreased"});
  lex.phrases[OperatorKind::div] =
      split_phrases({"ratio", "proportion", "percentage of", "percent of", "% of", "times"});
  lex.phrases[OperatorKind::change_ratio] =
      split_phrases({"percentage change", "percent change", "change ratio", "growth rate"});
  lex.pair_triggers.push_back(
      {OperatorKind::change_ratio,
       {"increase", "increased", "increases", "decrease", "decreased", "decreases", "change",
        "changed", "growth"},
       {"percent", "percentage", "%"}});
  return lex;
}

std::vector<std::string> normalize(std::string_view question) {
  std::vector<std::string> tokens;
  size_t i = 0;
  const size_t n = question.size();
  while (i < n) {
    unsigned char c = question[i];
    if (std::isdigit(c) || (c == '.' && i + 1 < n &&
                            std::isdigit(static_cast<unsigned char>(question[i + 1])))) {
      // Number run: digits with embedded thousand-separator commas and at
      // most one decimal point. Commas are dropped so "1,234" matches "1234".
      std::string tok;
      bool seen_dot = false;
      while (i < n) {
        unsigned char d = question[i];
        if (std::isdigit(d)) {
          tok += static_cast<char>(d);
          ++i;
        } else if (d == ',' && i + 1 < n &&
                   std::isdigit(static_cast<unsigned char>(question[i + 1]))) {
          ++i;  // separator comma
        } else if (d == '.' && !seen_dot && i + 1 < n &&
                   std::isdigit(static_cast<unsigned char>(question[i + 1]))) {
          tok += '.';
          seen_dot = true;
          ++i;
        } else {
          break;
        }
      }
      tokens.push_back(std::move(tok));
    } else if (std::isalpha(c) || c >= 0x80) {
      std::string tok;
      while (i < n) {
        unsigned char d = question[i];
        if (std::isalpha(d)) {
          tok += static_cast<char>(std::tolower(d));
          ++i;
        } else if (d >= 0x80) {
          tok += static_cast<char>(d);
          ++i;
        } else {
          break;
        }
      }
      tokens.push_back(std::move(tok));
    } else if (c == '%') {
      tokens.emplace_back("%");
      ++i;
    } else {
      ++i;
    }
  }
  return tokens;
}

namespace {

bool contains_contiguous(std::span<const std::string> haystack,
                         std::span<const std::string> needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  for (size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    bool match = true;
    for (size_t j = 0; j < needle.size(); ++j) {
      if (haystack[i + j] != needle[j]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

bool contains_any(std::span<const std::string> tokens, const std::vector<std::string>& words) {
  for (const auto& w : words) {
    if (std::find(tokens.begin(), tokens.end(), w) != tokens.end()) return true;
  }
  return false;
}

}  // namespace

std::vector<OperatorKind> detect_operators(std::span<const std::string> tokens,
                                           const TriggerLexicon& lexicon) {
  return detect_operators(tokens, lexicon, nullptr);
}

std::vector<OperatorKind> detect_operators(
    std::span<const std::string> tokens, const TriggerLexicon& lexicon,
    std::vector<std::pair<OperatorKind, std::string>>* log) {
  std::set<OperatorKind> found;
  for (const auto& [op, phrases] : lexicon.phrases) {
    for (const auto& phrase : phrases) {
      if (contains_contiguous(tokens, phrase)) {
        found.insert(op);
        if (log) log->emplace_back(op, join_tokens(phrase));
        break;
      }
    }
  }
  for (const auto& pair : lexicon.pair_triggers) {
    if (contains_any(tokens, pair.first_any) && contains_any(tokens, pair.second_any)) {
      if (found.insert(pair.op).second && log) {
        log->emplace_back(pair.op, join_tokens(pair.first_any) + " + " +
                                       join_tokens(pair.second_any));
      }
    }
  }
  // Canonical operator order keeps downstream enumeration deterministic.
  std::vector<OperatorKind> out;
  for (OperatorKind kind : kAllOperators) {
    if (found.count(kind)) out.push_back(kind);
  }
  return out;
}

double edit_similarity(std::string_view a, std::string_view b) {
  if (a == b) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const size_t la = a.size(), lb = b.size();
  std::vector<size_t> prev(lb + 1), cur(lb + 1);
  std::iota(prev.begin(), prev.end(), size_t{0});
  for (size_t i = 1; i <= la; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= lb; ++j) {
      size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
    }
    std::swap(prev, cur);
  }
  double dist = static_cast<double>(prev[lb]);
  return 1.0 - dist / static_cast<double>(std::max(la, lb));
}

namespace {

// Best match score of a table string against the question tokens: 1.0 for
// exact contiguous containment, else fuzzy similarity for single tokens.
std::optional<MatchEvidence> match_string(std::span<const std::string> question_tokens,
                                          const std::string& table_string,
                                          const MatchOptions& options) {
  std::vector<std::string> toks = normalize(table_string);
  if (toks.empty()) return std::nullopt;
  if (contains_contiguous(question_tokens, toks)) {
    return MatchEvidence{join_tokens(toks), table_string, 1.0};
  }
  if (toks.size() == 1) {
    double best = 0.0;
    std::string best_tok;
    for (const auto& q : question_tokens) {
      double sim = edit_similarity(q, toks.front());
      if (sim > best) {
        best = sim;
        best_tok = q;
      }
    }
    if (best >= options.fuzzy_threshold) {
      return MatchEvidence{best_tok, table_string, best};
    }
  }
  return std::nullopt;
}

struct Scored {
  int index;
  double score;
};

std::vector<int> order_candidates(std::vector<Scored>& scored) {
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.index < b.index;
  });
  std::vector<int> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back(s.index);
  return out;
}

}  // namespace

void match_candidates(QuestionAnalysis& analysis, const Table& table,
                      const MatchOptions& options) {
  const auto& q = analysis.tokens;
  std::vector<double> row_score(table.n_rows(), 0.0);
  std::vector<double> col_score(table.n_cols(), 0.0);

  auto record = [&](std::optional<MatchEvidence> ev, int row, int col) {
    if (!ev) return;
    if (row >= 0 && ev->score > row_score[row]) row_score[row] = ev->score;
    if (col >= 0 && ev->score > col_score[col]) col_score[col] = ev->score;
    analysis.evidence.push_back(std::move(*ev));
  };

  for (int j = 0; j < table.n_cols(); ++j) {
    record(match_string(q, table.header(j), options), -1, j);
  }
  for (int i = 0; i < table.n_rows(); ++i) {
    for (int j = 0; j < table.n_cols(); ++j) {
      record(match_string(q, table.cell(i, j).raw, options), i, j);
    }
  }

  std::vector<Scored> rows, cols;
  for (int i = 0; i < table.n_rows(); ++i) {
    if (row_score[i] > 0.0) rows.push_back({i, row_score[i]});
  }
  for (int j = 0; j < table.n_cols(); ++j) {
    if (col_score[j] > 0.0) cols.push_back({j, col_score[j]});
  }
  analysis.candidate_rows = order_candidates(rows);
  analysis.candidate_cols = order_candidates(cols);
}

QuestionAnalysis analyze_question(std::string_view question, const Table& table,
                                  const AnalysisOptions& options) {
  QuestionAnalysis analysis;
  analysis.raw = std::string(question);
  analysis.tokens = normalize(question);
  analysis.operators = detect_operators(analysis.tokens, options.lexicon, &analysis.trigger_log);
  match_candidates(analysis, table, options.match);
  return analysis;
}

}  // namespace tacube
