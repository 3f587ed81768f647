#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tacube/table.hpp"

namespace tacube {

enum class OperatorKind { count, sum, average, add, diff, div, change_ratio };
enum class OperatorGroup { aggr, ext };

// add and sum are deliberately distinct kinds: sum aggregates a selection,
// add combines filtered candidate cells.
inline constexpr std::array<OperatorKind, 7> kAllOperators = {
    OperatorKind::count, OperatorKind::sum,  OperatorKind::average, OperatorKind::add,
    OperatorKind::diff,  OperatorKind::div,  OperatorKind::change_ratio};

OperatorGroup group_of(OperatorKind kind);
std::string_view to_string(OperatorKind kind);
std::optional<OperatorKind> operator_from_string(std::string_view name);

// Operator trigger phrases. Phrases are token sequences matched contiguously
// against the normalized question; pair triggers fire when one token from each
// side co-occurs anywhere in the question (e.g. "increase" + "percentage").
struct TriggerLexicon {
  std::map<OperatorKind, std::vector<std::vector<std::string>>> phrases;
  struct PairTrigger {
    OperatorKind op;
    std::vector<std::string> first_any;
    std::vector<std::string> second_any;
  };
  std::vector<PairTrigger> pair_triggers;

  static TriggerLexicon defaults();
};

struct MatchOptions {
  double fuzzy_threshold = 0.85;  // normalized edit similarity for single tokens
};

struct AnalysisOptions {
  TriggerLexicon lexicon = TriggerLexicon::defaults();
  MatchOptions match;
};

struct MatchEvidence {
  std::string question_ngram;
  std::string table_string;
  double score = 0.0;
};

struct QuestionAnalysis {
  std::string raw;
  std::vector<std::string> tokens;
  std::vector<OperatorKind> operators;  // unique, in canonical operator order
  std::vector<int> candidate_rows;      // score desc, then index asc
  std::vector<int> candidate_cols;
  std::vector<MatchEvidence> evidence;
  std::vector<std::pair<OperatorKind, std::string>> trigger_log;
};

// Lowercases, strips punctuation, splits on whitespace. Number runs are kept
// as single tokens with thousand-separator commas removed; '%' becomes its
// own token.
std::vector<std::string> normalize(std::string_view question);

std::vector<OperatorKind> detect_operators(std::span<const std::string> tokens,
                                           const TriggerLexicon& lexicon);
std::vector<OperatorKind> detect_operators(std::span<const std::string> tokens,
                                           const TriggerLexicon& lexicon,
                                           std::vector<std::pair<OperatorKind, std::string>>* log);

// Fills candidate_rows / candidate_cols / evidence. A row is a candidate iff
// its row-header cell or any of its cells matches a question n-gram; columns
// likewise via headers and cell values.
void match_candidates(QuestionAnalysis& analysis, const Table& table,
                      const MatchOptions& options = {});

QuestionAnalysis analyze_question(std::string_view question, const Table& table,
                                  const AnalysisOptions& options = {});

// Normalized Levenshtein similarity in [0,1].
double edit_similarity(std::string_view a, std::string_view b);

}  // namespace tacube
