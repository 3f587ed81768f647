#include "tacube/eval.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace tacube {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

struct DerivationToken {
  char kind;        // 'n' number, or one of '+', '-', '/', '*', '(', ')'
  std::string text; // raw number text for kind 'n'
};

// Numbers keep currency/comma/percent decorations as written; anything not in
// the derivation grammar aborts tokenization.
std::optional<std::vector<DerivationToken>> tokenize_derivation(std::string_view derivation) {
  std::vector<DerivationToken> tokens;
  size_t i = 0;
  while (i < derivation.size()) {
    char c = derivation[i];
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    if (c == '+' || c == '-' || c == '/' || c == '*' || c == '(' || c == ')') {
      tokens.push_back({c, {}});
      ++i;
      continue;
    }
    if (is_digit(c) || c == '$') {
      size_t start = i;
      if (derivation[i] == '$') ++i;
      if (i >= derivation.size() || !is_digit(derivation[i])) return std::nullopt;
      while (i < derivation.size() &&
             (is_digit(derivation[i]) || derivation[i] == ',' || derivation[i] == '.'))
        ++i;
      if (i < derivation.size() && derivation[i] == '%') ++i;
      tokens.push_back({'n', std::string(derivation.substr(start, i - start))});
      continue;
    }
    return std::nullopt;
  }
  return tokens;
}

// Signs merge into the following number so '-' tokens that survive are
// genuine subtractions.
void merge_signs(std::vector<DerivationToken>& tokens) {
  std::vector<DerivationToken> merged;
  for (size_t i = 0; i < tokens.size(); ++i) {
    bool sign_position = merged.empty() || merged.back().kind == '(' ||
                         merged.back().kind == '+' || merged.back().kind == '-' ||
                         merged.back().kind == '/' || merged.back().kind == '*';
    if (tokens[i].kind == '-' && sign_position && i + 1 < tokens.size() &&
        tokens[i + 1].kind == 'n') {
      merged.push_back({'n', "-" + tokens[i + 1].text});
      ++i;
      continue;
    }
    merged.push_back(tokens[i]);
  }
  tokens = std::move(merged);
}

bool parses_as_integer(std::string_view text, long long& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

bool within_tolerance(double x, double v, const Tolerance& tol) {
  return std::abs(x - v) <= std::max(tol.abs, tol.rel * std::abs(v));
}

std::vector<NumericValue> gold_numeric_values(const GoldAnswer& gold) {
  std::vector<NumericValue> values;
  for (const auto& value : gold.values) {
    if (auto parsed = parse_numeric(value)) values.push_back(*parsed);
  }
  return values;
}

bool coverage_eligible(const GoldAnswer& gold) { return !gold_numeric_values(gold).empty(); }

bool answer_matches(const GoldAnswer& gold, double result, OperatorKind op,
                    const Tolerance& tol) {
  Scale gold_scale =
      gold.scale ? scale_from_string(*gold.scale).value_or(Scale::none) : Scale::none;
  for (const auto& nv : gold_numeric_values(gold)) {
    double v = nv.value();
    if (within_tolerance(result, v, tol)) return true;
    if (nv.scale != Scale::none && within_tolerance(result, v * scale_multiplier(nv.scale), tol))
      return true;
    if (gold_scale != Scale::none &&
        within_tolerance(result, v * scale_multiplier(gold_scale), tol))
      return true;
    bool percent_gold = nv.scale == Scale::percent || gold_scale == Scale::percent;
    bool ratio_op = op == OperatorKind::div || op == OperatorKind::change_ratio;
    if (percent_gold && ratio_op && within_tolerance(result * 100.0, v, tol)) return true;
  }
  return false;
}

bool answer_matches(const GoldAnswer& gold, const CubeItem& item, const Tolerance& tol) {
  return answer_matches(gold, item.result, item.op, tol);
}

namespace {

bool derivation_has_arithmetic(std::string_view derivation) {
  auto tokens = tokenize_derivation(derivation);
  if (!tokens) {
    // Fall back to a raw scan for derivations outside the strict grammar.
    bool digit = derivation.find_first_of("0123456789") != std::string_view::npos;
    bool op = derivation.find_first_of("+/*") != std::string_view::npos;
    return digit && op;
  }
  merge_signs(*tokens);
  return std::any_of(tokens->begin(), tokens->end(), [](const DerivationToken& t) {
    return t.kind == '+' || t.kind == '-' || t.kind == '/' || t.kind == '*';
  });
}

}  // namespace

bool is_arithmetic_case(const QAInstance& instance) {
  if (!instance.gold) return false;
  const GoldAnswer& gold = *instance.gold;
  if (gold.answer_type == AnswerType::arithmetic || gold.answer_type == AnswerType::count)
    return true;
  return gold.derivation && !gold.derivation->empty() &&
         derivation_has_arithmetic(*gold.derivation);
}

std::optional<OperatorKind> operator_from_derivation(std::string_view derivation) {
  auto tokens_opt = tokenize_derivation(derivation);
  if (tokens_opt) {
    auto& tokens = *tokens_opt;
    merge_signs(tokens);
    auto is_n = [&](size_t i) { return i < tokens.size() && tokens[i].kind == 'n'; };
    auto is_k = [&](size_t i, char k) { return i < tokens.size() && tokens[i].kind == k; };

    // (a - b) / c with b == c as written
    if (tokens.size() == 7 && is_k(0, '(') && is_n(1) && is_k(2, '-') && is_n(3) &&
        is_k(4, ')') && is_k(5, '/') && is_n(6) && tokens[3].text == tokens[6].text)
      return OperatorKind::change_ratio;

    // (a1 + a2 + ... + an) / n
    if (tokens.size() >= 6 && is_k(0, '(') && is_n(1)) {
      size_t i = 2;
      size_t addends = 1;
      while (is_k(i, '+') && is_n(i + 1)) {
        ++addends;
        i += 2;
      }
      if (addends >= 2 && is_k(i, ')') && is_k(i + 1, '/') && is_n(i + 2) &&
          i + 3 == tokens.size()) {
        long long n = 0;
        if (parses_as_integer(tokens[i + 2].text, n) &&
            n == static_cast<long long>(addends))
          return OperatorKind::average;
      }
    }

    bool has_div = false, has_plus = false, has_minus = false;
    for (const auto& t : tokens) {
      has_div |= t.kind == '/';
      has_plus |= t.kind == '+';
      has_minus |= t.kind == '-';
    }
    if (has_div) return OperatorKind::div;
    if (has_plus) return OperatorKind::sum;
    if (has_minus) return OperatorKind::diff;
    return std::nullopt;
  }

  // Outside the strict grammar: keyword scan only.
  if (derivation.find('/') != std::string_view::npos) return OperatorKind::div;
  if (derivation.find('+') != std::string_view::npos) return OperatorKind::sum;
  return std::nullopt;
}

std::optional<OperatorKind> operator_from_sql(std::string_view sql) {
  std::string lower = lowercase(sql);
  struct Keyword {
    std::string_view text;
    OperatorKind op;
  };
  static constexpr Keyword kKeywords[] = {{"count(", OperatorKind::count},
                                          {"count (", OperatorKind::count},
                                          {"sum(", OperatorKind::sum},
                                          {"sum (", OperatorKind::sum},
                                          {"avg(", OperatorKind::average},
                                          {"avg (", OperatorKind::average}};
  size_t best_pos = std::string::npos;
  std::optional<OperatorKind> best;
  for (const auto& kw : kKeywords) {
    size_t pos = lower.find(kw.text);
    if (pos != std::string::npos && pos < best_pos) {
      best_pos = pos;
      best = kw.op;
    }
  }
  return best;
}

std::optional<OperatorKind> extract_gold_operator(const QAInstance& instance) {
  if (!instance.gold) return std::nullopt;
  const GoldAnswer& gold = *instance.gold;
  if (gold.answer_type == AnswerType::count) return OperatorKind::count;
  if (gold.derivation && !gold.derivation->empty()) {
    if (auto op = operator_from_derivation(*gold.derivation)) return op;
  }
  if (gold.sql && !gold.sql->empty()) {
    if (auto op = operator_from_sql(*gold.sql)) return op;
  }
  return std::nullopt;
}

InstanceEvaluation evaluate_instance(const QAInstance& instance,
                                     std::span<const CubeItem> full_cube,
                                     const RankedCube* ranked, const EvaluateOptions& options) {
  InstanceEvaluation ev;
  ev.has_gold = instance.gold.has_value();
  if (!ev.has_gold) return ev;
  ev.extracted = !full_cube.empty();
  ev.gold_op = extract_gold_operator(instance);
  bool subset_ok = !options.arithmetic_subset_only || is_arithmetic_case(instance);
  ev.eligible = subset_ok && coverage_eligible(*instance.gold);
  if (!ev.eligible) return ev;
  for (const auto& item : full_cube) {
    if (answer_matches(*instance.gold, item, options.tol)) {
      ev.covered = true;
      break;
    }
  }
  if (ranked != nullptr) {
    for (size_t i = 0; i < ranked->items.size(); ++i) {
      if (answer_matches(*instance.gold, ranked->items[i].item, options.tol)) {
        ev.first_covering_rank = static_cast<int>(i) + 1;
        break;
      }
    }
  }
  return ev;
}

CoverageReport aggregate_coverage(std::span<const InstanceEvaluation> evaluations,
                                  const EvaluateOptions& options, int k_max) {
  CoverageReport report;
  for (const auto& ev : evaluations) {
    if (!ev.has_gold) continue;
    ++report.total;
    if (!ev.eligible) continue;
    ++report.eligible;
    if (ev.extracted) ++report.cube_extracted;
    if (ev.covered) ++report.covered;
    if (ev.gold_op) {
      auto& stats = report.per_operator[std::string(to_string(*ev.gold_op))];
      ++stats.total;
      if (ev.covered) ++stats.covered;
    }
  }
  report.no_eligible_cases = report.eligible == 0;
  if (report.eligible > 0)
    report.coverage_eligible = static_cast<double>(report.covered) / report.eligible;
  if (report.cube_extracted > 0)
    report.coverage_extracted = static_cast<double>(report.covered) / report.cube_extracted;
  int denominator = options.denominator == EvaluateOptions::Denominator::eligible
                        ? report.eligible
                        : report.cube_extracted;
  report.coverage = options.denominator == EvaluateOptions::Denominator::eligible
                        ? report.coverage_eligible
                        : report.coverage_extracted;
  for (int k = 1; k <= k_max; ++k) {
    int covered_at_k = 0;
    for (const auto& ev : evaluations) {
      if (ev.eligible && ev.first_covering_rank >= 1 && ev.first_covering_rank <= k)
        ++covered_at_k;
    }
    double ratio = denominator > 0 ? static_cast<double>(covered_at_k) / denominator : 0.0;
    report.per_k.emplace_back(k, ratio);
  }
  return report;
}

CoverageReport evaluate_coverage(std::span<const QAInstance> instances,
                                 std::span<const std::vector<CubeItem>> cubes,
                                 std::span<const RankedCube> ranked,
                                 const EvaluateOptions& options) {
  if (cubes.size() != instances.size())
    throw std::invalid_argument("evaluate_coverage: cubes must parallel instances");
  if (!ranked.empty() && ranked.size() != instances.size())
    throw std::invalid_argument("evaluate_coverage: ranked must parallel instances or be empty");
  std::vector<InstanceEvaluation> evaluations;
  evaluations.reserve(instances.size());
  int k_max = 0;
  for (size_t i = 0; i < instances.size(); ++i) {
    const RankedCube* rc = ranked.empty() ? nullptr : &ranked[i];
    if (rc != nullptr) k_max = std::max(k_max, rc->k);
    evaluations.push_back(evaluate_instance(instances[i], cubes[i], rc, options));
  }
  CoverageReport report = aggregate_coverage(evaluations, options, k_max);
  report.ingested = static_cast<int>(instances.size());
  report.processed = static_cast<int>(instances.size());
  return report;
}

std::map<std::string, std::string> load_failure_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open annotation file: " + path.string());
  std::map<std::string, std::string> annotations;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t comma = line.find(',');
    if (comma == std::string::npos) continue;
    std::string id = line.substr(0, comma);
    std::string tag = line.substr(comma + 1);
    auto trim = [](std::string& s) {
      size_t b = s.find_first_not_of(" \t\"");
      size_t e = s.find_last_not_of(" \t\"");
      s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    trim(id);
    trim(tag);
    if (first && lowercase(id) == "id" && lowercase(tag) == "tag") {
      first = false;
      continue;
    }
    first = false;
    if (!id.empty() && !tag.empty()) annotations[id] = tag;
  }
  return annotations;
}

void tally_failure_tags(CoverageReport& report,
                        const std::map<std::string, std::string>& annotations,
                        std::span<const std::string> uncovered_ids) {
  for (const auto& id : uncovered_ids) {
    auto it = annotations.find(id);
    if (it != annotations.end()) ++report.failure_tags[it->second];
  }
}

}  // namespace tacube
