#include "tacube/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "tacube/question.hpp"
#include "tacube/serialize.hpp"

namespace tacube {

namespace {

using TermCounts = std::unordered_map<std::string, int>;

TermCounts term_counts(std::string_view text) {
  TermCounts counts;
  for (auto& token : normalize(text)) ++counts[token];
  return counts;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string to_hex(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::string_view to_string(RankerMode mode) {
  switch (mode) {
    case RankerMode::heuristic: return "heuristic";
    case RankerMode::external: return "external";
  }
  return "heuristic";
}

std::string item_fingerprint(const CubeItem& item) {
  std::string key;
  key += to_string(item.op);
  key += '|';
  key += to_string(item.pattern);
  for (const auto& operand : item.operands) {
    key += '|';
    key += std::to_string(operand.ref.row);
    key += ':';
    key += std::to_string(operand.ref.col);
  }
  return to_hex(fnv1a(key));
}

HeuristicScorer::HeuristicScorer(std::string_view question, std::span<const CubeItem> items,
                                 bool idf_smooth) {
  const size_t n_docs = items.size() + 1;  // the question is part of the universe
  TermCounts question_tf = term_counts(question);
  std::vector<TermCounts> item_tf;
  item_tf.reserve(items.size());
  for (const auto& item : items) item_tf.push_back(term_counts(linearize_cube_item(item)));

  TermCounts df;
  for (const auto& [term, _] : question_tf) ++df[term];
  for (const auto& tf : item_tf)
    for (const auto& [term, _] : tf) ++df[term];

  auto idf = [&](const std::string& term) {
    double ratio = static_cast<double>(n_docs) / static_cast<double>(df.at(term));
    return idf_smooth ? std::log(1.0 + ratio) : std::log(ratio);
  };
  auto weigh = [&](const TermCounts& tf) {
    std::unordered_map<std::string, double> weights;
    double norm_sq = 0.0;
    for (const auto& [term, count] : tf) {
      double w = count * idf(term);
      weights[term] = w;
      norm_sq += w * w;
    }
    return std::pair{std::move(weights), std::sqrt(norm_sq)};
  };

  auto [question_w, question_norm] = weigh(question_tf);
  scores_.reserve(items.size());
  for (const auto& tf : item_tf) {
    auto [item_w, item_norm] = weigh(tf);
    double dot = 0.0;
    for (const auto& [term, w] : item_w) {
      auto it = question_w.find(term);
      if (it != question_w.end()) dot += w * it->second;
    }
    double denom = question_norm * item_norm;
    double cosine = denom > 0.0 ? dot / denom : 0.0;
    scores_.push_back(std::clamp(cosine, 0.0, 1.0));
  }
}

double score_heuristic(std::string_view question, const CubeItem& item,
                       std::span<const CubeItem> all_items) {
  HeuristicScorer scorer(question, all_items);
  for (size_t i = 0; i < all_items.size(); ++i) {
    if (&all_items[i] == &item) return scorer.score(i);
  }
  // The item is scored against the given universe even when not a member of it.
  std::vector<CubeItem> extended(all_items.begin(), all_items.end());
  extended.push_back(item);
  return HeuristicScorer(question, extended).score(extended.size() - 1);
}

ExternalScoreSet ExternalScoreSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open score file: " + path.string());
  ExternalScoreSet set;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
      std::string id = record.at("id").is_string() ? record.at("id").get<std::string>()
                                                   : record.at("id").dump();
      std::vector<Entry> entries;
      for (const auto& score : record.at("scores")) {
        entries.push_back(Entry{score.at("fp").get<std::string>(), score.at("label").get<int>(),
                                score.at("logit").get<double>()});
      }
      set.by_instance[id] = std::move(entries);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("score file " + path.string() + " line " +
                               std::to_string(line_no) + ": " + e.what());
    }
  }
  return set;
}

RankOutcome rank(std::string_view question, std::span<const CubeItem> items, int k,
                 RankerMode mode, const ExternalScoreSet* external,
                 std::string_view instance_id, bool idf_smooth) {
  if (k < 1) throw std::invalid_argument("rank: k must be >= 1");
  RankOutcome outcome;
  outcome.cube.k = k;
  outcome.cube.ranker = mode;

  std::vector<double> scores(items.size(), 0.0);
  bool use_heuristic = mode == RankerMode::heuristic;

  if (mode == RankerMode::external) {
    const std::string id(instance_id);
    const std::vector<ExternalScoreSet::Entry>* entries = nullptr;
    if (external != nullptr) {
      auto it = external->by_instance.find(id);
      if (it != external->by_instance.end()) entries = &it->second;
    }
    if (entries == nullptr) {
      outcome.warnings.push_back("instance '" + id +
                                 "': no external scores; falling back to heuristic ranking");
      use_heuristic = true;
    } else {
      std::unordered_map<std::string, double> by_fp;
      for (const auto& entry : *entries)
        by_fp.emplace(entry.fp, entry.label + sigmoid(entry.logit));
      size_t resolved = 0;
      for (size_t i = 0; i < items.size(); ++i) {
        auto it = by_fp.find(item_fingerprint(items[i]));
        if (it != by_fp.end()) {
          scores[i] = it->second;
          by_fp.erase(it);
          ++resolved;
        } else {
          scores[i] = -1.0;  // below every resolved score; stable sort keeps order
        }
      }
      std::vector<std::string> leftover;
      for (const auto& [fp, _] : by_fp) leftover.push_back(fp);
      std::sort(leftover.begin(), leftover.end());
      for (const auto& fp : leftover)
        outcome.warnings.push_back("instance '" + id + "': unresolved fingerprint '" + fp + "'");
      if (resolved == 0 && !items.empty() && !entries->empty()) {
        outcome.warnings.push_back("instance '" + id +
                                   "': no fingerprint resolved; falling back to heuristic ranking");
        use_heuristic = true;
      }
    }
    if (use_heuristic) {
      outcome.fell_back_to_heuristic = true;
      outcome.cube.ranker = RankerMode::heuristic;
    }
  }

  if (use_heuristic && !items.empty()) {
    HeuristicScorer scorer(question, items, idf_smooth);
    for (size_t i = 0; i < items.size(); ++i) scores[i] = scorer.score(i);
  }

  std::vector<size_t> order(items.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  size_t keep = std::min(order.size(), static_cast<size_t>(k));
  outcome.cube.items.reserve(keep);
  for (size_t i = 0; i < keep; ++i)
    outcome.cube.items.push_back(ScoredItem{items[order[i]], scores[order[i]]});
  return outcome;
}

}  // namespace tacube
