#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tacube/cube.hpp"

namespace tacube {

enum class RankerMode { heuristic, external };

std::string_view to_string(RankerMode mode);

struct ScoredItem {
  CubeItem item;
  double score = 0.0;
};

struct RankedCube {
  std::vector<ScoredItem> items;  // |items| <= k, scores non-increasing
  int k = 0;
  RankerMode ranker = RankerMode::heuristic;
};

// Stable 64-bit fingerprint of (operator, pattern, ordered operand cell refs),
// hex-encoded; the handle external scorers use to reference generated items.
std::string item_fingerprint(const CubeItem& item);

// Per-instance TF-IDF model: raw term frequency, smoothed idf ln(1 + N/df),
// L2-normalized cosine. The document universe is the question plus every
// candidate item sequence of this instance.
class HeuristicScorer {
 public:
  HeuristicScorer(std::string_view question, std::span<const CubeItem> items,
                  bool idf_smooth = true);

  double score(size_t item_index) const { return scores_.at(item_index); }

 private:
  std::vector<double> scores_;
};

// TF-IDF cosine similarity in [0,1] between the question and the item's
// flattened sequence, scored within the instance's candidate universe.
double score_heuristic(std::string_view question, const CubeItem& item,
                       std::span<const CubeItem> all_items);

// File-based stand-in for the trained neural ranker: JSONL, one record per
// instance: {"id": ..., "scores": [{"fp": ..., "label": 0|1, "logit": ...}]}.
struct ExternalScoreSet {
  struct Entry {
    std::string fp;
    int label = 0;
    double logit = 0.0;
  };
  std::unordered_map<std::string, std::vector<Entry>> by_instance;

  static ExternalScoreSet load(const std::filesystem::path& path);
  bool has(const std::string& instance_id) const { return by_instance.count(instance_id) > 0; }
};

struct RankOutcome {
  RankedCube cube;
  std::vector<std::string> warnings;  // unresolved fingerprints, fallbacks
  bool fell_back_to_heuristic = false;
};

// Heuristic mode sorts by TF-IDF score; external mode by (label, logit).
// Both are stable: ties keep generation order. Output is truncated to k.
// External mode falls back to heuristic (with a warning) when the score set
// has no entry for the instance.
RankOutcome rank(std::string_view question, std::span<const CubeItem> items, int k,
                 RankerMode mode, const ExternalScoreSet* external = nullptr,
                 std::string_view instance_id = {}, bool idf_smooth = true);

}  // namespace tacube
