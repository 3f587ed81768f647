#include "tacube/oracle.hpp"

#include <bit>
#include <cstdio>
#include <map>
#include <utility>

namespace tacube {

namespace {

constexpr const char* kHeaderWords[] = {"revenue", "cost",  "profit", "units",  "growth",
                                        "score",   "price", "margin", "assets", "cash"};
constexpr const char* kRowWords[] = {"north", "south", "east",  "west", "alpha",
                                     "bravo", "paris", "tokyo", "oslo", "rome"};
constexpr const char* kTextCells[] = {"DNF", "n/a", "", "pending", "total sales", "yes"};

int pick_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

std::string random_cell(std::mt19937_64& rng) {
  int shape = pick_int(rng, 0, 9);
  char buf[64];
  switch (shape) {
    case 0:
    case 1:
    case 2:
      return std::to_string(pick_int(rng, 0, 9999));
    case 3: {
      std::snprintf(buf, sizeof(buf), "%d.%02d", pick_int(rng, 0, 999), pick_int(rng, 0, 99));
      return buf;
    }
    case 4: {
      std::snprintf(buf, sizeof(buf), "%d,%03d", pick_int(rng, 1, 99), pick_int(rng, 0, 999));
      return buf;
    }
    case 5: {
      std::snprintf(buf, sizeof(buf), "$%d", pick_int(rng, 1, 5000));
      return buf;
    }
    case 6: {
      std::snprintf(buf, sizeof(buf), "%d%%", pick_int(rng, 0, 100));
      return buf;
    }
    case 7: {
      std::snprintf(buf, sizeof(buf), "(%d.%d)", pick_int(rng, 1, 99), pick_int(rng, 0, 9));
      return buf;
    }
    default:
      return kTextCells[pick_int(rng, 0, static_cast<int>(std::size(kTextCells)) - 1)];
  }
}

}  // namespace

TablePtr random_table(std::mt19937_64& rng, int max_rows, int max_cols) {
  int n_rows = pick_int(rng, 1, max_rows);
  int n_cols = pick_int(rng, 1, max_cols);

  std::vector<std::string> headers;
  headers.reserve(static_cast<size_t>(n_cols));
  headers.emplace_back("name");
  for (int c = 1; c < n_cols; ++c) {
    std::string word = kHeaderWords[pick_int(rng, 0, static_cast<int>(std::size(kHeaderWords)) - 1)];
    headers.push_back(word + " " + std::to_string(c));
  }

  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<size_t>(n_rows));
  for (int r = 0; r < n_rows; ++r) {
    std::vector<std::string> cells;
    cells.reserve(static_cast<size_t>(n_cols));
    std::string word = kRowWords[pick_int(rng, 0, static_cast<int>(std::size(kRowWords)) - 1)];
    cells.push_back(word + " " + std::to_string(r + 1));
    for (int c = 1; c < n_cols; ++c) cells.push_back(random_cell(rng));
    rows.push_back(std::move(cells));
  }
  return std::make_shared<const Table>("random", std::move(headers), rows);
}

std::string random_question(std::mt19937_64& rng, const Table& table) {
  static constexpr const char* kOpenings[] = {
      "how many entries of", "what is the total", "what is the average",
      "what is the difference between", "what is the ratio of",
      "what was the percentage change in", "what is the sum of", "which value of"};
  std::string q = kOpenings[pick_int(rng, 0, static_cast<int>(std::size(kOpenings)) - 1)];
  q += ' ';
  q += table.header(pick_int(rng, 0, table.n_cols() - 1));
  q += " for ";
  q += table.row_header(pick_int(rng, 0, table.n_rows() - 1));
  if (table.n_rows() > 1 && pick_int(rng, 0, 1) == 1) {
    q += " and ";
    q += table.row_header(pick_int(rng, 0, table.n_rows() - 1));
  }
  q += '?';
  return q;
}

OracleCheckResult oracle_check(const OracleCheckOptions& options) {
  std::mt19937_64 rng(options.seed);
  OracleCheckResult result;

  auto key_of = [](const CubeItem& item) {
    std::string key(to_string(item.op));
    for (const auto& operand : item.operands) {
      key += '|';
      key += std::to_string(operand.ref.row);
      key += ':';
      key += std::to_string(operand.ref.col);
    }
    return key;
  };

  for (int t = 0; t < options.tables; ++t) {
    TablePtr table = random_table(rng, options.max_rows, options.max_cols);
    std::string question = random_question(rng, *table);

    std::vector<CubeItem> generated = generate_cube(question, *table);
    std::vector<CubeItem> oracle = brute_force_cube(*table, kAllOperators);

    std::map<std::string, std::uint64_t> oracle_results;
    for (const auto& item : oracle)
      oracle_results.emplace(key_of(item), std::bit_cast<std::uint64_t>(item.result));

    ++result.tables;
    for (const auto& item : generated) {
      ++result.items_checked;
      auto it = oracle_results.find(key_of(item));
      bool missing = it == oracle_results.end();
      bool mismatched = !missing && it->second != std::bit_cast<std::uint64_t>(item.result);
      if (missing || mismatched) {
        ++result.violations;
        if (result.examples.size() < 5) {
          result.examples.push_back("table " + std::to_string(t) + " item " + key_of(item) +
                                    (missing ? " missing from oracle" : " result mismatch"));
        }
      }
    }
  }
  return result;
}

}  // namespace tacube
