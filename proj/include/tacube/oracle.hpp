#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tacube/cube.hpp"
#include "tacube/table.hpp"

namespace tacube {

// Random mixed numeric/text table for generator-vs-oracle equivalence runs.
TablePtr random_table(std::mt19937_64& rng, int max_rows, int max_cols);

// Synthesizes a question mentioning the table's headers plus operator
// trigger phrases, so generation exercises the full analysis path.
std::string random_question(std::mt19937_64& rng, const Table& table);

struct OracleCheckOptions {
  int tables = 1000;
  int max_rows = 6;
  int max_cols = 6;
  std::uint64_t seed = 6180339887;
};

struct OracleCheckResult {
  int tables = 0;
  long long items_checked = 0;
  int violations = 0;
  std::vector<std::string> examples;  // first few violating items
};

// Every generated item must appear in the exhaustive enumeration with a
// bit-identical result.
OracleCheckResult oracle_check(const OracleCheckOptions& options = {});

}  // namespace tacube
