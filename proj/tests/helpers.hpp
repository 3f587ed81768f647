#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tacube/table.hpp"

namespace test_helpers {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(TACUBE_FIXTURE_DIR) / name;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

inline tacube::Table make_table(std::vector<std::string> headers,
                                const std::vector<std::vector<std::string>>& rows,
                                std::string id = "t") {
  return tacube::Table(std::move(id), std::move(headers), rows);
}

// The worked example used across suites: three cities, passenger counts.
inline tacube::Table airlines_table() {
  return make_table({"City", "Passengers"},
                    {{"Los Angles", "1.2"}, {"Toronto", "0.5"}, {"Boston", "2.0"}}, "airlines");
}

inline tacube::Table revenue_table() {
  return make_table({"Year", "Revenue"}, {{"2019", "100"}}, "revenue");
}

}  // namespace test_helpers
