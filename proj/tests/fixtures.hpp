#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "ravenx/jsonl.hpp"

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(RAVENX_FIXTURE_DIR) + "/" + name; }

inline ravenx::Puzzle puzzle(const std::string& name) {
  return ravenx::read_puzzles(path(name + ".jsonl")).at(0);
}

inline std::string expected_prompt(const std::string& name) {
  std::ifstream in(path(name + ".prompt.txt"), std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const char* const kNames[] = {"iraven_plain_3x3", "iravenx_plain_3x10",
                                     "iravenx_confounders_3x10", "iravenx_probabilistic_3x10"};

}  // namespace fixtures
