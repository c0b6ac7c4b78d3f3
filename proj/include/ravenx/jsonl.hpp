#pragma once

#include <filesystem>
#include <vector>

#include "ravenx/puzzle.hpp"

namespace ravenx {

/// Reads one puzzle per non-empty line. Errors carry the line number.
std::vector<Puzzle> read_puzzles(const std::filesystem::path& path);
void write_puzzles(const std::filesystem::path& path, const std::vector<Puzzle>& puzzles);

std::vector<EvalRecord> read_records(const std::filesystem::path& path);
void write_records(const std::filesystem::path& path, const std::vector<EvalRecord>& records);

}  // namespace ravenx
