#include "ravenx/jsonl.hpp"

#include <fstream>
#include <string>

#include "ravenx/errors.hpp"

namespace ravenx {

namespace {

template <typename T, typename Parse>
std::vector<T> read_lines(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<T> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(line));
    } catch (const SchemaError& e) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const InvariantError& e) {
      throw InvariantError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

template <typename T, typename Serialize>
void write_lines(const std::filesystem::path& path, const std::vector<T>& items,
                 Serialize serialize) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& item : items) out << serialize(item) << '\n';
}

}  // namespace

std::vector<Puzzle> read_puzzles(const std::filesystem::path& path) {
  return read_lines<Puzzle>(path, [](const std::string& l) { return deserialize_puzzle(l); });
}

void write_puzzles(const std::filesystem::path& path, const std::vector<Puzzle>& puzzles) {
  write_lines(path, puzzles, serialize_puzzle);
}

std::vector<EvalRecord> read_records(const std::filesystem::path& path) {
  return read_lines<EvalRecord>(path, [](const std::string& l) { return deserialize_record(l); });
}

void write_records(const std::filesystem::path& path, const std::vector<EvalRecord>& records) {
  write_lines(path, records, serialize_record);
}

}  // namespace ravenx
