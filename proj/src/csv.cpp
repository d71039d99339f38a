#include "catlab/csv.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace catlab {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string read_first_line(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

std::ofstream open_for_append(const std::string& path, const char* header) {
  ensure_parent(path);
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  if (!fresh && read_first_line(path) != header) {
    throw ArgumentError(fmt::format("{} already holds a different CSV layout", path));
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw ArgumentError(fmt::format("cannot write {}", path));
  if (fresh) out << header << '\n';
  return out;
}

}  // namespace

std::string runs_row(const RunRecord& r, bool timing) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", r.run_id, r.algo, r.env, r.T, r.seed, r.regret_add,
                     r.regret_mul.to_string(), r.queries, r.diam_s, timing ? r.wall_ms : 0.0,
                     r.bounds_ok() ? "true" : "false");
}

std::string aggregate_row(const AggregateRow& r) {
  return fmt::format("{},{},{},{},{},{},{},{}", r.algo, r.env, r.T, r.n_seeds, r.mean_regret_add,
                     r.stderr_regret_add, r.mean_queries, r.stderr_queries);
}

void append_runs(const std::string& path, const std::vector<RunRecord>& records, bool timing) {
  std::ofstream out = open_for_append(path, kRunsHeader);
  for (const RunRecord& r : records) out << runs_row(r, timing) << '\n';
}

void write_aggregates(const std::string& path, const std::vector<AggregateRow>& rows) {
  std::ofstream out = open_for_append(path, kAggregateHeader);
  for (const AggregateRow& r : rows) out << aggregate_row(r) << '\n';
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  std::string found;
  for (const auto& h : header) found += (found.empty() ? "" : ", ") + h;
  throw ArgumentError(fmt::format("no column '{}'; found: {}", name, found));
}

std::vector<double> CsvTable::numbers(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    if (c >= row.size()) throw ArgumentError(fmt::format("short row in column '{}'", name));
    out.push_back(ExtendedReal::parse(row[c]).to_double());
  }
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError(fmt::format("cannot read {}", path));
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError(fmt::format("{} is empty", path));
  table.header = split_line(line);
  while (std::getline(in, line)) {
    if (!line.empty()) table.rows.push_back(split_line(line));
  }
  return table;
}

}  // namespace catlab
