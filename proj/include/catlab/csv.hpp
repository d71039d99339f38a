#pragma once

#include <map>
#include <string>
#include <vector>

#include "catlab/harness.hpp"

namespace catlab {

inline constexpr const char* kRunsHeader =
    "run_id,algo,env,T,seed,regret_add,regret_mul,queries,diam_s,wall_ms,bounds_ok";
inline constexpr const char* kAggregateHeader =
    "algo,env,T,n_seeds,mean_regret_add,stderr_regret_add,mean_queries,stderr_queries";

std::string runs_row(const RunRecord& r, bool timing);
std::string aggregate_row(const AggregateRow& r);

// Appends rows to `path`, writing the header first when the file is new or
// empty. A non-empty file with a different header is an error.
void append_runs(const std::string& path, const std::vector<RunRecord>& records, bool timing);
void write_aggregates(const std::string& path, const std::vector<AggregateRow>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a column; ArgumentError listing the columns found otherwise.
  std::size_t column(const std::string& name) const;
  std::vector<double> numbers(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace catlab
