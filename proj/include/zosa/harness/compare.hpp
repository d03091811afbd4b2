#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace zosa::harness {

struct CompareRow {
  std::string optimizer;
  std::string objective;
  std::size_t runs = 0;
  double mean_final_gap = 0.0;
  double median_final_gap = 0.0;
  double mean_queries = 0.0;
};

// Scans `dir` recursively for trace files and tabulates final gaps (final
// loss when a trace has no gap column values) and query counts, grouped by
// optimizer and objective, sorted by median final gap.
std::vector<CompareRow> compare_traces(const std::filesystem::path& dir);

std::string render_table(const std::vector<CompareRow>& rows);

}  // namespace zosa::harness
