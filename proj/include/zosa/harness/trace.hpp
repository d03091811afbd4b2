#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "zosa/optimizers.hpp"

namespace zosa::harness {

// Column order of every trace file.
inline constexpr const char* kTraceColumns =
    "iter,loss,gap,sigma,sigma_pert,eps_sam_norm,queries_cum,cos_true,wall_ms";

// Rows written for a run of `iterations` steps: every row up to iteration
// 1000, then every ceil(iterations / 1000)-th, and always the last row.
std::vector<TraceRow> subsample(const std::vector<TraceRow>& rows, std::uint64_t iterations);

// CSV rendering of one row; optional fields are left empty, reals use 17
// significant digits.
std::string format_row(const TraceRow& row);

/// Writes `# key=value` header lines, the column header, then the rows.
void write_trace(const std::filesystem::path& path, const std::vector<std::string>& settings,
                 const std::vector<TraceRow>& rows);

struct TraceFile {
  std::map<std::string, std::string> settings;
  std::vector<TraceRow> rows;
};

// Parses a file produced by write_trace; throws Error on schema mismatch.
TraceFile read_trace(const std::filesystem::path& path);

}  // namespace zosa::harness
