#include "zosa/harness/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "zosa/errors.hpp"
#include "zosa/harness/config.hpp"

namespace zosa::harness {

namespace {

std::string optional_real(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_real(const std::string& cell, const std::filesystem::path& path, const char* column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw Error(fmt::format("{}: column '{}' holds non-numeric value '{}'", path.string(), column, cell));
  }
}

std::optional<double> parse_optional(const std::string& cell, const std::filesystem::path& path,
                                     const char* column) {
  if (cell.empty()) return std::nullopt;
  return parse_real(cell, path, column);
}

std::uint64_t parse_count(const std::string& cell, const std::filesystem::path& path,
                          const char* column) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error(fmt::format("{}: column '{}' holds non-integer value '{}'", path.string(), column, cell));
  }
  return v;
}

}  // namespace

std::vector<TraceRow> subsample(const std::vector<TraceRow>& rows, std::uint64_t iterations) {
  const std::uint64_t stride = iterations <= 1000 ? 1 : (iterations + 999) / 1000;
  std::vector<TraceRow> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::uint64_t it = rows[i].iter;
    if (it <= 1000 || it % stride == 0 || i + 1 == rows.size()) out.push_back(rows[i]);
  }
  return out;
}

std::string format_row(const TraceRow& row) {
  return fmt::format("{},{},{},{},{},{},{},{},{}", row.iter, format_real(row.loss),
                     optional_real(row.gap), optional_real(row.sigma), optional_real(row.sigma_pert),
                     optional_real(row.eps_sam_norm), row.queries_cum, optional_real(row.cos_true),
                     format_real(row.wall_ms));
}

void write_trace(const std::filesystem::path& path, const std::vector<std::string>& settings,
                 const std::vector<TraceRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write trace file {}", path.string()));
  for (const std::string& s : settings) out << "# " << s << '\n';
  out << kTraceColumns << '\n';
  for (const TraceRow& row : rows) out << format_row(row) << '\n';
}

TraceFile read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open trace file {}", path.string()));
  TraceFile file;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!header_seen && line.rfind("# ", 0) == 0) {
      const std::size_t eq = line.find('=');
      if (eq != std::string::npos) file.settings[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    if (!header_seen) {
      if (line != kTraceColumns) {
        throw Error(fmt::format("{}: unexpected column header '{}'", path.string(), line));
      }
      header_seen = true;
      continue;
    }
    const auto c = split_csv(line);
    if (c.size() != 9) {
      throw Error(fmt::format("{}: row has {} cells, expected 9", path.string(), c.size()));
    }
    TraceRow row;
    row.iter = parse_count(c[0], path, "iter");
    row.loss = parse_real(c[1], path, "loss");
    row.gap = parse_optional(c[2], path, "gap");
    row.sigma = parse_optional(c[3], path, "sigma");
    row.sigma_pert = parse_optional(c[4], path, "sigma_pert");
    row.eps_sam_norm = parse_optional(c[5], path, "eps_sam_norm");
    row.queries_cum = parse_count(c[6], path, "queries_cum");
    row.cos_true = parse_optional(c[7], path, "cos_true");
    row.wall_ms = parse_real(c[8], path, "wall_ms");
    file.rows.push_back(row);
  }
  if (!header_seen) throw Error(fmt::format("{}: missing column header", path.string()));
  return file;
}

}  // namespace zosa::harness
