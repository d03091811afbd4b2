#include "zosa/harness/compare.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "zosa/errors.hpp"
#include "zosa/harness/trace.hpp"

namespace zosa::harness {

namespace {

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::string setting(const TraceFile& t, const std::string& key) {
  const auto it = t.settings.find(key);
  return it == t.settings.end() ? std::string("?") : it->second;
}

}  // namespace

std::vector<CompareRow> compare_traces(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(fmt::format("{} is not a directory", dir.string()));
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv" &&
        entry.path().filename().string().rfind("trace_", 0) == 0) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error(fmt::format("no trace files under {}", dir.string()));

  struct Group {
    std::vector<double> finals;
    std::vector<double> queries;
  };
  std::map<std::pair<std::string, std::string>, Group> groups;
  for (const auto& path : files) {
    const TraceFile t = read_trace(path);
    if (t.rows.empty()) continue;
    std::string objective = setting(t, "objective.function");
    if (objective == "?") objective = "external";
    Group& g = groups[{setting(t, "optimizer.kind"), objective}];
    const TraceRow& last = t.rows.back();
    g.finals.push_back(last.gap.value_or(last.loss));
    g.queries.push_back(static_cast<double>(last.queries_cum));
  }

  std::vector<CompareRow> rows;
  for (const auto& [key, g] : groups) {
    CompareRow r;
    r.optimizer = key.first;
    r.objective = key.second;
    r.runs = g.finals.size();
    double sum = 0.0, q = 0.0;
    for (double f : g.finals) sum += f;
    for (double x : g.queries) q += x;
    r.mean_final_gap = sum / static_cast<double>(r.runs);
    r.median_final_gap = median(g.finals);
    r.mean_queries = q / static_cast<double>(r.runs);
    rows.push_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const CompareRow& a, const CompareRow& b) {
    if (a.objective != b.objective) return a.objective < b.objective;
    return a.median_final_gap < b.median_final_gap;
  });
  return rows;
}

std::string render_table(const std::vector<CompareRow>& rows) {
  std::string out = fmt::format("{:<12} {:<12} {:>5} {:>16} {:>16} {:>14}\n", "objective",
                                "optimizer", "runs", "median_gap", "mean_gap", "mean_queries");
  for (const CompareRow& r : rows) {
    out += fmt::format("{:<12} {:<12} {:>5} {:>16.6e} {:>16.6e} {:>14.0f}\n", r.objective,
                       r.optimizer, r.runs, r.median_final_gap, r.mean_final_gap, r.mean_queries);
  }
  return out;
}

}  // namespace zosa::harness
