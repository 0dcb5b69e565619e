#include "breakscope/cost_kernels.hpp"

#include "breakscope/error.hpp"

#include <string>

namespace breakscope {
namespace {

CostTable empty_table(const SegmentStats& stats, Index h) {
  if (h < stats.r() + 2) {
    throw Error(ErrorKind::InvalidConfiguration,
                "minimum spacing h=" + std::to_string(h) + " must be at least r+2=" + std::to_string(stats.r() + 2));
  }
  CostTable table;
  table.periods = stats.periods();
  table.min_spacing = h;
  table.r = stats.r();
  table.cost.assign(static_cast<std::size_t>((table.periods + 1) * (table.periods + 1)), CostTable::kInadmissible);
  return table;
}

// Fills row s; returns the number of clamped segments.
long fill_row(const SegmentStats& stats, CostTable& table, Index s) {
  const Index t_len = table.periods;
  const Index h = table.min_spacing;
  long clamps = 0;
  if (!admissible_start(s, t_len, h)) return 0;
  for (Index e = s + h; e <= t_len; ++e) {
    if (!admissible_end(e, t_len, h)) continue;
    const LogDet ld = segment_logdet(stats, s, e);
    table.cost[static_cast<std::size_t>(s * (t_len + 1) + e)] = static_cast<double>(e - s) * ld.value;
    if (ld.clamped > 0) ++clamps;
  }
  return clamps;
}

void init_suffix(SuffixTables& out, const CostTable& table, Index max_segments) {
  const Index t_len = table.periods;
  out.max_segments = max_segments;
  out.best.assign(static_cast<std::size_t>(max_segments + 1),
                  std::vector<double>(static_cast<std::size_t>(t_len + 1), CostTable::kInadmissible));
  out.next.assign(static_cast<std::size_t>(max_segments + 1), std::vector<Index>(static_cast<std::size_t>(t_len + 1), -1));
  for (Index s = 0; s < t_len; ++s) {
    out.best[1][static_cast<std::size_t>(s)] = table(s, t_len);
    out.next[1][static_cast<std::size_t>(s)] = t_len;
  }
}

void relax(SuffixTables& out, const CostTable& table, Index j, Index s) {
  const Index t_len = table.periods;
  const Index h = table.min_spacing;
  double best = CostTable::kInadmissible;
  Index arg = -1;
  const auto& tail = out.best[static_cast<std::size_t>(j - 1)];
  if (admissible_start(s, t_len, h)) {
    for (Index e = s + h; e <= t_len - h; ++e) {
      const double candidate = table(s, e) + tail[static_cast<std::size_t>(e)];
      if (candidate < best) {
        best = candidate;
        arg = e;
      }
    }
  }
  out.best[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] = best;
  out.next[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] = arg;
}

}  // namespace

CostTable build_cost_table_serial(const SegmentStats& stats, Index h) {
  CostTable table = empty_table(stats, h);
  long clamps = 0;
  for (Index s = 0; s < table.periods; ++s) clamps += fill_row(stats, table, s);
  table.clamp_events = clamps;
  return table;
}

CostTable build_cost_table(const SegmentStats& stats, Index h) {
  CostTable table = empty_table(stats, h);
  long clamps = 0;
  const Index t_len = table.periods;
  // Rows shrink with s, so hand them out dynamically.
#pragma omp parallel for schedule(dynamic, 4) reduction(+ : clamps)
  for (Index s = 0; s < t_len; ++s) clamps += fill_row(stats, table, s);
  table.clamp_events = clamps;
  return table;
}

SuffixTables suffix_dp_serial(const CostTable& table, Index max_segments) {
  SuffixTables out;
  init_suffix(out, table, max_segments);
  for (Index j = 2; j <= max_segments; ++j) {
    for (Index s = 0; s < table.periods; ++s) relax(out, table, j, s);
  }
  return out;
}

SuffixTables suffix_dp(const CostTable& table, Index max_segments) {
  SuffixTables out;
  init_suffix(out, table, max_segments);
  const Index t_len = table.periods;
  for (Index j = 2; j <= max_segments; ++j) {
#pragma omp parallel for schedule(dynamic, 8)
    for (Index s = 0; s < t_len; ++s) relax(out, table, j, s);
  }
  return out;
}

}  // namespace breakscope
