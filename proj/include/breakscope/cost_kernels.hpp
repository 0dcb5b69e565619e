#ifndef BREAKSCOPE_COST_KERNELS_HPP
#define BREAKSCOPE_COST_KERNELS_HPP

#include "breakscope/segment_stats.hpp"

#include <limits>
#include <vector>

namespace breakscope {

/// Segment costs c(s, e) = (e - s) log|Sigma(s, e)| for every segment that can
/// appear in a configuration with minimum spacing h; +inf elsewhere.
struct CostTable {
  Index periods = 0;
  Index min_spacing = 0;
  Index r = 0;
  long clamp_events = 0;  // segments whose log-determinant hit the eigenvalue floor
  std::vector<double> cost;  // row-major (T + 1) x (T + 1), index s * (T + 1) + e

  double operator()(Index s, Index e) const noexcept {
    return cost[static_cast<std::size_t>(s * (periods + 1) + e)];
  }
  static constexpr double kInadmissible = std::numeric_limits<double>::infinity();
};

/// Bellman tables over suffixes: best[j][s] is the minimal cost of cutting
/// (s, T] into j segments; next[j][s] the smallest first cut achieving it.
struct SuffixTables {
  Index max_segments = 0;
  std::vector<std::vector<double>> best;
  std::vector<std::vector<Index>> next;
};

// OpenMP kernels. Each has a plain serial reference used by tests and the
// benchmark; both produce bit-identical output.
CostTable build_cost_table(const SegmentStats& stats, Index h);
CostTable build_cost_table_serial(const SegmentStats& stats, Index h);

SuffixTables suffix_dp(const CostTable& table, Index max_segments);
SuffixTables suffix_dp_serial(const CostTable& table, Index max_segments);

/// True when s can start a segment (s == 0 or h <= s <= T - h).
inline bool admissible_start(Index s, Index t_len, Index h) noexcept { return s == 0 || (s >= h && s <= t_len - h); }
inline bool admissible_end(Index e, Index t_len, Index h) noexcept { return e == t_len || (e >= h && e <= t_len - h); }

}  // namespace breakscope

#endif  // BREAKSCOPE_COST_KERNELS_HPP
