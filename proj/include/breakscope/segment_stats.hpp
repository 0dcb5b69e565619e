#ifndef BREAKSCOPE_SEGMENT_STATS_HPP
#define BREAKSCOPE_SEGMENT_STATS_HPP

#include "breakscope/factors.hpp"

#include <Eigen/Dense>

#include <vector>

namespace breakscope {

/// Prefix sums S_t = sum_{u <= t} g_u g_u' (S_0 = 0) so that the covariance
/// of any segment (s, e] costs O(r^2).
class SegmentStats {
 public:
  explicit SegmentStats(const Eigen::MatrixXd& g_hat);

  Index r() const noexcept { return r_; }
  Index periods() const noexcept { return t_; }

  /// S_t as an r x r matrix, 0 <= t <= T.
  Eigen::Map<const Eigen::MatrixXd> prefix(Index t) const {
    return {prefix_.data() + t * r_ * r_, r_, r_};
  }

 private:
  Index r_;
  Index t_;
  std::vector<double> prefix_;  // (T + 1) contiguous column-major r x r blocks
};

SegmentStats segment_stats(const PseudoFactorSet& g);

/// (S_e - S_s) / (e - s): sample second moment of g_{s+1}, ..., g_e.
Eigen::MatrixXd segment_covariance(const SegmentStats& stats, Index s, Index e);

/// Log-determinant of a segment covariance. `clamped` counts eigenvalues raised
/// to the floor 1e-15 * trace.
struct LogDet {
  double value = 0.0;
  int clamped = 0;
};

inline constexpr double kLogDetRelativeFloor = 1e-15;

/// Log-determinant of a symmetric PSD matrix via its eigenvalues, with the floor applied.
LogDet clamped_logdet(const Eigen::MatrixXd& sigma);

/// Requires e - s >= r + 1.
LogDet segment_logdet(const SegmentStats& stats, Index s, Index e);

}  // namespace breakscope

#endif  // BREAKSCOPE_SEGMENT_STATS_HPP
