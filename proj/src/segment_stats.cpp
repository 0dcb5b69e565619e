#include "breakscope/segment_stats.hpp"

#include "breakscope/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace breakscope {

SegmentStats::SegmentStats(const Eigen::MatrixXd& g_hat)
    : r_(g_hat.cols()), t_(g_hat.rows()), prefix_(static_cast<std::size_t>((t_ + 1) * r_ * r_), 0.0) {
  for (Index t = 1; t <= t_; ++t) {
    Eigen::Map<Eigen::MatrixXd> cur(prefix_.data() + t * r_ * r_, r_, r_);
    Eigen::Map<const Eigen::MatrixXd> prev(prefix_.data() + (t - 1) * r_ * r_, r_, r_);
    const auto g = g_hat.row(t - 1).transpose();
    cur.noalias() = prev + g * g.transpose();
  }
}

SegmentStats segment_stats(const PseudoFactorSet& g) { return SegmentStats(g.g_hat); }

Eigen::MatrixXd segment_covariance(const SegmentStats& stats, Index s, Index e) {
  if (s < 0 || e > stats.periods() || s >= e) {
    throw Error(ErrorKind::EmptySegment, "segment (" + std::to_string(s) + ", " + std::to_string(e) +
                                             "] is empty or outside [0, " + std::to_string(stats.periods()) + "]");
  }
  Eigen::MatrixXd sigma = (stats.prefix(e) - stats.prefix(s)) / static_cast<double>(e - s);
  // Symmetrize so the eigensolver sees an exactly symmetric input.
  return 0.5 * (sigma + sigma.transpose());
}

LogDet clamped_logdet(const Eigen::MatrixXd& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "segment covariance eigensolve failed");
  const double floor = std::max(kLogDetRelativeFloor * sigma.trace(), std::numeric_limits<double>::min());
  LogDet out;
  for (Index j = 0; j < es.eigenvalues().size(); ++j) {
    double lambda = es.eigenvalues()(j);
    if (!(lambda > floor)) {
      lambda = floor;
      ++out.clamped;
    }
    out.value += std::log(lambda);
  }
  return out;
}

LogDet segment_logdet(const SegmentStats& stats, Index s, Index e) {
  if (e - s <= stats.r()) {
    throw Error(ErrorKind::SegmentTooShort, "segment (" + std::to_string(s) + ", " + std::to_string(e) +
                                                "] has length " + std::to_string(e - s) +
                                                " but needs at least r+1=" + std::to_string(stats.r() + 1));
  }
  return clamped_logdet(segment_covariance(stats, s, e));
}

}  // namespace breakscope
