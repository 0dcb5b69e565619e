#ifndef BREAKSCOPE_TESTS_SUPPORT_HPP
#define BREAKSCOPE_TESTS_SUPPORT_HPP

#include "breakscope/panel.hpp"
#include "breakscope/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace testsupport {

using breakscope::Index;

inline Eigen::MatrixXd gaussian(Index rows, Index cols, breakscope::PhiloxStream& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline breakscope::Panel random_panel(Index t, Index n, std::uint64_t seed) {
  breakscope::PhiloxStream rng(seed);
  return breakscope::Panel::from_matrix(gaussian(t, n, rng));
}

// Haar-distributed orthogonal matrix from the QR of a Gaussian draw.
inline Eigen::MatrixXd random_orthogonal(Index r, breakscope::PhiloxStream& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(r, r, rng));
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd rr = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < r; ++j)
    if (rr(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

// Second moment of rows s+1..e (1-based), summed term by term.
inline Eigen::MatrixXd direct_covariance(const Eigen::MatrixXd& g, Index s, Index e) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(g.cols(), g.cols());
  for (Index t = s; t < e; ++t)
    for (Index a = 0; a < g.cols(); ++a)
      for (Index b = 0; b < g.cols(); ++b) acc(a, b) += g(t, a) * g(t, b);
  return acc / static_cast<double>(e - s);
}

// log|Sigma| through an LU determinant, independent of the eigen route.
inline double direct_objective(const Eigen::MatrixXd& g, const std::vector<Index>& breaks) {
  std::vector<Index> bounds{0};
  bounds.insert(bounds.end(), breaks.begin(), breaks.end());
  bounds.push_back(g.rows());
  double total = 0.0;
  for (std::size_t l = 1; l < bounds.size(); ++l) {
    const Index s = bounds[l - 1];
    const Index e = bounds[l];
    total += static_cast<double>(e - s) * std::log(direct_covariance(g, s, e).partialPivLu().determinant());
  }
  return total;
}

struct BruteForce {
  std::vector<Index> breaks;
  double objective = std::numeric_limits<double>::infinity();
};

// Enumerates every m-break configuration with spacing >= h in lexicographic
// order; the first strict improvement wins, so ties keep the smallest vector.
inline void enumerate(const Eigen::MatrixXd& g, Index m, Index h, std::vector<Index>& current, BruteForce& best) {
  const Index t_len = g.rows();
  if (static_cast<Index>(current.size()) == m) {
    const Index last = current.empty() ? 0 : current.back();
    if (t_len - last < h) return;
    const double value = direct_objective(g, current);
    if (value < best.objective) {
      best.objective = value;
      best.breaks = current;
    }
    return;
  }
  const Index prev = current.empty() ? 0 : current.back();
  for (Index k = prev + h; k <= t_len - h; ++k) {
    current.push_back(k);
    enumerate(g, m, h, current, best);
    current.pop_back();
  }
}

inline BruteForce brute_force(const Eigen::MatrixXd& g, Index m, Index h) {
  BruteForce best;
  std::vector<Index> current;
  enumerate(g, m, h, current, best);
  return best;
}

}  // namespace testsupport

#endif  // BREAKSCOPE_TESTS_SUPPORT_HPP
