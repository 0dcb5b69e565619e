#ifndef BREAKSCOPE_BREAK_SEARCH_HPP
#define BREAKSCOPE_BREAK_SEARCH_HPP

#include "breakscope/cost_kernels.hpp"
#include "breakscope/factors.hpp"
#include "breakscope/segment_stats.hpp"

#include <Eigen/Dense>

#include <vector>

namespace breakscope {

/// Ordered breakpoints 0 < k_1 < ... < k_m < T. Breakpoint k_j is the last
/// period of regime j, so regime j covers periods k_{j-1}+1 .. k_j.
class BreakConfiguration {
 public:
  /// Throws InvalidConfiguration unless every regime (with k_0 = 0 and
  /// k_{m+1} = T) is at least h periods long.
  BreakConfiguration(std::vector<Index> breakpoints, Index periods, Index min_spacing);

  static BreakConfiguration none(Index periods, Index min_spacing) { return {{}, periods, min_spacing}; }

  const std::vector<Index>& breakpoints() const noexcept { return breakpoints_; }
  Index m() const noexcept { return static_cast<Index>(breakpoints_.size()); }
  Index periods() const noexcept { return periods_; }
  Index min_spacing() const noexcept { return min_spacing_; }

  /// (0, k_1, ..., k_m, T).
  std::vector<Index> boundaries() const;

  friend bool operator==(const BreakConfiguration&, const BreakConfiguration&) = default;

 private:
  std::vector<Index> breakpoints_;
  Index periods_;
  Index min_spacing_;
};

/// Default minimum spacing max(20, r + 2).
Index default_min_spacing(Index r);
/// Converts a trimming fraction eta into an absolute spacing ceil(eta * T).
Index spacing_from_fraction(double eta, Index periods);

/// U = sum over regimes of (k_l - k_{l-1}) log|Sigma(k_{l-1}, k_l)|.
double qml_objective(const SegmentStats& stats, const BreakConfiguration& config);

/// Exact minimizer of the objective over all m-break configurations with
/// spacing >= h. Ties go to the lexicographically smallest breakpoint vector.
BreakConfiguration dp_detect(const SegmentStats& stats, Index m, Index h);
BreakConfiguration dp_detect(const CostTable& table, const SuffixTables& suffix, Index m);

struct Var1Fit {
  Eigen::MatrixXd coefficient;  // A in g_t ~ A g_{t-1}
  double radius = 0.0;
  bool ridge_applied = false;
};

/// Least-squares VAR(1) without intercept on the pseudo-factors.
Var1Fit fit_var1(const PseudoFactorSet& g);
double fit_var1_radius(const PseudoFactorSet& g);

double break_penalty(Index m, double rho_hat, Index r, Index n, Index periods);

/// qml_objective + m (1 + rho_hat) r^2 log(min(N, T)).
double information_criterion(const SegmentStats& stats, const BreakConfiguration& config, double rho_hat, Index n);

struct SelectionReport {
  std::vector<BreakConfiguration> best_config_per_m;  // indexed by m = 0..m_max
  std::vector<double> objective_per_m;
  std::vector<double> ic_per_m;
  double rho_hat = 0.0;
  bool rho_ridge_applied = false;
  Index m_hat = 0;
  long clamp_events = 0;

  const BreakConfiguration& selected() const { return best_config_per_m[static_cast<std::size_t>(m_hat)]; }
};

/// Runs the DP for m = 1..m_max on one shared cost table and picks argmin IC(m),
/// ties toward the smaller m.
SelectionReport select_num_breaks(const SegmentStats& stats, const PseudoFactorSet& g, Index m_max, Index h, Index n);

}  // namespace breakscope

#endif  // BREAKSCOPE_BREAK_SEARCH_HPP
