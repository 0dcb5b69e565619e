#include "breakscope/break_search.hpp"

#include "breakscope/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace breakscope {
namespace {

void require_feasible(Index m, Index h, Index t_len) {
  if (h < 1) throw Error(ErrorKind::InvalidConfiguration, "minimum spacing must be positive");
  if ((m + 1) * h > t_len) {
    throw Error(ErrorKind::InfeasibleSpacing, std::to_string(m) + " breaks with spacing " + std::to_string(h) +
                                                  " need at least " + std::to_string((m + 1) * h) +
                                                  " periods, have " + std::to_string(t_len));
  }
}

}  // namespace

BreakConfiguration::BreakConfiguration(std::vector<Index> breakpoints, Index periods, Index min_spacing)
    : breakpoints_(std::move(breakpoints)), periods_(periods), min_spacing_(min_spacing) {
  if (min_spacing_ < 1) throw Error(ErrorKind::InvalidConfiguration, "minimum spacing must be positive");
  Index prev = 0;
  for (std::size_t j = 0; j <= breakpoints_.size(); ++j) {
    const Index next = j < breakpoints_.size() ? breakpoints_[j] : periods_;
    if (next - prev < min_spacing_) {
      throw Error(ErrorKind::InvalidConfiguration, "regime " + std::to_string(j + 1) + " (" + std::to_string(prev) +
                                                       ", " + std::to_string(next) + "] is shorter than h=" +
                                                       std::to_string(min_spacing_));
    }
    prev = next;
  }
}

std::vector<Index> BreakConfiguration::boundaries() const {
  std::vector<Index> out;
  out.reserve(breakpoints_.size() + 2);
  out.push_back(0);
  out.insert(out.end(), breakpoints_.begin(), breakpoints_.end());
  out.push_back(periods_);
  return out;
}

Index default_min_spacing(Index r) { return std::max<Index>(20, r + 2); }

Index spacing_from_fraction(double eta, Index periods) {
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorKind::InvalidArgument, "trimming fraction must lie in (0, 1)");
  return static_cast<Index>(std::ceil(eta * static_cast<double>(periods)));
}

double qml_objective(const SegmentStats& stats, const BreakConfiguration& config) {
  if (config.periods() != stats.periods()) {
    throw Error(ErrorKind::InvalidConfiguration, "configuration covers " + std::to_string(config.periods()) +
                                                     " periods but the factors cover " +
                                                     std::to_string(stats.periods()));
  }
  const auto bounds = config.boundaries();
  double total = 0.0;
  for (std::size_t l = 1; l < bounds.size(); ++l) {
    total += static_cast<double>(bounds[l] - bounds[l - 1]) * segment_logdet(stats, bounds[l - 1], bounds[l]).value;
  }
  return total;
}

BreakConfiguration dp_detect(const CostTable& table, const SuffixTables& suffix, Index m) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "dp_detect needs m >= 1");
  require_feasible(m, table.min_spacing, table.periods);
  if (m + 1 > suffix.max_segments) throw Error(ErrorKind::InvalidArgument, "suffix tables too shallow for m");
  if (!std::isfinite(suffix.best[static_cast<std::size_t>(m + 1)][0])) {
    throw Error(ErrorKind::InfeasibleSpacing, "no admissible configuration with " + std::to_string(m) + " breaks");
  }
  std::vector<Index> breaks;
  breaks.reserve(static_cast<std::size_t>(m));
  Index s = 0;
  for (Index j = m + 1; j >= 2; --j) {
    s = suffix.next[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)];
    breaks.push_back(s);
  }
  return {std::move(breaks), table.periods, table.min_spacing};
}

BreakConfiguration dp_detect(const SegmentStats& stats, Index m, Index h) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "dp_detect needs m >= 1");
  require_feasible(m, h, stats.periods());
  const CostTable table = build_cost_table(stats, h);
  return dp_detect(table, suffix_dp(table, m + 1), m);
}

Var1Fit fit_var1(const PseudoFactorSet& g) {
  const Index t_len = g.periods();
  const Index r = g.r();
  if (t_len <= r + 1) {
    throw Error(ErrorKind::TooFewObservations,
                "VAR(1) needs T >= r+2 observations, have T=" + std::to_string(t_len) + " r=" + std::to_string(r));
  }
  const auto lagged = g.g_hat.topRows(t_len - 1);
  const auto current = g.g_hat.bottomRows(t_len - 1);
  Eigen::MatrixXd gram = lagged.transpose() * lagged;
  const Eigen::MatrixXd cross = current.transpose() * lagged;

  Var1Fit fit;
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues();
  if (!(ev(0) > 1e-12 * std::max(ev(ev.size() - 1), 1e-300))) {
    gram.diagonal().array() += 1e-10;
    fit.ridge_applied = true;
  }
  // A = cross * gram^{-1}; gram is symmetric so solve gram * A' = cross'.
  fit.coefficient = gram.ldlt().solve(cross.transpose()).transpose();
  Eigen::EigenSolver<Eigen::MatrixXd> es(fit.coefficient, false);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "VAR(1) coefficient eigensolve failed");
  fit.radius = es.eigenvalues().cwiseAbs().maxCoeff();
  return fit;
}

double fit_var1_radius(const PseudoFactorSet& g) { return fit_var1(g).radius; }

double break_penalty(Index m, double rho_hat, Index r, Index n, Index periods) {
  if (!(rho_hat >= 0.0)) throw Error(ErrorKind::InvalidArgument, "rho_hat must be nonnegative");
  const double rd = static_cast<double>(r);
  return static_cast<double>(m) * (1.0 + std::abs(rho_hat)) * rd * rd *
         std::log(static_cast<double>(std::min(n, periods)));
}

double information_criterion(const SegmentStats& stats, const BreakConfiguration& config, double rho_hat, Index n) {
  return qml_objective(stats, config) + break_penalty(config.m(), rho_hat, stats.r(), n, stats.periods());
}

SelectionReport select_num_breaks(const SegmentStats& stats, const PseudoFactorSet& g, Index m_max, Index h,
                                  Index n) {
  if (m_max < 1) throw Error(ErrorKind::InvalidArgument, "m_max must be at least 1");
  const Index t_len = stats.periods();
  require_feasible(m_max, h, t_len);

  const Var1Fit var = fit_var1(g);
  const CostTable table = build_cost_table(stats, h);
  const SuffixTables suffix = suffix_dp(table, m_max + 1);

  SelectionReport report;
  report.rho_hat = var.radius;
  report.rho_ridge_applied = var.ridge_applied;
  report.clamp_events = table.clamp_events;

  report.best_config_per_m.push_back(BreakConfiguration::none(t_len, h));
  for (Index m = 1; m <= m_max; ++m) report.best_config_per_m.push_back(dp_detect(table, suffix, m));

  double best_ic = INFINITY;
  for (Index m = 0; m <= m_max; ++m) {
    const auto& config = report.best_config_per_m[static_cast<std::size_t>(m)];
    const double objective = qml_objective(stats, config);
    const double ic = objective + break_penalty(m, report.rho_hat, stats.r(), n, t_len);
    report.objective_per_m.push_back(objective);
    report.ic_per_m.push_back(ic);
    if (ic < best_ic) {
      best_ic = ic;
      report.m_hat = m;
    }
  }
  return report;
}

}  // namespace breakscope
