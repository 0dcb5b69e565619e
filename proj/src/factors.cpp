#include "breakscope/factors.hpp"

#include "breakscope/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace breakscope {
namespace {

// Residual variances below this fraction of V(0) are round-off, not signal.
constexpr double kResidualFloor = 1e-13;

Eigen::MatrixXd scaled_gram(const Eigen::MatrixXd& x, bool time_side) {
  const double scale = 1.0 / (static_cast<double>(x.rows()) * static_cast<double>(x.cols()));
  const Index dim = time_side ? x.rows() : x.cols();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  if (time_side) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x, scale);
  } else {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), scale);
  }
  return gram;
}

void apply_sign_convention(Eigen::MatrixXd& g) {
  for (Index j = 0; j < g.cols(); ++j) {
    Index arg = 0;
    g.col(j).cwiseAbs().maxCoeff(&arg);
    if (g(arg, j) < 0.0) g.col(j) = -g.col(j);
  }
}

}  // namespace

PseudoFactorSet extract_pseudo_factors(const Panel& panel, Index r, GramRoute route) {
  panel.validate();
  const Index t_len = panel.periods();
  const Index n = panel.series();
  if (r < 1 || r > std::min(n, t_len)) {
    throw Error(ErrorKind::RankRequestTooLarge,
                "requested r=" + std::to_string(r) + " but min(N,T)=" + std::to_string(std::min(n, t_len)));
  }
  bool time_side = route == GramRoute::TimeGram || (route == GramRoute::Auto && t_len <= n);

  const Eigen::MatrixXd& x = panel.values;
  Eigen::MatrixXd u(t_len, r);
  Eigen::VectorXd top(r);

  auto solve = [&](bool use_time_side) -> bool {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled_gram(x, use_time_side));
    if (es.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "symmetric eigensolver did not converge");
    const Index dim = es.eigenvalues().size();
    for (Index j = 0; j < r; ++j) {
      const Index src = dim - 1 - j;
      top(j) = std::max(es.eigenvalues()(src), 0.0);
      if (use_time_side) {
        u.col(j) = es.eigenvectors().col(src);
      } else {
        Eigen::VectorXd col = x * es.eigenvectors().col(src);
        const double norm = col.norm();
        // A null direction on the series side has no time-side image.
        if (!(norm > 1e-10 * std::sqrt(static_cast<double>(t_len * n) * std::max(top(0), 1e-300)))) return false;
        u.col(j) = col / norm;
      }
    }
    return true;
  };

  if (!solve(time_side)) {
    time_side = true;
    solve(true);
  }

  PseudoFactorSet out;
  out.g_hat = std::sqrt(static_cast<double>(t_len)) * u;
  apply_sign_convention(out.g_hat);
  out.eigenvalues = std::move(top);
  return out;
}

Eigen::VectorXd scaled_gram_spectrum(const Eigen::MatrixXd& x) {
  const bool time_side = x.rows() <= x.cols();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled_gram(x, time_side), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "symmetric eigensolver did not converge");
  Eigen::VectorXd ev = es.eigenvalues().reverse();
  return ev.cwiseMax(0.0);
}

FactorCountEstimate factor_count_criterion(const Eigen::MatrixXd& x, Index r_max) {
  const Index t_len = x.rows();
  const Index n = x.cols();
  if (r_max < 1 || r_max > std::min(n, t_len) - 1) {
    throw Error(ErrorKind::InvalidArgument, "r_max=" + std::to_string(r_max) + " must lie in [1, min(N,T)-1]=[1, " +
                                                std::to_string(std::min(n, t_len) - 1) + "]");
  }
  const double nt = static_cast<double>(n) * static_cast<double>(t_len);
  const Eigen::VectorXd spectrum = scaled_gram_spectrum(x);
  const double total = x.squaredNorm() / nt;

  FactorCountEstimate est;
  est.residual_variance.resize(static_cast<std::size_t>(r_max + 1));
  est.criterion.resize(static_cast<std::size_t>(r_max + 1));
  if (!(total > 0.0)) {
    // An all-zero panel has no factors; every criterion is -inf.
    std::fill(est.criterion.begin(), est.criterion.end(), -INFINITY);
    est.selected = 0;
    return est;
  }
  const double penalty = (static_cast<double>(n + t_len) / nt) * std::log(static_cast<double>(std::min(n, t_len)));
  const double floor = kResidualFloor * total;
  double best = INFINITY;
  for (Index k = 0; k <= r_max; ++k) {
    double v = k == 0 ? total : spectrum.tail(spectrum.size() - k).sum();
    v = std::max(v, floor);
    const double ic = std::log(v) + static_cast<double>(k) * penalty;
    est.residual_variance[static_cast<std::size_t>(k)] = v;
    est.criterion[static_cast<std::size_t>(k)] = ic;
    if (ic < best) {
      best = ic;
      est.selected = k;
    }
  }
  return est;
}

Index estimate_num_factors(const Panel& panel, Index r_max) {
  panel.validate();
  return factor_count_criterion(panel.values, r_max).selected;
}

}  // namespace breakscope
