#ifndef BREAKSCOPE_FACTORS_HPP
#define BREAKSCOPE_FACTORS_HPP

#include "breakscope/panel.hpp"

#include <Eigen/Dense>

#include <vector>

namespace breakscope {

/// Which Gram matrix the eigen-decomposition runs on. Auto picks the smaller
/// one (T x T when T <= N); the other two exist so the routes can be compared.
enum class GramRoute { Auto, TimeGram, SeriesGram };

/// Full-sample principal-component pseudo-factors, normalized so that
/// g_hat' g_hat / T = I_r. In each column the entry of largest magnitude is
/// nonnegative.
struct PseudoFactorSet {
  Eigen::MatrixXd g_hat;        // T x r, row t is g_t'
  Eigen::VectorXd eigenvalues;  // top r eigenvalues of XX'/(NT), descending

  Index r() const noexcept { return g_hat.cols(); }
  Index periods() const noexcept { return g_hat.rows(); }
};

PseudoFactorSet extract_pseudo_factors(const Panel& panel, Index r, GramRoute route = GramRoute::Auto);

/// All min(N, T) eigenvalues of XX'/(NT) in descending order, clamped at zero.
Eigen::VectorXd scaled_gram_spectrum(const Eigen::MatrixXd& x);

/// IC2 values for k = 0..r_max and the selected count.
struct FactorCountEstimate {
  Index selected = 0;
  std::vector<double> residual_variance;  // V(k)
  std::vector<double> criterion;          // IC2(k)
};

/// Bai-Ng IC2 over k = 0..r_max on the panel as given (no rescaling here).
FactorCountEstimate factor_count_criterion(const Eigen::MatrixXd& x, Index r_max);

Index estimate_num_factors(const Panel& panel, Index r_max);

}  // namespace breakscope

#endif  // BREAKSCOPE_FACTORS_HPP
