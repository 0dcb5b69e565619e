#ifndef BREAKSCOPE_SIM_LAB_HPP
#define BREAKSCOPE_SIM_LAB_HPP

#include "breakscope/break_classify.hpp"
#include "breakscope/panel.hpp"
#include "breakscope/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace breakscope {

// Loading designs. Dgp1A..Dgp1E are the two-break, three-factor designs;
// IndependentRegimes draws fresh N x r0 loadings in every regime (m0 free).
enum class SchemeKind { Dgp1A, Dgp1B, Dgp1C, Dgp1D, Dgp1E, IndependentRegimes };

std::string scheme_name(SchemeKind kind);
/// Accepts "dgp1a".."dgp1e", "dgp3" and "independent" (case-insensitive).
SchemeKind parse_scheme(const std::string& name);

struct SimulationSpec {
  Index n = 100;
  Index periods = 100;
  Index m0 = 2;
  std::vector<double> break_fractions;  // empty: (0.3, 0.7) for DGP1, j/(m0+1) otherwise
  Index r0 = 3;                         // factors per regime; DGP1B-E require 3
  double rho = 0.0;                     // factor AR(1)
  double alpha = 0.0;                   // idiosyncratic AR(1)
  double beta = 0.0;                    // cross-sectional Toeplitz decay
  SchemeKind scheme = SchemeKind::Dgp1B;
  double b = 1.0;                       // DGP1A mean-loading shift
  std::uint64_t seed = 0;
  double noise_scale = 1.0;             // 0 switches the idiosyncratic errors off

  std::vector<double> resolved_fractions() const;
  /// k_j = floor(tau_j * T).
  std::vector<Index> true_breaks() const;
  /// Population number of pseudo-factors.
  Index r_pseudo() const;
  void validate() const;
};

struct LoadingScheme {
  Eigen::MatrixXd lambda;                // N x r
  std::vector<Eigen::MatrixXd> b;        // m0 + 1 matrices, r x r
  Index r_pseudo = 0;
};

/// Draws the loadings (and for DGP1E the x, y, z entries) from `rng`.
LoadingScheme build_loading_scheme(const SimulationSpec& spec, PhiloxStream& rng);

/// AR(1) factors with stationary start: T x p.
Eigen::MatrixXd simulate_factors(Index periods, Index p, double rho, PhiloxStream& rng);

/// Lower Cholesky factor of the Toeplitz matrix Omega_ij = beta^|i-j|, or the
/// identity shortcut when beta == 0.
class ToeplitzFactor {
 public:
  ToeplitzFactor(Index n, double beta);
  Index size() const noexcept { return n_; }
  bool identity() const noexcept { return identity_; }
  /// In place: z <- L z.
  void apply(Eigen::Ref<Eigen::VectorXd> z) const;

 private:
  Index n_;
  bool identity_;
  Eigen::MatrixXd lower_;
};

/// Idiosyncratic errors e_t = alpha e_{t-1} + v_t, v_t ~ N(0, Omega): T x N.
Eigen::MatrixXd simulate_errors(Index periods, Index n, double alpha, double beta, PhiloxStream& rng);
Eigen::MatrixXd simulate_errors(Index periods, double alpha, const ToeplitzFactor& omega, PhiloxStream& rng);

struct SimulatedTruth {
  Panel panel;
  std::vector<Index> true_breaks;
  Index r_pseudo = 0;
  std::vector<Eigen::MatrixXd> b_matrices;
  Eigen::MatrixXd lambda;          // N x r
  Eigen::MatrixXd factors;         // T x r0 raw AR(1) paths
  Eigen::MatrixXd pseudo_factors;  // T x r, row t is (B_j f_t)'
  Eigen::MatrixXd errors;          // T x N
};

/// All randomness comes from PhiloxStream(spec.seed), drawn in the order
/// loadings, factors, errors.
SimulatedTruth simulate_panel(const SimulationSpec& spec);
SimulatedTruth simulate_panel(const SimulationSpec& spec, const ToeplitzFactor& omega);

/// Default search spacing for simulated panels: max(r + 2, ceil(T / 10)).
Index default_sim_spacing(Index r, Index periods);

struct MetricsTable {
  SimulationSpec spec;
  Index reps = 0;
  Index reps_used = 0;        // replications entering RMSE/MAE
  std::vector<double> rmse;   // per breakpoint, in periods
  std::vector<double> mae;
  std::optional<double> detection_rate;
  std::vector<Index> m_hat_counts;  // histogram over m = 0..m_max (selection runs only)
  bool know_m = true;
  Index m_max = 0;
  Index min_spacing = 0;      // 0 means the per-replication default was used
};

/// Monte Carlo over replications with seeds spec.seed XOR rep. Uses the
/// population pseudo-factor count. With know_m the DP runs at m0; otherwise
/// the IC picks m and RMSE/MAE use the replications with m_hat == m0.
/// h == 0 selects default_sim_spacing.
MetricsTable monte_carlo(const SimulationSpec& spec, Index reps, bool know_m, Index m_max, Index h);
/// Same loop without OpenMP, kept as the reference for determinism tests.
MetricsTable monte_carlo_serial(const SimulationSpec& spec, Index reps, bool know_m, Index m_max, Index h);

/// Fraction of replications where the IC selects m0. For IndependentRegimes
/// the pseudo-factor count is first estimated by IC2 with r_max = 12.
double detection_rate_experiment(const SimulationSpec& spec, Index reps, Index m_max, Index h);
MetricsTable selection_experiment(const SimulationSpec& spec, Index reps, Index m_max, Index h);

/// Classifies the true breaks of each replication (reps x m0 reports).
std::vector<std::vector<BreakTypeReport>> classify_true_breaks(const SimulationSpec& spec, Index reps, Index r_max);

}  // namespace breakscope

#endif  // BREAKSCOPE_SIM_LAB_HPP
