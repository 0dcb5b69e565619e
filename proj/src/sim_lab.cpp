#include "breakscope/sim_lab.hpp"

#include "breakscope/break_search.hpp"
#include "breakscope/error.hpp"
#include "breakscope/factors.hpp"
#include "breakscope/segment_stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <string>

namespace breakscope {
namespace {

bool is_dgp1(SchemeKind kind) { return kind != SchemeKind::IndependentRegimes; }

Index regime_blocks(const SimulationSpec& spec) {
  return spec.scheme == SchemeKind::Dgp1A ? 3 : spec.m0 + 1;
}

Eigen::MatrixXd block_selector(Index blocks, Index r0, Index which) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(blocks * r0, blocks * r0);
  b.block(which * r0, which * r0, r0, r0).setIdentity();
  return b;
}

Eigen::Matrix3d diag3(double a, double b, double c) { return Eigen::Vector3d(a, b, c).asDiagonal(); }

// Maps a raw factor draw f_t (length r0) to the r-dimensional vector that B_j
// acts on: tiled once per block for the block-selector designs.
Eigen::VectorXd expand_factor(const Eigen::VectorXd& f, Index r) {
  if (f.size() == r) return f;
  Eigen::VectorXd out(r);
  for (Index q = 0; q < r / f.size(); ++q) out.segment(q * f.size(), f.size()) = f;
  return out;
}

struct RepOutcome {
  Index m_hat = 0;
  std::vector<Index> breaks;
};

enum class RankPolicy { Population, EstimateIc2 };

constexpr Index kSimFactorCap = 12;

RepOutcome run_replication(const SimulationSpec& base, Index rep, const ToeplitzFactor& omega, bool know_m,
                           Index m_max, Index h, RankPolicy policy) {
  SimulationSpec spec = base;
  spec.seed = base.seed ^ static_cast<std::uint64_t>(rep);
  const SimulatedTruth truth = simulate_panel(spec, omega);
  const Index t_len = spec.periods;

  RepOutcome out;
  Index r = truth.r_pseudo;
  if (policy == RankPolicy::EstimateIc2) {
    r = estimate_num_factors(truth.panel, std::min(kSimFactorCap, std::min(spec.n, t_len) - 1));
    if (r == 0) return out;  // no pseudo-factors, nothing can break
  }
  const PseudoFactorSet g = extract_pseudo_factors(truth.panel, r);
  const SegmentStats stats(g.g_hat);
  Index spacing = h > 0 ? h : default_sim_spacing(r, t_len);
  if (policy == RankPolicy::EstimateIc2) spacing = std::max(spacing, r + 2);

  if (know_m) {
    const BreakConfiguration config = dp_detect(stats, spec.m0, spacing);
    out.m_hat = config.m();
    out.breaks = config.breakpoints();
  } else {
    const SelectionReport report = select_num_breaks(stats, g, m_max, spacing, spec.n);
    out.m_hat = report.m_hat;
    out.breaks = report.selected().breakpoints();
  }
  return out;
}

MetricsTable aggregate(const SimulationSpec& spec, Index reps, bool know_m, Index m_max, Index h,
                       const std::vector<RepOutcome>& outcomes) {
  MetricsTable table;
  table.spec = spec;
  table.reps = reps;
  table.know_m = know_m;
  table.m_max = know_m ? spec.m0 : m_max;
  table.min_spacing = h;
  const auto truth = spec.true_breaks();
  const std::size_t m0 = truth.size();
  std::vector<double> sum_sq(m0, 0.0), sum_abs(m0, 0.0);
  Index correct = 0;
  if (!know_m) table.m_hat_counts.assign(static_cast<std::size_t>(m_max + 1), 0);
  // Reduction in replication order keeps results independent of scheduling.
  for (const RepOutcome& o : outcomes) {
    if (!know_m && o.m_hat >= 0 && o.m_hat <= m_max) ++table.m_hat_counts[static_cast<std::size_t>(o.m_hat)];
    if (o.m_hat != static_cast<Index>(m0)) continue;
    ++correct;
    for (std::size_t j = 0; j < m0; ++j) {
      const double err = static_cast<double>(o.breaks[j] - truth[j]);
      sum_sq[j] += err * err;
      sum_abs[j] += std::abs(err);
    }
  }
  table.reps_used = correct;
  for (std::size_t j = 0; j < m0; ++j) {
    const double used = static_cast<double>(correct);
    table.rmse.push_back(correct > 0 ? std::sqrt(sum_sq[j] / used) : NAN);
    table.mae.push_back(correct > 0 ? sum_abs[j] / used : NAN);
  }
  if (!know_m) table.detection_rate = static_cast<double>(correct) / static_cast<double>(reps);
  return table;
}

void check_run(const SimulationSpec& spec, Index reps, bool know_m, Index m_max) {
  spec.validate();
  if (reps < 1) throw Error(ErrorKind::InvalidArgument, "reps must be at least 1");
  if (know_m && spec.m0 < 1) throw Error(ErrorKind::InvalidArgument, "known-m runs need m0 >= 1");
  if (!know_m && m_max < 1) throw Error(ErrorKind::InvalidArgument, "m_max must be at least 1");
}

std::vector<RepOutcome> run_parallel(const SimulationSpec& spec, Index reps, bool know_m, Index m_max, Index h,
                                     RankPolicy policy) {
  const ToeplitzFactor omega(spec.n, spec.beta);
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(reps));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (Index rep = 0; rep < reps; ++rep) {
    try {
      outcomes[static_cast<std::size_t>(rep)] = run_replication(spec, rep, omega, know_m, m_max, h, policy);
    } catch (...) {
#pragma omp critical(breakscope_mc_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return outcomes;
}

}  // namespace

std::string scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Dgp1A: return "dgp1a";
    case SchemeKind::Dgp1B: return "dgp1b";
    case SchemeKind::Dgp1C: return "dgp1c";
    case SchemeKind::Dgp1D: return "dgp1d";
    case SchemeKind::Dgp1E: return "dgp1e";
    case SchemeKind::IndependentRegimes: return "dgp3";
  }
  return "unknown";
}

SchemeKind parse_scheme(const std::string& name) {
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "dgp1a") return SchemeKind::Dgp1A;
  if (key == "dgp1b") return SchemeKind::Dgp1B;
  if (key == "dgp1c") return SchemeKind::Dgp1C;
  if (key == "dgp1d") return SchemeKind::Dgp1D;
  if (key == "dgp1e") return SchemeKind::Dgp1E;
  if (key == "dgp3" || key == "independent") return SchemeKind::IndependentRegimes;
  throw Error(ErrorKind::InvalidArgument, "unknown scheme '" + name + "'");
}

std::vector<double> SimulationSpec::resolved_fractions() const {
  if (!break_fractions.empty()) return break_fractions;
  if (is_dgp1(scheme) && m0 == 2) return {0.3, 0.7};
  std::vector<double> out;
  for (Index j = 1; j <= m0; ++j) out.push_back(static_cast<double>(j) / static_cast<double>(m0 + 1));
  return out;
}

std::vector<Index> SimulationSpec::true_breaks() const {
  std::vector<Index> out;
  for (double tau : resolved_fractions()) {
    // Guard against 0.3 * 300 landing a hair below 90.
    out.push_back(static_cast<Index>(std::floor(tau * static_cast<double>(periods) + 1e-9)));
  }
  return out;
}

Index SimulationSpec::r_pseudo() const {
  switch (scheme) {
    case SchemeKind::Dgp1A: return 3 * r0;
    case SchemeKind::IndependentRegimes: return (m0 + 1) * r0;
    default: return 3;
  }
}

void SimulationSpec::validate() const {
  if (n < 2 || periods < 2) throw Error(ErrorKind::InvalidArgument, "simulation needs N >= 2 and T >= 2");
  if (!(std::abs(rho) < 1.0) || !(std::abs(alpha) < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "rho and alpha must lie in (-1, 1)");
  }
  if (!(beta >= 0.0 && beta < 1.0)) throw Error(ErrorKind::InvalidArgument, "beta must lie in [0, 1)");
  if (!(noise_scale >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise_scale must be nonnegative");
  if (m0 < 0) throw Error(ErrorKind::InvalidArgument, "m0 must be nonnegative");
  if (r0 < 1) throw Error(ErrorKind::InvalidArgument, "r0 must be positive");
  if (is_dgp1(scheme) && m0 != 2) {
    throw Error(ErrorKind::SchemeArityMismatch, scheme_name(scheme) + " has exactly two breaks, got m0=" +
                                                    std::to_string(m0));
  }
  if (is_dgp1(scheme) && scheme != SchemeKind::Dgp1A && r0 != 3) {
    throw Error(ErrorKind::SchemeArityMismatch, scheme_name(scheme) + " is a three-factor design, got r0=" +
                                                    std::to_string(r0));
  }
  const auto fractions = resolved_fractions();
  if (static_cast<Index>(fractions.size()) != m0) {
    throw Error(ErrorKind::SchemeArityMismatch, "expected " + std::to_string(m0) + " break fractions, got " +
                                                    std::to_string(fractions.size()));
  }
  for (double tau : fractions) {
    if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::InvalidArgument, "break fractions must lie in (0, 1)");
  }
  const auto breaks = true_breaks();
  Index prev = 0;
  const Index need = r_pseudo() + 2;
  for (std::size_t j = 0; j <= breaks.size(); ++j) {
    const Index next = j < breaks.size() ? breaks[j] : periods;
    if (next - prev < need) {
      throw Error(ErrorKind::InvalidArgument, "regime " + std::to_string(j + 1) + " has " +
                                                  std::to_string(next - prev) + " periods; need at least r+2=" +
                                                  std::to_string(need));
    }
    prev = next;
  }
}

LoadingScheme build_loading_scheme(const SimulationSpec& spec, PhiloxStream& rng) {
  spec.validate();
  LoadingScheme out;
  out.r_pseudo = spec.r_pseudo();
  const Index n = spec.n;

  if (spec.scheme == SchemeKind::Dgp1A || spec.scheme == SchemeKind::IndependentRegimes) {
    const Index blocks = regime_blocks(spec);
    const Index r0 = spec.r0;
    const double sd = 1.0 / std::sqrt(static_cast<double>(r0));
    out.lambda.resize(n, blocks * r0);
    for (Index i = 0; i < n; ++i) {
      for (Index q = 0; q < blocks; ++q) {
        const double mean = spec.scheme == SchemeKind::Dgp1A ? spec.b * 0.5 * static_cast<double>(q + 1) : 0.0;
        for (Index p = 0; p < r0; ++p) out.lambda(i, q * r0 + p) = mean + sd * rng.normal();
      }
    }
    for (Index q = 0; q < blocks; ++q) out.b.push_back(block_selector(blocks, r0, q));
    return out;
  }

  const double sd = 1.0 / std::sqrt(3.0);
  out.lambda.resize(n, 3);
  for (Index i = 0; i < n; ++i) {
    for (Index p = 0; p < 3; ++p) out.lambda(i, p) = sd * rng.normal();
  }
  switch (spec.scheme) {
    case SchemeKind::Dgp1B:
      out.b = {diag3(1, 1, 0), diag3(1, 0, 1), diag3(0, 1, 1)};
      break;
    case SchemeKind::Dgp1C:
      // The middle regime keeps only the first two factors.
      out.b = {diag3(1, 1, 1), diag3(1, 1, 0), diag3(0, 0, 1)};
      break;
    case SchemeKind::Dgp1D:
      out.b = {diag3(1, 1, 1), diag3(2, 2, 2), diag3(1, 1, 1)};
      break;
    case SchemeKind::Dgp1E: {
      const double x = rng.normal();
      const double y = rng.normal();
      const double z = rng.normal();
      Eigen::Matrix3d b2;
      b2 << 2, x, y, 0, 2, z, 0, 0, 0;
      out.b = {diag3(1, 1, 0), b2, diag3(0, 0, 1)};
      break;
    }
    default:
      break;
  }
  return out;
}

Eigen::MatrixXd simulate_factors(Index periods, Index p, double rho, PhiloxStream& rng) {
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::InvalidArgument, "factor AR coefficient must lie in (-1, 1)");
  Eigen::MatrixXd f(periods, p);
  if (periods == 0) return f;
  const double sd0 = 1.0 / std::sqrt(1.0 - rho * rho);
  for (Index k = 0; k < p; ++k) f(0, k) = sd0 * rng.normal();
  for (Index t = 1; t < periods; ++t) {
    for (Index k = 0; k < p; ++k) f(t, k) = rho * f(t - 1, k) + rng.normal();
  }
  return f;
}

ToeplitzFactor::ToeplitzFactor(Index n, double beta) : n_(n), identity_(beta == 0.0) {
  if (!(beta >= 0.0 && beta < 1.0)) throw Error(ErrorKind::InvalidArgument, "beta must lie in [0, 1)");
  if (identity_) return;
  Eigen::MatrixXd omega(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) omega(i, j) = std::pow(beta, static_cast<double>(std::abs(i - j)));
  }
  Eigen::LLT<Eigen::MatrixXd> llt(omega);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "Toeplitz covariance is not positive definite");
  lower_ = llt.matrixL();
}

void ToeplitzFactor::apply(Eigen::Ref<Eigen::VectorXd> z) const {
  if (identity_) return;
  z = lower_.triangularView<Eigen::Lower>() * z;
}

Eigen::MatrixXd simulate_errors(Index periods, double alpha, const ToeplitzFactor& omega, PhiloxStream& rng) {
  if (!(std::abs(alpha) < 1.0)) throw Error(ErrorKind::InvalidArgument, "error AR coefficient must lie in (-1, 1)");
  const Index n = omega.size();
  Eigen::MatrixXd e(periods, n);
  Eigen::VectorXd v(n);
  const double sd0 = 1.0 / std::sqrt(1.0 - alpha * alpha);
  for (Index t = 0; t < periods; ++t) {
    for (Index i = 0; i < n; ++i) v(i) = rng.normal();
    omega.apply(v);
    if (t == 0) {
      e.row(0) = sd0 * v.transpose();
    } else {
      e.row(t) = alpha * e.row(t - 1) + v.transpose();
    }
  }
  return e;
}

Eigen::MatrixXd simulate_errors(Index periods, Index n, double alpha, double beta, PhiloxStream& rng) {
  return simulate_errors(periods, alpha, ToeplitzFactor(n, beta), rng);
}

SimulatedTruth simulate_panel(const SimulationSpec& spec) { return simulate_panel(spec, ToeplitzFactor(spec.n, spec.beta)); }

SimulatedTruth simulate_panel(const SimulationSpec& spec, const ToeplitzFactor& omega) {
  spec.validate();
  if (omega.size() != spec.n) throw Error(ErrorKind::InvalidArgument, "Toeplitz factor size does not match N");
  PhiloxStream rng(spec.seed);
  SimulatedTruth truth;
  LoadingScheme loadings = build_loading_scheme(spec, rng);
  truth.r_pseudo = loadings.r_pseudo;
  truth.true_breaks = spec.true_breaks();
  truth.lambda = std::move(loadings.lambda);
  truth.b_matrices = std::move(loadings.b);

  const Index t_len = spec.periods;
  const Index r = truth.lambda.cols();
  const Index raw_dim = spec.scheme == SchemeKind::Dgp1A || spec.scheme == SchemeKind::IndependentRegimes ? spec.r0 : 3;
  truth.factors = simulate_factors(t_len, raw_dim, spec.rho, rng);
  truth.errors = simulate_errors(t_len, spec.alpha, omega, rng);
  if (spec.noise_scale != 1.0) truth.errors *= spec.noise_scale;

  truth.pseudo_factors.resize(t_len, r);
  std::size_t regime = 0;
  for (Index t = 0; t < t_len; ++t) {
    while (regime < truth.true_breaks.size() && t >= truth.true_breaks[regime]) ++regime;
    const Eigen::VectorXd f = expand_factor(truth.factors.row(t).transpose(), r);
    truth.pseudo_factors.row(t) = (truth.b_matrices[regime] * f).transpose();
  }
  truth.panel = Panel::from_matrix(truth.pseudo_factors * truth.lambda.transpose() + truth.errors);
  return truth;
}

Index default_sim_spacing(Index r, Index periods) {
  return std::max<Index>(r + 2, static_cast<Index>(std::ceil(static_cast<double>(periods) / 10.0)));
}

MetricsTable monte_carlo(const SimulationSpec& spec, Index reps, bool know_m, Index m_max, Index h) {
  check_run(spec, reps, know_m, m_max);
  return aggregate(spec, reps, know_m, m_max, h, run_parallel(spec, reps, know_m, m_max, h, RankPolicy::Population));
}

MetricsTable monte_carlo_serial(const SimulationSpec& spec, Index reps, bool know_m, Index m_max, Index h) {
  check_run(spec, reps, know_m, m_max);
  const ToeplitzFactor omega(spec.n, spec.beta);
  std::vector<RepOutcome> outcomes;
  outcomes.reserve(static_cast<std::size_t>(reps));
  for (Index rep = 0; rep < reps; ++rep) {
    outcomes.push_back(run_replication(spec, rep, omega, know_m, m_max, h, RankPolicy::Population));
  }
  return aggregate(spec, reps, know_m, m_max, h, outcomes);
}

MetricsTable selection_experiment(const SimulationSpec& spec, Index reps, Index m_max, Index h) {
  check_run(spec, reps, false, m_max);
  const RankPolicy policy =
      spec.scheme == SchemeKind::IndependentRegimes ? RankPolicy::EstimateIc2 : RankPolicy::Population;
  return aggregate(spec, reps, false, m_max, h, run_parallel(spec, reps, false, m_max, h, policy));
}

double detection_rate_experiment(const SimulationSpec& spec, Index reps, Index m_max, Index h) {
  return selection_experiment(spec, reps, m_max, h).detection_rate.value_or(0.0);
}

std::vector<std::vector<BreakTypeReport>> classify_true_breaks(const SimulationSpec& spec, Index reps, Index r_max) {
  spec.validate();
  if (reps < 1) throw Error(ErrorKind::InvalidArgument, "reps must be at least 1");
  const ToeplitzFactor omega(spec.n, spec.beta);
  std::vector<std::vector<BreakTypeReport>> out(static_cast<std::size_t>(reps));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (Index rep = 0; rep < reps; ++rep) {
    try {
      SimulationSpec s = spec;
      s.seed = spec.seed ^ static_cast<std::uint64_t>(rep);
      const SimulatedTruth truth = simulate_panel(s, omega);
      const BreakConfiguration config(truth.true_breaks, s.periods, 1);
      out[static_cast<std::size_t>(rep)] = classify_all(truth.panel, config, r_max);
    } catch (...) {
#pragma omp critical(breakscope_classify_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace breakscope
