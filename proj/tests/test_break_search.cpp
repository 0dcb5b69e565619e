#include "breakscope/break_search.hpp"
#include "breakscope/cost_kernels.hpp"
#include "breakscope/error.hpp"
#include "breakscope/factors.hpp"
#include "breakscope/segment_stats.hpp"
#include "breakscope/sim_lab.hpp"

#include "doctest.h"
#include "support.hpp"

#include <cmath>

using namespace breakscope;
using testsupport::gaussian;

namespace {

// Pseudo-factors of a random panel whose second moment shifts across two breaks.
PseudoFactorSet shifted_factors(Index t, Index r, std::uint64_t seed) {
  PhiloxStream rng(seed);
  Eigen::MatrixXd g = gaussian(t, r, rng);
  for (Index i = t / 3; i < 2 * t / 3; ++i) g.row(i) *= 1.8;
  Panel p = Panel::from_matrix(g * gaussian(r, 3 * r, rng) + 0.3 * gaussian(t, 3 * r, rng));
  return extract_pseudo_factors(p, r);
}

PseudoFactorSet wrap(Eigen::MatrixXd g) {
  PseudoFactorSet out;
  out.g_hat = std::move(g);
  out.eigenvalues = Eigen::VectorXd::Ones(out.g_hat.cols());
  return out;
}

}  // namespace

TEST_SUITE("BreakConfiguration") {
  TEST_CASE("validation") {
    CHECK_NOTHROW(BreakConfiguration({10, 20}, 30, 10));
    CHECK_THROWS_AS(BreakConfiguration({10, 19}, 30, 10), Error);
    CHECK_THROWS_AS(BreakConfiguration({20, 10}, 40, 5), Error);
    CHECK_THROWS_AS(BreakConfiguration({0}, 40, 0), Error);
    const BreakConfiguration c({10, 25}, 40, 5);
    CHECK(c.boundaries() == std::vector<Index>{0, 10, 25, 40});
    CHECK(c.m() == 2);
  }

  TEST_CASE("spacing helpers") {
    CHECK(default_min_spacing(3) == 20);
    CHECK(default_min_spacing(25) == 27);
    CHECK(spacing_from_fraction(0.1, 95) == 10);
    CHECK(spacing_from_fraction(0.2, 100) == 20);
  }
}

TEST_SUITE("qml_objective") {
  TEST_CASE("no breaks on normalized pseudo-factors is zero") {
    const PseudoFactorSet g = shifted_factors(60, 2, 1);
    CHECK(std::abs(qml_objective(segment_stats(g), BreakConfiguration::none(60, 4))) < 1e-6);
  }

  TEST_CASE("scalar hand computation") {
    const Index t = 40;
    const double eps = 1e-3;
    Eigen::MatrixXd g(t, 1);
    for (Index i = 0; i < t; ++i) g(i, 0) = (i % 2 == 0 ? 1.0 : -1.0) * (i < t / 2 ? std::sqrt(2.0) : eps);
    const double expected = 20.0 * std::log(2.0) + 20.0 * std::log(eps * eps);
    CHECK(qml_objective(SegmentStats(g), BreakConfiguration({20}, t, 3)) == doctest::Approx(expected).epsilon(1e-9));
  }

  TEST_CASE("T=24, r=2, breaks (8, 16) against direct covariances") {
    PhiloxStream rng(2);
    const Eigen::MatrixXd g = gaussian(24, 2, rng);
    const double direct = testsupport::direct_objective(g, {8, 16});
    CHECK(std::abs(qml_objective(SegmentStats(g), BreakConfiguration({8, 16}, 24, 4)) - direct) < 1e-10);
  }
}

TEST_SUITE("dp_detect") {
  TEST_CASE("matches exhaustive enumeration for T <= 40") {
    int cases = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const Index t = 20 + static_cast<Index>(seed % 21);
      const Index r = 1 + static_cast<Index>(seed % 2);
      const PseudoFactorSet g = shifted_factors(t, r, 300 + seed);
      const SegmentStats stats = segment_stats(g);
      for (Index m = 1; m <= 3; ++m) {
        const Index h = r + 2;
        if ((m + 1) * h > t) continue;
        const BreakConfiguration dp = dp_detect(stats, m, h);
        const testsupport::BruteForce bf = testsupport::brute_force(g.g_hat, m, h);
        CHECK(dp.breakpoints() == bf.breaks);
        CHECK(std::abs(qml_objective(stats, dp) - bf.objective) < 1e-9 * (1.0 + std::abs(bf.objective)));
        ++cases;
      }
    }
    CHECK(cases == 90);
  }

  TEST_CASE("ties go to the lexicographically smallest configuration") {
    // Constant second moment everywhere: every configuration costs the same.
    Eigen::MatrixXd g(24, 1);
    for (Index i = 0; i < 24; ++i) g(i, 0) = i % 2 == 0 ? 1.0 : -1.0;
    CHECK(dp_detect(SegmentStats(g), 2, 3).breakpoints() == std::vector<Index>{3, 6});
  }

  TEST_CASE("infeasible spacing") {
    const SegmentStats stats(Eigen::MatrixXd::Random(30, 2));
    CHECK_THROWS_AS(dp_detect(stats, 2, 11), Error);
    CHECK_NOTHROW(dp_detect(stats, 2, 10));
    CHECK_THROWS_AS(dp_detect(stats, 1, 3), Error);  // h < r + 2
  }

  TEST_CASE("noiseless DGP 1.B recovers the true breaks exactly") {
    SimulationSpec spec;
    spec.noise_scale = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      spec.seed = seed;
      const SimulatedTruth truth = simulate_panel(spec);
      const SegmentStats stats = segment_stats(extract_pseudo_factors(truth.panel, 3));
      CHECK(dp_detect(stats, 2, 10).breakpoints() == std::vector<Index>{30, 70});
    }
  }
}

TEST_SUITE("kernels") {
  TEST_CASE("OpenMP cost table and suffix DP equal the serial reference bit for bit") {
    const SegmentStats stats = segment_stats(shifted_factors(120, 3, 77));
    const CostTable a = build_cost_table(stats, 6);
    const CostTable b = build_cost_table_serial(stats, 6);
    CHECK(a.cost == b.cost);
    CHECK(a.clamp_events == b.clamp_events);
    const SuffixTables sa = suffix_dp(a, 6);
    const SuffixTables sb = suffix_dp_serial(b, 6);
    CHECK(sa.best == sb.best);
    CHECK(sa.next == sb.next);
  }

  TEST_CASE("cost table entries") {
    PhiloxStream rng(8);
    const Eigen::MatrixXd g = gaussian(30, 2, rng);
    const SegmentStats stats(g);
    const CostTable table = build_cost_table(stats, 5);
    CHECK(std::isinf(table(0, 4)));
    CHECK(std::isinf(table(3, 20)));   // start 3 can never begin a regime
    CHECK(std::isinf(table(5, 27)));   // end 27 leaves a 3-period tail
    const double direct = testsupport::direct_objective(g.middleRows(5, 15), {});
    CHECK(table(5, 20) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_SUITE("VAR(1) radius") {
  TEST_CASE("exact linear recursion") {
    Eigen::MatrixXd g(50, 2);
    g.row(0) << 1.0, 1.0;
    for (Index t = 1; t < 50; ++t) g.row(t) << 0.5 * g(t - 1, 0), -0.25 * g(t - 1, 1);
    CHECK(std::abs(fit_var1_radius(wrap(g)) - 0.5) < 1e-10);
  }

  TEST_CASE("complex eigenvalues") {
    // Rotation by 60 degrees scaled by 0.9: eigenvalues 0.9 e^{+-i pi/3}.
    const double c = 0.9 * std::cos(M_PI / 3.0);
    const double s = 0.9 * std::sin(M_PI / 3.0);
    Eigen::Matrix2d a;
    a << c, -s, s, c;
    PhiloxStream rng(3);
    Eigen::MatrixXd g(400, 2);
    g.row(0) << 1.0, 0.0;
    for (Index t = 1; t < 400; ++t) g.row(t) = (a * g.row(t - 1).transpose()).transpose() + 1e-9 * gaussian(1, 2, rng);
    CHECK(fit_var1_radius(wrap(g)) == doctest::Approx(0.9).epsilon(1e-6));
  }

  TEST_CASE("white noise factors") {
    PhiloxStream rng(4);
    CHECK(fit_var1_radius(wrap(gaussian(2000, 3, rng))) < 0.12);
  }

  TEST_CASE("AR(1) factors at rho = 0.7") {
    PhiloxStream rng(5);
    CHECK(std::abs(fit_var1_radius(wrap(simulate_factors(2000, 3, 0.7, rng))) - 0.7) < 0.07);
  }

  TEST_CASE("singular regressors trigger the ridge") {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(30, 2);
    PhiloxStream rng(6);
    g.col(0) = gaussian(30, 1, rng);
    const Var1Fit fit = fit_var1(wrap(g));
    CHECK(fit.ridge_applied);
    CHECK(std::isfinite(fit.radius));
  }

  TEST_CASE("too few observations") {
    CHECK_THROWS_AS(fit_var1_radius(wrap(Eigen::MatrixXd::Random(3, 2))), Error);
    CHECK_NOTHROW(fit_var1_radius(wrap(Eigen::MatrixXd::Random(4, 2))));
  }
}

TEST_SUITE("information criterion") {
  TEST_CASE("penalty arithmetic") {
    CHECK(break_penalty(0, 0.5, 3, 100, 100) == 0.0);
    CHECK(break_penalty(1, 0.0, 2, 100, 100) == doctest::Approx(4.0 * std::log(100.0)).epsilon(1e-14));
    CHECK(break_penalty(1, 0.0, 2, 100, 100) == doctest::Approx(18.4207).epsilon(1e-5));
    CHECK(break_penalty(1, 0.7, 2, 100, 100) == doctest::Approx(1.7 * break_penalty(1, 0.0, 2, 100, 100)));
    CHECK(break_penalty(2, 0.0, 2, 50, 400) == doctest::Approx(8.0 * std::log(50.0)));
    CHECK_THROWS_AS(break_penalty(1, -0.1, 2, 100, 100), Error);
  }

  TEST_CASE("IC adds the penalty to the objective") {
    const PseudoFactorSet g = shifted_factors(90, 2, 9);
    const SegmentStats stats = segment_stats(g);
    const BreakConfiguration config({30, 60}, 90, 10);
    CHECK(information_criterion(stats, config, 0.3, 50) ==
          doctest::Approx(qml_objective(stats, config) + 2.0 * 1.3 * 4.0 * std::log(50.0)));
    CHECK(information_criterion(stats, BreakConfiguration::none(90, 10), 0.3, 50) == doctest::Approx(0.0).epsilon(1e-6));
  }
}

TEST_SUITE("select_num_breaks") {
  TEST_CASE("report is consistent and the objective is nonincreasing when refinement is possible") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const PseudoFactorSet g = shifted_factors(100, 2, 40 + seed);
      const SegmentStats stats = segment_stats(g);
      // With T >= (m_max + 1)(2h - 1) + 1 every optimum can be refined by one more break.
      const SelectionReport rep = select_num_breaks(stats, g, 4, 4, 60);
      REQUIRE(rep.objective_per_m.size() == 5);
      for (std::size_t m = 1; m < 5; ++m) CHECK(rep.objective_per_m[m] <= rep.objective_per_m[m - 1] + 1e-9);
      std::size_t argmin = 0;
      for (std::size_t m = 1; m < 5; ++m)
        if (rep.ic_per_m[m] < rep.ic_per_m[argmin]) argmin = m;
      CHECK(rep.m_hat == static_cast<Index>(argmin));
      CHECK(rep.selected().m() == rep.m_hat);
      for (std::size_t m = 0; m < 5; ++m) {
        CHECK(rep.best_config_per_m[m].m() == static_cast<Index>(m));
        CHECK(rep.ic_per_m[m] == doctest::Approx(rep.objective_per_m[m] +
                                                 break_penalty(static_cast<Index>(m), rep.rho_hat, 2, 60, 100)));
      }
      CHECK(rep.best_config_per_m[2] == dp_detect(stats, 2, 4));
    }
  }

  TEST_CASE("infeasible m_max") {
    const PseudoFactorSet g = shifted_factors(60, 2, 1);
    CHECK_THROWS_AS(select_num_breaks(segment_stats(g), g, 3, 20, 50), Error);
    CHECK_THROWS_AS(select_num_breaks(segment_stats(g), g, 0, 20, 50), Error);
  }

  TEST_CASE("rotation invariance") {
    PhiloxStream rng(10);
    const PseudoFactorSet g = shifted_factors(80, 3, 12);
    const SegmentStats base = segment_stats(g);
    const SelectionReport ref = select_num_breaks(base, g, 3, 8, 80);
    for (int k = 0; k < 5; ++k) {
      const Eigen::MatrixXd q = testsupport::random_orthogonal(3, rng);
      const PseudoFactorSet rotated = wrap(g.g_hat * q);
      const SelectionReport rep = select_num_breaks(segment_stats(rotated), rotated, 3, 8, 80);
      for (std::size_t m = 0; m <= 3; ++m) {
        CHECK(rep.best_config_per_m[m] == ref.best_config_per_m[m]);
        CHECK(std::abs(rep.objective_per_m[m] - ref.objective_per_m[m]) < 1e-8);
      }
      CHECK(std::abs(rep.rho_hat - ref.rho_hat) < 1e-8);
      CHECK(rep.m_hat == ref.m_hat);
    }
  }
}

TEST_CASE("overfitting gain stays below the penalty, underfitting loss grows with T") {
  SimulationSpec spec;
  spec.n = 300;
  int below = 0;
  double gap300 = 0.0;
  double gap600 = 0.0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    spec.seed = 5000 + static_cast<std::uint64_t>(s);
    spec.periods = 300;
    SimulatedTruth truth = simulate_panel(spec);
    PseudoFactorSet g = extract_pseudo_factors(truth.panel, 3);
    SelectionReport rep = select_num_breaks(segment_stats(g), g, 3, 30, 300);
    if (rep.objective_per_m[2] - rep.objective_per_m[3] < break_penalty(1, rep.rho_hat, 3, 300, 300)) ++below;
    gap300 += rep.objective_per_m[1] - rep.objective_per_m[2];
    if (s < 20) {
      spec.periods = 600;
      truth = simulate_panel(spec);
      g = extract_pseudo_factors(truth.panel, 3);
      rep = select_num_breaks(segment_stats(g), g, 2, 60, 300);
      gap600 += rep.objective_per_m[1] - rep.objective_per_m[2];
    }
  }
  CHECK(below >= 95);
  const double ratio = (gap600 / 20.0) / (gap300 / seeds);
  CHECK(ratio >= 1.5);
  CHECK(ratio <= 2.8);
}
