#include "breakscope/break_classify.hpp"
#include "breakscope/break_search.hpp"
#include "breakscope/error.hpp"
#include "breakscope/sim_lab.hpp"

#include "doctest.h"
#include "support.hpp"

#include <algorithm>
#include <numeric>

using namespace breakscope;
using testsupport::gaussian;

namespace {

SimulatedTruth dgp(SchemeKind scheme, Index nt, std::uint64_t seed) {
  SimulationSpec spec;
  spec.scheme = scheme;
  spec.n = nt;
  spec.periods = nt;
  spec.seed = seed;
  return simulate_panel(spec);
}

BreakConfiguration true_config(const SimulatedTruth& truth) {
  return BreakConfiguration(truth.true_breaks, truth.panel.periods(), 1);
}

// x_t = Lambda B_j f_t with no noise, regimes split at `breaks`.
Panel noiseless(const std::vector<Eigen::MatrixXd>& b, const std::vector<Index>& breaks, Index t, Index n,
                std::uint64_t seed) {
  PhiloxStream rng(seed);
  const Eigen::MatrixXd lambda = gaussian(n, 3, rng);
  const Eigen::MatrixXd f = gaussian(t, 3, rng);
  Eigen::MatrixXd x(t, n);
  std::size_t regime = 0;
  for (Index i = 0; i < t; ++i) {
    while (regime < breaks.size() && i >= breaks[regime]) ++regime;
    x.row(i) = (lambda * b[regime] * f.row(i).transpose()).transpose();
  }
  return Panel::from_matrix(x);
}

}  // namespace

TEST_SUITE("labels") {
  TEST_CASE("Rotational iff all three ranks agree, over {0..5}^3") {
    for (Index a = 0; a <= 5; ++a)
      for (Index b = 0; b <= 5; ++b)
        for (Index c = 0; c <= 5; ++c) {
          const bool rotational = a == b && b == c;
          CHECK(label_for(a, b, c) == (rotational ? BreakLabel::Rotational : BreakLabel::Singular));
        }
  }

  TEST_CASE("subtypes are consistent with labels") {
    for (Index a = 0; a <= 5; ++a)
      for (Index b = 0; b <= 5; ++b)
        for (Index c = 0; c <= 5; ++c)
          for (Index full = 0; full <= 6; ++full) {
            const BreakSubtype st = subtype_for(a, b, c, full);
            const BreakLabel lb = label_for(a, b, c);
            switch (st) {
              case BreakSubtype::FullRankRotation:
                CHECK(lb == BreakLabel::Rotational);
                CHECK(c == full);
                break;
              case BreakSubtype::SingularRotation:
                CHECK(lb == BreakLabel::Rotational);
                CHECK(c != full);
                break;
              case BreakSubtype::FactorsDisappear:
                CHECK((c == a && a > b));
                break;
              case BreakSubtype::FactorsEmerge:
                CHECK((c == b && b > a));
                break;
              case BreakSubtype::IndependentLoadings:
                CHECK(c == a + b);
                CHECK(lb == BreakLabel::Singular);
                break;
              case BreakSubtype::SpaceShift:
                CHECK(lb == BreakLabel::Singular);
                CHECK_FALSE((c == a && a > b));
                CHECK_FALSE((c == b && b > a));
                CHECK(c != a + b);
                break;
            }
          }
  }

  TEST_CASE("names") {
    CHECK(to_string(BreakLabel::Singular) == "Singular");
    CHECK(to_string(BreakSubtype::SingularRotation) == "SingularRotation");
  }
}

TEST_SUITE("regime_factor_counts") {
  TEST_CASE("DGP 1.C regimes carry 3, 2 and 1 factors") {
    const SimulatedTruth truth = dgp(SchemeKind::Dgp1C, 300, 4);
    CHECK(regime_factor_counts(truth.panel, true_config(truth), 6) == std::vector<Index>{3, 2, 1});
  }

  TEST_CASE("single noiseless rank-2 regime") {
    PhiloxStream rng(1);
    const Panel p = Panel::from_matrix(gaussian(40, 2, rng) * gaussian(30, 2, rng).transpose());
    CHECK(regime_factor_counts(p, BreakConfiguration::none(40, 1), 8) == std::vector<Index>{2});
  }

  TEST_CASE("DGP 1.B regimes carry two factors in most draws") {
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const SimulatedTruth truth = dgp(SchemeKind::Dgp1B, 300, 60 + seed);
      if (regime_factor_counts(truth.panel, true_config(truth), 12) == std::vector<Index>{2, 2, 2}) ++hits;
    }
    CHECK(hits >= 6);
  }

  TEST_CASE("short regimes are refused") {
    const Panel p = testsupport::random_panel(40, 20, 1);
    CHECK_THROWS_AS(regime_factor_counts(p, BreakConfiguration({10}, 40, 1), 12), Error);
    try {
      classify_break(p, BreakConfiguration({10, 16}, 40, 1), 1, 12, 3);
      FAIL("expected RegimeTooShort");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::RegimeTooShort);
    }
  }
}

TEST_SUITE("classify_break") {
  TEST_CASE("DGP 1.E first break is a singular rotation") {
    const SimulatedTruth truth = dgp(SchemeKind::Dgp1E, 300, 8);
    const BreakTypeReport rep = classify_break(truth.panel, true_config(truth), 1, 12, 3);
    CHECK(rep.r_left == 2);
    CHECK(rep.r_right == 2);
    CHECK(rep.r_combined == 2);
    CHECK(rep.label == BreakLabel::Rotational);
    CHECK(rep.subtype == BreakSubtype::SingularRotation);
  }

  TEST_CASE("DGP 1.D breaks are full-rank rotations") {
    const SimulatedTruth truth = dgp(SchemeKind::Dgp1D, 300, 9);
    for (Index j = 1; j <= 2; ++j) {
      const BreakTypeReport rep = classify_break(truth.panel, true_config(truth), j, 12, 3);
      CHECK(rep.r_left == 3);
      CHECK(rep.r_right == 3);
      CHECK(rep.r_combined == 3);
      CHECK(rep.subtype == BreakSubtype::FullRankRotation);
    }
  }

  TEST_CASE("DGP 1.C first break loses a factor") {
    const SimulatedTruth truth = dgp(SchemeKind::Dgp1C, 300, 10);
    const BreakTypeReport rep = classify_break(truth.panel, true_config(truth), 1, 12, 3);
    CHECK(rep.r_left == 3);
    CHECK(rep.r_right == 2);
    CHECK(rep.r_combined == 3);
    CHECK(rep.label == BreakLabel::Singular);
    CHECK(rep.subtype == BreakSubtype::FactorsDisappear);
  }

  TEST_CASE("index bounds") {
    const SimulatedTruth truth = dgp(SchemeKind::Dgp1B, 100, 1);
    CHECK_THROWS_AS(classify_break(truth.panel, true_config(truth), 0, 6, 3), Error);
    CHECK_THROWS_AS(classify_break(truth.panel, true_config(truth), 3, 6, 3), Error);
  }
}

TEST_SUITE("classify_all") {
  TEST_CASE("no breaks") {
    const Panel p = testsupport::random_panel(40, 20, 2);
    CHECK(classify_all(p, BreakConfiguration::none(40, 1), 6).empty());
  }

  TEST_CASE("DGP 1.B: both singular") {
    const SimulatedTruth truth = dgp(SchemeKind::Dgp1B, 300, 12);
    const auto reps = classify_all(truth.panel, true_config(truth), 12);
    REQUIRE(reps.size() == 2);
    for (const auto& r : reps) {
      CHECK(r.label == BreakLabel::Singular);
      CHECK(r.r_full == 3);
      CHECK(r.r_combined == 3);
    }
  }

  TEST_CASE("DGP 1.E: rotational then singular") {
    const SimulatedTruth truth = dgp(SchemeKind::Dgp1E, 300, 13);
    const auto reps = classify_all(truth.panel, true_config(truth), 12);
    REQUIRE(reps.size() == 2);
    CHECK(reps[0].label == BreakLabel::Rotational);
    CHECK(reps[1].label == BreakLabel::Singular);
  }

  TEST_CASE("invariant to permuting the series") {
    const SimulatedTruth truth = dgp(SchemeKind::Dgp1C, 200, 14);
    std::vector<Index> order(200);
    std::iota(order.begin(), order.end(), 0);
    PhiloxStream rng(3);
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::MatrixXd permuted(truth.panel.values.rows(), 200);
    for (Index i = 0; i < 200; ++i) permuted.col(i) = truth.panel.values.col(order[static_cast<std::size_t>(i)]);
    const auto a = classify_all(truth.panel, true_config(truth), 12);
    const auto b = classify_all(Panel::from_matrix(permuted), true_config(truth), 12);
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(a[j].r_left == b[j].r_left);
      CHECK(a[j].r_right == b[j].r_right);
      CHECK(a[j].r_combined == b[j].r_combined);
      CHECK(a[j].subtype == b[j].subtype);
    }
  }
}

TEST_CASE("population example with rank-one regimes") {
  Eigen::MatrixXd b1 = Eigen::MatrixXd::Zero(3, 3);
  b1(0, 0) = 1;
  Eigen::MatrixXd b2 = b1;
  b2(0, 1) = 1;
  Eigen::MatrixXd b2_tilde = b1;
  b2_tilde(1, 0) = 1;
  const Eigen::MatrixXd b3 = Eigen::MatrixXd::Identity(3, 3);
  const std::vector<Index> breaks{40, 80};

  const Panel case1 = noiseless({b1, b2, b3}, breaks, 120, 60, 1);
  const auto c1 = classify_all(case1, BreakConfiguration(breaks, 120, 1), 8);
  CHECK(c1[0].label == BreakLabel::Rotational);
  CHECK(c1[0].r_combined == 1);
  CHECK(c1[1].label == BreakLabel::Singular);
  CHECK(c1[1].r_combined == 3);

  const Panel case2 = noiseless({b1, b2_tilde, b3}, breaks, 120, 60, 1);
  const auto c2 = classify_all(case2, BreakConfiguration(breaks, 120, 1), 8);
  CHECK(c2[0].label == BreakLabel::Singular);
  CHECK(c2[0].r_combined == 2);
  CHECK(c2[1].label == BreakLabel::Singular);
}
