#include "breakscope/report.hpp"

#include "breakscope/break_search.hpp"
#include "breakscope/error.hpp"
#include "breakscope/factors.hpp"
#include "breakscope/segment_stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace breakscope {
namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, static_cast<std::size_t>(res.ptr - buf)};
}

std::string fixed6(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

nlohmann::json nullable(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

DetectionReport run_detection(const Panel& input, const DetectOptions& options, std::string source) {
  input.validate();
  DetectionReport report;
  report.source = std::move(source);
  report.periods = input.periods();
  report.series = input.series();
  report.standardized = options.standardize;
  const Panel panel = options.standardize ? standardize(input, true, true) : input;

  const Index cap = std::min(panel.periods(), panel.series()) - 1;
  report.r_max = options.max_factors;
  if (report.r_max > cap) {
    report.warnings.push_back("max-factors lowered from " + std::to_string(report.r_max) + " to min(N,T)-1=" +
                              std::to_string(cap));
    report.r_max = cap;
  }
  if (report.r_max < 1) throw Error(ErrorKind::InvalidArgument, "max-factors must be at least 1");

  if (options.factors) {
    report.r_full = *options.factors;
    report.r_estimated = false;
  } else {
    const FactorCountEstimate est = factor_count_criterion(panel.values, report.r_max);
    report.r_full = est.selected;
    report.factor_criterion = est.criterion;
  }

  report.known_m = options.breaks.has_value();
  report.m_max = report.known_m ? *options.breaks : options.max_breaks;
  if (report.m_max < 0) throw Error(ErrorKind::InvalidArgument, "number of breaks must be nonnegative");

  if (report.r_full == 0) {
    report.warnings.push_back("no common factors detected; break search skipped");
    report.min_spacing = options.min_spacing.value_or(0);
    return report;
  }

  const PseudoFactorSet g = extract_pseudo_factors(panel, report.r_full);
  const SegmentStats stats(g.g_hat);
  report.min_spacing = options.min_spacing.value_or(default_min_spacing(report.r_full));
  const Index h = report.min_spacing;
  if (!report.known_m) {
    const Index feasible = panel.periods() / h - 1;
    if (report.m_max > feasible) {
      report.warnings.push_back("max-breaks lowered from " + std::to_string(report.m_max) + " to " +
                                std::to_string(std::max<Index>(feasible, 0)) + " (spacing " + std::to_string(h) +
                                ", T=" + std::to_string(panel.periods()) + ")");
      report.m_max = std::max<Index>(feasible, 0);
    }
  }

  BreakConfiguration chosen = BreakConfiguration::none(panel.periods(), h);
  if (report.m_max == 0) {
    const Var1Fit var = fit_var1(g);
    report.rho_hat = var.radius;
    report.rho_ridge_applied = var.ridge_applied;
    const LogDet whole = segment_logdet(stats, 0, panel.periods());
    report.clamp_events = whole.clamped > 0 ? 1 : 0;
    report.objective_per_m = {static_cast<double>(panel.periods()) * whole.value};
    report.ic_per_m = report.objective_per_m;
  } else {
    const SelectionReport sel = select_num_breaks(stats, g, report.m_max, h, panel.series());
    report.objective_per_m = sel.objective_per_m;
    report.ic_per_m = sel.ic_per_m;
    report.rho_hat = sel.rho_hat;
    report.rho_ridge_applied = sel.rho_ridge_applied;
    report.clamp_events = sel.clamp_events;
    const Index m = report.known_m ? report.m_max : sel.m_hat;
    chosen = sel.best_config_per_m[static_cast<std::size_t>(m)];
  }
  if (report.rho_ridge_applied) report.warnings.push_back("VAR(1) regressor Gram matrix was singular; ridge applied");
  if (report.clamp_events > 0) {
    report.warnings.push_back(std::to_string(report.clamp_events) +
                              " segment covariance(s) had eigenvalues clamped at the log-determinant floor");
  }

  report.m_hat = chosen.m();
  report.breakpoints = chosen.breakpoints();
  for (Index k : report.breakpoints) report.breakpoint_labels.push_back(panel.period_labels[static_cast<std::size_t>(k - 1)]);

  Index r_regime = std::min(report.r_max, h - 2);
  if (chosen.m() > 0 && r_regime < report.r_max) {
    report.warnings.push_back("regime factor counts use r_max=" + std::to_string(r_regime) + " (spacing " +
                              std::to_string(h) + ")");
  }
  r_regime = std::max<Index>(r_regime, 1);
  report.regime_factor_counts = regime_factor_counts(panel, chosen, r_regime);
  for (Index j = 1; j <= chosen.m(); ++j) {
    BreakTypeReport bt = classify_break(panel, chosen, j, r_regime, report.r_full);
    if (bt.inconsistent_ranks) {
      report.warnings.push_back("break " + std::to_string(j) + ": combined-regime factor count " +
                                std::to_string(bt.r_combined) + " is below a single-regime count");
    }
    report.break_types.push_back(bt);
  }
  return report;
}

nlohmann::json to_json(const DetectionReport& r) {
  using nlohmann::json;
  json breaks = json::array();
  for (std::size_t j = 0; j < r.breakpoints.size(); ++j) {
    breaks.push_back({{"index", j + 1}, {"period", r.breakpoints[j]}, {"label", r.breakpoint_labels[j]}});
  }
  json per_m = json::array();
  for (std::size_t m = 0; m < r.objective_per_m.size(); ++m) {
    per_m.push_back({{"m", m}, {"objective", nullable(r.objective_per_m[m])}, {"ic", nullable(r.ic_per_m[m])}});
  }
  json types = json::array();
  for (const auto& bt : r.break_types) {
    types.push_back({{"index", bt.index},
                     {"r_left", bt.r_left},
                     {"r_right", bt.r_right},
                     {"r_combined", bt.r_combined},
                     {"r_full", bt.r_full},
                     {"label", std::string(to_string(bt.label))},
                     {"subtype", std::string(to_string(bt.subtype))},
                     {"inconsistent_ranks", bt.inconsistent_ranks}});
  }
  json factor_ic = json::array();
  for (double v : r.factor_criterion) factor_ic.push_back(nullable(v));
  return {
      {"schema", kReportSchema},
      {"input", {{"source", r.source}, {"periods", r.periods}, {"series", r.series}, {"standardized", r.standardized}}},
      {"settings",
       {{"mode", r.known_m ? "known" : "select"},
        {"m_max", r.m_max},
        {"min_spacing", r.min_spacing},
        {"r_max", r.r_max},
        {"r_source", r.r_estimated ? "ic2" : "given"}}},
      {"r_full", r.r_full},
      {"factor_criterion", factor_ic},
      {"m_hat", r.m_hat},
      {"breakpoints", breaks},
      {"per_m", per_m},
      {"rho_hat", r.rho_hat},
      {"regime_factor_counts", r.regime_factor_counts},
      {"break_types", types},
      {"diagnostics",
       {{"clamp_events", r.clamp_events}, {"rho_ridge_applied", r.rho_ridge_applied}, {"warnings", r.warnings}}},
  };
}

std::string human_summary(const DetectionReport& r) {
  std::ostringstream out;
  out << "panel: T=" << r.periods << " N=" << r.series << (r.standardized ? " (standardized)" : "") << '\n';
  out << "pseudo-factors: r=" << r.r_full << (r.r_estimated ? " (IC2, r_max=" + std::to_string(r.r_max) + ")" : " (given)")
      << '\n';
  out << "min spacing h=" << r.min_spacing << ", rho_hat=" << fixed6(r.rho_hat) << '\n';
  if (!r.ic_per_m.empty()) {
    out << "  m  objective        IC\n";
    for (std::size_t m = 0; m < r.ic_per_m.size(); ++m) {
      char line[128];
      std::snprintf(line, sizeof(line), "  %zu  %14.4f  %14.4f%s\n", m, r.objective_per_m[m], r.ic_per_m[m],
                    static_cast<Index>(m) == r.m_hat ? "  <" : "");
      out << line;
    }
  }
  out << (r.known_m ? "breaks (given m): " : "selected breaks: ") << r.m_hat << '\n';
  for (std::size_t j = 0; j < r.breakpoints.size(); ++j) {
    out << "  k" << j + 1 << " = " << r.breakpoints[j] << " (" << r.breakpoint_labels[j] << ")";
    if (j < r.break_types.size()) {
      const auto& bt = r.break_types[j];
      out << "  " << to_string(bt.label) << "/" << to_string(bt.subtype) << "  r_left=" << bt.r_left
          << " r_right=" << bt.r_right << " r_combined=" << bt.r_combined;
    }
    out << '\n';
  }
  if (!r.regime_factor_counts.empty()) {
    out << "regime factor counts:";
    for (Index c : r.regime_factor_counts) out << ' ' << c;
    out << '\n';
  }
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  return out.str();
}

nlohmann::json to_json(const MetricsTable& t) {
  using nlohmann::json;
  json rmse = json::array();
  json mae = json::array();
  for (double v : t.rmse) rmse.push_back(nullable(v));
  for (double v : t.mae) mae.push_back(nullable(v));
  return {
      {"scheme", scheme_name(t.spec.scheme)},
      {"N", t.spec.n},
      {"T", t.spec.periods},
      {"m0", t.spec.m0},
      {"r0", t.spec.r0},
      {"rho", t.spec.rho},
      {"alpha", t.spec.alpha},
      {"beta", t.spec.beta},
      {"b", t.spec.b},
      {"seed", t.spec.seed},
      {"true_breaks", t.spec.true_breaks()},
      {"reps", t.reps},
      {"reps_used", t.reps_used},
      {"know_m", t.know_m},
      {"m_max", t.m_max},
      {"min_spacing", t.min_spacing},
      {"rmse", rmse},
      {"mae", mae},
      {"detection_rate", t.detection_rate ? json(*t.detection_rate) : json(nullptr)},
      {"m_hat_counts", t.m_hat_counts},
  };
}

void write_metrics_csv(const std::vector<MetricsTable>& tables, std::ostream& out) {
  out << "scheme,N,T,rho,alpha,beta,b,reps,breakpoint_index,rmse,mae,detection_rate\n";
  for (const auto& t : tables) {
    const std::string prefix = scheme_name(t.spec.scheme) + ',' + std::to_string(t.spec.n) + ',' +
                               std::to_string(t.spec.periods) + ',' + shortest(t.spec.rho) + ',' +
                               shortest(t.spec.alpha) + ',' + shortest(t.spec.beta) + ',' + shortest(t.spec.b) + ',' +
                               std::to_string(t.reps) + ',';
    const std::string rate = t.detection_rate ? fixed6(*t.detection_rate) : "";
    if (t.rmse.empty()) {
      out << prefix << "0,,," << rate << '\n';
      continue;
    }
    for (std::size_t j = 0; j < t.rmse.size(); ++j) {
      out << prefix << j + 1 << ',' << fixed6(t.rmse[j]) << ',' << fixed6(t.mae[j]) << ',' << rate << '\n';
    }
  }
}

}  // namespace breakscope
