#ifndef BREAKSCOPE_REPORT_HPP
#define BREAKSCOPE_REPORT_HPP

#include "breakscope/break_classify.hpp"
#include "breakscope/panel.hpp"
#include "breakscope/sim_lab.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace breakscope {

inline constexpr const char* kReportSchema = "breakscope-report/1";

struct DetectOptions {
  std::optional<Index> breaks;       // known number of breaks; unset means IC selection
  Index max_breaks = 5;
  std::optional<Index> factors;      // known pseudo-factor count; unset means IC2
  Index max_factors = 12;
  std::optional<Index> min_spacing;  // unset means max(20, r + 2)
  bool standardize = true;
  std::uint64_t seed = 0;            // reserved: the pipeline is deterministic
};

struct DetectionReport {
  std::string source;
  Index periods = 0;
  Index series = 0;
  bool standardized = true;

  Index r_full = 0;
  bool r_estimated = true;
  Index r_max = 0;
  std::vector<double> factor_criterion;  // IC2(k), k = 0..r_max, when estimated
  Index min_spacing = 0;
  bool known_m = false;
  Index m_max = 0;

  Index m_hat = 0;
  std::vector<Index> breakpoints;
  std::vector<std::string> breakpoint_labels;
  std::vector<double> objective_per_m;
  std::vector<double> ic_per_m;
  double rho_hat = 0.0;
  bool rho_ridge_applied = false;

  std::vector<Index> regime_factor_counts;
  std::vector<BreakTypeReport> break_types;

  long clamp_events = 0;
  std::vector<std::string> warnings;
};

/// standardize -> factor count -> pseudo-factors -> segment stats ->
/// break search -> classification.
DetectionReport run_detection(const Panel& panel, const DetectOptions& options, std::string source = {});

nlohmann::json to_json(const DetectionReport& report);
std::string human_summary(const DetectionReport& report);

nlohmann::json to_json(const MetricsTable& table);
/// Header: scheme,N,T,rho,alpha,beta,b,reps,breakpoint_index,rmse,mae,detection_rate
void write_metrics_csv(const std::vector<MetricsTable>& tables, std::ostream& out);

}  // namespace breakscope

#endif  // BREAKSCOPE_REPORT_HPP
