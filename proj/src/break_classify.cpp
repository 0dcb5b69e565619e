#include "breakscope/break_classify.hpp"

#include "breakscope/error.hpp"
#include "breakscope/factors.hpp"

#include <algorithm>
#include <string>

namespace breakscope {
namespace {

Index count_on(const Panel& panel, Index begin, Index end, Index r_max) {
  if (end - begin < r_max + 2) {
    throw Error(ErrorKind::RegimeTooShort, "regime (" + std::to_string(begin) + ", " + std::to_string(end) +
                                               "] has " + std::to_string(end - begin) +
                                               " periods; factor counting with r_max=" + std::to_string(r_max) +
                                               " needs " + std::to_string(r_max + 2));
  }
  return factor_count_criterion(panel.values.middleRows(begin, end - begin), r_max).selected;
}

void check_config(const Panel& panel, const BreakConfiguration& config) {
  if (config.periods() != panel.periods()) {
    throw Error(ErrorKind::InvalidConfiguration, "configuration length does not match the panel");
  }
}

}  // namespace

std::string_view to_string(BreakLabel label) noexcept {
  return label == BreakLabel::Rotational ? "Rotational" : "Singular";
}

std::string_view to_string(BreakSubtype subtype) noexcept {
  switch (subtype) {
    case BreakSubtype::IndependentLoadings: return "IndependentLoadings";
    case BreakSubtype::FactorsDisappear: return "FactorsDisappear";
    case BreakSubtype::FactorsEmerge: return "FactorsEmerge";
    case BreakSubtype::SpaceShift: return "SpaceShift";
    case BreakSubtype::FullRankRotation: return "FullRankRotation";
    case BreakSubtype::SingularRotation: return "SingularRotation";
  }
  return "Unknown";
}

BreakLabel label_for(Index r_left, Index r_right, Index r_combined) noexcept {
  return (r_left == r_right && r_right == r_combined) ? BreakLabel::Rotational : BreakLabel::Singular;
}

BreakSubtype subtype_for(Index r_left, Index r_right, Index r_combined, Index r_full) noexcept {
  if (label_for(r_left, r_right, r_combined) == BreakLabel::Rotational) {
    return r_combined == r_full ? BreakSubtype::FullRankRotation : BreakSubtype::SingularRotation;
  }
  if (r_combined == r_left && r_left > r_right) return BreakSubtype::FactorsDisappear;
  if (r_combined == r_right && r_right > r_left) return BreakSubtype::FactorsEmerge;
  if (r_combined == r_left + r_right) return BreakSubtype::IndependentLoadings;
  return BreakSubtype::SpaceShift;
}

std::vector<Index> regime_factor_counts(const Panel& panel, const BreakConfiguration& config, Index r_max) {
  panel.validate();
  check_config(panel, config);
  const auto bounds = config.boundaries();
  std::vector<Index> counts;
  counts.reserve(bounds.size() - 1);
  for (std::size_t l = 1; l < bounds.size(); ++l) counts.push_back(count_on(panel, bounds[l - 1], bounds[l], r_max));
  return counts;
}

BreakTypeReport classify_break(const Panel& panel, const BreakConfiguration& config, Index j, Index r_max,
                               Index r_full) {
  panel.validate();
  check_config(panel, config);
  if (j < 1 || j > config.m()) {
    throw Error(ErrorKind::InvalidArgument, "break index " + std::to_string(j) + " outside 1.." +
                                                std::to_string(config.m()));
  }
  const auto bounds = config.boundaries();
  const auto ju = static_cast<std::size_t>(j);
  const Index left = bounds[ju - 1];
  const Index mid = bounds[ju];
  const Index right = bounds[ju + 1];

  BreakTypeReport report;
  report.index = j;
  report.r_full = r_full;
  report.r_left = count_on(panel, left, mid, r_max);
  report.r_right = count_on(panel, mid, right, r_max);
  report.r_combined = count_on(panel, left, right, r_max);
  report.label = label_for(report.r_left, report.r_right, report.r_combined);
  report.subtype = subtype_for(report.r_left, report.r_right, report.r_combined, r_full);
  report.inconsistent_ranks = report.r_combined < std::max(report.r_left, report.r_right);
  return report;
}

std::vector<BreakTypeReport> classify_all(const Panel& panel, const BreakConfiguration& config, Index r_max) {
  panel.validate();
  check_config(panel, config);
  std::vector<BreakTypeReport> out;
  if (config.m() == 0) return out;
  const Index r_full = estimate_num_factors(panel, r_max);
  out.reserve(static_cast<std::size_t>(config.m()));
  for (Index j = 1; j <= config.m(); ++j) out.push_back(classify_break(panel, config, j, r_max, r_full));
  return out;
}

}  // namespace breakscope
