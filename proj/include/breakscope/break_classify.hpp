#ifndef BREAKSCOPE_BREAK_CLASSIFY_HPP
#define BREAKSCOPE_BREAK_CLASSIFY_HPP

#include "breakscope/break_search.hpp"
#include "breakscope/panel.hpp"

#include <string_view>
#include <vector>

namespace breakscope {

enum class BreakLabel { Singular, Rotational };

// Finer taxonomy read off the three ranks:
//   FullRankRotation / SingularRotation: rotational, combined rank equal to / below the full-sample rank.
//   FactorsDisappear / FactorsEmerge: the post- (pre-) break loading space is nested in the other.
//   IndependentLoadings: combined rank is the sum of the two regime ranks.
//   SpaceShift: any other singular change (partially overlapping spaces).
enum class BreakSubtype {
  IndependentLoadings,
  FactorsDisappear,
  FactorsEmerge,
  SpaceShift,
  FullRankRotation,
  SingularRotation,
};

std::string_view to_string(BreakLabel label) noexcept;
std::string_view to_string(BreakSubtype subtype) noexcept;

struct BreakTypeReport {
  Index index = 0;  // j, 1-based
  Index r_left = 0;
  Index r_right = 0;
  Index r_combined = 0;
  Index r_full = 0;
  BreakLabel label = BreakLabel::Singular;
  BreakSubtype subtype = BreakSubtype::SpaceShift;
  // Set when the estimates violate r_combined >= max(r_left, r_right).
  bool inconsistent_ranks = false;
};

/// Rotational iff all three ranks agree.
BreakLabel label_for(Index r_left, Index r_right, Index r_combined) noexcept;
BreakSubtype subtype_for(Index r_left, Index r_right, Index r_combined, Index r_full) noexcept;

/// IC2 factor counts of each regime's sub-panel.
std::vector<Index> regime_factor_counts(const Panel& panel, const BreakConfiguration& config, Index r_max);

/// Classifies break j (1-based) from the factor counts of the two adjacent
/// regimes and of their union.
BreakTypeReport classify_break(const Panel& panel, const BreakConfiguration& config, Index j, Index r_max,
                               Index r_full);

/// Estimates r_full once on the whole panel, then classifies every break.
std::vector<BreakTypeReport> classify_all(const Panel& panel, const BreakConfiguration& config, Index r_max);

}  // namespace breakscope

#endif  // BREAKSCOPE_BREAK_CLASSIFY_HPP
