#ifndef BREAKSCOPE_PANEL_HPP
#define BREAKSCOPE_PANEL_HPP

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace breakscope {

using Index = Eigen::Index;

/// A T x N panel of observations: rows are periods, columns are series.
///
/// The core only ever sees complete, finite panels; missing-value handling
/// lives in the CSV loader.
struct Panel {
  Eigen::MatrixXd values;
  std::vector<std::string> series_names;
  std::vector<std::string> period_labels;

  Index periods() const noexcept { return values.rows(); }
  Index series() const noexcept { return values.cols(); }

  /// Builds a panel with default labels ("1".."T", "x1".."xN") and validates it.
  static Panel from_matrix(Eigen::MatrixXd values);

  /// Throws InvalidPanel if the dimensions, labels, or entries are unusable.
  void validate() const;

  /// Rows [begin, end) as a new panel, labels carried along.
  Panel slice_periods(Index begin, Index end) const;
};

/// Column-wise demeaning and/or scaling to unit sample variance (n - 1 denominator).
Panel standardize(const Panel& panel, bool demean, bool unit_variance);

}  // namespace breakscope

#endif  // BREAKSCOPE_PANEL_HPP
