#include "breakscope/panel.hpp"

#include "breakscope/error.hpp"

#include <cmath>
#include <string>

namespace breakscope {

Panel Panel::from_matrix(Eigen::MatrixXd values) {
  Panel panel;
  panel.values = std::move(values);
  panel.period_labels.reserve(static_cast<std::size_t>(panel.values.rows()));
  for (Index t = 0; t < panel.values.rows(); ++t) panel.period_labels.push_back(std::to_string(t + 1));
  panel.series_names.reserve(static_cast<std::size_t>(panel.values.cols()));
  for (Index i = 0; i < panel.values.cols(); ++i) panel.series_names.push_back("x" + std::to_string(i + 1));
  panel.validate();
  return panel;
}

void Panel::validate() const {
  if (values.rows() < 2 || values.cols() < 2) {
    throw Error(ErrorKind::InvalidPanel, "panel must have T >= 2 and N >= 2, got T=" +
                                             std::to_string(values.rows()) + " N=" + std::to_string(values.cols()));
  }
  if (static_cast<Index>(period_labels.size()) != values.rows() ||
      static_cast<Index>(series_names.size()) != values.cols()) {
    throw Error(ErrorKind::InvalidPanel, "label counts do not match panel dimensions");
  }
  if (!values.allFinite()) throw Error(ErrorKind::InvalidPanel, "panel contains non-finite entries");
}

Panel Panel::slice_periods(Index begin, Index end) const {
  Panel out;
  out.values = values.middleRows(begin, end - begin);
  out.series_names = series_names;
  out.period_labels.assign(period_labels.begin() + begin, period_labels.begin() + end);
  return out;
}

Panel standardize(const Panel& panel, bool demean, bool unit_variance) {
  panel.validate();
  Panel out = panel;
  const double n = static_cast<double>(panel.periods());
  for (Index i = 0; i < out.series(); ++i) {
    auto col = out.values.col(i);
    const double mean = col.mean();
    if (unit_variance) {
      const double var = (col.array() - mean).square().sum() / (n - 1.0);
      if (!(var > 0.0)) {
        throw Error(ErrorKind::ZeroVarianceColumn,
                    "column " + std::to_string(i) + " (" + panel.series_names[static_cast<std::size_t>(i)] +
                        ") is constant");
      }
      const double scale = 1.0 / std::sqrt(var);
      if (demean) {
        col = (col.array() - mean) * scale;
      } else {
        col *= scale;
      }
    } else if (demean) {
      col.array() -= mean;
    }
  }
  return out;
}

}  // namespace breakscope
