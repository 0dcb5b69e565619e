#ifndef BREAKSCOPE_CSV_IO_HPP
#define BREAKSCOPE_CSV_IO_HPP

#include "breakscope/panel.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace breakscope {

struct CsvOptions {
  enum class DateColumn { Auto, None, First };

  bool has_header = true;
  // Auto treats the first column as period labels when its header is empty or
  // one of period/date/sasdate/time, or when any of its data cells is not a number.
  DateColumn date_column = DateColumn::Auto;
  bool impute_mean = false;
  // Rows are series and columns are periods.
  bool transpose = false;
};

struct LoadedPanel {
  Panel panel;
  std::vector<std::pair<Index, Index>> imputed_cells;  // (period, series), 0-based
  std::vector<std::string> warnings;
};

/// Reads a comma-separated panel. Empty, "NA", "NaN" and "." cells count as
/// missing; they are rejected with MissingData unless impute_mean is set.
LoadedPanel read_csv(std::istream& in, const CsvOptions& options = {});
LoadedPanel load_csv(const std::string& path, const CsvOptions& options = {});

/// Writes rows as periods with a "period" label column; values use the
/// shortest representation that round-trips exactly.
void write_csv(const Panel& panel, std::ostream& out);
void save_csv(const Panel& panel, const std::string& path);

}  // namespace breakscope

#endif  // BREAKSCOPE_CSV_IO_HPP
