#include "breakscope/csv_io.hpp"

#include "breakscope/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>

namespace breakscope {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one record; double quotes group commas and "" escapes a quote.
std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.emplace_back(trim(cur));
  return fields;
}

bool is_missing(std::string_view s) { return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "."; }

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

LoadedPanel read_csv(std::istream& in, const CsvOptions& options) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    records.push_back(split_record(line));
    line_numbers.push_back(line_no);
  }
  if (records.empty()) throw Error(ErrorKind::ParseError, "input is empty");

  std::vector<std::string> header;
  std::size_t first_data = 0;
  if (options.has_header) {
    header = records.front();
    first_data = 1;
  }
  if (first_data >= records.size()) throw Error(ErrorKind::ParseError, "no data rows");

  const std::size_t width = records[first_data].size();
  if (options.has_header && header.size() != width) {
    throw Error(ErrorKind::RaggedRows, "header has " + std::to_string(header.size()) + " fields but line " +
                                           std::to_string(line_numbers[first_data]) + " has " + std::to_string(width));
  }
  for (std::size_t k = first_data; k < records.size(); ++k) {
    if (records[k].size() != width) {
      throw Error(ErrorKind::RaggedRows, "line " + std::to_string(line_numbers[k]) + " has " +
                                             std::to_string(records[k].size()) + " fields, expected " +
                                             std::to_string(width));
    }
  }

  bool label_column = options.date_column == CsvOptions::DateColumn::First;
  if (options.date_column == CsvOptions::DateColumn::Auto) {
    if (options.has_header) {
      std::string first = header.front();
      for (auto& c : first) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      label_column = first.empty() || first == "period" || first == "date" || first == "sasdate" || first == "time";
    }
    for (std::size_t k = first_data; k < records.size() && !label_column; ++k) {
      const std::string& cell = records[k][0];
      if (!is_missing(cell) && !parse_number(cell)) label_column = true;
    }
  }
  const std::size_t first_col = label_column ? 1 : 0;
  if (width <= first_col) throw Error(ErrorKind::ParseError, "no numeric columns");

  const auto rows = static_cast<Index>(records.size() - first_data);
  const auto cols = static_cast<Index>(width - first_col);
  Eigen::MatrixXd grid(rows, cols);
  std::vector<std::pair<Index, Index>> missing;
  for (Index i = 0; i < rows; ++i) {
    const auto& rec = records[first_data + static_cast<std::size_t>(i)];
    for (Index j = 0; j < cols; ++j) {
      const std::string& cell = rec[first_col + static_cast<std::size_t>(j)];
      if (is_missing(cell)) {
        grid(i, j) = NAN;
        missing.emplace_back(i, j);
        continue;
      }
      const auto value = parse_number(cell);
      if (!value) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line_numbers[first_data + static_cast<std::size_t>(i)]) +
                                               ", column " + std::to_string(first_col + static_cast<std::size_t>(j) + 1) +
                                               ": cannot parse '" + cell + "' as a number");
      }
      grid(i, j) = *value;
    }
  }

  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  for (Index i = 0; i < rows; ++i) {
    row_labels.push_back(label_column ? records[first_data + static_cast<std::size_t>(i)][0] : std::to_string(i + 1));
  }
  for (Index j = 0; j < cols; ++j) {
    col_labels.push_back(options.has_header ? header[first_col + static_cast<std::size_t>(j)] : "x" + std::to_string(j + 1));
  }

  LoadedPanel out;
  if (options.transpose) {
    grid.transposeInPlace();
    for (auto& cell : missing) std::swap(cell.first, cell.second);
    std::swap(row_labels, col_labels);
    // Without a header the column labels were placeholders for periods.
    if (!options.has_header) {
      for (std::size_t t = 0; t < row_labels.size(); ++t) row_labels[t] = std::to_string(t + 1);
    }
    if (!label_column) {
      for (std::size_t i = 0; i < col_labels.size(); ++i) col_labels[i] = "x" + std::to_string(i + 1);
    }
  }

  if (!missing.empty()) {
    if (!options.impute_mean) {
      throw Error(ErrorKind::MissingData, std::to_string(missing.size()) + " missing cell(s); first at period " +
                                              std::to_string(missing.front().first + 1) + ", series " +
                                              std::to_string(missing.front().second + 1));
    }
    for (Index j = 0; j < grid.cols(); ++j) {
      double sum = 0.0;
      Index present = 0;
      for (Index t = 0; t < grid.rows(); ++t) {
        if (!std::isnan(grid(t, j))) {
          sum += grid(t, j);
          ++present;
        }
      }
      if (present == 0 && grid.col(j).hasNaN()) {
        throw Error(ErrorKind::MissingData, "series " + col_labels[static_cast<std::size_t>(j)] + " has no observed values");
      }
      const double mean = present > 0 ? sum / static_cast<double>(present) : 0.0;
      for (Index t = 0; t < grid.rows(); ++t) {
        if (std::isnan(grid(t, j))) grid(t, j) = mean;
      }
    }
    std::string cells;
    for (std::size_t k = 0; k < missing.size() && k < 20; ++k) {
      cells += (k ? ", " : "") + row_labels[static_cast<std::size_t>(missing[k].first)] + "/" +
               col_labels[static_cast<std::size_t>(missing[k].second)];
    }
    if (missing.size() > 20) cells += ", ...";
    out.warnings.push_back("WARNING: imputed " + std::to_string(missing.size()) +
                           " missing cell(s) with column means: " + cells);
    out.imputed_cells = missing;
  }

  out.panel.values = std::move(grid);
  out.panel.period_labels = std::move(row_labels);
  out.panel.series_names = std::move(col_labels);
  out.panel.validate();
  return out;
}

LoadedPanel load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  return read_csv(in, options);
}

void write_csv(const Panel& panel, std::ostream& out) {
  out << "period";
  for (const auto& name : panel.series_names) out << ',' << name;
  out << '\n';
  char buf[64];
  for (Index t = 0; t < panel.periods(); ++t) {
    out << panel.period_labels[static_cast<std::size_t>(t)];
    for (Index i = 0; i < panel.series(); ++i) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), panel.values(t, i));
      out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

void save_csv(const Panel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  write_csv(panel, out);
  if (!out) throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
}

}  // namespace breakscope
