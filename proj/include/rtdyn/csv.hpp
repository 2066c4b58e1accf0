#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace rtdyn {

/// Numeric table with a header row.
struct Table {
  std::vector<std::string> columns;
  Eigen::MatrixXd data;  // rows x columns

  /// Column index; throws std::invalid_argument naming the column when absent.
  Eigen::Index index_of(const std::string& name) const;
  Eigen::VectorXd column(const std::string& name) const;
  bool has(const std::string& name) const;
};

Table make_table(std::vector<std::string> columns, const std::vector<Eigen::VectorXd>& cols);

/// Header line then comma-separated numbers. Errors carry `source` and the line number.
Table read_csv(std::istream& in, const std::string& source = "<input>");
Table read_csv_file(const std::string& path);

/// One number per line, no header (blank lines skipped).
Eigen::VectorXd read_values(std::istream& in, const std::string& source = "<input>");

/// 17 significant digits, '.' decimal point regardless of locale.
void write_csv(std::ostream& out, const Table& t);
void write_csv_file(const std::string& path, const Table& t);
std::string format_number(double x);

/// Throws unless every listed column is present.
void require_columns(const Table& t, const std::vector<std::string>& names, const std::string& source);

}  // namespace rtdyn
