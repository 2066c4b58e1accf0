#include "rtdyn/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace rtdyn {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto c = line.find(',');
    out.push_back(trim(line.substr(0, c)));
    if (c == std::string_view::npos) return out;
    line = line.substr(c + 1);
  }
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw std::invalid_argument(source + ":" + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view f, const std::string& source, std::size_t line) {
  if (f == "inf" || f == "+inf") return HUGE_VAL;
  if (f == "-inf") return -HUGE_VAL;
  if (f == "nan") return std::nan("");
  double x = 0;
  const char* b = f.data();
  if (!f.empty() && f.front() == '+') ++b;
  const auto r = std::from_chars(b, f.data() + f.size(), x);
  if (f.empty() || r.ec != std::errc() || r.ptr != f.data() + f.size())
    fail(source, line, "invalid number '" + std::string(f) + "'");
  return x;
}

}  // namespace

Eigen::Index Table::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<Eigen::Index>(i);
  throw std::invalid_argument("missing column '" + name + "'");
}

bool Table::has(const std::string& name) const {
  for (const auto& c : columns)
    if (c == name) return true;
  return false;
}

Eigen::VectorXd Table::column(const std::string& name) const { return data.col(index_of(name)); }

Table make_table(std::vector<std::string> columns, const std::vector<Eigen::VectorXd>& cols) {
  if (columns.size() != cols.size()) throw std::invalid_argument("make_table: header/column count mismatch");
  Table t;
  t.columns = std::move(columns);
  const Eigen::Index rows = cols.empty() ? 0 : cols.front().size();
  t.data.resize(rows, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != rows) throw std::invalid_argument("make_table: ragged columns");
    t.data.col(static_cast<Eigen::Index>(j)) = cols[j];
  }
  return t;
}

Table read_csv(std::istream& in, const std::string& source) {
  Table t;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (!have_header) {
      for (auto f : fields) {
        if (f.empty()) fail(source, line_no, "empty column name");
        t.columns.emplace_back(f);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != t.columns.size())
      fail(source, line_no,
           "expected " + std::to_string(t.columns.size()) + " fields, found " + std::to_string(fields.size()));
    for (auto f : fields) values.push_back(parse_number(f, source, line_no));
  }
  if (!have_header) throw std::invalid_argument(source + ": missing header row");
  const auto cols = static_cast<Eigen::Index>(t.columns.size());
  t.data = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(values.size()) / cols, cols);
  return t;
}

Table read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  return read_csv(in, path);
}

Eigen::VectorXd read_values(std::istream& in, const std::string& source) {
  std::vector<double> v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = trim(line);
    if (!f.empty()) v.push_back(parse_number(f, source, line_no));
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t j = 0; j < t.columns.size(); ++j) out << (j ? "," : "") << t.columns[j];
  out << '\n';
  std::string row;
  for (Eigen::Index i = 0; i < t.data.rows(); ++i) {
    row.clear();
    for (Eigen::Index j = 0; j < t.data.cols(); ++j) {
      if (j) row += ',';
      row += format_number(t.data(i, j));
    }
    out << row << '\n';
  }
}

void write_csv_file(const std::string& path, const Table& t) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  write_csv(out, t);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void require_columns(const Table& t, const std::vector<std::string>& names, const std::string& source) {
  for (const auto& n : names)
    if (!t.has(n)) throw std::invalid_argument(source + ": missing column '" + n + "'");
}

}  // namespace rtdyn
