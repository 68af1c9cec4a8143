#include "sparselab/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "sparselab/error.hpp"

namespace sparselab {

namespace {

bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.array().isFinite().all(); }

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t start = cell.find_first_not_of(' ');
    cells.push_back(start == std::string::npos ? std::string() : cell.substr(start));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ValidationError("csv: row " + std::to_string(row) + ", column " +
                          std::to_string(col + 1) + ": not a finite number: '" + cell +
                          "'");
  }
  return value;
}

}  // namespace

Dataset::Dataset(Matrix x, std::optional<Vector> y, std::vector<std::string> column_names)
    : x_(std::move(x)), y_(std::move(y)), names_(std::move(column_names)) {
  if (x_.rows() < 1 || x_.cols() < 1) throw ValidationError("dataset needs n >= 1 and d >= 1");
  if (!all_finite(x_)) throw ValidationError("design matrix has non-finite entries");
  if (y_) {
    if (y_->size() != x_.rows())
      throw ValidationError("response length " + std::to_string(y_->size()) +
                            " does not match n = " + std::to_string(x_.rows()));
    if (!y_->array().isFinite().all()) throw ValidationError("response has non-finite entries");
  }
  if (!names_.empty() && names_.size() != static_cast<std::size_t>(x_.cols()))
    throw ValidationError("column_names has wrong length");
}

const Vector& Dataset::y() const {
  if (!y_) throw ValidationError("dataset has no response vector");
  return *y_;
}

std::string Dataset::column_name(std::size_t j) const {
  if (!names_.empty()) return names_.at(j);
  return "x" + std::to_string(j + 1);
}

Dataset Dataset::with_response(Vector y) const { return Dataset(x_, std::move(y), names_); }

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
  Matrix x(static_cast<Eigen::Index>(rows.size()), x_.cols());
  std::optional<Vector> y;
  if (y_) y = Vector(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    x.row(static_cast<Eigen::Index>(i)) = x_.row(r);
    if (y_) (*y)(static_cast<Eigen::Index>(i)) = (*y_)(r);
  }
  return Dataset(std::move(x), std::move(y), names_);
}

Dataset Dataset::select_columns(const IndexSet& columns) const {
  Matrix x(x_.rows(), static_cast<Eigen::Index>(columns.size()));
  std::vector<std::string> names;
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] >= d()) throw ValidationError("column index out of range");
    x.col(static_cast<Eigen::Index>(k)) = x_.col(static_cast<Eigen::Index>(columns[k]));
    names.push_back(column_name(columns[k]));
  }
  return Dataset(std::move(x), y_, std::move(names));
}

Dataset read_csv(std::istream& in, const CsvReadOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("csv: empty input");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
  const auto header = split_row(line);

  std::ptrdiff_t response_col = -1;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!options.response_column.empty() && header[c] == options.response_column) {
      if (response_col >= 0) throw ValidationError("csv: duplicate response column");
      response_col = static_cast<std::ptrdiff_t>(c);
    } else {
      names.push_back(header[c]);
    }
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> ys;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size())
      throw ValidationError("csv: row " + std::to_string(row_no) + " has " +
                            std::to_string(cells.size()) + " fields, expected " +
                            std::to_string(header.size()));
    std::vector<double> row;
    row.reserve(names.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const double v = parse_cell(cells[c], row_no, c);
      if (static_cast<std::ptrdiff_t>(c) == response_col)
        ys.push_back(v);
      else
        row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("csv: no data rows");
  if (names.empty()) throw ValidationError("csv: no predictor columns");

  Matrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < names.size(); ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  std::optional<Vector> y;
  if (response_col >= 0) y = Eigen::Map<Vector>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return Dataset(std::move(x), std::move(y), std::move(names));
}

Dataset read_csv_file(const std::string& path, const CsvReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return read_csv(in, options);
}

void write_csv(std::ostream& out, const Dataset& data) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t j = 0; j < data.d(); ++j) out << (j ? "," : "") << data.column_name(j);
  if (data.has_y()) out << ",y";
  out << '\n';
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < data.d(); ++j)
      out << (j ? "," : "") << data.x()(r, static_cast<Eigen::Index>(j));
    if (data.has_y()) out << ',' << data.y()(r);
    out << '\n';
  }
  out.precision(old_precision);
}

void write_csv_file(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  write_csv(out, data);
}

}  // namespace sparselab
