#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sparselab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexSet = std::vector<std::size_t>;

// Design matrix (n x d) with an optional response. Immutable once built;
// construction rejects empty shapes, length mismatches and non-finite values.
class Dataset {
 public:
  explicit Dataset(Matrix x, std::optional<Vector> y = std::nullopt,
                   std::vector<std::string> column_names = {});

  const Matrix& x() const noexcept { return x_; }
  bool has_y() const noexcept { return y_.has_value(); }
  // Throws ValidationError when the response is absent.
  const Vector& y() const;
  const std::optional<Vector>& response() const noexcept { return y_; }

  std::size_t n() const noexcept { return static_cast<std::size_t>(x_.rows()); }
  std::size_t d() const noexcept { return static_cast<std::size_t>(x_.cols()); }

  // Provided names, or x1..xd.
  std::string column_name(std::size_t j) const;
  const std::vector<std::string>& column_names() const noexcept { return names_; }

  Dataset with_response(Vector y) const;
  Dataset select_rows(const std::vector<std::size_t>& rows) const;
  Dataset select_columns(const IndexSet& columns) const;

 private:
  Matrix x_;
  std::optional<Vector> y_;
  std::vector<std::string> names_;
};

struct CsvReadOptions {
  // Column holding the response; empty string means "no response column".
  std::string response_column = "y";
};

Dataset read_csv(std::istream& in, const CsvReadOptions& options = {});
Dataset read_csv_file(const std::string& path, const CsvReadOptions& options = {});
void write_csv(std::ostream& out, const Dataset& data);
void write_csv_file(const std::string& path, const Dataset& data);

}  // namespace sparselab
