#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sparselab {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  // Column values as doubles (integers are widened); throws on text cells.
  std::vector<double> numeric_column(const std::string& column) const;
  std::size_t column_index(const std::string& column) const;
};

// A figure-reproduction run: parameters that regenerate it, per-replicate
// tables, and scalar summaries. Wall-clock time is kept apart from the CSV
// artifacts so reruns stay byte-identical.
struct ExperimentReport {
  std::string id;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<Table> tables;
  std::vector<std::pair<std::string, double>> summary;
  std::vector<std::pair<std::string, std::string>> figures;  // name -> SVG markup
  double wall_seconds = 0.0;

  const Table& table(const std::string& name) const;
  double summary_value(const std::string& key) const;
  std::string parameter(const std::string& key) const;
};

// Shortest decimal text that round-trips the double.
std::string format_number(double v);

void write_table_csv(std::ostream& out, const Table& table);

// Writes <id>_<table>.csv, <id>_summary.csv, <id>_<figure>.svg,
// <id>_params.txt (key = value, loadable as a config file) and <id>_run.txt
// (timing) into `dir`.
// Returns the paths written.
std::vector<std::string> write_report(const std::string& dir, const ExperimentReport& report);

// Minimal self-contained SVG charts.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
std::string svg_line_chart(const std::string& title, const std::vector<Series>& series,
                           const std::string& x_label, const std::string& y_label);

struct Sample {
  std::string label;
  std::vector<double> values;
};
std::string svg_histogram(const std::string& title, const std::vector<Sample>& samples, std::size_t bins = 40);

struct ScatterGroup {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
std::string svg_scatter(const std::string& title, const std::vector<ScatterGroup>& groups);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace sparselab
