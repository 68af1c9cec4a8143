#include "sparselab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "sparselab/error.hpp"

namespace sparselab {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw ValidationError("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                          std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw ValidationError("table " + name + " has no column " + column);
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> Table::numeric_column(const std::string& column) const {
  const std::size_t k = column_index(column);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const Cell& c = row[k];
    if (const auto* d = std::get_if<double>(&c))
      out.push_back(*d);
    else if (const auto* i = std::get_if<std::int64_t>(&c))
      out.push_back(static_cast<double>(*i));
    else
      throw ValidationError("table " + name + ": column " + column + " holds text");
  }
  return out;
}

const Table& ExperimentReport::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return t;
  throw ValidationError("report " + id + " has no table " + name);
}

double ExperimentReport::summary_value(const std::string& key) const {
  for (const auto& [k, v] : summary)
    if (k == key) return v;
  throw ValidationError("report " + id + " has no summary value " + key);
}

std::string ExperimentReport::parameter(const std::string& key) const {
  for (const auto& [k, v] : parameters)
    if (k == key) return v;
  throw ValidationError("report " + id + " has no parameter " + key);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return csv_field(std::get<std::string>(c));
}

}  // namespace

void write_table_csv(std::ostream& out, const Table& table) {
  for (std::size_t k = 0; k < table.columns.size(); ++k) out << (k ? "," : "") << csv_field(table.columns[k]);
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << cell_text(row[k]);
    out << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw ValidationError("failed writing " + path);
}

std::vector<std::string> write_report(const std::string& dir, const ExperimentReport& report) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  std::vector<std::string> written;
  for (const auto& t : report.tables) {
    std::ostringstream s;
    write_table_csv(s, t);
    const auto path = (base / (report.id + "_" + t.name + ".csv")).string();
    write_text_file(path, s.str());
    written.push_back(path);
  }
  {
    Table summary{"summary", {"key", "value"}, {}};
    for (const auto& [k, v] : report.summary) summary.add_row({k, v});
    std::ostringstream s;
    write_table_csv(s, summary);
    const auto path = (base / (report.id + "_summary.csv")).string();
    write_text_file(path, s.str());
    written.push_back(path);
  }
  for (const auto& [name, svg] : report.figures) {
    const auto path = (base / (report.id + "_" + name + ".svg")).string();
    write_text_file(path, svg);
    written.push_back(path);
  }
  {
    std::ostringstream s;
    s << "# regenerate with: sparselab reproduce --config <this file>\n";
    s << "experiment = " << report.id << '\n';
    for (const auto& [k, v] : report.parameters) s << k << " = " << v << '\n';
    const auto path = (base / (report.id + "_params.txt")).string();
    write_text_file(path, s.str());
    written.push_back(path);
  }
  {
    std::ostringstream s;
    s << "wall_seconds = " << std::fixed << std::setprecision(3) << report.wall_seconds << '\n';
    const auto path = (base / (report.id + "_run.txt")).string();
    write_text_file(path, s.str());
    written.push_back(path);
  }
  return written;
}

// ---- svg ----------------------------------------------------------------

namespace {

constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << v;
  return s.str();
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void widen(double& lo, double& hi) {
  if (!(lo < hi)) {
    lo -= 0.5;
    hi += 0.5;
  } else {
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
}

Frame frame_for(const std::vector<const std::vector<double>*>& xs, const std::vector<const std::vector<double>*>& ys) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto* v : xs)
    for (double x : *v)
      if (std::isfinite(x)) x0 = std::min(x0, x), x1 = std::max(x1, x);
  for (const auto* v : ys)
    for (double y : *v)
      if (std::isfinite(y)) y0 = std::min(y0, y), y1 = std::max(y1, y);
  if (!std::isfinite(x0)) x0 = 0, x1 = 1;
  if (!std::isfinite(y0)) y0 = 0, y1 = 1;
  widen(x0, x1);
  widen(y0, y1);
  return {x0, x1, y0, y1};
}

void open_svg(std::ostringstream& s, const std::string& title, const Frame& f, const std::string& xl,
              const std::string& yl) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
    << "</text>\n";
  const double bx = kLeft, by = kHeight - kBottom, tx = kWidth - kRight;
  s << "<line x1=\"" << bx << "\" y1=\"" << by << "\" x2=\"" << tx << "\" y2=\"" << by << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << bx << "\" y1=\"" << by << "\" x2=\"" << bx << "\" y2=\"" << kTop << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    s << "<text x=\"" << f.px(xv) << "\" y=\"" << by + 16 << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    s << "<text x=\"" << bx - 6 << "\" y=\"" << f.py(yv) + 4 << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
  }
  s << "<text x=\"" << (bx + tx) / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << escape(xl)
    << "</text>\n";
  s << "<text x=\"16\" y=\"" << (kTop + by) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << (kTop + by) / 2 << ")\">" << escape(yl) << "</text>\n";
}

void legend(std::ostringstream& s, std::size_t k, const std::string& label) {
  const double y = kTop + 4 + 16.0 * static_cast<double>(k);
  const double x = kWidth - kRight - 150;
  s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"10\" height=\"10\" fill=\"" << kPalette[k % 7]
    << "\"/>\n";
  s << "<text x=\"" << x + 14 << "\" y=\"" << y + 9 << "\">" << escape(label) << "</text>\n";
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::vector<Series>& series, const std::string& x_label,
                           const std::string& y_label) {
  std::vector<const std::vector<double>*> xs, ys;
  for (const auto& sr : series) xs.push_back(&sr.x), ys.push_back(&sr.y);
  const Frame f = frame_for(xs, ys);
  std::ostringstream s;
  open_svg(s, title, f, x_label, y_label);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& sr = series[k];
    s << "<polyline fill=\"none\" stroke=\"" << kPalette[k % 7] << "\" stroke-width=\"1.6\" points=\"";
    for (std::size_t i = 0; i < std::min(sr.x.size(), sr.y.size()); ++i)
      if (std::isfinite(sr.x[i]) && std::isfinite(sr.y[i])) s << f.px(sr.x[i]) << ',' << f.py(sr.y[i]) << ' ';
    s << "\"/>\n";
    legend(s, k, sr.label);
  }
  s << "</svg>\n";
  return s.str();
}

std::string svg_histogram(const std::string& title, const std::vector<Sample>& samples, std::size_t bins) {
  if (bins < 1) throw ConfigurationError("svg_histogram: bins must be >= 1");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& smp : samples)
    for (double v : smp.values)
      if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (!(lo < hi)) lo -= 0.5, hi += 0.5;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::vector<double>> density(samples.size(), std::vector<double>(bins, 0.0));
  double top = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& vals = samples[k].values;
    if (vals.empty()) continue;
    for (double v : vals) {
      if (!std::isfinite(v)) continue;
      auto b = static_cast<std::size_t>((v - lo) / width);
      density[k][std::min(b, bins - 1)] += 1.0;
    }
    for (double& c : density[k]) {
      c /= static_cast<double>(vals.size()) * width;
      top = std::max(top, c);
    }
  }
  Frame f{lo, hi, 0.0, top > 0 ? top * 1.05 : 1.0};
  std::ostringstream s;
  open_svg(s, title, f, "value", "density");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    for (std::size_t b = 0; b < bins; ++b) {
      const double x = lo + width * static_cast<double>(b);
      const double y = density[k][b];
      if (y <= 0) continue;
      s << "<rect x=\"" << f.px(x) << "\" y=\"" << f.py(y) << "\" width=\"" << f.px(x + width) - f.px(x)
        << "\" height=\"" << f.py(0) - f.py(y) << "\" fill=\"" << kPalette[k % 7] << "\" fill-opacity=\"0.45\"/>\n";
    }
    legend(s, k, samples[k].label);
  }
  s << "</svg>\n";
  return s.str();
}

std::string svg_scatter(const std::string& title, const std::vector<ScatterGroup>& groups) {
  std::vector<const std::vector<double>*> xs, ys;
  for (const auto& g : groups) xs.push_back(&g.x), ys.push_back(&g.y);
  const Frame f = frame_for(xs, ys);
  std::ostringstream s;
  open_svg(s, title, f, "component 1", "component 2");
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const auto& g = groups[k];
    for (std::size_t i = 0; i < std::min(g.x.size(), g.y.size()); ++i)
      if (std::isfinite(g.x[i]) && std::isfinite(g.y[i]))
        s << "<circle cx=\"" << f.px(g.x[i]) << "\" cy=\"" << f.py(g.y[i]) << "\" r=\"2.5\" fill=\""
          << kPalette[k % 7] << "\"/>\n";
    legend(s, k, g.label);
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace sparselab
