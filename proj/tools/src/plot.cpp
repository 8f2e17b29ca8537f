#include "toda_cli/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include "toda/error.hpp"

namespace toda::cli {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kLeft = 80;
constexpr int kRight = 120;
constexpr int kTop = 40;
constexpr int kBottom = 60;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  static Range of(const std::vector<double>& values) {
    Range r{INFINITY, -INFINITY};
    for (double v : values) {
      if (!std::isfinite(v)) continue;
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
    if (!(r.lo <= r.hi)) return {0.0, 1.0};
    if (r.lo == r.hi) return {r.lo - 0.5, r.hi + 0.5};
    return r;
  }
  double unit(double v) const { return (v - lo) / (hi - lo); }
};

void header(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
}

void axes(std::ostringstream& os, const Range& x, const Range& y, const std::string& xlabel, const std::string& ylabel) {
  const int x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  os << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << x0 << "\" y=\"" << y0 + 16 << "\" text-anchor=\"start\">" << fmt(x.lo) << "</text>\n";
  os << "<text x=\"" << x1 << "\" y=\"" << y0 + 16 << "\" text-anchor=\"end\">" << fmt(x.hi) << "</text>\n";
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << y0 + 36 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  os << "<text x=\"" << x0 - 6 << "\" y=\"" << y0 << "\" text-anchor=\"end\">" << fmt(y.lo) << "</text>\n";
  os << "<text x=\"" << x0 - 6 << "\" y=\"" << y1 + 10 << "\" text-anchor=\"end\">" << fmt(y.hi) << "</text>\n";
  os << "<text x=\"16\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (y0 + y1) / 2 << ")\">" << ylabel << "</text>\n";
}

double to_px_x(const Range& x, double v) { return kLeft + x.unit(v) * (kWidth - kLeft - kRight); }
double to_px_y(const Range& y, double v) { return (kHeight - kBottom) - y.unit(v) * (kHeight - kBottom - kTop); }

const char* kStrokes[] = {"#000000", "#555555", "#999999", "#1f4e79", "#7f3f00", "#3f7f00"};

struct Series {
  std::string label;
  std::vector<double> x, y;
};

std::string polylines(const std::vector<Series>& series, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel) {
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const Range xr = Range::of(xs), yr = Range::of(ys);
  std::ostringstream os;
  header(os, title);
  axes(os, xr, yr, xlabel, ylabel);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* stroke = kStrokes[k % (sizeof kStrokes / sizeof kStrokes[0])];
    os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os << (first ? "" : " ") << px(to_px_x(xr, s.x[i])) << ',' << px(to_px_y(yr, s.y[i]));
      first = false;
    }
    os << "\"/>\n";
    if (!s.label.empty()) {
      const int ly = kTop + 16 + static_cast<int>(k) * 18;
      os << "<line x1=\"" << kWidth - kRight + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kWidth - kRight + 30
         << "\" y2=\"" << ly - 4 << "\" stroke=\"" << stroke << "\" stroke-width=\"1.5\"/>\n";
      os << "<text x=\"" << kWidth - kRight + 34 << "\" y=\"" << ly << "\">" << s.label << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string heatmap(const io::Table& t, std::size_t col, const std::string& name) {
  const std::size_t cx = t.column("x"), cy = t.column("y");
  std::vector<double> xs, ys, vs;
  for (const auto& row : t.rows) {
    xs.push_back(row[cx]);
    ys.push_back(row[cy]);
    vs.push_back(row[col]);
  }
  auto distinct = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const std::vector<double> ux = distinct(xs), uy = distinct(ys);
  const Range vr = Range::of(vs);
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  const double side = std::min(plot_w / static_cast<double>(ux.size()), plot_h / static_cast<double>(uy.size()));
  std::ostringstream os;
  header(os, name);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (!std::isfinite(vs[i])) continue;
    const auto ix = static_cast<double>(std::lower_bound(ux.begin(), ux.end(), xs[i]) - ux.begin());
    const auto iy = static_cast<double>(std::lower_bound(uy.begin(), uy.end(), ys[i]) - uy.begin());
    const int level = static_cast<int>(std::lround(255.0 * vr.unit(vs[i])));
    os << "<rect x=\"" << px(kLeft + ix * side) << "\" y=\"" << px(kTop + (static_cast<double>(uy.size()) - 1 - iy) * side)
       << "\" width=\"" << px(side) << "\" height=\"" << px(side) << "\" fill=\"rgb(" << level << ',' << level << ','
       << level << ")\"/>\n";
  }
  // Gray ramp legend.
  const int lx = kWidth - kRight + 20;
  for (int k = 0; k < 32; ++k) {
    const int level = static_cast<int>(std::lround(255.0 * (31 - k) / 31.0));
    os << "<rect x=\"" << lx << "\" y=\"" << kTop + k * 8 << "\" width=\"16\" height=\"8\" fill=\"rgb(" << level << ','
       << level << ',' << level << ")\"/>\n";
  }
  os << "<text x=\"" << lx + 20 << "\" y=\"" << kTop + 10 << "\">" << fmt(vr.hi) << "</text>\n";
  os << "<text x=\"" << lx + 20 << "\" y=\"" << kTop + 256 << "\">" << fmt(vr.lo) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

bool has(const io::Table& t, const std::string& name) {
  return std::find(t.columns.begin(), t.columns.end(), name) != t.columns.end();
}

}  // namespace

std::string render_svg(const io::Table& table, const std::string& column) {
  if (has(table, "t") && has(table, "beta")) {
    const std::string name = column.empty() ? "inf_S" : column;
    const std::size_t ct = table.column("t"), cb = table.column("beta"), cv = table.column(name);
    std::map<double, Series> by_beta;
    for (const auto& row : table.rows) {
      Series& s = by_beta[row[cb]];
      s.label = "beta = " + fmt(row[cb]);
      s.x.push_back(row[ct]);
      s.y.push_back(row[cv]);
    }
    std::vector<Series> series;
    for (auto& [beta, s] : by_beta) series.push_back(std::move(s));
    return polylines(series, name + " over t", "t", name);
  }
  const std::string name = column.empty() ? "S" : column;
  const std::size_t cv = table.column(name);
  if (has(table, "x") && has(table, "y")) return heatmap(table, cv, name);
  if (has(table, "rho")) {
    Series s;
    const std::size_t cr = table.column("rho");
    for (const auto& row : table.rows) {
      s.x.push_back(row[cr]);
      s.y.push_back(row[cv]);
    }
    return polylines({s}, name + " over rho", "rho", name);
  }
  throw SchemaError("", "CSV is neither a thermo table (x,y or rho) nor a sweep table (t,beta)");
}

}  // namespace toda::cli
