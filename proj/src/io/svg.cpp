#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "wbar/io.hpp"

namespace wbar::io {
namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf);
}

}  // namespace

std::string svg_line_chart(const ChartSpec& spec) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : spec.series) {
    if (s.x.size() != s.y.size())
      throw std::invalid_argument("chart series length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double yv = spec.log_y ? std::log10(std::max(s.y[i], 1e-300))
                                   : s.y[i];
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, yv);
      ymax = std::max(ymax, yv);
    }
  }
  if (!(xmin <= xmax)) {  // no data: degenerate frame
    xmin = 0; xmax = 1; ymin = 0; ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double yv) {
    const double y = spec.log_y ? std::log10(std::max(yv, 1e-300)) : yv;
    return kTop + ph - (y - ymin) / (ymax - ymin) * ph;
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
     << kHeight << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"16\">"
     << escape_xml(spec.title) << "</text>\n";

  // frame
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
     << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // ticks
  for (int t = 0; t <= 5; ++t) {
    const double fx = xmin + (xmax - xmin) * t / 5.0;
    const double gx = px(fx);
    os << "<line x1=\"" << num(gx) << "\" y1=\"" << kTop + ph << "\" x2=\""
       << num(gx) << "\" y2=\"" << kTop + ph + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(gx) << "\" y=\"" << kTop + ph + 20
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << num(fx) << "</text>\n";

    const double fy = ymin + (ymax - ymin) * t / 5.0;
    const double gy = kTop + ph - (fy - ymin) / (ymax - ymin) * ph;
    const double label = spec.log_y ? std::pow(10.0, fy) : fy;
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(gy) << "\" x2=\""
       << kLeft << "\" y2=\"" << num(gy) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(gy + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << num(label) << "</text>\n";
  }

  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\">"
     << escape_xml(spec.x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << kTop + ph / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\" transform=\"rotate(-90 18 "
     << kTop + ph / 2 << ")\">" << escape_xml(spec.y_label) << "</text>\n";

  std::size_t ci = 0;
  for (const auto& s : spec.series) {
    const char* color = kPalette[ci % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) os << " ";
      os << num(px(s.x[i])) << "," << num(py(s.y[i]));
    }
    os << "\"/>\n";
    const double ly = kTop + 16 + 18 * static_cast<double>(ci);
    os << "<line x1=\"" << kLeft + pw - 150 << "\" y1=\"" << num(ly)
       << "\" x2=\"" << kLeft + pw - 125 << "\" y2=\"" << num(ly)
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kLeft + pw - 120 << "\" y=\"" << num(ly + 4)
       << "\" font-family=\"sans-serif\" font-size=\"12\">"
       << escape_xml(s.label) << "</text>\n";
    ++ci;
  }
  os << "</svg>\n";
  return os.str();
}

std::string chart_from_report_csv(const std::string& report_csv, bool log_y) {
  const auto rows = report_from_csv(report_csv);
  std::map<std::string, ChartSeries> by_solver;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    auto it = by_solver.find(r.solver);
    if (it == by_solver.end()) {
      order.push_back(r.solver);
      it = by_solver.emplace(r.solver, ChartSeries{r.solver, {}, {}}).first;
    }
    it->second.x.push_back(r.measures_processed);
    it->second.y.push_back(r.w2_to_truth);
  }
  ChartSpec spec;
  spec.title = "W2 error vs processed measures";
  spec.x_label = "measures processed";
  spec.y_label = "W2 distance to true barycenter";
  spec.log_y = log_y;
  for (const auto& name : order) spec.series.push_back(by_solver.at(name));
  return svg_line_chart(spec);
}

}  // namespace wbar::io
