#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wbar/sa.hpp"
#include "wbar/types.hpp"

// CSV and SVG emission for the experiment harness. CSV uses comma
// separation, '.' decimals, 17 significant digits and a header row, so
// written values round-trip bit-exactly.
namespace wbar::io {

std::string format_double(double v);  // %.17g, nan -> empty field

/// measures.csv: header w0..w{n-1}, one histogram per row.
std::string measures_to_csv(const std::vector<Histogram>& measures);
std::vector<Histogram> measures_from_csv(const std::string& text);

/// Same schema for a symmetric cost matrix: header c0..c{n-1}, n rows.
std::string cost_to_csv(const CostMatrix& C);
CostMatrix cost_from_csv(const std::string& text);

/// trace.csv: k, obj_estimate, w2_to_truth, regret_partial, wall_ms.
std::string trace_to_csv(const std::vector<sa::RunRecord>& trace);

struct TraceRow {
  std::size_t k = 0;
  double obj_estimate = 0.0;
  double w2_to_truth = 0.0;
  double regret_partial = 0.0;
  std::int64_t wall_ms = 0;
};
std::vector<TraceRow> trace_from_csv(const std::string& text);

/// report.csv (compare): solver, measures_processed, w2_to_truth, wall_ms.
struct ReportRow {
  std::string solver;
  double measures_processed = 0.0;
  double w2_to_truth = 0.0;
  std::int64_t wall_ms = 0;
};
std::string report_to_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> report_from_csv(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<ChartSeries> series;
};

/// Minimal self-contained SVG line chart; a pure function of its input.
std::string svg_line_chart(const ChartSpec& spec);

/// Chart of w2_to_truth vs measures_processed, one series per solver, built
/// from report.csv content only.
std::string chart_from_report_csv(const std::string& report_csv, bool log_y);

}  // namespace wbar::io
