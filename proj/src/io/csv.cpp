#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wbar/io.hpp"

namespace wbar::io {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_field(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::string measures_to_csv(const std::vector<Histogram>& measures) {
  if (measures.empty()) throw std::invalid_argument("no measures to write");
  const std::size_t n = measures.front().size();
  std::ostringstream os;
  for (std::size_t j = 0; j < n; ++j) os << (j ? "," : "") << "w" << j;
  os << "\n";
  for (const Histogram& h : measures) {
    detail::require_same_dim(h.size(), n, "measure rows");
    for (std::size_t j = 0; j < n; ++j)
      os << (j ? "," : "") << format_double(h[j]);
    os << "\n";
  }
  return os.str();
}

std::vector<Histogram> measures_from_csv(const std::string& text) {
  const auto rows = lines_of(text);
  if (rows.size() < 2) throw std::invalid_argument("measures csv is empty");
  const std::size_t n = split(rows[0], ',').size();
  std::vector<Histogram> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    const auto fields = split(rows[r], ',');
    if (fields.size() != n)
      throw std::invalid_argument("measures csv row width mismatch");
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = parse_field(fields[j]);
    out.push_back(Histogram(std::move(w)));
  }
  return out;
}

std::string cost_to_csv(const CostMatrix& C) {
  const std::size_t n = C.size();
  std::ostringstream os;
  for (std::size_t j = 0; j < n; ++j) os << (j ? "," : "") << "c" << j;
  os << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      os << (j ? "," : "") << format_double(C(i, j));
    os << "\n";
  }
  return os.str();
}

CostMatrix cost_from_csv(const std::string& text) {
  const auto rows = lines_of(text);
  if (rows.size() < 2) throw std::invalid_argument("cost csv is empty");
  const std::size_t n = split(rows[0], ',').size();
  std::vector<double> e;
  e.reserve(n * n);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    const auto fields = split(rows[r], ',');
    if (fields.size() != n)
      throw std::invalid_argument("cost csv row width mismatch");
    for (const auto& f : fields) e.push_back(parse_field(f));
  }
  return CostMatrix(n, std::move(e));
}

std::string trace_to_csv(const std::vector<sa::RunRecord>& trace) {
  std::ostringstream os;
  os << "k,obj_estimate,w2_to_truth,regret_partial,wall_ms\n";
  for (const auto& rec : trace) {
    os << rec.k << "," << format_double(rec.obj_estimate) << ","
       << format_double(rec.dist_to_truth_w2
                            ? *rec.dist_to_truth_w2
                            : std::numeric_limits<double>::quiet_NaN())
       << "," << format_double(rec.regret_partial) << "," << rec.wall_ms
       << "\n";
  }
  return os.str();
}

std::vector<TraceRow> trace_from_csv(const std::string& text) {
  const auto rows = lines_of(text);
  if (rows.empty()) throw std::invalid_argument("trace csv is empty");
  std::vector<TraceRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    const auto f = split(rows[r], ',');
    if (f.size() != 5) throw std::invalid_argument("trace csv row width");
    TraceRow row;
    row.k = static_cast<std::size_t>(std::stoull(f[0]));
    row.obj_estimate = parse_field(f[1]);
    row.w2_to_truth = parse_field(f[2]);
    row.regret_partial = parse_field(f[3]);
    row.wall_ms = std::stoll(f[4]);
    out.push_back(row);
  }
  return out;
}

std::string report_to_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << "solver,measures_processed,w2_to_truth,wall_ms\n";
  for (const auto& r : rows)
    os << r.solver << "," << format_double(r.measures_processed) << ","
       << format_double(r.w2_to_truth) << "," << r.wall_ms << "\n";
  return os.str();
}

std::vector<ReportRow> report_from_csv(const std::string& text) {
  const auto rows = lines_of(text);
  if (rows.empty()) throw std::invalid_argument("report csv is empty");
  std::vector<ReportRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    const auto f = split(rows[r], ',');
    if (f.size() != 4) throw std::invalid_argument("report csv row width");
    ReportRow row;
    row.solver = f[0];
    row.measures_processed = parse_field(f[1]);
    row.w2_to_truth = parse_field(f[2]);
    row.wall_ms = std::stoll(f[3]);
    out.push_back(row);
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for read: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace wbar::io
