#include "modref/dataio/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace modref::dataio {

namespace {

void validate(const ReportTable& t) {
  for (const ReportRow& row : t.rows)
    if (row.values.size() != t.columns.size())
      throw ValidationError("report row '" + row.label + "' has " +
                            std::to_string(row.values.size()) + " values for " +
                            std::to_string(t.columns.size()) + " columns");
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string direction_tag(MetricDirection d) {
  return d == MetricDirection::kHigher ? "higher" : "lower";
}

std::string render_plain(const ReportTable& t) {
  std::ostringstream out;
  out << "# " << t.title << "\n";
  for (const std::string& line : t.header_lines) out << "# " << line << "\n";

  std::vector<std::string> headers;
  headers.reserve(t.columns.size());
  for (const MetricColumn& c : t.columns)
    headers.push_back(c.name + " (" + (c.better == MetricDirection::kHigher ? "^" : "v") + ")");

  size_t label_w = 6;
  for (const ReportRow& r : t.rows) label_w = std::max(label_w, r.label.size());
  std::vector<size_t> col_w(headers.size());
  for (size_t i = 0; i < headers.size(); ++i) col_w[i] = headers[i].size();
  for (const ReportRow& r : t.rows)
    for (size_t i = 0; i < r.values.size(); ++i)
      col_w[i] = std::max(col_w[i], format_value(r.values[i]).size());

  auto pad = [](const std::string& s, size_t w) {
    return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
  };

  out << pad("config", label_w);
  for (size_t i = 0; i < headers.size(); ++i) out << "  " << pad(headers[i], col_w[i]);
  out << "\n";
  out << std::string(label_w, '-');
  for (size_t i = 0; i < headers.size(); ++i) out << "  " << std::string(col_w[i], '-');
  out << "\n";
  for (const ReportRow& r : t.rows) {
    out << pad(r.label, label_w);
    for (size_t i = 0; i < r.values.size(); ++i)
      out << "  " << pad(format_value(r.values[i]), col_w[i]);
    out << "\n";
  }
  for (const std::string& line : t.footer_lines) out << "# " << line << "\n";
  return out.str();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string esc = "\"";
  for (char c : s) {
    if (c == '"') esc += "\"\"";
    else esc += c;
  }
  esc += "\"";
  return esc;
}

std::string render_delimited(const ReportTable& t) {
  std::ostringstream out;
  out << "# " << t.title << "\n";
  for (const std::string& line : t.header_lines) out << "# " << line << "\n";
  out << "config";
  for (const MetricColumn& c : t.columns) out << "," << csv_escape(c.name);
  out << "\n";
  out << "# direction";
  for (const MetricColumn& c : t.columns) out << "," << direction_tag(c.better);
  out << "\n";
  for (const ReportRow& r : t.rows) {
    out << csv_escape(r.label);
    for (double v : r.values) out << "," << format_value(v);
    out << "\n";
  }
  for (const std::string& line : t.footer_lines) out << "# " << line << "\n";
  return out.str();
}

}  // namespace

std::string render_report(const ReportTable& table, ReportFormat format) {
  validate(table);
  return format == ReportFormat::kPlain ? render_plain(table) : render_delimited(table);
}

void write_report(const ReportTable& table, const std::filesystem::path& path,
                  ReportFormat format) {
  std::string text = render_report(table, format);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace modref::dataio
