#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "modref/error.hpp"

namespace modref::dataio {

enum class MetricDirection { kHigher, kLower };

struct MetricColumn {
  std::string name;
  MetricDirection better = MetricDirection::kLower;

  bool operator==(const MetricColumn&) const = default;
};

struct ReportRow {
  std::string label;
  std::vector<double> values;  // one per column

  bool operator==(const ReportRow&) const = default;
};

/// One experiment table: a header block (version, config hash, context
/// lines), one row per configuration, and optional footer context lines.
struct ReportTable {
  std::string title;
  std::vector<std::string> header_lines;
  std::vector<MetricColumn> columns;
  std::vector<ReportRow> rows;
  std::vector<std::string> footer_lines;

  bool operator==(const ReportTable&) const = default;
};

enum class ReportFormat { kPlain, kDelimited };

/// kPlain renders an aligned text table; kDelimited renders CSV with a
/// leading comment block. Both carry the per-column better-direction flag.
void write_report(const ReportTable& table, const std::filesystem::path& path,
                  ReportFormat format);

/// The rendered report as a string (same content write_report persists).
std::string render_report(const ReportTable& table, ReportFormat format);

}  // namespace modref::dataio
