#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "portlab/backtest/metrics.hpp"
#include "portlab/errors.hpp"

namespace portlab::report {

struct TableRow {
  std::string label;
  bool implemented = true;  // strategies outside the build get a marker row
  backtest::PerformanceReport report;
};

enum class TableFormat { raw, csv, html, latex };

inline TableFormat parse_table_format(const std::string& name) {
  if (name == "raw") return TableFormat::raw;
  if (name == "csv") return TableFormat::csv;
  if (name == "html") return TableFormat::html;
  if (name == "latex") return TableFormat::latex;
  throw config_error("format '" + name + "' is not one of raw, csv, html, latex");
}

namespace detail {

inline std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string grouped(int64_t v) {
  std::string digits = std::to_string(v);
  std::string out;
  int run = 0;
  for (size_t i = digits.size(); i-- > 0;) {
    out.insert(out.begin(), digits[i]);
    if (++run == 3 && i > 0 && digits[i - 1] != '-') {
      out.insert(out.begin(), ',');
      run = 0;
    }
  }
  return out;
}

inline std::vector<std::string> row_cells(const TableRow& row) {
  if (!row.implemented)
    return {row.label, "not implemented", "-", "-", "-", "-", "-", "-", "-", "-"};
  const auto& rep = row.report;
  return {row.label,
          fixed3(rep.mdd),
          fixed3(rep.fapv),
          rep.sharpe_defined ? fixed3(rep.sharpe) : "n/a",
          grouped(rep.days.negatives),
          grouped(rep.periods.negatives),
          grouped(rep.weeks.negatives),
          grouped(rep.days.positives),
          grouped(rep.periods.positives),
          grouped(rep.weeks.positives)};
}

inline std::vector<std::string> header_cells() {
  return {"algo", "MDD", "fAPV", "SR", "-Days", "-Periods", "-Weeks", "+Days", "+Periods", "+Weeks"};
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string html_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

inline std::string latex_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': case '%': case '$': case '#': case '_': case '{': case '}':
        out += '\\';
        out += c;
        break;
      case '~': out += "\\textasciitilde{}"; break;
      case '^': out += "\\textasciicircum{}"; break;
      case '\\': out += "\\textbackslash{}"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

// performance table in the column layout of the comparison tables:
// drawdown, final value, Sharpe, then negative/positive day, period and
// week counts. ratios carry 3 decimals, counts group thousands.
inline std::string emit_table(const std::vector<TableRow>& rows, TableFormat format) {
  std::vector<std::vector<std::string>> grid;
  grid.push_back(detail::header_cells());
  for (const auto& row : rows) grid.push_back(detail::row_cells(row));

  std::string out;
  switch (format) {
    case TableFormat::raw: {
      std::vector<size_t> width(grid[0].size(), 0);
      for (const auto& row : grid)
        for (size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
      for (const auto& row : grid) {
        for (size_t c = 0; c < row.size(); ++c) {
          std::string cell = row[c];
          if (c == 0)
            cell += std::string(width[c] - cell.size(), ' ');  // labels left
          else
            cell.insert(0, std::string(width[c] - cell.size(), ' '));  // numbers right
          out += cell;
          out += c + 1 < row.size() ? "  " : "";
        }
        out += "\n";
      }
      break;
    }
    case TableFormat::csv: {
      for (const auto& row : grid) {
        for (size_t c = 0; c < row.size(); ++c) {
          if (c) out += ",";
          out += detail::csv_escape(row[c]);
        }
        out += "\n";
      }
      break;
    }
    case TableFormat::html: {
      out += "<table>\n<thead><tr>";
      for (const auto& cell : grid[0]) out += "<th>" + detail::html_escape(cell) + "</th>";
      out += "</tr></thead>\n<tbody>\n";
      for (size_t r = 1; r < grid.size(); ++r) {
        out += "<tr>";
        for (const auto& cell : grid[r]) out += "<td>" + detail::html_escape(cell) + "</td>";
        out += "</tr>\n";
      }
      out += "</tbody>\n</table>\n";
      break;
    }
    case TableFormat::latex: {
      out += "\\begin{tabular}{l";
      for (size_t c = 1; c < grid[0].size(); ++c) out += "r";
      out += "}\n";
      for (size_t r = 0; r < grid.size(); ++r) {
        for (size_t c = 0; c < grid[r].size(); ++c) {
          if (c) out += " & ";
          out += detail::latex_escape(grid[r][c]);
        }
        out += " \\\\\n";
        if (r == 0) out += "\\hline\n";
      }
      out += "\\end{tabular}\n";
      break;
    }
  }
  return out;
}

}  // namespace portlab::report
