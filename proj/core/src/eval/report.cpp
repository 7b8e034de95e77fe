#include "cie/eval/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "cie/error.hpp"

namespace cie {

ReportFormat parse_report_format(std::string_view name) {
  if (name == "text") return ReportFormat::kText;
  if (name == "csv") return ReportFormat::kCsv;
  throw ConfigError("unknown report format '" + std::string(name) + "' (text or csv)");
}

std::string format_one_decimal(double x) {
  // The nudge keeps decimal halves such as 52.75 (stored just below) rounding up.
  const double scaled = std::floor(x * 10.0 + 0.5 + 1e-9);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", scaled / 10.0);
  return buf;
}

namespace {

double count_of(const DatasetScores& d, std::string_view name) {
  const auto it = d.action_counts.find(std::string(name));
  return it == d.action_counts.end() ? 0.0 : it->second;
}

std::string format_two_decimals(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<const DatasetScores*> rows(const EvalReport& r) {
  std::vector<const DatasetScores*> out;
  for (const auto& d : r.datasets) out.push_back(&d);
  out.push_back(&r.overall);
  return out;
}

}  // namespace

std::string emit_report(const EvalReport& report, ReportFormat format) {
  std::ostringstream out;
  const auto all = rows(report);
  if (format == ReportFormat::kCsv) {
    out << "dataset,examples,errors,em,f1,avg_turns";
    for (auto name : primitive_names()) out << ',' << name;
    out << '\n';
    for (const auto* d : all) {
      out << csv_field(d->dataset) << ',' << d->num_examples << ',' << d->num_errors << ','
          << format_one_decimal(d->em) << ',' << format_one_decimal(d->f1) << ',' << format_two_decimals(d->avg_turns);
      for (auto name : primitive_names()) out << ',' << format_two_decimals(count_of(*d, name));
      out << '\n';
    }
    return out.str();
  }

  std::size_t width = 8;
  for (const auto* d : all) width = std::max(width, d->dataset.size() + 2);
  out << std::left << std::setw(static_cast<int>(width)) << "dataset" << std::right << std::setw(9) << "examples"
      << std::setw(8) << "errors" << std::setw(8) << "EM" << std::setw(8) << "F1" << std::setw(11) << "avg_turns"
      << '\n';
  for (const auto* d : all) {
    out << std::left << std::setw(static_cast<int>(width)) << d->dataset << std::right << std::setw(9)
        << d->num_examples << std::setw(8) << d->num_errors << std::setw(8) << format_one_decimal(d->em)
        << std::setw(8) << format_one_decimal(d->f1) << std::setw(11) << format_two_decimals(d->avg_turns) << '\n';
  }
  out << "\nmean calls per question\n" << std::left << std::setw(static_cast<int>(width)) << "dataset";
  for (auto name : primitive_names()) out << std::right << std::setw(static_cast<int>(name.size()) + 2) << name;
  out << '\n';
  for (const auto* d : all) {
    out << std::left << std::setw(static_cast<int>(width)) << d->dataset;
    for (auto name : primitive_names()) {
      out << std::right << std::setw(static_cast<int>(name.size()) + 2)
          << format_two_decimals(count_of(*d, name));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cie
