#pragma once

#include <string>
#include <string_view>

#include "cie/eval/benchmark.hpp"

namespace cie {

enum class ReportFormat { kText, kCsv };

ReportFormat parse_report_format(std::string_view name);

/// One decimal, halves rounded up: 52.75 -> "52.8".
std::string format_one_decimal(double x);

/// Score table (one row per dataset plus overall) followed by the action
/// frequency table.
std::string emit_report(const EvalReport& report, ReportFormat format);

}  // namespace cie
