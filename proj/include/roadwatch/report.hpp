#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "roadwatch/simulation.hpp"

namespace roadwatch {

// report.jsonl: a summary record followed by one record per new-vehicle event.
void write_report_records(const SimulationReport& report, std::ostream& out);
// Throws ParseError (with line number) on malformed input.
SimulationReport read_report_records(std::istream& in);

// histogram.csv: "bin_start_s,count" rows for the pre-warning times of warnings.
void write_histogram_csv(const SimulationReport& report, std::ostream& out);
// hourly.csv: "hour,events_without_filter,warnings_with_filter" rows.
void write_hourly_csv(const SimulationReport& report, std::ostream& out);
// Device-format lines for every warning, in decision order.
void write_warning_trace(const SimulationReport& report, std::ostream& out);
// Audit lines for every new-vehicle event.
void write_audit_log(const SimulationReport& report, std::ostream& out);

// Human-readable summary table.
std::string render_summary(const SimulationReport& report);

// Writes report.jsonl, summary.txt, histogram.csv, hourly.csv, warnings.log
// and audit.log into `dir` (created if missing).
void write_report_artifacts(const SimulationReport& report, const std::filesystem::path& dir);
// Reads `dir`/report.jsonl; throws ConfigError("out", ...) if it is missing.
SimulationReport load_report(const std::filesystem::path& dir);

// Peak-hour statistics derived from the hourly table.
struct PeakHour {
  std::size_t hour = 0;
  std::size_t events = 0;
  std::size_t warnings = 0;
  double warnings_per_minute() const noexcept { return warnings / 60.0; }
  double events_per_minute() const noexcept { return events / 60.0; }
};
PeakHour peak_hour(const SimulationReport& report);

}  // namespace roadwatch
