#include "roadwatch/report.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "roadwatch/errors.hpp"

namespace roadwatch {

using nlohmann::ordered_json;

void write_report_records(const SimulationReport& report, std::ostream& out) {
  ordered_json summary;
  summary["type"] = "summary";
  summary["duration"] = report.duration;
  summary["vehicles"] = report.vehicles;
  summary["frames"] = report.frames;
  summary["warnings_with_filter"] = report.warnings_with_filter;
  summary["warnings_without_filter"] = report.warnings_without_filter;
  summary["pedestrian_events"] = report.pedestrian_events;
  summary["spurious_warnings"] = report.spurious_warnings;
  summary["device_failures"] = report.device_failures;
  out << summary.dump() << '\n';

  for (const EventRecord& e : report.events) {
    ordered_json j;
    j["type"] = "event";
    j["t"] = e.timestamp;
    j["cam"] = to_string(e.camera);
    j["track"] = e.track_id;
    j["cls"] = to_string(e.object_class);
    j["decision"] = to_string(e.decision);
    j["gap"] = e.gap;
    j["vehicle"] = e.vehicle ? ordered_json(*e.vehicle) : ordered_json(nullptr);
    j["pass_time"] = e.pass_time ? ordered_json(*e.pass_time) : ordered_json(nullptr);
    out << j.dump() << '\n';
  }
}

SimulationReport read_report_records(std::istream& in) {
  SimulationReport report;
  std::string line;
  std::size_t line_number = 0;
  bool have_summary = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    try {
      const auto j = ordered_json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "summary") {
        report.duration = j.at("duration").get<double>();
        report.vehicles = j.at("vehicles").get<std::size_t>();
        report.frames = j.at("frames").get<std::size_t>();
        report.warnings_with_filter = j.at("warnings_with_filter").get<std::size_t>();
        report.warnings_without_filter = j.at("warnings_without_filter").get<std::size_t>();
        report.pedestrian_events = j.at("pedestrian_events").get<std::size_t>();
        report.spurious_warnings = j.at("spurious_warnings").get<std::size_t>();
        report.device_failures = j.at("device_failures").get<std::size_t>();
        have_summary = true;
      } else if (type == "event") {
        EventRecord e;
        e.timestamp = j.at("t").get<double>();
        const auto cam = camera_from_string(j.at("cam").get<std::string>());
        const auto cls = class_from_string(j.at("cls").get<std::string>());
        const auto decision = decision_from_string(j.at("decision").get<std::string>());
        if (!cam || !cls || !decision) throw ParseError(line_number, "bad enum value");
        e.camera = *cam;
        e.object_class = *cls;
        e.decision = *decision;
        e.track_id = j.at("track").get<TrackId>();
        e.gap = j.at("gap").get<double>();
        if (!j.at("vehicle").is_null()) e.vehicle = j.at("vehicle").get<VehicleId>();
        if (!j.at("pass_time").is_null()) e.pass_time = j.at("pass_time").get<double>();
        report.events.push_back(e);
      } else {
        throw ParseError(line_number, "unknown record type '" + type + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_number, e.what());
    }
  }
  if (!have_summary) throw ParseError(line_number, "report has no summary record");
  return report;
}

void write_histogram_csv(const SimulationReport& report, std::ostream& out) {
  out << "bin_start_s,count\n";
  for (const auto& [bin, count] : report.lead_time_histogram()) out << bin << ',' << count << '\n';
}

void write_hourly_csv(const SimulationReport& report, std::ostream& out) {
  out << "hour,events_without_filter,warnings_with_filter\n";
  const auto hours = report.hourly();
  for (std::size_t h = 0; h < hours.size(); ++h)
    out << h << ',' << hours[h].events << ',' << hours[h].warnings << '\n';
}

void write_warning_trace(const SimulationReport& report, std::ostream& out) {
  for (const EventRecord* e : report.warnings())
    out << format_warning_line({e->timestamp, e->track_id, e->camera, e->gap}) << '\n';
}

void write_audit_log(const SimulationReport& report, std::ostream& out) {
  for (const EventRecord& e : report.events) {
    out << format_audit_line({{TrackerEventKind::kNewVehicle, e.track_id, e.timestamp, e.camera,
                               e.object_class},
                              e.decision,
                              e.gap})
        << '\n';
  }
}

PeakHour peak_hour(const SimulationReport& report) {
  PeakHour peak;
  const auto hours = report.hourly();
  for (std::size_t h = 0; h < hours.size(); ++h) {
    if (hours[h].events > peak.events) peak = {h, hours[h].events, hours[h].warnings};
  }
  return peak;
}

std::string render_summary(const SimulationReport& report) {
  std::ostringstream out;
  const double ratio = report.warnings_without_filter
                           ? double(report.warnings_with_filter) / double(report.warnings_without_filter)
                           : 0.0;
  out << "duration_s                " << format_fixed(report.duration, 1) << '\n';
  out << "vehicles                  " << report.vehicles << '\n';
  out << "warnings_without_filter   " << report.warnings_without_filter << '\n';
  out << "warnings_with_filter      " << report.warnings_with_filter << '\n';
  out << "filter_ratio              " << format_fixed(ratio, 4) << '\n';
  out << "pedestrian_events         " << report.pedestrian_events << '\n';
  out << "spurious_warnings         " << report.spurious_warnings << '\n';
  out << "device_failures           " << report.device_failures << '\n';

  const PeakHour peak = peak_hour(report);
  out << "peak_hour                 " << peak.hour << " (" << format_fixed(peak.events_per_minute(), 2)
      << " events/min, " << format_fixed(peak.warnings_per_minute(), 2) << " warnings/min)\n";

  out << "\nhour  without_filter  with_filter\n";
  const auto hours = report.hourly();
  for (std::size_t h = 0; h < hours.size(); ++h) {
    out << std::setw(4) << h << "  " << std::setw(14) << hours[h].events << "  " << std::setw(11)
        << hours[h].warnings << '\n';
  }

  out << "\npre-warning histogram (s)  count\n";
  const auto histogram = report.lead_time_histogram();
  if (histogram.empty()) out << "  (no attributed warnings)\n";
  for (const auto& [bin, count] : histogram) {
    out << "  [" << std::setw(3) << bin << ", " << std::setw(3) << bin + 1 << ")  " << std::setw(6)
        << count << '\n';
  }
  return out.str();
}

namespace {

void write_file(const std::filesystem::path& path, auto&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("out", "cannot write '" + path.string() + "'");
  writer(out);
  if (!out) throw ConfigError("out", "write failed for '" + path.string() + "'");
}

}  // namespace

void write_report_artifacts(const SimulationReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("out", "cannot create '" + dir.string() + "': " + ec.message());
  write_file(dir / "report.jsonl", [&](std::ostream& o) { write_report_records(report, o); });
  write_file(dir / "summary.txt", [&](std::ostream& o) { o << render_summary(report); });
  write_file(dir / "histogram.csv", [&](std::ostream& o) { write_histogram_csv(report, o); });
  write_file(dir / "hourly.csv", [&](std::ostream& o) { write_hourly_csv(report, o); });
  write_file(dir / "warnings.log", [&](std::ostream& o) { write_warning_trace(report, o); });
  write_file(dir / "audit.log", [&](std::ostream& o) { write_audit_log(report, o); });
}

SimulationReport load_report(const std::filesystem::path& dir) {
  const auto path = dir / "report.jsonl";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("out", "missing report artifact '" + path.string() + "'");
  return read_report_records(in);
}

}  // namespace roadwatch
