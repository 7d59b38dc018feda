#include "roadwatch/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "roadwatch/detection_io.hpp"
#include "roadwatch/device.hpp"
#include "roadwatch/errors.hpp"
#include "roadwatch/pipeline.hpp"
#include "roadwatch/report.hpp"
#include "roadwatch/scenario.hpp"
#include "roadwatch/simulation.hpp"

namespace roadwatch::cli {
namespace {

std::shared_ptr<spdlog::logger> logger() {
  static const auto instance = [] {
    auto log = spdlog::stderr_logger_mt("roadwatch");
    log->set_pattern("[%l] %v");
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("ROADWATCH_LOG_LEVEL"); env != nullptr && *env != '\0') {
      level = spdlog::level::from_str(env);
    }
    log->set_level(level);
    return log;
  }();
  return instance;
}

// Options shared by simulate and replay.
struct RunOptions {
  std::string scenario;
  std::string log;
  std::optional<std::uint64_t> seed;
  double t_duration = kDefaultQuietDuration;
  std::optional<double> gate;
  std::optional<int> confirm_hits;
  std::optional<int> max_misses;
  std::string device;
  std::string dump_detections;
  std::string out;
  bool pace_realtime = false;
  std::string grid;
  double threshold = 0.5;
  std::string camera = "front";
  double fps = 30.0;
};

void add_tracker_flags(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--t-duration", o.t_duration, "Quiet time before a vehicle warns (s)");
  cmd->add_option("--gate", o.gate, "Assignment gate (pixels)");
  cmd->add_option("--confirm-hits", o.confirm_hits, "Hits to confirm a track");
  cmd->add_option("--max-misses", o.max_misses, "Misses before an active track ends");
}

TrackerConfig tracker_config(const RunOptions& o, int image_width) {
  TrackerConfig config;
  config.gate_distance = o.gate.value_or(TrackerConfig::default_gate_for_width(image_width));
  if (o.confirm_hits) config.confirm_hits = *o.confirm_hits;
  if (o.max_misses) config.max_misses = *o.max_misses;
  if (!(o.t_duration > 0.0)) throw ConfigError("t-duration", "must be > 0");
  config.validate();
  return config;
}

std::unique_ptr<DeviceChannel> open_device(const RunOptions& o, std::ostream& out) {
  if (o.device.empty()) return nullptr;
  return make_device_channel(o.device, out);
}

int cmd_simulate(const RunOptions& o, std::ostream& out) {
  Scenario scenario = load_scenario(o.scenario);
  if (o.seed) scenario.seed = *o.seed;
  const TrackerConfig config = tracker_config(o, scenario.camera.image_width);
  auto device = open_device(o, out);

  std::ofstream dump;
  if (!o.dump_detections.empty()) {
    dump.open(o.dump_detections, std::ios::binary | std::ios::trunc);
    if (!dump) throw ConfigError("dump-detections", "cannot write '" + o.dump_detections + "'");
  }

  PipelineOptions options;
  options.tracker = config;
  options.t_duration = o.t_duration;
  options.device = device.get();
  if (dump.is_open()) {
    options.frame_sink = [&dump](const FrameDetections& frame) { dump << format_frame_line(frame) << '\n'; };
  }

  logger()->info("simulating {:.0f} s, seed {}", scenario.duration, scenario.seed);
  const auto started = std::chrono::steady_clock::now();
  const SimulationReport report = run_pipeline(scenario, options);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  logger()->info("simulation finished in {:.2f} s ({} frames)", elapsed, report.frames);

  if (dump.is_open()) {
    dump.flush();
    if (!dump) throw ConfigError("dump-detections", "write failed");
  }
  if (!o.out.empty()) write_report_artifacts(report, o.out);
  out << render_summary(report);
  return kOk;
}

int cmd_replay(const RunOptions& o, std::ostream& out) {
  std::ifstream in(o.log, std::ios::binary);
  if (!in) throw ConfigError("log", "cannot open '" + o.log + "'");
  std::vector<FrameDetections> frames = parse_detection_log(in);
  merge_order(frames);

  const TrackerConfig config = tracker_config(o, 1280);
  RunOptions with_device = o;
  if (with_device.device.empty()) with_device.device = "stdout";
  auto device = open_device(with_device, out);
  WarningPipeline pipeline(config, o.t_duration, device.get());

  const auto wall_start = std::chrono::steady_clock::now();
  for (const FrameDetections& frame : frames) {
    if (o.pace_realtime) {
      const double offset = frame.timestamp - frames.front().timestamp;
      std::this_thread::sleep_until(wall_start + std::chrono::duration<double>(offset));
    }
    for (const EventDecision& d : pipeline.process(frame)) logger()->debug("{}", format_audit_line(d));
  }

  const double duration = frames.empty() ? 0.0 : frames.back().timestamp - frames.front().timestamp;
  const SimulationReport report = summarize(pipeline, duration);
  if (!o.out.empty()) write_report_artifacts(report, o.out);

  out << "frames " << report.frames << '\n';
  out << "new_vehicle_events " << report.warnings_without_filter << '\n';
  out << "pedestrian_events " << report.pedestrian_events << '\n';
  out << "warnings " << report.warnings_with_filter << '\n';
  out << "device_failures " << report.device_failures << '\n';
  return kOk;
}

int cmd_report(const RunOptions& o, std::ostream& out) {
  const SimulationReport report = load_report(o.out);
  const std::filesystem::path dir(o.out);
  for (const auto& [name, writer] :
       {std::pair{"histogram.csv", &write_histogram_csv}, std::pair{"hourly.csv", &write_hourly_csv}}) {
    std::ofstream csv(dir / name, std::ios::binary | std::ios::trunc);
    if (!csv) throw ConfigError("out", std::string("cannot write ") + name);
    writer(report, csv);
  }
  out << render_summary(report);
  return kOk;
}

int cmd_decode(const RunOptions& o, std::ostream& out) {
  std::ifstream in(o.grid, std::ios::binary);
  if (!in) throw ConfigError("grid", "cannot open '" + o.grid + "'");
  const auto camera = camera_from_string(o.camera);
  if (!camera) throw ConfigError("camera", "must be front or rear");
  if (!(o.fps > 0.0 && o.fps <= 1000.0)) throw ConfigError("fps", "must be in (0, 1000]");

  GridFrame grid;
  std::uint64_t index = 0;
  while (read_grid_frame(in, grid)) {
    FrameDetections frame;
    frame.frame_index = index;
    frame.timestamp = round_to(static_cast<double>(index) / o.fps, 3);
    frame.camera = *camera;
    frame.detections = decode_grid(grid.payload, grid.spec, o.threshold, index);
    out << format_frame_line(quantize_for_log(std::move(frame))) << '\n';
    ++index;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"roadwatch: approaching-vehicle tracking and worker warnings"};
  app.require_subcommand(1);
  RunOptions o;

  auto* simulate = app.add_subcommand("simulate", "Simulate traffic and run the warning pipeline");
  simulate->add_option("--scenario", o.scenario, "Scenario file")->required();
  simulate->add_option("--seed", o.seed, "Override the scenario seed");
  add_tracker_flags(simulate, o);
  simulate->add_option("--device", o.device, "stdout | udp:<host>:<port>");
  simulate->add_option("--dump-detections", o.dump_detections, "Write rendered detections as a log");
  simulate->add_option("--out", o.out, "Directory for report artifacts");

  auto* replay = app.add_subcommand("replay", "Run a recorded detection log through the pipeline");
  replay->add_option("--log", o.log, "Detection log")->required();
  add_tracker_flags(replay, o);
  replay->add_option("--device", o.device, "stdout (default) | udp:<host>:<port>");
  replay->add_option("--out", o.out, "Directory for report artifacts");
  replay->add_flag("--pace-realtime", o.pace_realtime, "Sleep to match data time");

  auto* report = app.add_subcommand("report", "Render and export a saved report");
  report->add_option("--out", o.out, "Report directory")->required();

  auto* decode = app.add_subcommand("decode", "Decode raw detector grids into a detection log");
  decode->add_option("--grid", o.grid, "RWGRID01 file")->required();
  decode->add_option("--threshold", o.threshold, "Score threshold")->default_val(0.5);
  decode->add_option("--camera", o.camera, "front | rear")->default_val("front");
  decode->add_option("--fps", o.fps, "Frame rate used for timestamps")->default_val(30.0);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (replay->parsed()) return cmd_replay(o, out);
    if (report->parsed()) return cmd_report(o, out);
    if (decode->parsed()) return cmd_decode(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kInputError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kInputError;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInputError;
  } catch (const StructuralError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInputError;
  } catch (const StreamOrderError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInputError;
}

}  // namespace roadwatch::cli
