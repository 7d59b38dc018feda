#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "roadwatch/detection_io.hpp"
#include "roadwatch/pipeline.hpp"
#include "roadwatch/scenario.hpp"
#include "roadwatch/tracker.hpp"

namespace roadwatch {

using VehicleId = std::uint64_t;

struct VehiclePass {
  VehicleId vehicle_id = 0;
  Camera direction = Camera::kFront;
  double spawn_time = 0.0;  // crosses the visibility horizon d_vis
  double speed = 0.0;       // m/s
  double pass_time = 0.0;   // reaches the site (d = 0)
  ObjectClass object_class = ObjectClass::kVehicle;

  friend bool operator==(const VehiclePass&, const VehiclePass&) = default;
};

// Non-homogeneous Poisson arrivals per direction (thinning), sorted by spawn
// time; ids are assigned in that order starting at 1.
std::vector<VehiclePass> generate_passes(const Scenario& scenario, std::mt19937_64& rng);

// Label attached to each rendered detection: the vehicle it shows, or
// nullopt for an injected false positive.
using DetectionLabel = std::optional<VehicleId>;

// Frame-by-frame detection source for both cameras. Frames come out in merge
// order (tick by tick, front then rear) and already quantised to log precision.
class DetectionRenderer {
 public:
  DetectionRenderer(const Scenario& scenario, std::vector<VehiclePass> passes, std::uint64_t seed);

  // Fills the next frame and its labels; false once the scenario is over.
  bool next(FrameDetections& frame, std::vector<DetectionLabel>& labels);

  std::uint64_t total_frames() const noexcept { return ticks_ * 2; }
  const std::vector<VehiclePass>& passes() const noexcept { return passes_; }

  // Ideal (noise-free) projection of a vehicle at `distance` metres; nullopt
  // unless the whole box lies inside the image.
  static std::optional<Detection> project(const CameraModel& camera, double distance,
                                          ObjectClass cls, std::uint64_t frame_index);

 private:
  const Scenario& scenario_;
  std::vector<VehiclePass> passes_;
  std::array<std::vector<std::size_t>, 2> by_direction_;  // indices into passes_, by spawn
  std::array<std::size_t, 2> next_spawn_{};
  std::array<std::vector<std::size_t>, 2> live_;
  std::mt19937_64 rng_;
  std::uint64_t ticks_ = 0;
  std::uint64_t tick_ = 0;
  int camera_ = 0;
};

struct RenderedStreams {
  std::vector<FrameDetections> frames;            // merge order
  std::vector<std::vector<DetectionLabel>> labels;  // parallel to frames
};

RenderedStreams render_detections(const Scenario& scenario, const std::vector<VehiclePass>& passes,
                                  std::uint64_t seed);

struct EventRecord {
  double timestamp = 0.0;
  Camera camera = Camera::kFront;
  TrackId track_id = 0;
  ObjectClass object_class = ObjectClass::kVehicle;
  Decision decision = Decision::kSuppress;
  double gap = 0.0;
  std::optional<VehicleId> vehicle;  // ground truth, simulation only
  std::optional<double> pass_time;

  // Pre-warning time (pass_time - timestamp) when ground truth is known.
  std::optional<double> lead_time() const noexcept {
    return pass_time ? std::optional<double>(*pass_time - timestamp) : std::nullopt;
  }
  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct HourCount {
  std::size_t events = 0;    // without filter
  std::size_t warnings = 0;  // with filter
  friend bool operator==(const HourCount&, const HourCount&) = default;
};

struct SimulationReport {
  double duration = 0.0;
  std::size_t vehicles = 0;
  std::size_t frames = 0;
  std::size_t warnings_with_filter = 0;
  std::size_t warnings_without_filter = 0;
  std::size_t pedestrian_events = 0;
  std::size_t spurious_warnings = 0;
  std::size_t device_failures = 0;
  std::vector<EventRecord> events;  // every new-vehicle event, in decision order

  std::vector<const EventRecord*> warnings() const;
  // Pre-warning histogram in 1 s bins keyed by floor(lead time).
  std::map<long long, std::size_t> lead_time_histogram() const;
  std::vector<HourCount> hourly() const;

  friend bool operator==(const SimulationReport&, const SimulationReport&) = default;
};

// Builds the report counters from a finished pipeline (no ground truth).
SimulationReport summarize(const WarningPipeline& pipeline, double duration);

struct PipelineOptions {
  TrackerConfig tracker;
  double t_duration = kDefaultQuietDuration;
  DeviceChannel* device = nullptr;
  // Called with every rendered frame before tracking (e.g. to dump a log).
  std::function<void(const FrameDetections&)> frame_sink;
};

// Generates traffic, renders both camera streams, runs the two trackers and
// the shared flow check, and attributes each event to a ground-truth vehicle
// by majority vote over the labels of its track's detections.
SimulationReport run_pipeline(const Scenario& scenario, const PipelineOptions& options);

}  // namespace roadwatch
