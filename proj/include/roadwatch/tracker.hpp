#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "roadwatch/assignment.hpp"
#include "roadwatch/detection_io.hpp"
#include "roadwatch/kalman.hpp"
#include "roadwatch/types.hpp"

namespace roadwatch {

using TrackId = std::uint64_t;

enum class TrackStatus : std::uint8_t { kTentative, kActive, kTerminated };

struct TrackerConfig {
  double gate_distance = 75.0;   // pixels
  int confirm_hits = 2;          // M
  int max_misses = 3;            // L
  double process_noise = 3.0e5;  // q, px^2/s^4
  double measurement_noise = 4.0;            // r, px^2 per axis
  double initial_velocity_variance = 100.0;  // (px/s)^2

  // Throws ConfigError naming the first out-of-range field.
  void validate() const;

  // Default gate is 75 px at a 1280 px wide frame, proportional otherwise.
  static double default_gate_for_width(double image_width) { return 75.0 * image_width / 1280.0; }
};

struct TrackPoint {
  std::uint64_t frame_index = 0;
  Point2 center;
};

struct Track {
  TrackId id = 0;
  KalmanState state;
  TrackStatus status = TrackStatus::kTentative;
  int consecutive_hits = 0;
  int consecutive_misses = 0;
  std::vector<TrackPoint> history;
  double created_at = 0.0;
  std::optional<double> confirmed_at;
  std::array<std::uint32_t, kNumClasses> class_votes{};
  ObjectClass last_class = ObjectClass::kVehicle;

  // Majority class over assigned detections; ties go to the most recent class.
  ObjectClass majority_class() const noexcept;
};

enum class TrackerEventKind : std::uint8_t { kNewVehicle, kTrackTerminated };

struct TrackerEvent {
  TrackerEventKind kind = TrackerEventKind::kNewVehicle;
  TrackId track_id = 0;
  double timestamp = 0.0;
  Camera camera = Camera::kFront;
  ObjectClass object_class = ObjectClass::kVehicle;

  friend bool operator==(const TrackerEvent&, const TrackerEvent&) = default;
};

// Canonical event-log line: kind=new_vehicle track=3 t=1.234 cam=front cls=truck
std::string format_event_line(const TrackerEvent& event);

// Per-camera multi-object tracker: constant-velocity Kalman prediction,
// Euclidean-cost optimal assignment, tentative -> active -> terminated.
// Not thread-safe; one instance per stream.
class Tracker {
 public:
  explicit Tracker(Camera camera, TrackerConfig config = {});

  // Processes one frame; returns events in decision order. Throws
  // StreamOrderError unless frame.timestamp exceeds the previous one.
  std::vector<TrackerEvent> step(const FrameDetections& frame);

  // Live (tentative or active) tracks after the last step, in creation order.
  const std::vector<Track>& tracks() const noexcept { return tracks_; }
  const Track* find(TrackId id) const noexcept;

  // (track id, detection index) pairs assigned in the last step, including
  // the first detection of freshly spawned tracks.
  const std::vector<std::pair<TrackId, std::size_t>>& last_assignments() const noexcept {
    return assignments_;
  }

  Camera camera() const noexcept { return camera_; }
  const TrackerConfig& config() const noexcept { return config_; }
  std::optional<double> last_timestamp() const noexcept { return last_t_; }

 private:
  void confirm(Track& track, double timestamp, std::vector<TrackerEvent>& events);

  Camera camera_;
  TrackerConfig config_;
  std::vector<Track> tracks_;
  TrackId next_id_ = 1;
  std::optional<double> last_t_;
  std::vector<std::pair<TrackId, std::size_t>> assignments_;
  std::vector<Point2> scratch_predictions_;
  std::vector<Point2> scratch_detections_;
};

}  // namespace roadwatch
