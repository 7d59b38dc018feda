#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "roadwatch/types.hpp"

namespace roadwatch {

// Arrival rate held constant from `start` (seconds) until the next segment.
struct RateSegment {
  double start = 0.0;
  double rate = 0.0;  // vehicles per second
};

// Vehicles of `direction` are hidden while near < d <= far (metres).
struct OcclusionWindow {
  Camera direction = Camera::kFront;
  double near = 0.0;
  double far = 0.0;
};

struct CameraModel {
  double focal_length = 1000.0;   // pixels
  double vehicle_height = 1.5;    // metres
  double vehicle_width = 1.8;     // metres
  double mount_height = 2.0;      // metres above the road
  double lane_offset = 3.5;       // metres, lateral distance to the lane centre
  int image_width = 1280;
  int image_height = 720;
};

struct SensorNoise {
  double center_sigma = 0.0;         // pixels
  double dropout = 0.0;              // per vehicle-frame
  double false_positive_rate = 0.0;  // per camera-frame
};

// Simulated world: 1-D approach per direction, pinhole projection to image.
struct Scenario {
  double duration = 3600.0;
  std::array<std::vector<RateSegment>, 2> arrivals;  // indexed by Camera
  double speed_min = 18.0;                           // m/s
  double speed_max = 28.0;
  double truck_fraction = 0.15;
  double detection_range = 120.0;  // d_vis, metres
  std::vector<OcclusionWindow> occlusions;
  double frame_rate = 30.0;
  CameraModel camera;
  SensorNoise noise;
  std::uint64_t seed = 1;

  // Throws ConfigError naming the offending field.
  void validate() const;

  double rate_at(Camera direction, double t) const noexcept;
  double max_rate(Camera direction) const noexcept;
  bool occluded(Camera direction, double distance) const noexcept;
};

// Key/value text format, one `key = value` per line, '#' starts a comment:
//   duration = 28800            frame_rate = 30         seed = 1
//   speed_min = 18              speed_max = 28          truck_fraction = 0.15
//   detection_range = 120
//   rate_per_hour.front = 0:30, 10800:960, 12400:30   (start_s:vehicles_per_hour)
//   rate_per_hour.rear  = ...
//   occlusion = front:30:120    (direction:near_m:far_m, repeatable)
//   focal_length, vehicle_height, vehicle_width, camera_height, lane_offset,
//   image_width, image_height
//   jitter_sigma, dropout, false_positive_rate
// Unknown keys and malformed values raise ConfigError with the line number.
Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace roadwatch
