#pragma once

#include <optional>
#include <string>
#include <utility>

#include "roadwatch/tracker.hpp"
#include "roadwatch/types.hpp"

namespace roadwatch {

inline constexpr double kDefaultQuietDuration = 10.0;  // seconds

// Timer state of the traffic flow check: when the last vehicle was seen.
struct FlowCheckState {
  double t_start = 0.0;
  double t_duration = kDefaultQuietDuration;
};

struct WarningEvent {
  double timestamp = 0.0;  // t_end
  TrackId track_id = 0;
  Camera camera = Camera::kFront;
  double gap = 0.0;  // t_diff

  friend bool operator==(const WarningEvent&, const WarningEvent&) = default;
};

// Throws ConfigError when t_duration <= 0.
FlowCheckState init_flow_check(double now, double t_duration = kDefaultQuietDuration);

// Warns iff the gap since the previous identified vehicle strictly exceeds
// t_duration; t_start moves to the event time whether or not it warns.
// Throws StreamOrderError if the event predates t_start and
// ContractViolation for non-new-vehicle or non-warning-class events.
std::pair<FlowCheckState, std::optional<WarningEvent>> on_new_vehicle(const FlowCheckState& state,
                                                                      const TrackerEvent& event);

// Device message: WARN t=15.000 cam=rear track=7 gap=15.0
std::string format_warning_line(const WarningEvent& warning);

}  // namespace roadwatch
