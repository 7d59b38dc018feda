#include "roadwatch/flow_check.hpp"

#include <cmath>

#include "roadwatch/errors.hpp"

namespace roadwatch {

FlowCheckState init_flow_check(double now, double t_duration) {
  if (!(t_duration > 0.0) || !std::isfinite(t_duration))
    throw ConfigError("t_duration", "must be > 0, got " + std::to_string(t_duration));
  return {now, t_duration};
}

std::pair<FlowCheckState, std::optional<WarningEvent>> on_new_vehicle(const FlowCheckState& state,
                                                                      const TrackerEvent& event) {
  if (event.kind != TrackerEventKind::kNewVehicle)
    throw ContractViolation("flow check only consumes new-vehicle events");
  if (!is_warning_class(event.object_class))
    throw ContractViolation("pedestrian events do not enter the flow check");
  if (event.timestamp < state.t_start) {
    throw StreamOrderError("flow check: event at " + format_fixed(event.timestamp, 3) +
                           " precedes t_start " + format_fixed(state.t_start, 3));
  }

  const double t_diff = event.timestamp - state.t_start;
  std::optional<WarningEvent> warning;
  if (t_diff > state.t_duration) {
    warning = WarningEvent{event.timestamp, event.track_id, event.camera, t_diff};
  }
  FlowCheckState next = state;
  next.t_start = event.timestamp;
  return {next, warning};
}

std::string format_warning_line(const WarningEvent& warning) {
  std::string line = "WARN t=" + format_fixed(warning.timestamp, 3);
  line += " cam=";
  line += to_string(warning.camera);
  line += " track=" + std::to_string(warning.track_id);
  line += " gap=" + format_fixed(warning.gap, 1);
  return line;
}

}  // namespace roadwatch
