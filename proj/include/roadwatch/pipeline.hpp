#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "roadwatch/device.hpp"
#include "roadwatch/flow_check.hpp"
#include "roadwatch/tracker.hpp"

namespace roadwatch {

enum class Decision : std::uint8_t { kWarn, kSuppress, kIgnored };

std::string_view to_string(Decision decision) noexcept;
std::optional<Decision> decision_from_string(std::string_view text) noexcept;

// One new-vehicle event and what the flow check did with it.
struct EventDecision {
  TrackerEvent event;
  Decision decision = Decision::kSuppress;
  double gap = 0.0;  // seconds since the previous vehicle (0 when ignored)
};

// Audit line: EVENT t=15.000 cam=rear track=7 cls=vehicle decision=warn gap=15.0
std::string format_audit_line(const EventDecision& decision);

// Stable-sorts frames into the merge order the flow check expects:
// by timestamp, front before rear on equal timestamps.
void merge_order(std::vector<FrameDetections>& frames);

// Two per-camera trackers feeding one shared flow-check timer. Frames must
// arrive in merge order; the timer starts at the first frame's timestamp.
class WarningPipeline {
 public:
  WarningPipeline(const TrackerConfig& config, double t_duration, DeviceChannel* device = nullptr);

  // Runs the frame through its camera's tracker and the flow check. Returns
  // the decisions made for this frame (valid until the next call).
  const std::vector<EventDecision>& process(const FrameDetections& frame);

  const Tracker& tracker(Camera camera) const noexcept {
    return trackers_[static_cast<std::size_t>(camera)];
  }
  const std::vector<EventDecision>& decisions() const noexcept { return all_decisions_; }
  const std::vector<WarningEvent>& warnings() const noexcept { return warnings_; }
  std::size_t terminated_tracks() const noexcept { return terminated_; }
  std::size_t frames_processed() const noexcept { return frames_; }
  const WarningEmitter& emitter() const noexcept { return emitter_; }
  std::optional<FlowCheckState> flow_state() const noexcept { return flow_; }

 private:
  std::array<Tracker, 2> trackers_;
  double t_duration_;
  std::optional<FlowCheckState> flow_;
  WarningEmitter emitter_;
  std::optional<std::pair<double, Camera>> last_key_;
  std::vector<EventDecision> frame_decisions_;
  std::vector<EventDecision> all_decisions_;
  std::vector<WarningEvent> warnings_;
  std::size_t terminated_ = 0;
  std::size_t frames_ = 0;
};

}  // namespace roadwatch
