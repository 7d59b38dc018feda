#include "roadwatch/pipeline.hpp"

#include <algorithm>

#include "roadwatch/errors.hpp"

namespace roadwatch {

std::string_view to_string(Decision decision) noexcept {
  switch (decision) {
    case Decision::kWarn:
      return "warn";
    case Decision::kSuppress:
      return "suppress";
    case Decision::kIgnored:
      return "ignored";
  }
  return "ignored";
}

std::optional<Decision> decision_from_string(std::string_view text) noexcept {
  if (text == "warn") return Decision::kWarn;
  if (text == "suppress") return Decision::kSuppress;
  if (text == "ignored") return Decision::kIgnored;
  return std::nullopt;
}

std::string format_audit_line(const EventDecision& d) {
  std::string line = "EVENT t=" + format_fixed(d.event.timestamp, 3);
  line += " cam=";
  line += to_string(d.event.camera);
  line += " track=" + std::to_string(d.event.track_id);
  line += " cls=";
  line += to_string(d.event.object_class);
  line += " decision=";
  line += to_string(d.decision);
  if (d.decision != Decision::kIgnored) line += " gap=" + format_fixed(d.gap, 1);
  return line;
}

void merge_order(std::vector<FrameDetections>& frames) {
  std::stable_sort(frames.begin(), frames.end(), [](const FrameDetections& a, const FrameDetections& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.camera < b.camera;
  });
}

WarningPipeline::WarningPipeline(const TrackerConfig& config, double t_duration, DeviceChannel* device)
    : trackers_{Tracker(Camera::kFront, config), Tracker(Camera::kRear, config)},
      t_duration_(t_duration),
      emitter_(device) {
  init_flow_check(0.0, t_duration_);  // validates t_duration up front
}

const std::vector<EventDecision>& WarningPipeline::process(const FrameDetections& frame) {
  const std::pair<double, Camera> key{frame.timestamp, frame.camera};
  if (last_key_ && key < *last_key_) {
    throw StreamOrderError("merged stream out of order at t=" + format_fixed(frame.timestamp, 3) +
                           " after t=" + format_fixed(last_key_->first, 3));
  }
  last_key_ = key;
  if (!flow_) flow_ = init_flow_check(frame.timestamp, t_duration_);
  ++frames_;

  frame_decisions_.clear();
  const auto events = trackers_[static_cast<std::size_t>(frame.camera)].step(frame);
  for (const TrackerEvent& event : events) {
    if (event.kind == TrackerEventKind::kTrackTerminated) {
      ++terminated_;
      continue;
    }
    EventDecision d{event, Decision::kIgnored, 0.0};
    if (is_warning_class(event.object_class)) {
      d.gap = event.timestamp - flow_->t_start;
      auto [next, warning] = on_new_vehicle(*flow_, event);
      flow_ = next;
      if (warning) {
        d.decision = Decision::kWarn;
        warnings_.push_back(*warning);
        emitter_.emit(*warning);
      } else {
        d.decision = Decision::kSuppress;
      }
    }
    frame_decisions_.push_back(d);
    all_decisions_.push_back(d);
  }
  return frame_decisions_;
}

}  // namespace roadwatch
