#include "roadwatch/tracker.hpp"

#include <algorithm>
#include <cmath>

#include "roadwatch/errors.hpp"

namespace roadwatch {

void TrackerConfig::validate() const {
  if (!(gate_distance > 0.0)) throw ConfigError("gate_distance", "must be > 0");
  if (confirm_hits < 1) throw ConfigError("confirm_hits", "must be >= 1");
  if (max_misses < 1) throw ConfigError("max_misses", "must be >= 1");
  if (!(process_noise >= 0.0) || !std::isfinite(process_noise))
    throw ConfigError("process_noise", "must be >= 0");
  if (!(measurement_noise > 0.0) || !std::isfinite(measurement_noise))
    throw ConfigError("measurement_noise", "must be > 0");
  if (!(initial_velocity_variance >= 0.0) || !std::isfinite(initial_velocity_variance))
    throw ConfigError("initial_velocity_variance", "must be >= 0");
}

ObjectClass Track::majority_class() const noexcept {
  const std::uint32_t best = *std::max_element(class_votes.begin(), class_votes.end());
  if (class_votes[static_cast<std::size_t>(last_class)] == best) return last_class;
  for (std::size_t j = 0; j < kNumClasses; ++j)
    if (class_votes[j] == best) return static_cast<ObjectClass>(j);
  return last_class;
}

std::string format_event_line(const TrackerEvent& event) {
  std::string line = event.kind == TrackerEventKind::kNewVehicle ? "kind=new_vehicle"
                                                                  : "kind=track_terminated";
  line += " track=" + std::to_string(event.track_id);
  line += " t=" + format_fixed(event.timestamp, 3);
  line += " cam=";
  line += to_string(event.camera);
  line += " cls=";
  line += to_string(event.object_class);
  return line;
}

Tracker::Tracker(Camera camera, TrackerConfig config) : camera_(camera), config_(config) {
  config_.validate();
}

const Track* Tracker::find(TrackId id) const noexcept {
  auto it = std::find_if(tracks_.begin(), tracks_.end(), [id](const Track& t) { return t.id == id; });
  return it == tracks_.end() ? nullptr : &*it;
}

void Tracker::confirm(Track& track, double timestamp, std::vector<TrackerEvent>& events) {
  track.status = TrackStatus::kActive;
  track.confirmed_at = timestamp;
  events.push_back({TrackerEventKind::kNewVehicle, track.id, timestamp, camera_,
                    track.majority_class()});
}

std::vector<TrackerEvent> Tracker::step(const FrameDetections& frame) {
  if (last_t_ && !(frame.timestamp > *last_t_)) {
    throw StreamOrderError(std::string(to_string(camera_)) + " stream: timestamp " +
                           format_fixed(frame.timestamp, 3) + " does not follow " +
                           format_fixed(*last_t_, 3));
  }
  std::vector<TrackerEvent> events;
  assignments_.clear();

  // Predict every live track to this frame.
  if (last_t_) {
    const double dt = frame.timestamp - *last_t_;
    for (Track& track : tracks_) track.state = predict(track.state, dt, config_.process_noise);
  }
  last_t_ = frame.timestamp;

  scratch_predictions_.clear();
  for (const Track& track : tracks_) scratch_predictions_.push_back(track.state.position());
  scratch_detections_.clear();
  for (const Detection& det : frame.detections) scratch_detections_.push_back(det.center);

  const Assignment result =
      assign(cost_matrix(scratch_predictions_, scratch_detections_), config_.gate_distance);

  for (const auto& [ti, di] : result.matches) {
    Track& track = tracks_[ti];
    const Detection& det = frame.detections[di];
    track.state = update(track.state, det.center, config_.measurement_noise);
    track.history.push_back({frame.frame_index, det.center});
    track.class_votes[static_cast<std::size_t>(det.best_class)]++;
    track.last_class = det.best_class;
    track.consecutive_hits++;
    track.consecutive_misses = 0;
    assignments_.emplace_back(track.id, di);
    if (track.status == TrackStatus::kTentative && track.consecutive_hits >= config_.confirm_hits) {
      confirm(track, frame.timestamp, events);
    }
  }

  for (std::size_t ti : result.unmatched_tracks) {
    Track& track = tracks_[ti];
    track.consecutive_hits = 0;
    track.consecutive_misses++;
    if (track.status == TrackStatus::kTentative) {
      // Unconfirmed tracks do not coast; one miss ends them silently.
      track.status = TrackStatus::kTerminated;
    } else if (track.consecutive_misses >= config_.max_misses) {
      track.status = TrackStatus::kTerminated;
      events.push_back({TrackerEventKind::kTrackTerminated, track.id, frame.timestamp, camera_,
                        track.majority_class()});
    }
  }

  std::erase_if(tracks_, [](const Track& t) { return t.status == TrackStatus::kTerminated; });

  for (std::size_t di : result.unmatched_detections) {
    const Detection& det = frame.detections[di];
    Track track;
    track.id = next_id_++;
    track.state.mean << det.center.x, det.center.y, 0.0, 0.0;
    track.state.covariance = StateCovariance::Zero();
    track.state.covariance(0, 0) = config_.measurement_noise;
    track.state.covariance(1, 1) = config_.measurement_noise;
    track.state.covariance(2, 2) = config_.initial_velocity_variance;
    track.state.covariance(3, 3) = config_.initial_velocity_variance;
    track.history.push_back({frame.frame_index, det.center});
    track.class_votes[static_cast<std::size_t>(det.best_class)] = 1;
    track.last_class = det.best_class;
    track.consecutive_hits = 1;
    track.created_at = frame.timestamp;
    assignments_.emplace_back(track.id, di);
    if (track.consecutive_hits >= config_.confirm_hits) confirm(track, frame.timestamp, events);
    tracks_.push_back(std::move(track));
  }
  return events;
}

}  // namespace roadwatch
