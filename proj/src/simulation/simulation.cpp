#include "roadwatch/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "roadwatch/errors.hpp"

namespace roadwatch {
namespace {

constexpr double kNominalObjectness = 0.95;
constexpr double kNominalConfidence = 0.9;
constexpr double kOtherConfidence = 0.05;
constexpr std::int64_t kFalsePositiveLabel = -1;

std::mt19937_64 make_stream(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

std::array<double, kNumClasses> nominal_confidences(ObjectClass cls) {
  std::array<double, kNumClasses> conf;
  conf.fill(kOtherConfidence);
  conf[static_cast<std::size_t>(cls)] = kNominalConfidence;
  return conf;
}

std::uint64_t tick_count(const Scenario& s) {
  return static_cast<std::uint64_t>(std::ceil(s.duration * s.frame_rate - 1e-9));
}

double tick_time(const Scenario& s, std::uint64_t k) {
  return round_to(static_cast<double>(k) / s.frame_rate, 3);
}

}  // namespace

std::vector<VehiclePass> generate_passes(const Scenario& scenario, std::mt19937_64& rng) {
  scenario.validate();
  std::vector<VehiclePass> passes;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> speed(scenario.speed_min, scenario.speed_max);

  for (Camera dir : {Camera::kFront, Camera::kRear}) {
    const double lambda_max = scenario.max_rate(dir);
    if (lambda_max <= 0.0) continue;
    std::exponential_distribution<double> gap(lambda_max);
    double t = 0.0;
    while (true) {
      t += gap(rng);
      if (t >= scenario.duration) break;
      // Thinning: keep the candidate with probability lambda(t) / lambda_max.
      if (unit(rng) * lambda_max >= scenario.rate_at(dir, t)) continue;
      VehiclePass pass;
      pass.direction = dir;
      pass.spawn_time = t;
      pass.speed = scenario.speed_max > scenario.speed_min ? speed(rng) : scenario.speed_min;
      pass.pass_time = t + scenario.detection_range / pass.speed;
      pass.object_class = unit(rng) < scenario.truck_fraction ? ObjectClass::kTruck : ObjectClass::kVehicle;
      passes.push_back(pass);
    }
  }
  std::stable_sort(passes.begin(), passes.end(), [](const VehiclePass& a, const VehiclePass& b) {
    return a.spawn_time < b.spawn_time;
  });
  VehicleId next = 1;
  for (VehiclePass& p : passes) p.vehicle_id = next++;
  return passes;
}

std::optional<Detection> DetectionRenderer::project(const CameraModel& camera, double distance,
                                                    ObjectClass cls, std::uint64_t frame_index) {
  if (!(distance > 0.0)) return std::nullopt;
  const double f = camera.focal_length;
  const double cx = camera.image_width / 2.0 + f * camera.lane_offset / distance;
  const double cy = camera.image_height / 2.0 +
                    f * (camera.mount_height - camera.vehicle_height / 2.0) / distance;
  const double w = f * camera.vehicle_width / distance;
  const double h = f * camera.vehicle_height / distance;
  if (cx - w / 2.0 < 0.0 || cx + w / 2.0 > camera.image_width || cy - h / 2.0 < 0.0 ||
      cy + h / 2.0 > camera.image_height) {
    return std::nullopt;
  }
  return make_detection(frame_index, {cx, cy}, w, h, kNominalObjectness, nominal_confidences(cls));
}

DetectionRenderer::DetectionRenderer(const Scenario& scenario, std::vector<VehiclePass> passes,
                                     std::uint64_t seed)
    : scenario_(scenario), passes_(std::move(passes)), rng_(make_stream(seed, 2)) {
  scenario_.validate();
  std::stable_sort(passes_.begin(), passes_.end(), [](const VehiclePass& a, const VehiclePass& b) {
    return a.spawn_time < b.spawn_time;
  });
  for (std::size_t i = 0; i < passes_.size(); ++i)
    by_direction_[static_cast<std::size_t>(passes_[i].direction)].push_back(i);
  ticks_ = tick_count(scenario_);
}

bool DetectionRenderer::next(FrameDetections& frame, std::vector<DetectionLabel>& labels) {
  if (tick_ >= ticks_) return false;
  const auto dir = static_cast<Camera>(camera_);
  const auto d = static_cast<std::size_t>(camera_);
  const double t = tick_time(scenario_, tick_);
  const CameraModel& cam = scenario_.camera;
  const SensorNoise& noise = scenario_.noise;

  frame.frame_index = tick_;
  frame.timestamp = t;
  frame.camera = dir;
  frame.detections.clear();
  labels.clear();

  auto& pending = by_direction_[d];
  while (next_spawn_[d] < pending.size() && passes_[pending[next_spawn_[d]]].spawn_time <= t) {
    live_[d].push_back(pending[next_spawn_[d]++]);
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, noise.center_sigma > 0.0 ? noise.center_sigma : 1.0);
  for (std::size_t idx : live_[d]) {
    const VehiclePass& v = passes_[idx];
    const double distance = scenario_.detection_range - v.speed * (t - v.spawn_time);
    if (distance <= 0.0 || scenario_.occluded(dir, distance)) continue;
    auto det = project(cam, distance, v.object_class, tick_);
    if (!det) continue;
    if (noise.dropout > 0.0 && unit(rng_) < noise.dropout) continue;
    if (noise.center_sigma > 0.0) {
      det->center.x = std::clamp(det->center.x + jitter(rng_), 0.0, double(cam.image_width));
      det->center.y = std::clamp(det->center.y + jitter(rng_), 0.0, double(cam.image_height));
    }
    frame.detections.push_back(*det);
    labels.emplace_back(v.vehicle_id);
  }
  std::erase_if(live_[d], [&](std::size_t idx) {
    const VehiclePass& v = passes_[idx];
    return scenario_.detection_range - v.speed * (t - v.spawn_time) <= 0.0;
  });

  if (noise.false_positive_rate > 0.0 && unit(rng_) < noise.false_positive_rate) {
    std::uniform_real_distribution<double> size(10.0, 60.0);
    const double w = size(rng_);
    const double h = size(rng_);
    const double x = w / 2.0 + unit(rng_) * (cam.image_width - w);
    const double y = h / 2.0 + unit(rng_) * (cam.image_height - h);
    const auto cls = static_cast<ObjectClass>(std::min<std::size_t>(
        static_cast<std::size_t>(unit(rng_) * kNumClasses), kNumClasses - 1));
    frame.detections.push_back(
        make_detection(tick_, {x, y}, w, h, kNominalObjectness, nominal_confidences(cls)));
    labels.emplace_back(std::nullopt);
  }

  frame = quantize_for_log(std::move(frame));

  if (++camera_ == 2) {
    camera_ = 0;
    ++tick_;
  }
  return true;
}

RenderedStreams render_detections(const Scenario& scenario, const std::vector<VehiclePass>& passes,
                                  std::uint64_t seed) {
  RenderedStreams out;
  DetectionRenderer renderer(scenario, passes, seed);
  FrameDetections frame;
  std::vector<DetectionLabel> labels;
  while (renderer.next(frame, labels)) {
    out.frames.push_back(frame);
    out.labels.push_back(labels);
  }
  return out;
}

std::vector<const EventRecord*> SimulationReport::warnings() const {
  std::vector<const EventRecord*> out;
  for (const EventRecord& e : events)
    if (e.decision == Decision::kWarn) out.push_back(&e);
  return out;
}

std::map<long long, std::size_t> SimulationReport::lead_time_histogram() const {
  std::map<long long, std::size_t> bins;
  for (const EventRecord& e : events) {
    if (e.decision != Decision::kWarn) continue;
    if (const auto lead = e.lead_time()) bins[static_cast<long long>(std::floor(*lead))]++;
  }
  return bins;
}

std::vector<HourCount> SimulationReport::hourly() const {
  const auto hours = static_cast<std::size_t>(std::max(1.0, std::ceil(duration / 3600.0)));
  std::vector<HourCount> out(hours);
  for (const EventRecord& e : events) {
    if (e.decision == Decision::kIgnored) continue;
    const auto h = std::min(hours - 1, static_cast<std::size_t>(std::max(0.0, e.timestamp) / 3600.0));
    out[h].events++;
    if (e.decision == Decision::kWarn) out[h].warnings++;
  }
  return out;
}

namespace {

void tally(SimulationReport& report, const EventRecord& record) {
  switch (record.decision) {
    case Decision::kWarn:
      report.warnings_with_filter++;
      report.warnings_without_filter++;
      if (!record.vehicle) report.spurious_warnings++;
      break;
    case Decision::kSuppress:
      report.warnings_without_filter++;
      break;
    case Decision::kIgnored:
      report.pedestrian_events++;
      break;
  }
  report.events.push_back(record);
}

void check_report(const SimulationReport& report) {
  if (report.warnings_with_filter > report.warnings_without_filter)
    throw InvariantViolation("flow check produced more warnings than new-vehicle events");
}

}  // namespace

SimulationReport summarize(const WarningPipeline& pipeline, double duration) {
  SimulationReport report;
  report.duration = duration;
  report.frames = pipeline.frames_processed();
  for (const EventDecision& d : pipeline.decisions()) {
    tally(report, {d.event.timestamp, d.event.camera, d.event.track_id, d.event.object_class,
                   d.decision, d.gap, std::nullopt, std::nullopt});
  }
  // Without ground truth every warning counts as unattributed, not spurious.
  report.spurious_warnings = 0;
  report.device_failures = pipeline.emitter().failed();
  check_report(report);
  return report;
}

SimulationReport run_pipeline(const Scenario& scenario, const PipelineOptions& options) {
  scenario.validate();
  auto pass_rng = make_stream(scenario.seed, 1);
  std::vector<VehiclePass> passes = generate_passes(scenario, pass_rng);
  std::unordered_map<VehicleId, double> pass_time;
  for (const VehiclePass& p : passes) pass_time.emplace(p.vehicle_id, p.pass_time);

  SimulationReport report;
  report.duration = scenario.duration;
  report.vehicles = passes.size();

  DetectionRenderer renderer(scenario, std::move(passes), scenario.seed);
  WarningPipeline pipeline(options.tracker, options.t_duration, options.device);

  // Per camera: track id -> (label -> votes), label -1 for false positives.
  std::array<std::unordered_map<TrackId, std::map<std::int64_t, std::uint32_t>>, 2> votes;

  FrameDetections frame;
  std::vector<DetectionLabel> labels;
  std::uint64_t processed = 0;
  while (renderer.next(frame, labels)) {
    if (options.frame_sink) options.frame_sink(frame);
    const auto& decisions = pipeline.process(frame);
    auto& cam_votes = votes[static_cast<std::size_t>(frame.camera)];
    for (const auto& [track_id, det_index] : pipeline.tracker(frame.camera).last_assignments()) {
      const DetectionLabel& label = labels[det_index];
      cam_votes[track_id][label ? static_cast<std::int64_t>(*label) : kFalsePositiveLabel]++;
    }

    for (const EventDecision& d : decisions) {
      EventRecord record{d.event.timestamp, d.event.camera, d.event.track_id, d.event.object_class,
                         d.decision, d.gap, std::nullopt, std::nullopt};
      if (auto it = cam_votes.find(d.event.track_id); it != cam_votes.end() && !it->second.empty()) {
        // Most votes wins; on a tie the larger label (a real vehicle over -1).
        auto best = it->second.begin();
        for (auto v = it->second.begin(); v != it->second.end(); ++v)
          if (v->second >= best->second) best = v;
        if (best->first != kFalsePositiveLabel) {
          record.vehicle = static_cast<VehicleId>(best->first);
          record.pass_time = pass_time.at(*record.vehicle);
        }
      }
      tally(report, record);
    }

    if (++processed % 4096 == 0) {
      for (std::size_t c = 0; c < 2; ++c) {
        const Tracker& tracker = pipeline.tracker(static_cast<Camera>(c));
        std::erase_if(votes[c], [&](const auto& entry) { return tracker.find(entry.first) == nullptr; });
      }
    }
  }
  report.frames = pipeline.frames_processed();
  report.device_failures = pipeline.emitter().failed();
  check_report(report);
  return report;
}

}  // namespace roadwatch
