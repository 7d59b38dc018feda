#include "roadwatch/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "roadwatch/errors.hpp"

namespace roadwatch {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    parts.push_back(trim(s.substr(pos, next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

double parse_number(const std::string& field, const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
    throw ConfigError(field, "expected a number, got '" + text + "'");
  return value;
}

std::uint64_t parse_unsigned(const std::string& field, const std::string& text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError(field, "expected a non-negative integer, got '" + text + "'");
  return value;
}

int parse_pixels(const std::string& field, const std::string& text) {
  const auto v = parse_unsigned(field, text);
  if (v == 0 || v > 65535) throw ConfigError(field, "must be in [1, 65535]");
  return static_cast<int>(v);
}

std::vector<RateSegment> parse_rates(const std::string& field, const std::string& text) {
  std::vector<RateSegment> segments;
  for (const std::string& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw ConfigError(field, "expected start_s:vehicles_per_hour, got '" + item + "'");
    segments.push_back({parse_number(field, parts[0]), parse_number(field, parts[1]) / 3600.0});
  }
  return segments;
}

OcclusionWindow parse_occlusion(const std::string& field, const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError(field, "expected direction:near_m:far_m");
  const auto dir = camera_from_string(parts[0]);
  if (!dir) throw ConfigError(field, "direction must be front or rear");
  return {*dir, parse_number(field, parts[1]), parse_number(field, parts[2])};
}

}  // namespace

void Scenario::validate() const {
  if (!(duration > 0.0)) throw ConfigError("duration", "must be > 0");
  for (std::size_t d = 0; d < 2; ++d) {
    const std::string field = std::string("rate_per_hour.") + std::string(to_string(static_cast<Camera>(d)));
    double prev = -std::numeric_limits<double>::infinity();
    for (const RateSegment& seg : arrivals[d]) {
      if (!(seg.rate >= 0.0)) throw ConfigError(field, "rates must be >= 0");
      if (!(seg.start >= 0.0)) throw ConfigError(field, "segment starts must be >= 0");
      if (!(seg.start > prev)) throw ConfigError(field, "segment starts must increase");
      prev = seg.start;
    }
  }
  if (!(speed_min > 0.0)) throw ConfigError("speed_min", "must be > 0");
  if (!(speed_max >= speed_min)) throw ConfigError("speed_max", "must be >= speed_min");
  if (!(truck_fraction >= 0.0 && truck_fraction <= 1.0)) throw ConfigError("truck_fraction", "must be in [0, 1]");
  if (!(detection_range > 0.0)) throw ConfigError("detection_range", "must be > 0");
  for (const OcclusionWindow& w : occlusions)
    if (!(w.near >= 0.0 && w.far > w.near)) throw ConfigError("occlusion", "need 0 <= near < far");
  // Timestamps are stored with millisecond precision.
  if (!(frame_rate > 0.0 && frame_rate <= 1000.0)) throw ConfigError("frame_rate", "must be in (0, 1000]");
  if (!(camera.focal_length > 0.0)) throw ConfigError("focal_length", "must be > 0");
  if (!(camera.vehicle_height > 0.0)) throw ConfigError("vehicle_height", "must be > 0");
  if (!(camera.vehicle_width > 0.0)) throw ConfigError("vehicle_width", "must be > 0");
  if (!(camera.mount_height >= 0.0)) throw ConfigError("camera_height", "must be >= 0");
  if (camera.image_width <= 0) throw ConfigError("image_width", "must be > 0");
  if (camera.image_height <= 0) throw ConfigError("image_height", "must be > 0");
  if (!(noise.center_sigma >= 0.0)) throw ConfigError("jitter_sigma", "must be >= 0");
  if (!(noise.dropout >= 0.0 && noise.dropout <= 1.0)) throw ConfigError("dropout", "must be in [0, 1]");
  if (!(noise.false_positive_rate >= 0.0 && noise.false_positive_rate <= 1.0))
    throw ConfigError("false_positive_rate", "must be in [0, 1]");
}

double Scenario::rate_at(Camera direction, double t) const noexcept {
  double rate = 0.0;
  for (const RateSegment& seg : arrivals[static_cast<std::size_t>(direction)]) {
    if (seg.start <= t) rate = seg.rate;
    else break;
  }
  return rate;
}

double Scenario::max_rate(Camera direction) const noexcept {
  double rate = 0.0;
  for (const RateSegment& seg : arrivals[static_cast<std::size_t>(direction)]) rate = std::max(rate, seg.rate);
  return rate;
}

bool Scenario::occluded(Camera direction, double distance) const noexcept {
  return std::any_of(occlusions.begin(), occlusions.end(), [&](const OcclusionWindow& w) {
    return w.direction == direction && distance > w.near && distance <= w.far;
  });
}

Scenario parse_scenario(std::istream& in) {
  Scenario s;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto number = [](double& target) -> Setter {
    return [&target](const std::string& k, const std::string& v) { target = parse_number(k, v); };
  };
  auto pixels = [](int& target) -> Setter {
    return [&target](const std::string& k, const std::string& v) { target = parse_pixels(k, v); };
  };
  const std::map<std::string, Setter> setters = {
      {"duration", number(s.duration)},
      {"frame_rate", number(s.frame_rate)},
      {"seed", [&](const std::string& k, const std::string& v) { s.seed = parse_unsigned(k, v); }},
      {"speed_min", number(s.speed_min)},
      {"speed_max", number(s.speed_max)},
      {"truck_fraction", number(s.truck_fraction)},
      {"detection_range", number(s.detection_range)},
      {"rate_per_hour.front", [&](const std::string& k, const std::string& v) { s.arrivals[0] = parse_rates(k, v); }},
      {"rate_per_hour.rear", [&](const std::string& k, const std::string& v) { s.arrivals[1] = parse_rates(k, v); }},
      {"occlusion", [&](const std::string& k, const std::string& v) { s.occlusions.push_back(parse_occlusion(k, v)); }},
      {"focal_length", number(s.camera.focal_length)},
      {"vehicle_height", number(s.camera.vehicle_height)},
      {"vehicle_width", number(s.camera.vehicle_width)},
      {"camera_height", number(s.camera.mount_height)},
      {"lane_offset", number(s.camera.lane_offset)},
      {"image_width", pixels(s.camera.image_width)},
      {"image_height", pixels(s.camera.image_height)},
      {"jitter_sigma", number(s.noise.center_sigma)},
      {"dropout", number(s.noise.dropout)},
      {"false_positive_rate", number(s.noise.false_positive_rate)},
  };

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_number), "expected 'key = value'");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError(key, "unknown key (line " + std::to_string(line_number) + ")");
    it->second(key, value);
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario", "cannot open '" + path.string() + "'");
  return parse_scenario(in);
}

}  // namespace roadwatch
