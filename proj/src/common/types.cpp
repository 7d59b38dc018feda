#include "roadwatch/types.hpp"

#include <cmath>
#include <cstdio>

namespace roadwatch {

std::string_view to_string(Camera camera) noexcept {
  return camera == Camera::kFront ? "front" : "rear";
}

std::string_view to_string(ObjectClass cls) noexcept {
  switch (cls) {
    case ObjectClass::kTruck:
      return "truck";
    case ObjectClass::kVehicle:
      return "vehicle";
    case ObjectClass::kPedestrian:
      return "pedestrian";
  }
  return "vehicle";
}

std::optional<Camera> camera_from_string(std::string_view text) noexcept {
  if (text == "front") return Camera::kFront;
  if (text == "rear") return Camera::kRear;
  return std::nullopt;
}

std::optional<ObjectClass> class_from_string(std::string_view text) noexcept {
  if (text == "truck") return ObjectClass::kTruck;
  if (text == "vehicle") return ObjectClass::kVehicle;
  if (text == "pedestrian") return ObjectClass::kPedestrian;
  return std::nullopt;
}

double round_to(double value, int decimals) noexcept {
  const double scale = std::pow(10.0, decimals);
  const double rounded = std::round(value * scale) / scale;
  return rounded == 0.0 ? 0.0 : rounded;  // no "-0.0" in canonical text
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.*f", decimals, round_to(value, decimals));
  return std::string(buf, n > 0 ? static_cast<std::size_t>(n) : 0u);
}

}  // namespace roadwatch
