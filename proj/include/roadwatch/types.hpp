#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace roadwatch {

enum class Camera : std::uint8_t { kFront = 0, kRear = 1 };

// Order matches the class-confidence layout of the detector payload.
enum class ObjectClass : std::uint8_t { kTruck = 0, kVehicle = 1, kPedestrian = 2 };

inline constexpr std::size_t kNumClasses = 3;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

std::string_view to_string(Camera camera) noexcept;
std::string_view to_string(ObjectClass cls) noexcept;
std::optional<Camera> camera_from_string(std::string_view text) noexcept;
std::optional<ObjectClass> class_from_string(std::string_view text) noexcept;

// Trucks and passenger vehicles enter the flow check; pedestrians never do.
constexpr bool is_warning_class(ObjectClass cls) noexcept {
  return cls == ObjectClass::kTruck || cls == ObjectClass::kVehicle;
}

// Fixed-point text helpers shared by every canonical line format.
std::string format_fixed(double value, int decimals);
double round_to(double value, int decimals) noexcept;

}  // namespace roadwatch
