#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "roadwatch/types.hpp"

namespace roadwatch {

// Layout of one detector output tensor: N x N cells, each holding
// `anchors_per_cell` boxes of (cx, cy, w, h, objectness, class scores...).
struct GridSpec {
  std::uint16_t grid_size = 13;
  std::uint8_t anchors_per_cell = 3;
  std::uint8_t num_classes = kNumClasses;
  std::uint16_t image_width = 1280;
  std::uint16_t image_height = 720;

  std::size_t anchor_stride() const noexcept { return 4u + 1u + num_classes; }
  std::size_t anchor_count() const noexcept {
    return std::size_t{grid_size} * grid_size * anchors_per_cell;
  }
  std::size_t payload_length() const noexcept { return anchor_count() * anchor_stride(); }

  // Throws ValidationError unless the shape matches the three-class,
  // three-anchor head and the image size is non-zero.
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct Detection {
  std::uint64_t frame_index = 0;
  Point2 center;
  double width = 0.0;
  double height = 0.0;
  double objectness = 0.0;
  std::array<double, kNumClasses> class_confidences{};
  double combined_score = 0.0;
  ObjectClass best_class = ObjectClass::kVehicle;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Builds a detection and fills in combined_score / best_class from the
// objectness and class confidences (first maximal class wins ties).
Detection make_detection(std::uint64_t frame_index, Point2 center, double width, double height,
                         double objectness, const std::array<double, kNumClasses>& confidences);

struct FrameDetections {
  std::uint64_t frame_index = 0;
  double timestamp = 0.0;
  Camera camera = Camera::kFront;
  std::vector<Detection> detections;

  friend bool operator==(const FrameDetections&, const FrameDetections&) = default;
};

// Returns every anchor with objectness * max class confidence strictly above
// `score_threshold`, highest score first; equal scores keep (cell, anchor)
// order. Box fields must already be absolute pixels. Centres outside the
// image are clamped onto it. No suppression of overlapping boxes is done.
std::vector<Detection> decode_grid(std::span<const float> raw, const GridSpec& spec,
                                   double score_threshold, std::uint64_t frame_index = 0);

// Raw grid file: 16-byte header {"RWGRID01", N:u16, anchors:u8, classes:u8,
// width:u16, height:u16} followed by little-endian float32 payload. A file may
// hold several frames back to back, each with its own header.
struct GridFrame {
  GridSpec spec;
  std::vector<float> payload;
};

void write_grid_frame(std::ostream& out, const GridFrame& frame);
// Returns false on clean end of stream; throws StructuralError on a
// truncated or malformed frame.
bool read_grid_frame(std::istream& in, GridFrame& frame);

// Detection log: one JSON object per line,
//   {"camera":"front","frame":3,"t":0.100,"dets":[{"cx":..,"cy":..,"w":..,"h":..,
//    "cls":"vehicle","obj":0.9500,"conf":[0.0500,0.9000,0.0500]}]}
// Canonical form fixes field order, precision, and omits whitespace.
std::vector<FrameDetections> parse_detection_log(std::istream& source);
void write_detection_log(std::span<const FrameDetections> frames, std::ostream& sink);

std::string format_frame_line(const FrameDetections& frame);
FrameDetections parse_frame_line(std::string_view line, std::size_t line_number);

// Rounds every field to the precision the log stores, so a frame survives a
// write/parse cycle unchanged.
FrameDetections quantize_for_log(FrameDetections frame);

}  // namespace roadwatch
