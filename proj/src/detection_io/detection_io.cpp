#include "roadwatch/detection_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "roadwatch/errors.hpp"

namespace roadwatch {
namespace {

constexpr char kGridMagic[8] = {'R', 'W', 'G', 'R', 'I', 'D', '0', '1'};
constexpr std::size_t kGridHeaderSize = 16;

bool is_probability(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

std::size_t argmax_class(const std::array<double, kNumClasses>& conf) {
  return static_cast<std::size_t>(std::max_element(conf.begin(), conf.end()) - conf.begin());
}

void put_u16(unsigned char* p, std::uint16_t v) {
  p[0] = static_cast<unsigned char>(v & 0xFF);
  p[1] = static_cast<unsigned char>(v >> 8);
}

std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
  }
}

}  // namespace

void GridSpec::validate() const {
  if (grid_size == 0) throw ValidationError("grid_size must be positive");
  if (anchors_per_cell != 3)
    throw ValidationError("anchors_per_cell must be 3, got " + std::to_string(anchors_per_cell));
  if (num_classes != kNumClasses)
    throw ValidationError("num_classes must be 3, got " + std::to_string(num_classes));
  if (image_width == 0 || image_height == 0) throw ValidationError("image size must be positive");
}

Detection make_detection(std::uint64_t frame_index, Point2 center, double width, double height,
                         double objectness, const std::array<double, kNumClasses>& confidences) {
  Detection det;
  det.frame_index = frame_index;
  det.center = center;
  det.width = width;
  det.height = height;
  det.objectness = objectness;
  det.class_confidences = confidences;
  const std::size_t best = argmax_class(confidences);
  det.best_class = static_cast<ObjectClass>(best);
  det.combined_score = objectness * confidences[best];
  return det;
}

std::vector<Detection> decode_grid(std::span<const float> raw, const GridSpec& spec,
                                   double score_threshold, std::uint64_t frame_index) {
  spec.validate();
  if (raw.size() != spec.payload_length()) {
    throw StructuralError("grid payload length mismatch: expected " +
                          std::to_string(spec.payload_length()) + " floats, got " +
                          std::to_string(raw.size()));
  }
  if (!(score_threshold >= 0.0 && score_threshold <= 1.0)) {
    throw ValidationError("score_threshold must lie in [0, 1]");
  }

  const std::size_t stride = spec.anchor_stride();
  const double max_x = spec.image_width;
  const double max_y = spec.image_height;

  std::vector<Detection> out;
  for (std::size_t a = 0; a < spec.anchor_count(); ++a) {
    const float* p = raw.data() + a * stride;
    const std::size_t cell = a / spec.anchors_per_cell;
    const std::size_t anchor = a % spec.anchors_per_cell;
    auto where = [&] {
      return "cell " + std::to_string(cell) + " anchor " + std::to_string(anchor);
    };

    const double objectness = p[4];
    std::array<double, kNumClasses> conf{};
    if (!is_probability(objectness)) throw ValidationError("objectness outside [0,1] at " + where());
    for (std::size_t j = 0; j < kNumClasses; ++j) {
      conf[j] = p[5 + j];
      if (!is_probability(conf[j]))
        throw ValidationError("class confidence outside [0,1] at " + where());
    }

    // float * float is exact in double, so this is the true product.
    const double score = objectness * *std::max_element(conf.begin(), conf.end());
    if (!(score > score_threshold)) continue;

    const double w = p[2];
    const double h = p[3];
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !(w > 0.0) || !(h > 0.0) ||
        !std::isfinite(w) || !std::isfinite(h)) {
      throw ValidationError("invalid box geometry at " + where());
    }
    const Point2 c{std::clamp<double>(p[0], 0.0, max_x), std::clamp<double>(p[1], 0.0, max_y)};
    out.push_back(make_detection(frame_index, c, w, h, objectness, conf));
  }
  // Anchors were visited in (cell, anchor) order; stable sort keeps that for ties.
  std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    return a.combined_score > b.combined_score;
  });
  return out;
}

void write_grid_frame(std::ostream& out, const GridFrame& frame) {
  frame.spec.validate();
  if (frame.payload.size() != frame.spec.payload_length()) {
    throw StructuralError("grid payload length mismatch: expected " +
                          std::to_string(frame.spec.payload_length()) + " floats, got " +
                          std::to_string(frame.payload.size()));
  }
  unsigned char header[kGridHeaderSize];
  std::memcpy(header, kGridMagic, sizeof kGridMagic);
  put_u16(header + 8, frame.spec.grid_size);
  header[10] = frame.spec.anchors_per_cell;
  header[11] = frame.spec.num_classes;
  put_u16(header + 12, frame.spec.image_width);
  put_u16(header + 14, frame.spec.image_height);
  out.write(reinterpret_cast<const char*>(header), kGridHeaderSize);

  std::vector<std::uint32_t> words(frame.payload.size());
  std::transform(frame.payload.begin(), frame.payload.end(), words.begin(),
                 [](float f) { return to_le(std::bit_cast<std::uint32_t>(f)); });
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (!out) throw std::ios_base::failure("grid write failed");
}

bool read_grid_frame(std::istream& in, GridFrame& frame) {
  unsigned char header[kGridHeaderSize];
  in.read(reinterpret_cast<char*>(header), kGridHeaderSize);
  if (in.gcount() == 0) return false;
  if (in.gcount() != static_cast<std::streamsize>(kGridHeaderSize))
    throw StructuralError("truncated grid header");
  if (std::memcmp(header, kGridMagic, sizeof kGridMagic) != 0)
    throw StructuralError("bad grid magic (expected RWGRID01)");

  GridSpec spec;
  spec.grid_size = get_u16(header + 8);
  spec.anchors_per_cell = header[10];
  spec.num_classes = header[11];
  spec.image_width = get_u16(header + 12);
  spec.image_height = get_u16(header + 14);
  spec.validate();

  std::vector<std::uint32_t> words(spec.payload_length());
  const auto bytes = static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t));
  in.read(reinterpret_cast<char*>(words.data()), bytes);
  if (in.gcount() != bytes) {
    throw StructuralError("truncated grid payload: expected " + std::to_string(bytes) +
                          " bytes, got " + std::to_string(in.gcount()));
  }
  frame.spec = spec;
  frame.payload.resize(words.size());
  std::transform(words.begin(), words.end(), frame.payload.begin(),
                 [](std::uint32_t w) { return std::bit_cast<float>(to_le(w)); });
  return true;
}

std::string format_frame_line(const FrameDetections& frame) {
  std::string line;
  line.reserve(64 + frame.detections.size() * 120);
  line += "{\"camera\":\"";
  line += to_string(frame.camera);
  line += "\",\"frame\":";
  line += std::to_string(frame.frame_index);
  line += ",\"t\":";
  line += format_fixed(frame.timestamp, 3);
  line += ",\"dets\":[";
  bool first = true;
  for (const Detection& d : frame.detections) {
    if (!first) line += ',';
    first = false;
    line += "{\"cx\":" + format_fixed(d.center.x, 1);
    line += ",\"cy\":" + format_fixed(d.center.y, 1);
    line += ",\"w\":" + format_fixed(d.width, 1);
    line += ",\"h\":" + format_fixed(d.height, 1);
    line += ",\"cls\":\"";
    line += to_string(d.best_class);
    line += "\",\"obj\":" + format_fixed(d.objectness, 4);
    line += ",\"conf\":[";
    for (std::size_t j = 0; j < kNumClasses; ++j) {
      if (j) line += ',';
      line += format_fixed(d.class_confidences[j], 4);
    }
    line += "]}";
  }
  line += "]}";
  return line;
}

FrameDetections parse_frame_line(std::string_view line, std::size_t line_number) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    throw ParseError(line_number, std::string("malformed record: ") + e.what());
  }
  auto fail = [&](const std::string& what) -> ParseError { return ParseError(line_number, what); };
  if (!j.is_object()) throw fail("record is not an object");

  auto number = [&](const json& obj, const char* key) -> double {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) throw fail(std::string("missing numeric field '") + key + "'");
    return it->get<double>();
  };
  auto text = [&](const json& obj, const char* key) -> std::string {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) throw fail(std::string("missing string field '") + key + "'");
    return it->get<std::string>();
  };

  FrameDetections frame;
  const auto cam = camera_from_string(text(j, "camera"));
  if (!cam) throw fail("camera must be \"front\" or \"rear\"");
  frame.camera = *cam;
  auto fr = j.find("frame");
  if (fr == j.end() || !fr->is_number_unsigned()) throw fail("frame must be a non-negative integer");
  frame.frame_index = fr->get<std::uint64_t>();
  frame.timestamp = number(j, "t");
  if (!std::isfinite(frame.timestamp)) throw fail("t must be finite");

  auto dets = j.find("dets");
  if (dets == j.end() || !dets->is_array()) throw fail("missing array field 'dets'");
  frame.detections.reserve(dets->size());
  for (const json& d : *dets) {
    if (!d.is_object()) throw fail("detection is not an object");
    const Point2 c{number(d, "cx"), number(d, "cy")};
    const double w = number(d, "w");
    const double h = number(d, "h");
    const auto cls = class_from_string(text(d, "cls"));
    if (!cls) throw fail("cls must be truck, vehicle or pedestrian");
    const double obj = number(d, "obj");
    auto conf_it = d.find("conf");
    if (conf_it == d.end() || !conf_it->is_array() || conf_it->size() != kNumClasses)
      throw fail("conf must be an array of 3 probabilities");
    std::array<double, kNumClasses> conf{};
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      if (!(*conf_it)[k].is_number()) throw fail("conf entries must be numbers");
      conf[k] = (*conf_it)[k].get<double>();
    }

    if (!std::isfinite(c.x) || !std::isfinite(c.y) || !(w > 0.0) || !(h > 0.0))
      throw ValidationError("line " + std::to_string(line_number) + ": invalid box geometry");
    if (!is_probability(obj) || !std::all_of(conf.begin(), conf.end(), is_probability))
      throw ValidationError("line " + std::to_string(line_number) + ": probability outside [0,1]");
    const double best = *std::max_element(conf.begin(), conf.end());
    if (conf[static_cast<std::size_t>(*cls)] != best)
      throw ValidationError("line " + std::to_string(line_number) +
                            ": cls does not carry the highest class confidence");

    Detection det = make_detection(frame.frame_index, c, w, h, obj, conf);
    det.best_class = *cls;  // the recorded label wins among tied maxima
    frame.detections.push_back(det);
  }
  return frame;
}

std::vector<FrameDetections> parse_detection_log(std::istream& source) {
  std::vector<FrameDetections> frames;
  std::array<std::optional<double>, 2> last_t;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(source, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    FrameDetections frame = parse_frame_line(line, line_number);
    auto& prev = last_t[static_cast<std::size_t>(frame.camera)];
    if (prev && !(frame.timestamp > *prev)) {
      throw ValidationError("line " + std::to_string(line_number) + ": " +
                            std::string(to_string(frame.camera)) +
                            " timestamp not increasing: " + format_fixed(*prev, 3) +
                            " then " + format_fixed(frame.timestamp, 3));
    }
    prev = frame.timestamp;
    frames.push_back(std::move(frame));
  }
  return frames;
}

void write_detection_log(std::span<const FrameDetections> frames, std::ostream& sink) {
  for (const FrameDetections& frame : frames) {
    sink << format_frame_line(frame) << '\n';
    if (!sink) throw std::ios_base::failure("detection log write failed");
  }
}

FrameDetections quantize_for_log(FrameDetections frame) {
  frame.timestamp = round_to(frame.timestamp, 3);
  for (Detection& d : frame.detections) {
    const ObjectClass label = d.best_class;
    std::array<double, kNumClasses> conf{};
    for (std::size_t j = 0; j < kNumClasses; ++j) conf[j] = round_to(d.class_confidences[j], 4);
    d = make_detection(frame.frame_index, {round_to(d.center.x, 1), round_to(d.center.y, 1)},
                       round_to(d.width, 1), round_to(d.height, 1), round_to(d.objectness, 4),
                       conf);
    if (conf[static_cast<std::size_t>(label)] == conf[static_cast<std::size_t>(d.best_class)])
      d.best_class = label;
  }
  return frame;
}

}  // namespace roadwatch
