#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "roadwatch/types.hpp"

namespace roadwatch {

// Dense row-major cost matrix; rows are tracks, columns are detections.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  void resize(std::size_t rows, std::size_t cols) {
    rows_ = rows;
    cols_ = cols;
    data_.assign(rows * cols, 0.0);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Euclidean distance between every predicted centre and every detection centre.
CostMatrix cost_matrix(std::span<const Point2> predictions, std::span<const Point2> detections);

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (track, detection), by track
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_detections;
};

// Minimum-cost one-to-one assignment (Hungarian method, shortest augmenting
// paths). Pairs costing more than `gate_distance` are masked to a sentinel
// before solving and dropped afterwards, so among all assignments the solver
// maximises the number of admissible matches, then minimises their total.
// Costs must be finite and non-negative.
Assignment assign(const CostMatrix& costs,
                  double gate_distance = std::numeric_limits<double>::infinity());

}  // namespace roadwatch
