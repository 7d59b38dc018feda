#include "roadwatch/assignment.hpp"

#include <algorithm>
#include <cmath>

namespace roadwatch {

CostMatrix cost_matrix(std::span<const Point2> predictions, std::span<const Point2> detections) {
  CostMatrix costs(predictions.size(), detections.size());
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    for (std::size_t n = 0; n < detections.size(); ++n) {
      costs(k, n) = std::hypot(predictions[k].x - detections[n].x, predictions[k].y - detections[n].y);
    }
  }
  return costs;
}

namespace {

// Shortest augmenting path Hungarian solver for rows <= cols. Returns, for
// each row, the assigned column. 1-based internally with a virtual column 0.
std::vector<std::size_t> solve_rows_le_cols(std::size_t n, std::size_t m,
                                            const auto& cost /* (row, col) -> double */) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment assign(const CostMatrix& costs, double gate_distance) {
  Assignment result;
  const std::size_t rows = costs.rows();
  const std::size_t cols = costs.cols();
  if (costs.empty()) {
    for (std::size_t r = 0; r < rows; ++r) result.unmatched_tracks.push_back(r);
    for (std::size_t c = 0; c < cols; ++c) result.unmatched_detections.push_back(c);
    return result;
  }

  // Any sentinel above K * max admissible cost makes one more admissible
  // match always cheaper than any saving in the admissible costs.
  double max_admissible = 0.0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (costs(r, c) <= gate_distance) max_admissible = std::max(max_admissible, costs(r, c));
  const double sentinel =
      static_cast<double>(std::min(rows, cols)) * max_admissible + max_admissible + 1.0;
  auto masked = [&](std::size_t r, std::size_t c) {
    const double v = costs(r, c);
    return v <= gate_distance ? v : sentinel;
  };

  std::vector<std::size_t> track_to_det(rows, cols);  // cols = unassigned
  if (rows <= cols) {
    const auto row_to_col = solve_rows_le_cols(rows, cols, masked);
    for (std::size_t r = 0; r < rows; ++r) track_to_det[r] = row_to_col[r];
  } else {
    const auto det_to_track =
        solve_rows_le_cols(cols, rows, [&](std::size_t c, std::size_t r) { return masked(r, c); });
    for (std::size_t c = 0; c < cols; ++c) track_to_det[det_to_track[c]] = c;
  }

  std::vector<char> det_used(cols, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t c = track_to_det[r];
    if (c < cols && costs(r, c) <= gate_distance) {
      result.matches.emplace_back(r, c);
      det_used[c] = 1;
    } else {
      result.unmatched_tracks.push_back(r);
    }
  }
  for (std::size_t c = 0; c < cols; ++c)
    if (!det_used[c]) result.unmatched_detections.push_back(c);
  return result;
}

}  // namespace roadwatch
