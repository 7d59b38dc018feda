#include <gtest/gtest.h>

#include <random>
#include <set>

#include "../support/oracles.hpp"
#include "roadwatch/assignment.hpp"

namespace roadwatch {
namespace {

CostMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  CostMatrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
  std::size_t r = 0;
  for (const auto& row : rows) {
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

double matched_total(const CostMatrix& costs, const Assignment& a) {
  double total = 0.0;
  for (auto [r, c] : a.matches) total += costs(r, c);
  return total;
}

TEST(CostMatrix, ThreeFourFive) {
  const std::vector<Point2> pred{{0, 0}};
  const std::vector<Point2> det{{3, 4}, {0, 0}};
  const CostMatrix m = cost_matrix(pred, det);
  ASSERT_EQ(m.rows(), 1u);
  ASSERT_EQ(m.cols(), 2u);
  EXPECT_DOUBLE_EQ(m(0, 0), 5.0);
  EXPECT_DOUBLE_EQ(m(0, 1), 0.0);
}

TEST(CostMatrix, EntriesMatchPerPairDistance) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1000, 1000);
  std::vector<Point2> pred(4), det(6);
  for (auto& p : pred) p = {u(rng), u(rng)};
  for (auto& d : det) d = {u(rng), u(rng)};
  const CostMatrix m = cost_matrix(pred, det);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t n = 0; n < 6; ++n) {
      const double dx = pred[k].x - det[n].x, dy = pred[k].y - det[n].y;
      EXPECT_NEAR(m(k, n), std::sqrt(dx * dx + dy * dy), 1e-9);
    }
}

TEST(CostMatrix, EmptySides) {
  EXPECT_TRUE(cost_matrix({}, std::vector<Point2>{{1, 1}}).empty());
  EXPECT_TRUE(cost_matrix(std::vector<Point2>{{1, 1}}, {}).empty());
}

TEST(Assign, DiagonalOptimum) {
  const auto costs = from_rows({{1, 2}, {2, 1}});
  const Assignment a = assign(costs, 10.0);
  EXPECT_EQ(a.matches, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}}));
  EXPECT_DOUBLE_EQ(matched_total(costs, a), 2.0);
  EXPECT_TRUE(a.unmatched_tracks.empty());
  EXPECT_TRUE(a.unmatched_detections.empty());
}

TEST(Assign, GateRejectsFarPair) {
  const Assignment a = assign(from_rows({{100}}), 50.0);
  EXPECT_TRUE(a.matches.empty());
  EXPECT_EQ(a.unmatched_tracks, std::vector<std::size_t>{0});
  EXPECT_EQ(a.unmatched_detections, std::vector<std::size_t>{0});
}

TEST(Assign, EmptyMatrixLeavesEverythingUnmatched) {
  const Assignment a = assign(CostMatrix(3, 0));
  EXPECT_EQ(a.unmatched_tracks, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_TRUE(a.unmatched_detections.empty());
}

TEST(Assign, GatingPrefersMoreAdmissibleMatches) {
  // Ungated, (0,0)+(1,1) = 46 is cheapest but (1,1) is beyond the gate; the
  // gated optimum keeps both tracks matched instead.
  const auto costs = from_rows({{1, 30}, {30, 45}});
  EXPECT_EQ(assign(costs).matches, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}}));
  const Assignment a = assign(costs, 40.0);
  EXPECT_EQ(a.matches, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}}));
}

TEST(Assign, EqualsBruteForceOnRandomMatrices) {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<std::size_t> dim(0, 6);
  std::uniform_int_distribution<int> icost(0, 9);
  std::uniform_real_distribution<double> fcost(0.0, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t rows = dim(rng), cols = dim(rng);
    CostMatrix costs(rows, cols);
    const bool integer = trial % 2 == 0;
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) costs(r, c) = integer ? icost(rng) : fcost(rng);
    const Assignment a = assign(costs);
    EXPECT_EQ(a.matches.size(), std::min(rows, cols));
    EXPECT_EQ(matched_total(costs, a), oracle::brute_force_min_cost(costs, rows, cols))
        << rows << "x" << cols << (integer ? " int" : " float");

    std::set<std::size_t> tracks, dets;
    for (auto [r, c] : a.matches) {
      EXPECT_TRUE(tracks.insert(r).second);
      EXPECT_TRUE(dets.insert(c).second);
    }
    EXPECT_EQ(tracks.size() + a.unmatched_tracks.size(), rows);
    EXPECT_EQ(dets.size() + a.unmatched_detections.size(), cols);
  }
}

TEST(Assign, GatedMatchesNeverExceedGate) {
  std::mt19937_64 rng(321);
  std::uniform_real_distribution<double> fcost(0.0, 100.0);
  for (int trial = 0; trial < 300; ++trial) {
    CostMatrix costs(5, 4);
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t c = 0; c < 4; ++c) costs(r, c) = fcost(rng);
    const Assignment a = assign(costs, 40.0);
    for (auto [r, c] : a.matches) EXPECT_LE(costs(r, c), 40.0);
  }
}

TEST(Assign, Deterministic) {
  const auto costs = from_rows({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  const Assignment a = assign(costs);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(assign(costs).matches, a.matches);
}

}  // namespace
}  // namespace roadwatch
