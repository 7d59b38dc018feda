// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "../support/oracles.hpp"
#include "roadwatch/assignment.hpp"
#include "roadwatch/cli.hpp"
#include "roadwatch/flow_check.hpp"
#include "roadwatch/kalman.hpp"
#include "roadwatch/pipeline.hpp"
#include "roadwatch/report.hpp"
#include "roadwatch/scenario.hpp"
#include "roadwatch/simulation.hpp"

namespace fs = std::filesystem;
using namespace roadwatch;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

fs::path scenario_path(const char* name) { return fs::path(ROADWATCH_SCENARIO_DIR) / name; }

Outcome assignment_optimality() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 6), icost(0, 20);
  std::uniform_real_distribution<double> fcost(0.0, 100.0);
  const auto start = Clock::now();
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t rows = dim(rng), cols = dim(rng);
    CostMatrix costs(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) costs(r, c) = trial % 2 ? fcost(rng) : icost(rng);
    const Assignment a = assign(costs);
    double total = 0.0;
    for (auto [r, c] : a.matches) total += costs(r, c);
    const bool complete = a.matches.size() == std::min(rows, cols);
    if (!complete || total != oracle::brute_force_min_cost(costs, rows, cols)) ++mismatches;
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < 5.0,
          fmt("1000 matrices up to 6x6, %d mismatches, %.2f s", mismatches, elapsed)};
}

Outcome kalman_equivalence() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-500, 500), dt(0.005, 0.5), q(0, 1e4), r(0.5, 20), m(-5, 5);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    KalmanState s;
    for (int i = 0; i < 4; ++i) s.mean(i) = u(rng) / (i < 2 ? 1.0 : 10.0);
    Eigen::Matrix4d a;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = m(rng);
    s.covariance = a * a.transpose() + Eigen::Matrix4d::Identity();
    oracle::CvState ref;
    for (int i = 0; i < 4; ++i) {
      ref.mean[i] = s.mean(i);
      for (int j = 0; j < 4; ++j) ref.cov[i][j] = s.covariance(i, j);
    }
    const double step = dt(rng), qq = q(rng), rr = r(rng);
    const Point2 z{u(rng), u(rng)};
    const KalmanState got = update(predict(s, step, qq), z, rr);
    const oracle::CvState want = oracle::update(oracle::predict(ref, step, qq), z.x, z.y, rr);
    double scale = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) scale = std::max(scale, std::abs(want.cov[i][j]));
    for (int i = 0; i < 4; ++i) {
      worst = std::max(worst, std::abs(got.mean(i) - want.mean[i]) / std::max(1.0, std::abs(want.mean[i])));
      for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(got.covariance(i, j) - want.cov[i][j]) / scale);
    }
  }

  // Model-matched run: white-acceleration truth, isotropic measurement noise.
  const int steps = 10000;
  const double h = 1.0 / 30.0, qn = 400.0, rn = 4.0;
  std::normal_distribution<double> accel(0.0, std::sqrt(qn)), meas(0.0, std::sqrt(rn)), n01(0.0, 1.0);
  KalmanState filter;
  filter.covariance = Eigen::Vector4d(rn, rn, 100.0, 100.0).asDiagonal();
  Eigen::Vector4d truth(n01(rng) * std::sqrt(rn), n01(rng) * std::sqrt(rn), 10.0 * n01(rng), 10.0 * n01(rng));
  double nis_sum = 0.0;
  int inside = 0;
  for (int k = 0; k < steps; ++k) {
    for (int axis = 0; axis < 2; ++axis) {
      const double w = accel(rng);
      truth(axis) += truth(axis + 2) * h + 0.5 * h * h * w;
      truth(axis + 2) += h * w;
    }
    filter = predict(filter, h, qn);
    const Point2 z{truth(0) + meas(rng), truth(1) + meas(rng)};
    const double nis = normalized_innovation_squared(filter, z, rn);
    nis_sum += nis;
    inside += nis <= 5.991464547107979;
    filter = update(filter, z, rn);
  }
  const boost::math::chi_squared dist(2.0 * steps);
  const double lo = boost::math::quantile(dist, 0.025) / steps;
  const double hi = boost::math::quantile(dist, 0.975) / steps;
  const double mean_nis = nis_sum / steps;
  const bool band = mean_nis >= lo && mean_nis <= hi;
  return {worst <= 1e-9 && band,
          fmt("10^4 states worst rel err %.2e; mean NIS %.4f in [%.4f, %.4f]: %s; %.1f%% of steps under chi2(2) 95%%",
              worst, mean_nis, lo, hi, band ? "yes" : "no", 100.0 * inside / steps)};
}

std::vector<std::size_t> run_flow(const std::vector<double>& times, double start, double T) {
  FlowCheckState state = init_flow_check(start, T);
  std::vector<std::size_t> warned;
  for (std::size_t i = 0; i < times.size(); ++i) {
    auto [next, w] = on_new_vehicle(state, {TrackerEventKind::kNewVehicle, i + 1, times[i], Camera::kFront,
                                            ObjectClass::kVehicle});
    if (w) warned.push_back(i);
    state = next;
  }
  return warned;
}

Outcome flow_check_equivalence() {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> len(0, 100), pick(0, 4);
  std::uniform_real_distribution<double> step(0.0, 30.0);
  const double T = kDefaultQuietDuration;
  int mismatches = 0;
  std::size_t boundary_cases = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> times;
    double t = 0.0;
    for (int i = len(rng); i > 0; --i) {
      switch (pick(rng)) {
        case 0: t += T; ++boundary_cases; break;
        case 1: break;
        default: t += step(rng);
      }
      times.push_back(t);
    }
    if (run_flow(times, 0.0, T) != oracle::literal_flow_check(times, 0.0, T)) ++mismatches;
  }
  // Pinned boundary: a gap of exactly T never warns.
  const bool boundary = run_flow({10.0, 20.0, 30.0}, 0.0, T).empty() && run_flow({10.5}, 0.0, T).size() == 1;
  return {mismatches == 0 && boundary,
          fmt("10^4 sequences, %d mismatches, %zu exact-T gaps exercised", mismatches, boundary_cases)};
}

Outcome poisson_law() {
  const double T = kDefaultQuietDuration;
  const std::size_t n = 200000;
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(31);
  for (double lambda : {0.02, 0.05, 0.5}) {
    std::exponential_distribution<double> gap(lambda);
    FlowCheckState s = init_flow_check(0.0, T);
    std::size_t warned = 0;
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      t += gap(rng);
      auto [next, w] = on_new_vehicle(s, {TrackerEventKind::kNewVehicle, i + 1, t, Camera::kRear, ObjectClass::kTruck});
      warned += w.has_value();
      s = next;
    }
    const double p = std::exp(-lambda * T), se = std::sqrt(p * (1 - p) / n);
    const double frac = static_cast<double>(warned) / n;
    const bool within = std::abs(frac - p) <= 3 * se;
    ok = ok && within;
    detail += fmt("%slambda=%.2f: %.4f vs %.4f (%.1f SE)", detail.empty() ? "" : "; ", lambda, frac, p,
                  std::abs(frac - p) / se);
  }
  return {ok, detail};
}

Outcome paper_day() {
  const Scenario s = load_scenario(scenario_path("paper-day.cfg"));
  const auto start = Clock::now();
  const SimulationReport r = run_pipeline(s, {});
  const double elapsed = seconds_since(start);
  const double without = static_cast<double>(r.warnings_without_filter);
  const double ratio = without > 0 ? r.warnings_with_filter / without : 0.0;
  std::size_t peak = 0;
  for (const HourCount& h : r.hourly()) peak = std::max(peak, h.warnings);
  const double peak_per_min = peak / 60.0;
  const bool ok = std::abs(without - 1308.0) <= 130.8 && ratio >= 0.15 && ratio <= 0.35 &&
                  peak_per_min <= 2.0 && elapsed < 60.0;
  return {ok, fmt("%zu vehicles, unfiltered %zu (target 1308 +-10%%), filtered %zu, ratio %.3f, "
                  "busiest hour %.2f warnings/min, %.1f s",
                  r.vehicles, r.warnings_without_filter, r.warnings_with_filter, ratio, peak_per_min, elapsed)};
}

struct LeadStats {
  std::size_t warned = 0;
  std::size_t inside = 0;
  double min = INFINITY, max = -INFINITY;
};

LeadStats lead_times(const Scenario& s, double lo, double hi) {
  const SimulationReport r = run_pipeline(s, {});
  LeadStats st;
  for (const EventRecord* w : r.warnings()) {
    const auto lead = w->lead_time();
    if (!lead) continue;  // false positive, no vehicle to warn about
    ++st.warned;
    st.inside += *lead >= lo && *lead <= hi;
    st.min = std::min(st.min, *lead);
    st.max = std::max(st.max, *lead);
  }
  return st;
}

Outcome pre_warning_times() {
  Scenario country = load_scenario(scenario_path("country-road.cfg"));
  Scenario shorter = country;
  shorter.detection_range = 100.0;
  shorter.speed_min = 15.0;
  shorter.speed_max = 30.0;
  shorter.seed = 8;
  const Scenario curve = load_scenario(scenario_path("occluded-curve.cfg"));

  bool ok = true;
  std::string detail;
  for (const auto& [name, sc] : {std::pair{"country-road", &country}, std::pair{"d_vis=100 v=15..30", &shorter}}) {
    const LeadStats st = lead_times(*sc, 3.0, 7.0);
    const double frac = st.warned ? double(st.inside) / st.warned : 0.0;
    ok = ok && st.warned >= 20 && frac >= 0.9;
    detail += fmt("%s: %.1f%% of %zu in [3,7] s (%.2f..%.2f); ", name, 100 * frac, st.warned, st.min, st.max);
  }
  const LeadStats st = lead_times(curve, 1.0, 2.5);
  ok = ok && st.warned >= 20 && st.inside == st.warned;
  detail += fmt("occluded-curve: %zu/%zu in [1,2.5] s (%.2f..%.2f)", st.inside, st.warned, st.min, st.max);
  return {ok, detail};
}

Outcome throughput() {
  // Synthetic load: per camera 15 vehicles sweeping across the image and
  // 5 clutter detections per frame, i.e. 20 detections per frame.
  const double fps = 30.0, duration = 300.0;
  const auto ticks = static_cast<std::uint64_t>(duration * fps);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> ux(20, 1260), uy(20, 700), speed(60, 300);
  struct Mover { Point2 p; double v; };
  std::array<std::vector<Mover>, 2> movers;
  for (auto& cam : movers)
    for (int i = 0; i < 15; ++i) cam.push_back({{ux(rng), 40.0 + 44.0 * i}, speed(rng)});
  const std::array<double, kNumClasses> conf{0.05, 0.9, 0.05};

  std::vector<FrameDetections> frames;
  frames.reserve(ticks * 2);
  for (std::uint64_t k = 0; k < ticks; ++k) {
    for (int c = 0; c < 2; ++c) {
      FrameDetections f{k, round_to(k / fps, 3), static_cast<Camera>(c), {}};
      for (Mover& m : movers[c]) {
        m.p.x += m.v / fps;
        if (m.p.x > 1260) m.p.x = 20;
        f.detections.push_back(make_detection(k, m.p, 30, 20, 0.95, conf));
      }
      for (int i = 0; i < 5; ++i) f.detections.push_back(make_detection(k, {ux(rng), uy(rng)}, 30, 20, 0.95, conf));
      frames.push_back(std::move(f));
    }
  }

  WarningPipeline pipeline(TrackerConfig{}, kDefaultQuietDuration);
  std::vector<double> step_ms;
  step_ms.reserve(frames.size());
  std::size_t max_tracks = 0;
  const auto start = Clock::now();
  for (const FrameDetections& f : frames) {
    const auto t0 = Clock::now();
    pipeline.process(f);
    step_ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    max_tracks = std::max(max_tracks, pipeline.tracker(f.camera).tracks().size());
  }
  const double elapsed = seconds_since(start);
  std::nth_element(step_ms.begin(), step_ms.begin() + step_ms.size() / 2, step_ms.end());
  const double median = step_ms[step_ms.size() / 2];
  const double speedup = duration / elapsed;
  return {speedup >= 20.0 && median <= 1.0 && max_tracks <= 50,
          fmt("%zu frames, 20 dets/frame, max %zu live tracks, %.0fx real time, median step %.3f ms",
              frames.size(), max_tracks, speedup, median)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "roadwatch_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string scenario = scenario_path("country-road.cfg").string();
  std::ostringstream out, err;
  auto sim = [&](const char* name) {
    return cli::run({"simulate", "--scenario", scenario, "--out", (root / name).string(), "--dump-detections",
                     (root / (std::string(name) + ".jsonl")).string()},
                    out, err);
  };
  bool ok = sim("a") == cli::kOk && sim("b") == cli::kOk;
  std::size_t identical = 0, compared = 0;
  for (const char* file : {"report.jsonl", "summary.txt", "histogram.csv", "hourly.csv", "warnings.log", "audit.log"}) {
    ++compared;
    identical += slurp(root / "a" / file) == slurp(root / "b" / file);
  }
  ++compared;
  identical += slurp(root / "a.jsonl") == slurp(root / "b.jsonl");
  ok = ok && identical == compared;

  std::ostringstream replay_out;
  ok = ok && cli::run({"replay", "--log", (root / "a.jsonl").string(), "--out", (root / "r").string()}, replay_out,
                      err) == cli::kOk;
  const std::string trace = slurp(root / "a" / "warnings.log");
  const bool same_trace = !trace.empty() && slurp(root / "r" / "warnings.log") == trace &&
                          replay_out.str().compare(0, trace.size(), trace) == 0;
  const auto lines = std::count(trace.begin(), trace.end(), '\n');
  fs::remove_all(root);
  return {ok && same_trace, fmt("%zu/%zu artifacts byte-identical across runs; replay trace %s (%ld warnings)",
                                identical, compared, same_trace ? "identical" : "DIFFERS", static_cast<long>(lines))};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"assignment optimality", assignment_optimality},
      {"kalman oracle equivalence", kalman_equivalence},
      {"flow-check trace equivalence", flow_check_equivalence},
      {"poisson suppression law", poisson_law},
      {"daily warning volume", paper_day},
      {"pre-warning times", pre_warning_times},
      {"throughput budget", throughput},
      {"determinism and replay equivalence", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
