#pragma once
// Synthetic sensing field: random sensor deployment over a monitored
// rectangle, translation of the target along the horizontal centerline, and
// range sampling at a fixed interval, plus the sample-loss channel.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "shapesense/geometry.hpp"
#include "shapesense/rng.hpp"

namespace shapesense {

struct SimConfig {
  double omega_width = 5000.0;
  double omega_height = 300.0;
  int n_s = 2000;
  double r_max = 100.0;
  double v = 1.0;
  double dt = 1.0;
  std::uint64_t seed = 1;
  double p_b = 0.0;      // per-sample loss probability
  double sigma_s = 0.0;  // std dev of Gaussian noise applied to each s_d
  double vertical_offset = 0.0;
  bool record_truth = false;  // keep per-sample hit-edge indices (tests)

  double omega_area() const { return omega_width * omega_height; }

  void validate() const {
    if (!(omega_width > 0.0) || !(omega_height > 0.0))
      throw std::invalid_argument("omega dimensions must be positive");
    if (n_s < 1) throw std::invalid_argument("n_s must be >= 1");
    if (!(r_max > 0.0)) throw std::invalid_argument("r_max must be positive");
    if (!(v > 0.0)) throw std::invalid_argument("v must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (p_b < 0.0 || p_b > 1.0) throw std::invalid_argument("p_b must be in [0,1]");
    if (sigma_s < 0.0) throw std::invalid_argument("sigma_s must be >= 0");
  }
};

struct SensorPose {
  Vec2 position;
  Angle direction;
};

struct RangeSample {
  enum class Kind : std::uint8_t { Distance, NoDetection, Lost };

  double value = 0.0;
  Kind kind = Kind::NoDetection;

  static RangeSample distance(double v) { return {v, Kind::Distance}; }
  static RangeSample none() { return {0.0, Kind::NoDetection}; }
  static RangeSample lost() { return {0.0, Kind::Lost}; }

  bool is_distance() const { return kind == Kind::Distance; }
  bool is_lost() const { return kind == Kind::Lost; }
};

// Truth-channel edge ids for samples (only filled when record_truth is set).
inline constexpr std::int32_t kTruthNoHit = -1;
inline constexpr std::int32_t kTruthInside = -2;

struct RangeTrace {
  int sensor_id = 0;
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<RangeSample> samples;
  std::vector<std::int32_t> truth_edges;  // empty unless truth was recorded
};

struct SimResult {
  std::vector<RangeTrace> traces;
  double m_t = 0.0;  // last detection epoch minus first detection epoch
  double first_epoch = 0.0;
  double last_epoch = 0.0;
  bool any_detection = false;
};

// n_s poses, positions i.i.d. uniform over the rectangle and directions
// i.i.d. uniform over [0, 2*pi); fully determined by the stream.
inline std::vector<SensorPose> deploy_sensors(const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<SensorPose> poses;
  poses.reserve(static_cast<std::size_t>(cfg.n_s));
  for (int i = 0; i < cfg.n_s; ++i) {
    const double x = rng.uniform(0.0, cfg.omega_width);
    const double y = rng.uniform(0.0, cfg.omega_height);
    const double theta = rng.uniform(0.0, kTwoPi);
    poses.push_back(SensorPose{{x, y}, Angle(theta)});
  }
  return poses;
}

inline std::vector<SensorPose> deploy_sensors(const SimConfig& cfg) {
  Rng rng(seed_mix(cfg.seed, stream_tag::kDeploy));
  return deploy_sensors(cfg, rng);
}

// First/last epoch with a distance sample (r = 0 counts as a detection).
inline void measure_detection_span(const std::vector<RangeTrace>& traces, double& m_t,
                                   double& first_epoch, double& last_epoch,
                                   bool& any_detection) {
  first_epoch = std::numeric_limits<double>::infinity();
  last_epoch = -std::numeric_limits<double>::infinity();
  any_detection = false;
  for (const auto& tr : traces) {
    for (std::size_t k = 0; k < tr.samples.size(); ++k) {
      if (!tr.samples[k].is_distance()) continue;
      const double t = tr.t0 + static_cast<double>(k) * tr.dt;
      first_epoch = std::min(first_epoch, t);
      last_epoch = std::max(last_epoch, t);
      any_detection = true;
    }
  }
  m_t = any_detection ? last_epoch - first_epoch : 0.0;
  if (!any_detection) first_epoch = last_epoch = 0.0;
}

// Translate the target through the field and sample every sensor's range on
// the shared time grid. The anchor enters fully outside (perimeter + r_max
// left of the rectangle) and exits symmetrically; the anchor's y rides the
// horizontal centerline plus the configured offset.
inline SimResult simulate_traces(const PolygonTarget& poly, const SimConfig& cfg,
                                 const std::vector<SensorPose>& sensors) {
  cfg.validate();
  const auto verts = poly.vertices();
  Vec2 lo, hi;
  poly.bounding_box(lo, hi);
  const double perim = poly.perimeter();

  const double anchor_x0 = -(perim + cfg.r_max);
  const double x_off0 = anchor_x0 - poly.anchor().x;
  const double y_off = 0.5 * cfg.omega_height + cfg.vertical_offset;
  const double t_end = (cfg.omega_width + 2.0 * (perim + cfg.r_max)) / cfg.v;
  const auto n_steps = static_cast<long>(std::floor(t_end / cfg.dt));

  const double slab_lo = lo.y + y_off;
  const double slab_hi = hi.y + y_off;

  SimResult result;
  result.traces.reserve(sensors.size());
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const SensorPose& s = sensors[i];
    RangeTrace trace;
    trace.sensor_id = static_cast<int>(i);
    trace.dt = cfg.dt;

    // Time window where the swept target can be within horizontal reach.
    const double dx = cfg.r_max * s.direction.cos();
    const double ray_x_lo = s.position.x + std::min(0.0, dx);
    const double ray_x_hi = s.position.x + std::max(0.0, dx);
    const double ta = (ray_x_lo - (hi.x + x_off0)) / cfg.v;
    const double tb = (ray_x_hi - (lo.x + x_off0)) / cfg.v;
    long k_lo = static_cast<long>(std::ceil(ta / cfg.dt)) - 1;
    long k_hi = static_cast<long>(std::floor(tb / cfg.dt)) + 1;
    k_lo = std::max(k_lo, 0L);
    k_hi = std::min(k_hi, n_steps);

    if (k_lo > k_hi) {
      trace.t0 = 0.0;
      trace.samples.push_back(RangeSample::none());
      if (cfg.record_truth) trace.truth_edges.push_back(kTruthNoHit);
      result.traces.push_back(std::move(trace));
      continue;
    }

    trace.t0 = static_cast<double>(k_lo) * cfg.dt;
    const std::size_t count = static_cast<std::size_t>(k_hi - k_lo + 1);
    trace.samples.reserve(count);
    if (cfg.record_truth) trace.truth_edges.reserve(count);

    const double dy = cfg.r_max * s.direction.sin();
    const double ray_y_lo = s.position.y + std::min(0.0, dy);
    const double ray_y_hi = s.position.y + std::max(0.0, dy);
    const bool y_reachable =
        ray_y_hi >= slab_lo - kHitTol && ray_y_lo <= slab_hi + kHitTol;

    for (long k = k_lo; k <= k_hi; ++k) {
      if (!y_reachable) {
        trace.samples.push_back(RangeSample::none());
        if (cfg.record_truth) trace.truth_edges.push_back(kTruthNoHit);
        continue;
      }
      const double t = static_cast<double>(k) * cfg.dt;
      const Vec2 offset{x_off0 + cfg.v * t, y_off};
      const auto hit = ray_polygon_hit(s.position, s.direction, poly, offset, cfg.r_max);
      if (hit) {
        trace.samples.push_back(RangeSample::distance(hit->distance));
        if (cfg.record_truth)
          trace.truth_edges.push_back(hit->edge_index < 0 ? kTruthInside : hit->edge_index);
      } else {
        trace.samples.push_back(RangeSample::none());
        if (cfg.record_truth) trace.truth_edges.push_back(kTruthNoHit);
      }
    }
    result.traces.push_back(std::move(trace));
  }

  measure_detection_span(result.traces, result.m_t, result.first_epoch, result.last_epoch,
                         result.any_detection);
  return result;
}

inline SimResult simulate_traces(const PolygonTarget& poly, const SimConfig& cfg) {
  return simulate_traces(poly, cfg, deploy_sensors(cfg));
}

// Replace each detection sample independently by Lost with probability p_b.
// Per-sensor substreams keep the outcome independent of iteration order.
inline void inject_loss(std::vector<RangeTrace>& traces, double p_b, std::uint64_t master_seed) {
  if (p_b < 0.0 || p_b > 1.0) throw std::invalid_argument("p_b must be in [0,1]");
  if (p_b == 0.0) return;
  for (auto& tr : traces) {
    Rng rng(seed_mix(master_seed, stream_tag::kLoss, static_cast<std::uint64_t>(tr.sensor_id)));
    for (auto& sample : tr.samples) {
      if (sample.kind == RangeSample::Kind::NoDetection) continue;
      if (rng.bernoulli(p_b)) sample = RangeSample::lost();
    }
  }
}

}  // namespace shapesense
