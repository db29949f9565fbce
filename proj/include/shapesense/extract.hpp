#pragma once
// Trace extraction: split each range trace into whole-edge detection
// segments with (l_d, s_d), classify the boundary events that open and close
// each segment, and pair consecutive segments with convex/concave vertex
// flags.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "shapesense/rng.hpp"
#include "shapesense/sim.hpp"

namespace shapesense {

enum class BoundaryEvent : std::uint8_t {
  SlopeChange,
  JumpDown,
  JumpUp,
  AppearBelowMax,
  DisappearBelowMax,
  TraceEdge,
  LostGap,
};

enum class VertexKind : std::uint8_t { Convex, Concave };
enum class DetectionOrder : std::uint8_t { FirstNearerHead, FirstNearerTail };

struct DetectionSegment {
  int sensor_id = 0;
  double t_s = 0.0;
  double t_e = 0.0;
  double r_s = 0.0;
  double r_e = 0.0;
  double l_d = 0.0;  // t_e - t_s
  // Until finalize_sd: raw slope (r_e - r_s)/l_d per unit time. After:
  // dimensionless slope (r_e - r_s)/(v * l_d), forced to 0 when the raw
  // steps never exceed the zero-step threshold.
  double s_d = 0.0;
  BoundaryEvent start_event = BoundaryEvent::TraceEdge;
  BoundaryEvent end_event = BoundaryEvent::TraceEdge;
  bool valid_whole_edge = false;
  bool too_short = false;    // fewer than min_samples samples; kept but flagged
  bool forced_zero = false;  // set by finalize_sd from max_step
  double max_step = 0.0;     // max |r(t+dt) - r(t)| over the segment
  int n_samples = 0;
  int first_sample = 0;  // index range into the source trace
  int last_sample = 0;
};

struct ExtractionParams {
  double dt = 1.0;
  double v = 1.0;  // speed used for jump/continuity scales (the estimate)
  double r_max = 100.0;
  double tol_slope_change = 0.05;  // slope-difference threshold per step
  double jump_factor = 5.0;        // jump if |step| > factor*(v*dt + |local step|)
  int min_samples = 3;
  double zero_step_tol = 0.1;     // |r(t+dt) - r(t)| below this => s_d = 0
  double eps_max_factor = 2.0;    // guard band below r_max for appear/disappear
  bool refine_knees = true;       // place slope-change breakpoints at the line crossing
  bool midpoint_correction = true;  // half-step correction at sampled boundaries
  bool least_squares_sd = false;    // fit slope instead of endpoint slope
};

struct ConsecutivePair {
  int first = 0;   // indices into the segment vector handed to pair_consecutive
  int second = 0;
  VertexKind vertex = VertexKind::Convex;
  DetectionOrder order = DetectionOrder::FirstNearerHead;
};

namespace detail {

struct LineFit {
  double slope = 0.0;      // per unit time
  double intercept = 0.0;  // value at t = 0 (trace-local time)
  bool ok = false;
  double at(double t) const { return intercept + slope * t; }
};

// Least squares over samples [lo, hi] of a trace (all Distance samples).
inline LineFit fit_line(const RangeTrace& tr, int lo, int hi) {
  LineFit f;
  const int n = hi - lo + 1;
  if (n < 2) return f;
  double st = 0.0, sr = 0.0, stt = 0.0, str = 0.0;
  for (int k = lo; k <= hi; ++k) {
    const double t = tr.t0 + k * tr.dt;
    const double r = tr.samples[k].value;
    st += t;
    sr += r;
    stt += t * t;
    str += t * r;
  }
  const double denom = n * stt - st * st;
  if (std::abs(denom) < 1e-30) return f;
  f.slope = (n * str - st * sr) / denom;
  f.intercept = (sr - f.slope * st) / n;
  f.ok = true;
  return f;
}

inline bool admissible_start(BoundaryEvent e) {
  return e == BoundaryEvent::SlopeChange || e == BoundaryEvent::JumpDown ||
         e == BoundaryEvent::AppearBelowMax;
}

inline bool admissible_end(BoundaryEvent e) {
  return e == BoundaryEvent::SlopeChange || e == BoundaryEvent::JumpUp ||
         e == BoundaryEvent::DisappearBelowMax;
}

}  // namespace detail

// Split one trace into detection segments. Maximal runs of positive-distance
// samples are cut at jumps and slope-change knees; slope-change breakpoints
// are shared by both sides (and refined to the crossing of the two fitted
// lines), while jump and appear/disappear boundaries land on sample times
// with an optional half-step correction.
inline std::vector<DetectionSegment> segment_trace(const RangeTrace& trace,
                                                   const ExtractionParams& p) {
  std::vector<DetectionSegment> out;
  const auto& samples = trace.samples;
  const int n = static_cast<int>(samples.size());
  const double dt = trace.dt;
  const double step_scale = p.v * dt;

  auto is_pos = [&](int k) {
    return samples[k].kind == RangeSample::Kind::Distance && samples[k].value > 0.0;
  };
  auto time_at = [&](int k) { return trace.t0 + k * dt; };

  int i = 0;
  while (i < n) {
    if (!is_pos(i)) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && is_pos(j + 1)) ++j;

    // Event kind at the outer boundaries of the run [i, j].
    auto outer_event = [&](int boundary_sample, int neighbor, bool is_start) {
      if (neighbor < 0 || neighbor >= n) return BoundaryEvent::TraceEdge;
      const auto& nb = samples[neighbor];
      if (nb.is_lost()) return BoundaryEvent::LostGap;
      if (nb.is_distance()) return BoundaryEvent::TraceEdge;  // r = 0 neighbor
      // NoDetection neighbor: a whole-edge boundary sits strictly inside
      // (0, r_max); values within a step of either end mean the edge slid
      // into range or swept across the sensor itself between samples.
      const int adj = is_start ? boundary_sample + 1 : boundary_sample - 1;
      double local = 0.0;
      if (adj >= i && adj <= j)
        local = std::abs(samples[adj].value - samples[boundary_sample].value);
      const double guard = p.eps_max_factor * (step_scale + local);
      const double value = samples[boundary_sample].value;
      if (value < p.r_max - guard && value > guard)
        return is_start ? BoundaryEvent::AppearBelowMax : BoundaryEvent::DisappearBelowMax;
      return BoundaryEvent::TraceEdge;
    };
    const BoundaryEvent run_start = outer_event(i, i - 1, true);
    const BoundaryEvent run_end = outer_event(j, j + 1, false);

    // Jump cuts between k and k+1.
    struct Cut {
      int k;  // left sample of the cut
      BoundaryEvent kind;
    };
    std::vector<Cut> cuts;
    for (int k = i; k < j; ++k) {
      const double step = samples[k + 1].value - samples[k].value;
      double local = 0.0;
      if (k - 1 >= i)
        local = std::abs(samples[k].value - samples[k - 1].value);
      else if (k + 2 <= j)
        local = std::abs(samples[k + 2].value - samples[k + 1].value);
      const double threshold = p.jump_factor * (step_scale + local);
      if (std::abs(step) > threshold)
        cuts.push_back({k, step < 0.0 ? BoundaryEvent::JumpDown : BoundaryEvent::JumpUp});
    }

    // Subruns delimited by jumps; knees within each subrun.
    struct Span {
      int a, b;
      BoundaryEvent start, end;
    };
    std::vector<Span> spans;
    int a = i;
    BoundaryEvent a_event = run_start;
    auto close_subrun = [&](int b, BoundaryEvent b_event) {
      // Slope-change knees: |second difference| / dt above threshold. Runs of
      // flagged samples collapse to the strongest one.
      std::vector<int> knees;
      int k = a + 1;
      while (k <= b - 1) {
        auto secdiff = [&](int m) {
          return std::abs(samples[m + 1].value - 2.0 * samples[m].value +
                          samples[m - 1].value) /
                 dt;
        };
        if (secdiff(k) > p.tol_slope_change) {
          int best = k;
          double best_val = secdiff(k);
          int m = k + 1;
          while (m <= b - 1 && secdiff(m) > p.tol_slope_change) {
            if (secdiff(m) > best_val) {
              best = m;
              best_val = secdiff(m);
            }
            ++m;
          }
          knees.push_back(best);
          k = m + 1;
        } else {
          ++k;
        }
      }
      int sa = a;
      BoundaryEvent sa_event = a_event;
      for (int knee : knees) {
        spans.push_back({sa, knee, sa_event, BoundaryEvent::SlopeChange});
        sa = knee;
        sa_event = BoundaryEvent::SlopeChange;
      }
      spans.push_back({sa, b, sa_event, b_event});
    };
    for (const Cut& cut : cuts) {
      close_subrun(cut.k, cut.kind);
      a = cut.k + 1;
      a_event = cut.kind;
    }
    close_subrun(j, run_end);

    // Materialize segments.
    const std::size_t first_new = out.size();
    for (const Span& sp : spans) {
      DetectionSegment seg;
      seg.sensor_id = trace.sensor_id;
      seg.first_sample = sp.a;
      seg.last_sample = sp.b;
      seg.start_event = sp.start;
      seg.end_event = sp.end;
      seg.t_s = time_at(sp.a);
      seg.t_e = time_at(sp.b);
      seg.r_s = samples[sp.a].value;
      seg.r_e = samples[sp.b].value;
      out.push_back(seg);
    }

    auto fit_for = [&](const DetectionSegment& s) {
      int lo = s.first_sample + (s.start_event == BoundaryEvent::SlopeChange ? 1 : 0);
      int hi = s.last_sample - (s.end_event == BoundaryEvent::SlopeChange ? 1 : 0);
      if (hi - lo < 1) {
        lo = s.first_sample;
        hi = s.last_sample;
      }
      return detail::fit_line(trace, lo, hi);
    };

    // Refine shared slope-change breakpoints to the crossing of the two
    // fitted lines; with exact piecewise-linear input this recovers the knee.
    // When the lines do not cross within the sample gap the "knee" is really
    // a small jump (e.g. a grazing occlusion): un-share the breakpoint sample
    // and record jump boundaries instead.
    if (p.refine_knees) {
      for (std::size_t s = first_new; s + 1 < out.size(); ++s) {
        DetectionSegment& left = out[s];
        DetectionSegment& right = out[s + 1];
        if (left.end_event != BoundaryEvent::SlopeChange ||
            right.start_event != BoundaryEvent::SlopeChange ||
            left.last_sample != right.first_sample)
          continue;
        const auto fl = fit_for(left);
        const auto fr = fit_for(right);
        if (!fl.ok || !fr.ok || std::abs(fl.slope - fr.slope) < 1e-12) continue;
        const double t_star = (fr.intercept - fl.intercept) / (fl.slope - fr.slope);
        const int k = left.last_sample;
        const double t_k = time_at(k);
        const double r_star = fl.at(t_star);
        if (std::abs(t_star - t_k) <= dt && r_star > 0.0 && r_star <= p.r_max) {
          left.t_e = t_star;
          left.r_e = r_star;
          right.t_s = t_star;
          right.r_s = r_star;
          continue;
        }
        const double r_k = samples[k].value;
        const BoundaryEvent kind =
            fr.at(t_k) > fl.at(t_k) ? BoundaryEvent::JumpUp : BoundaryEvent::JumpDown;
        if (std::abs(r_k - fr.at(t_k)) < std::abs(r_k - fl.at(t_k))) {
          // The breakpoint sample sits on the right-hand line.
          left.last_sample = k - 1;
          left.t_e = time_at(k - 1);
          left.r_e = samples[k - 1].value;
        } else {
          right.first_sample = k + 1;
          right.t_s = time_at(k + 1);
          right.r_s = samples[k + 1].value;
        }
        left.end_event = kind;
        right.start_event = kind;
      }
    }

    // Sampled boundaries (appear/disappear/jump) see the true event up to one
    // step late/early; extrapolate the segment's own line by half a step.
    if (p.midpoint_correction) {
      for (std::size_t s = first_new; s < out.size(); ++s) {
        DetectionSegment& seg = out[s];
        const auto f = fit_for(seg);
        if (!f.ok) continue;
        auto shiftable = [](BoundaryEvent e) {
          return e == BoundaryEvent::AppearBelowMax || e == BoundaryEvent::JumpDown ||
                 e == BoundaryEvent::JumpUp || e == BoundaryEvent::DisappearBelowMax;
        };
        if (shiftable(seg.start_event)) {
          const double t_new = seg.t_s - 0.5 * dt;
          const double r_new = f.at(t_new);
          if (r_new > 0.0 && r_new <= p.r_max) {
            seg.t_s = t_new;
            seg.r_s = r_new;
          }
        }
        if (shiftable(seg.end_event)) {
          const double t_new = seg.t_e + 0.5 * dt;
          const double r_new = f.at(t_new);
          if (r_new > 0.0 && r_new <= p.r_max) {
            seg.t_e = t_new;
            seg.r_e = r_new;
          }
        }
      }
    }

    for (std::size_t s = first_new; s < out.size(); ++s) {
      DetectionSegment& seg = out[s];
      seg.n_samples = seg.last_sample - seg.first_sample + 1;
      seg.too_short = seg.n_samples < p.min_samples;
      seg.l_d = seg.t_e - seg.t_s;
      if (p.least_squares_sd) {
        const auto f = fit_for(seg);
        seg.s_d = f.ok ? f.slope : 0.0;
      } else {
        seg.s_d = seg.l_d > 0.0 ? (seg.r_e - seg.r_s) / seg.l_d : 0.0;
      }
      // Steps touching a shared slope-change sample belong to the neighbor's
      // line; exclude them from the zero-slope evidence.
      int step_lo =
          seg.first_sample + (seg.start_event == BoundaryEvent::SlopeChange ? 1 : 0);
      int step_hi =
          seg.last_sample - (seg.end_event == BoundaryEvent::SlopeChange ? 1 : 0);
      if (step_hi - step_lo < 1) {
        step_lo = seg.first_sample;
        step_hi = seg.last_sample;
      }
      seg.max_step = 0.0;
      for (int k = step_lo; k < step_hi; ++k)
        seg.max_step = std::max(seg.max_step,
                                std::abs(samples[k + 1].value - samples[k].value));
      seg.valid_whole_edge = !seg.too_short && detail::admissible_start(seg.start_event) &&
                             detail::admissible_end(seg.end_event);
    }

    i = j + 1;
  }
  return out;
}

// Scale the raw slope by the estimated speed and apply the zero-slope
// judgment: if no single-step change reached zero_step_tol, the segment is
// declared s_d = 0 (an edge parallel to the motion).
inline DetectionSegment finalize_sd(DetectionSegment seg, double v_hat,
                                    double zero_step_tol = 0.1) {
  if (!(v_hat > 0.0)) throw std::invalid_argument("invalid speed estimate");
  seg.forced_zero = seg.max_step < zero_step_tol;
  if (seg.forced_zero) {
    seg.s_d = 0.0;
  } else {
    seg.s_d = seg.l_d > 0.0 ? (seg.r_e - seg.r_s) / (v_hat * seg.l_d) : 0.0;
  }
  return seg;
}

// Zero-mean Gaussian perturbation of every finalized s_d. Deterministic for
// a given master seed; per-sensor substreams.
inline void apply_sd_noise(std::vector<DetectionSegment>& segments, double sigma_s,
                           std::uint64_t master_seed) {
  if (sigma_s < 0.0) throw std::invalid_argument("sigma_s must be >= 0");
  if (sigma_s == 0.0) return;
  std::map<int, Rng> streams;
  for (auto& seg : segments) {
    auto it = streams.find(seg.sensor_id);
    if (it == streams.end()) {
      it = streams
               .emplace(seg.sensor_id,
                        Rng(seed_mix(master_seed, stream_tag::kSdNoise,
                                     static_cast<std::uint64_t>(seg.sensor_id))))
               .first;
    }
    seg.s_d += it->second.normal(0.0, sigma_s);
  }
}

// Number of sensors with at least one positive range sample and no zero
// sample; lost samples are ignored.
inline int count_nonzero_detectors(const std::vector<RangeTrace>& traces) {
  int n_r = 0;
  for (const auto& tr : traces) {
    bool positive = false;
    bool zero = false;
    for (const auto& s : tr.samples) {
      if (!s.is_distance()) continue;
      if (s.value > 0.0)
        positive = true;
      else
        zero = true;
    }
    if (positive && !zero) ++n_r;
  }
  return n_r;
}

// Pair adjacent valid segments of one sensor that share a slope-change
// breakpoint with no jump in between. The vertex between the two detected
// edges is concave iff the earlier slope exceeds the later one; with the
// target moving in +x the earlier detection is nearer the head.
inline std::vector<ConsecutivePair> pair_consecutive(
    const std::vector<DetectionSegment>& segments, const ExtractionParams& p) {
  std::vector<ConsecutivePair> pairs;
  for (std::size_t a = 0; a + 1 < segments.size(); ++a) {
    const auto& first = segments[a];
    const auto& second = segments[a + 1];
    if (first.sensor_id != second.sensor_id) continue;
    if (!first.valid_whole_edge || !second.valid_whole_edge) continue;
    if (first.end_event != BoundaryEvent::SlopeChange ||
        second.start_event != BoundaryEvent::SlopeChange)
      continue;
    if (std::abs(first.t_e - second.t_s) > 1e-9 * p.dt) continue;
    const double eps_cont =
        2.0 * p.v * p.dt * std::max({1.0, std::abs(first.s_d), std::abs(second.s_d)});
    if (std::abs(first.r_e - second.r_s) > eps_cont) continue;
    ConsecutivePair pair;
    pair.first = static_cast<int>(a);
    pair.second = static_cast<int>(a + 1);
    pair.vertex = first.s_d > second.s_d ? VertexKind::Concave : VertexKind::Convex;
    pair.order = DetectionOrder::FirstNearerHead;
    pairs.push_back(pair);
  }
  return pairs;
}

}  // namespace shapesense
