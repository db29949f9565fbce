#pragma once
// Five-part shape estimation: speed from the nonzero-detector count, edges
// parallel to the motion from the zero-slope set, general edges via two-pair
// temporary estimates with consistency voting, edge order from consecutive
// detections, and concave-vertex compensation of the expected detection
// count, plus boundary assembly and the length-error sensitivity diagnostic.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "shapesense/cluster.hpp"
#include "shapesense/extract.hpp"
#include "shapesense/geometry.hpp"
#include "shapesense/rng.hpp"
#include "shapesense/sim.hpp"

namespace shapesense {

struct EstimatorParams {
  double s_small = 0.3;  // |s_d| at or below this is a "small" slope
  double s_large = 3.0;  // |s_d| at or above this is a "large" slope
  double band_lo = 0.85;  // consistency band in lambda around the temporary estimate
  double band_hi = 1.15;
  double eps_l = 0.05;    // minimum relative l_d separation for a usable pair
  double eps_mu = 1e-9;   // |mu| may exceed 1 by at most this before rejection
  int max_pairs = 5000;   // candidate pairs sampled per classified set
  int min_support_floor = 10;
  double min_support_frac = 0.01;  // of the initial nonzero pool
  int k_max = 16;
  int n_c_min = 30;          // connectivity significance threshold
  double closure_tol = 0.05;  // relative closure gap for a complete boundary
  int gmm_max_components = 6;
  std::uint64_t seed = 1;
};

enum class PsiLabel : std::uint8_t {
  Zero,
  SmallPos,
  SmallNeg,
  LargePos,
  LargeNeg,
  NearPlusOne,
  NearMinusOne,
};

struct PsiSet {
  PsiLabel label = PsiLabel::Zero;
  int sub_index = 0;          // sub-cluster id within LargePos/LargeNeg
  std::vector<int> members;   // segment indices
};

struct EdgeEstimate {
  enum class Source : std::uint8_t { ParallelPart, GeneralPart };

  double lambda_hat = 0.0;
  std::array<double, 2> xi_candidates{0.0, 0.0};
  double n_e_hat = 0.0;
  int n_e_rounded = 0;
  std::vector<int> support;  // consistent segment indices
  Source source = Source::GeneralPart;
};

struct ConnectivityRecord {
  int head_estimate = 0;  // detected earlier: nearer the head of the target
  int tail_estimate = 0;
  int n_c = 0;
  int concave_count = 0;
  VertexKind vertex_majority = VertexKind::Convex;
  bool significant = false;
};

struct PlacedEdge {
  int estimate_index = -1;
  double lambda = 0.0;
  double xi = 0.0;  // the candidate chosen by the closure search
};

struct ShapeEstimate {
  std::vector<PlacedEdge> ordered_edges;
  Vec2 closure_gap;
  bool complete = false;
};

// ---------------------------------------------------------------------------
// Part 1: moving speed.

// v_hat = pi * n_r * |Omega| / (2 * m_t * n_s * r_max).
inline double estimate_speed(int n_r, double m_t, const SimConfig& cfg) {
  if (!(m_t > 0.0)) throw std::invalid_argument("no detection: m_t must be positive");
  return kPi * n_r * cfg.omega_area() / (2.0 * m_t * cfg.n_s * cfg.r_max);
}

// ---------------------------------------------------------------------------
// Expected whole-edge detection counts.

// Expected number of whole-edge detections of an edge (lambda, xi) over the
// passage: zero when lambda*|sin xi| exceeds the sensing range, otherwise
// v*m_t*n_s*(2*r_max*cos(t1) - (pi - 2*t1)*lambda*|sin xi|)/(2*pi*|Omega|)
// with t1 = arcsin(lambda*|sin xi| / r_max).
inline double expected_nd(double lambda, double xi, double v, double m_t,
                          const SimConfig& cfg) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  const double x = lambda * std::abs(std::sin(xi));
  if (x >= cfg.r_max) return 0.0;  // the admissible wedge closes exactly here
  const double t1 = std::asin(x / cfg.r_max);
  const double f = std::max(2.0 * cfg.r_max * std::cos(t1) - (kPi - 2.0 * t1) * x, 0.0);
  return v * m_t * cfg.n_s * f / (kTwoPi * cfg.omega_area());
}

// n_e = observed / expected count; rounding adds 0.5 and floors.
inline std::pair<double, int> estimate_edge_count(double n_d_observed, double e_nd) {
  if (!(e_nd > 0.0)) throw std::invalid_argument("expected count must be positive");
  const double n_e = n_d_observed / e_nd;
  return {n_e, static_cast<int>(std::floor(n_e + 0.5))};
}

// ---------------------------------------------------------------------------
// Two-pair solution and the consistency test.

// mu = ((lambda/v)^2 + l_d^2 (1 - s_d^2)) / (2 lambda l_d / v); cos xi = +-mu.
inline double mu_of(double lambda, double l_d, double s_d, double v) {
  return ((lambda / v) * (lambda / v) + l_d * l_d * (1.0 - s_d * s_d)) /
         (2.0 * lambda * l_d / v);
}

// The two direction candidates for a slope sign: {xi0, pi - xi0} for s_d < 0
// and {-xi0, -pi + xi0} (mod 2pi) otherwise, with xi0 = arccos(mu).
inline std::array<double, 2> xi_candidates_from_mu(double mu, bool sd_negative) {
  const double xi0 = std::acos(std::clamp(mu, -1.0, 1.0));
  if (sd_negative) return {xi0, kPi - xi0};
  return {normalize_angle(-xi0), normalize_angle(-kPi + xi0)};
}

struct TempEstimate {
  double lambda = 0.0;
  std::array<double, 2> xi{0.0, 0.0};
  double mu = 0.0;
};

// Solve for (lambda, xi) from two whole-edge observations of one edge. The
// sensing data do not reveal which side of the trajectory each sensor is on:
// same-side pairs satisfy mu1(lambda) = mu2(lambda), which gives the closed
// form lambda = v sqrt(l l' (l'(1-s'^2) - l(1-s^2)) / (l' - l)); opposite
// sides satisfy mu1(lambda) = -mu2(lambda), whose solution is
// lambda = v sqrt(l l' (l(s^2-1) + l'(s'^2-1)) / (l + l')). Both feasible
// hypotheses are returned; a branch is dropped when its radicand is not
// positive or |mu| exceeds 1 + eps_mu. An empty result is degenerate (the
// two observations cannot come from one edge, or l_d values are too close).
inline std::vector<TempEstimate> two_pair_solve(double l_d, double s_d, double l_d2,
                                                double s_d2, double v_hat,
                                                double eps_l = 0.05,
                                                double eps_mu = 1e-9) {
  std::vector<TempEstimate> out;
  if (!(l_d > 0.0) || !(l_d2 > 0.0) || !(v_hat > 0.0)) return out;
  if (std::abs(l_d - l_d2) <= eps_l * std::max(l_d, l_d2)) return out;

  auto push_if_feasible = [&](double radicand) {
    if (!(radicand > 0.0)) return;
    TempEstimate est;
    est.lambda = v_hat * std::sqrt(radicand);
    est.mu = mu_of(est.lambda, l_d, s_d, v_hat);
    if (std::abs(est.mu) > 1.0 + eps_mu) return;
    est.mu = std::clamp(est.mu, -1.0, 1.0);
    est.xi = xi_candidates_from_mu(est.mu, s_d < 0.0);
    out.push_back(est);
  };

  push_if_feasible(l_d * l_d2 / (l_d2 - l_d) *
                   (l_d2 * (1.0 - s_d2 * s_d2) - l_d * (1.0 - s_d * s_d)));
  push_if_feasible(l_d * l_d2 / (l_d2 + l_d) *
                   (l_d * (s_d * s_d - 1.0) + l_d2 * (s_d2 * s_d2 - 1.0)));
  return out;
}

// A sample (l_d, s_d) is consistent with (lambda_t, xi_t) when |cos xi_t|
// falls between the |mu| values at 0.85 and 1.15 times lambda_t (band
// clamped into [0, 1]; |mu| because the sensor's side of the trajectory
// flips the sign of mu) and the slope sign agrees with the
// sign(s_d)*sin(xi) <= 0 rule.
inline bool consistency_test(double l_d, double s_d, double lambda_t, double xi_t,
                             double v_hat, double band_lo = 0.85, double band_hi = 1.15) {
  if (!(l_d > 0.0) || !(v_hat > 0.0)) return false;
  const double mu_a = mu_of(band_lo * lambda_t, l_d, s_d, v_hat);
  const double mu_b = mu_of(band_hi * lambda_t, l_d, s_d, v_hat);
  double lo, hi;
  if ((mu_a <= 0.0) != (mu_b <= 0.0)) {
    lo = 0.0;  // the band crosses zero
    hi = std::max(std::abs(mu_a), std::abs(mu_b));
  } else {
    lo = std::min(std::abs(mu_a), std::abs(mu_b));
    hi = std::max(std::abs(mu_a), std::abs(mu_b));
  }
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, 0.0, 1.0);
  const double c = std::abs(std::cos(xi_t));
  if (c < lo - 1e-12 || c > hi + 1e-12) return false;
  const double sign_term = (s_d > 0.0 ? 1.0 : (s_d < 0.0 ? -1.0 : 0.0)) * std::sin(xi_t);
  return sign_term <= 1e-12;
}

inline bool consistency_test(const DetectionSegment& seg, double lambda_t, double xi_t,
                             double v_hat, double band_lo = 0.85, double band_hi = 1.15) {
  return consistency_test(seg.l_d, seg.s_d, lambda_t, xi_t, v_hat, band_lo, band_hi);
}

// ---------------------------------------------------------------------------
// Part 2/3 inputs: slope-regime classification.

// Partition valid finalized segments into the slope-regime sets. Zero holds
// exactly the forced-zero segments; the large-slope sets are sub-clustered on
// l_d*|s_d| (which concentrates near lambda/v for one edge).
inline std::vector<PsiSet> classify_segments(const std::vector<DetectionSegment>& segments,
                                             std::span<const int> valid_indices,
                                             const EstimatorParams& params, double dt) {
  std::vector<int> zero, small_pos, small_neg, large_pos, large_neg, near_pos, near_neg;
  for (int idx : valid_indices) {
    const auto& seg = segments[idx];
    if (seg.forced_zero) {
      zero.push_back(idx);
    } else if (seg.s_d >= params.s_large) {
      large_pos.push_back(idx);
    } else if (seg.s_d <= -params.s_large) {
      large_neg.push_back(idx);
    } else if (seg.s_d >= 0.0 && seg.s_d <= params.s_small) {
      small_pos.push_back(idx);
    } else if (seg.s_d < 0.0 && seg.s_d >= -params.s_small) {
      small_neg.push_back(idx);
    } else if (seg.s_d > 0.0) {
      near_pos.push_back(idx);
    } else {
      near_neg.push_back(idx);
    }
  }

  std::vector<PsiSet> sets;
  auto push_plain = [&](PsiLabel label, std::vector<int>& members) {
    if (members.empty()) return;
    sets.push_back(PsiSet{label, 0, std::move(members)});
  };
  push_plain(PsiLabel::Zero, zero);
  push_plain(PsiLabel::SmallPos, small_pos);
  push_plain(PsiLabel::SmallNeg, small_neg);

  auto push_subclustered = [&](PsiLabel label, const std::vector<int>& members) {
    if (members.empty()) return;
    std::vector<double> products;
    products.reserve(members.size());
    double median_abs_sd = 0.0;
    {
      std::vector<double> abs_sd;
      for (int idx : members) abs_sd.push_back(std::abs(segments[idx].s_d));
      std::sort(abs_sd.begin(), abs_sd.end());
      median_abs_sd = abs_sd[abs_sd.size() / 2];
    }
    for (int idx : members)
      products.push_back(segments[idx].l_d * std::abs(segments[idx].s_d));
    const double floor_sd = 0.3 * dt * std::max(1.0, median_abs_sd);
    const auto clusters =
        cluster_1d(products, params.gmm_max_components, floor_sd * floor_sd);
    int sub = 0;
    for (const auto& c : clusters) {
      PsiSet set{label, sub++, {}};
      set.members.reserve(c.members.size());
      for (int local : c.members) set.members.push_back(members[local]);
      sets.push_back(std::move(set));
    }
  };
  push_subclustered(PsiLabel::LargePos, large_pos);
  push_subclustered(PsiLabel::LargeNeg, large_neg);
  push_plain(PsiLabel::NearPlusOne, near_pos);
  push_plain(PsiLabel::NearMinusOne, near_neg);
  return sets;
}

// ---------------------------------------------------------------------------
// Part 2: edges parallel to the moving direction.

// Cluster the zero-slope durations; each cluster yields an estimate with
// lambda = mean(v_hat * l_d) and direction candidates {0, pi}.
inline std::vector<EdgeEstimate> estimate_parallel_edges(
    const PsiSet& zero_set, const std::vector<DetectionSegment>& segments, double v_hat,
    double m_t, const SimConfig& cfg, const EstimatorParams& params) {
  std::vector<EdgeEstimate> out;
  if (zero_set.members.empty()) return out;
  std::vector<double> durations;
  durations.reserve(zero_set.members.size());
  for (int idx : zero_set.members) durations.push_back(segments[idx].l_d);
  const double floor_sd = 0.5 * cfg.dt;
  const auto clusters =
      cluster_1d(durations, params.gmm_max_components, floor_sd * floor_sd);
  for (const auto& c : clusters) {
    EdgeEstimate est;
    est.source = EdgeEstimate::Source::ParallelPart;
    est.lambda_hat = v_hat * c.mean;
    est.xi_candidates = {0.0, kPi};
    est.support.reserve(c.members.size());
    for (int local : c.members) est.support.push_back(zero_set.members[local]);
    const double e_nd = expected_nd(est.lambda_hat, 0.0, v_hat, m_t, cfg);
    if (e_nd > 0.0) {
      const auto [n_e, rounded] =
          estimate_edge_count(static_cast<double>(est.support.size()), e_nd);
      est.n_e_hat = n_e;
      est.n_e_rounded = rounded;
    }
    out.push_back(std::move(est));
  }
  std::sort(out.begin(), out.end(), [](const EdgeEstimate& a, const EdgeEstimate& b) {
    return a.support.size() > b.support.size();
  });
  return out;
}

// ---------------------------------------------------------------------------
// Part 3: general edges by greedy adoption of the best-supported temporary
// estimate.

inline std::vector<EdgeEstimate> adopt_estimates(
    const std::vector<PsiSet>& psi_sets, const std::vector<DetectionSegment>& segments,
    double v_hat, double m_t, const SimConfig& cfg, const EstimatorParams& params) {
  std::vector<EdgeEstimate> adopted;
  if (!(v_hat > 0.0)) return adopted;

  // Pool of remaining sensing results (all non-zero sets).
  std::vector<int> pool;
  for (const auto& set : psi_sets) {
    if (set.label == PsiLabel::Zero) continue;
    pool.insert(pool.end(), set.members.begin(), set.members.end());
  }
  std::sort(pool.begin(), pool.end());
  std::vector<char> in_pool(segments.size(), 0);
  for (int idx : pool) in_pool[idx] = 1;
  std::size_t pool_size = pool.size();

  const std::size_t min_support = std::max<std::size_t>(
      params.min_support_floor,
      static_cast<std::size_t>(params.min_support_frac * static_cast<double>(pool_size)));

  Rng rng(seed_mix(params.seed, stream_tag::kAdopt));

  struct Candidate {
    TempEstimate est;
    int order = 0;  // insertion order for deterministic tie-breaks
  };

  for (int k = 0; k < params.k_max; ++k) {
    // Temporary estimates from pairs sampled within each same-labeled set.
    // Near-identical candidates are bucketed so support is counted once.
    std::map<std::pair<long long, long long>, Candidate> buckets;
    int order = 0;
    for (const auto& set : psi_sets) {
      if (set.label == PsiLabel::Zero) continue;
      std::vector<int> live;
      for (int idx : set.members)
        if (in_pool[idx]) live.push_back(idx);
      const std::size_t m = live.size();
      if (m < 2) continue;
      const std::size_t all_pairs = m * (m - 1) / 2;
      const std::size_t want = std::min<std::size_t>(params.max_pairs, all_pairs);
      std::size_t produced = 0;
      std::size_t attempts = 0;
      const std::size_t max_attempts = 6 * static_cast<std::size_t>(params.max_pairs);
      auto try_pair = [&](int ia, int ib) {
        const auto& sa = segments[ia];
        const auto& sb = segments[ib];
        const auto hypotheses = two_pair_solve(sa.l_d, sa.s_d, sb.l_d, sb.s_d, v_hat,
                                               params.eps_l, params.eps_mu);
        ++produced;
        for (const auto& est : hypotheses) {
          const auto key = std::make_pair(std::llround(est.lambda * 8.0),
                                          std::llround(est.xi[0] * 4096.0));
          buckets.try_emplace(key, Candidate{est, order++});
        }
      };
      if (all_pairs <= want) {
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = a + 1; b < m; ++b) try_pair(live[a], live[b]);
      } else {
        while (produced < want && attempts < max_attempts) {
          ++attempts;
          const auto a = rng.uniform_index(m);
          const auto b = rng.uniform_index(m);
          if (a == b) continue;
          try_pair(live[a], live[b]);
        }
      }
    }
    if (buckets.empty()) break;

    // Vote: count consistent sensing results in the remaining pool.
    int best_support = -1;
    int best_order = 0;
    TempEstimate best_est;
    std::vector<int> best_members;
    for (const auto& [key, cand] : buckets) {
      int support = 0;
      for (int idx : pool) {
        if (!in_pool[idx]) continue;
        if (consistency_test(segments[idx], cand.est.lambda, cand.est.xi[0], v_hat,
                             params.band_lo, params.band_hi))
          ++support;
      }
      if (support > best_support ||
          (support == best_support && cand.order < best_order)) {
        best_support = support;
        best_order = cand.order;
        best_est = cand.est;
      }
    }
    if (best_support < static_cast<int>(min_support)) break;

    for (int idx : pool) {
      if (!in_pool[idx]) continue;
      if (consistency_test(segments[idx], best_est.lambda, best_est.xi[0], v_hat,
                           params.band_lo, params.band_hi))
        best_members.push_back(idx);
    }

    EdgeEstimate est;
    est.source = EdgeEstimate::Source::GeneralPart;
    est.lambda_hat = best_est.lambda;
    est.xi_candidates = best_est.xi;
    est.support = best_members;
    const double e_nd = expected_nd(est.lambda_hat, est.xi_candidates[0], v_hat, m_t, cfg);
    if (e_nd > 0.0) {
      const auto [n_e, rounded] =
          estimate_edge_count(static_cast<double>(est.support.size()), e_nd);
      est.n_e_hat = n_e;
      est.n_e_rounded = rounded;
    }
    adopted.push_back(est);

    for (int idx : best_members) in_pool[idx] = 0;
    pool_size -= best_members.size();
    if (pool_size < 2) break;
  }
  return adopted;
}

// ---------------------------------------------------------------------------
// Part 4: edge order from consecutive detections.

// Count consecutive sensing results per ordered (head set, tail set) pair of
// estimates; both segments must belong to their estimate's support.
inline std::vector<ConnectivityRecord> connectivity(
    const std::vector<ConsecutivePair>& pairs, std::span<const int> segment_assignment,
    const EstimatorParams& params) {
  std::map<std::pair<int, int>, ConnectivityRecord> acc;
  for (const auto& pr : pairs) {
    const int a = segment_assignment[pr.first];
    const int b = segment_assignment[pr.second];
    if (a < 0 || b < 0) continue;
    auto& rec = acc[{a, b}];
    rec.head_estimate = a;
    rec.tail_estimate = b;
    ++rec.n_c;
    if (pr.vertex == VertexKind::Concave) ++rec.concave_count;
  }
  std::vector<ConnectivityRecord> out;
  out.reserve(acc.size());
  for (auto& [key, rec] : acc) {
    rec.vertex_majority =
        2 * rec.concave_count > rec.n_c ? VertexKind::Concave : VertexKind::Convex;
    rec.significant = rec.n_c >= params.n_c_min;
    out.push_back(rec);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Part 5: concave-vertex compensation.

namespace detail {

// Zones around theta in [0, pi/2]:
//   1: [0, theta) u [2pi - theta, 2pi)   2: [theta, pi - theta)
//   3: [pi - theta, pi + theta)          4: [pi + theta, 2pi - theta)
inline int zone_of(double xi, double theta) {
  xi = normalize_angle(xi);
  if (xi < theta || xi >= kTwoPi - theta) return 1;
  if (xi < kPi - theta) return 2;
  if (xi < kPi + theta) return 3;
  return 4;
}

}  // namespace detail

// Integral of (r_max*|sin z| - x) over the admissible sensing directions
// ([theta, pi - theta) u [pi + theta, 2pi - theta)) intersected with the
// wrapped interval [xi_prev, xi_cur + pi), in closed form per zone case.
// Preconditions: theta in [0, pi/2] and xi_prev within a half-turn of xi_cur
// counterclockwise (the concave-vertex condition).
inline double f_theta_x(double theta, double x, double xi_prev, double xi_cur,
                        double r_max) {
  if (theta < -kAngleTol || theta > kPi / 2.0 + kAngleTol)
    throw std::invalid_argument("theta must be in [0, pi/2]");
  theta = std::clamp(theta, 0.0, kPi / 2.0);
  const double arc = normalize_angle(xi_prev - xi_cur);
  if (arc > kPi + 1e-9 && arc < kTwoPi - 1e-9)
    throw std::invalid_argument("not a concave vertex: xi_prev outside [xi_cur, xi_cur+pi]");
  const double xp = normalize_angle(xi_prev);
  const double xc = normalize_angle(xi_cur);
  const int zc = detail::zone_of(xc, theta);
  const int zp = detail::zone_of(xp, theta);
  const double r = r_max;
  const double ct = std::cos(theta);

  switch (zc * 10 + zp) {
    case 11:  // both around 0
      return 2.0 * r * ct - x * (kPi - 2.0 * theta);
    case 12:
      return r * (std::cos(xp) + ct) - x * (kPi - theta - xp);
    case 13:
      return 0.0;
    case 22:
      return r * (2.0 * ct + std::cos(xp) - std::cos(xc)) -
             x * (kPi - 2.0 * theta - xp + xc);
    case 23:
      return r * (ct - std::cos(xc)) - x * (xc - theta);
    case 24:
      return -r * (std::cos(xp) + std::cos(xc)) - x * (xc + kPi - xp);
    case 33:  // both around pi
      return 2.0 * r * ct - x * (kPi - 2.0 * theta);
    case 34:
      return r * (ct - std::cos(xp)) - x * (kTwoPi - theta - xp);
    case 31:
      return 0.0;
    case 44:
      return r * (2.0 * ct - std::cos(xp) + std::cos(xc)) -
             x * (kPi - 2.0 * theta - xp + xc);
    case 41:
      return r * (ct + std::cos(xc)) - x * (xc - kPi - theta);
    case 42:
      // The admissible arc here is [xi_prev, xi_cur - pi) after wrapping, so
      // the x term carries that measure.
      return r * (std::cos(xp) + std::cos(xc)) - x * (xc - kPi - xp);
    default:
      throw std::invalid_argument("zone combination violates the concave-vertex condition");
  }
}

// Expected whole-edge detection count for an edge whose detection can be
// blocked by its concave-vertex predecessor.
inline double expected_nd_concave(double lambda, double xi_cur, double xi_prev, double v,
                                  double m_t, const SimConfig& cfg) {
  const double arc = normalize_angle(xi_prev - xi_cur);
  if (arc > kPi + 1e-9 && arc < kTwoPi - 1e-9)
    throw std::invalid_argument("convex vertex: use expected_nd");
  const double x = lambda * std::abs(std::sin(xi_cur));
  if (x > cfg.r_max) return 0.0;
  const double t1 = std::asin(std::min(x / cfg.r_max, 1.0));
  const double f = f_theta_x(t1, x, xi_prev, xi_cur, cfg.r_max);
  return v * m_t * cfg.n_s * f / (kTwoPi * cfg.omega_area());
}

// Re-evaluate edge counts at concave vertices. For every estimate on a
// significant concave connectivity record, the blocked expectation is
// computed with the neighbor's direction as the blocker. The admissible
// candidate combinations of a record are its mirror-image readings and
// bracket the true configuration, so the record's expectation is their mean;
// the strongest implied count across records wins, and counts may only
// increase.
inline std::vector<EdgeEstimate> concave_compensation(
    std::vector<EdgeEstimate> estimates, const std::vector<ConnectivityRecord>& records,
    double v, double m_t, const SimConfig& cfg) {
  for (int e = 0; e < static_cast<int>(estimates.size()); ++e) {
    EdgeEstimate& cur = estimates[e];
    double best_n_e = cur.n_e_hat;
    for (const auto& rec : records) {
      if (!rec.significant || rec.vertex_majority != VertexKind::Concave) continue;
      int neighbor = -1;
      if (rec.head_estimate == e) neighbor = rec.tail_estimate;
      if (rec.tail_estimate == e) neighbor = rec.head_estimate;
      if (neighbor < 0 || neighbor >= static_cast<int>(estimates.size())) continue;
      const EdgeEstimate& prev = estimates[neighbor];
      double e_nd_sum = 0.0;
      int combos = 0;
      for (double xi_c : cur.xi_candidates) {
        for (double xi_p : prev.xi_candidates) {
          const double arc = normalize_angle(xi_p - xi_c);
          if (arc > kPi + 1e-9 && arc < kTwoPi - 1e-9) continue;
          e_nd_sum += expected_nd_concave(cur.lambda_hat, xi_c, xi_p, v, m_t, cfg);
          ++combos;
        }
      }
      if (combos == 0) continue;
      const double record_e_nd = e_nd_sum / combos;
      if (record_e_nd > 1e-12)
        best_n_e =
            std::max(best_n_e, static_cast<double>(cur.support.size()) / record_e_nd);
    }
    if (best_n_e > cur.n_e_hat) {
      cur.n_e_hat = best_n_e;
      cur.n_e_rounded =
          std::max(cur.n_e_rounded, static_cast<int>(std::floor(best_n_e + 0.5)));
    }
  }
  return estimates;
}

// ---------------------------------------------------------------------------
// Eq.-(14)-style length-error sensitivity.

// d(lambda)/d(l_d) for the two-pair solution, evaluated from the measured
// endpoint changes r(t_e) - r(t_s) of the two segments.
inline double length_error_sensitivity(const DetectionSegment& seg,
                                       const DetectionSegment& seg2, double lambda) {
  if (!(seg.l_d > 0.0) || !(seg2.l_d > 0.0))
    throw std::invalid_argument("segment durations must be positive");
  const double x = seg.l_d / seg2.l_d;
  if (std::abs(x - 1.0) < 1e-12) throw std::invalid_argument("degenerate: l_d == l_d'");
  const double dr = seg.r_e - seg.r_s;
  const double dr2 = seg2.r_e - seg2.r_s;
  const double brace = 2.0 * (dr * dr / seg.l_d - seg.l_d) -
                       (dr2 * dr2 / seg2.l_d - seg2.l_d) + lambda * lambda / seg2.l_d;
  return brace / (2.0 * lambda * (1.0 - x));
}

}  // namespace shapesense
