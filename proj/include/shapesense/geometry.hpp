#pragma once
// Planar primitives for directional range sensing of a translating polygon:
// circular angle arithmetic, ray-vs-boundary range queries, and polygon
// validity checks (closure, simplicity, orientation).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace shapesense {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Angle comparisons use an absolute tolerance; boundary hits count as
// detections within kHitTol.
inline constexpr double kAngleTol = 1e-12;
inline constexpr double kHitTol = 1e-9;

inline double normalize_angle(double a) {
  double m = std::fmod(a, kTwoPi);
  if (m < 0.0) m += kTwoPi;
  if (m >= kTwoPi) m = 0.0;
  return m;
}

// Value type: an angle kept normalized in [0, 2*pi) through every operation.
class Angle {
 public:
  Angle() = default;
  explicit Angle(double radians) : rad_(normalize_angle(radians)) {}

  double rad() const { return rad_; }
  double sin() const { return std::sin(rad_); }
  double cos() const { return std::cos(rad_); }

  Angle operator+(Angle other) const { return Angle(rad_ + other.rad_); }
  Angle operator-(Angle other) const { return Angle(rad_ - other.rad_); }
  Angle operator+(double r) const { return Angle(rad_ + r); }
  Angle operator-(double r) const { return Angle(rad_ - r); }

 private:
  double rad_ = 0.0;
};

// Shortest circular distance between two angles, in [0, pi].
inline double circular_distance(Angle a, Angle b) {
  double d = normalize_angle(a.rad() - b.rad());
  return std::min(d, kTwoPi - d);
}

inline bool angles_equal(Angle a, Angle b, double tol = kAngleTol) {
  return circular_distance(a, b) <= tol;
}

// Half-open interval [start, end) under mod 2*pi. start == end denotes the
// full circle (length 2*pi); proper intervals have length in (0, 2*pi).
struct AngleInterval {
  Angle start;
  Angle end;

  double length() const {
    double len = normalize_angle(end.rad() - start.rad());
    return len == 0.0 ? kTwoPi : len;
  }

  bool contains(Angle phi) const {
    double len = normalize_angle(end.rad() - start.rad());
    if (len == 0.0) return true;  // full circle
    return normalize_angle(phi.rad() - start.rad()) < len;
  }
};

inline bool angle_in_interval(Angle phi, const AngleInterval& iv) {
  return iv.contains(phi);
}

// A directed edge L is detectable by a sensor looking along theta iff
// (theta - xi) mod 2*pi lies in [0, pi): the ray approaches the boundary
// from its outer side.
inline bool edge_detectable(Angle xi, Angle theta) {
  return normalize_angle(theta.rad() - xi.rad()) < kPi;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double norm() const { return std::hypot(x, y); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

struct DirectedEdge {
  double length = 0.0;  // lambda, strictly positive
  Angle direction;      // xi
};

// (sum lambda_j cos xi_j, sum lambda_j sin xi_j); zero for a closed chain.
inline Vec2 closure_gap(std::span<const DirectedEdge> edges) {
  Vec2 g;
  for (const auto& e : edges) {
    g.x += e.length * e.direction.cos();
    g.y += e.length * e.direction.sin();
  }
  return g;
}

namespace detail {

// Proper or improper intersection test for two segments, used by the polygon
// simplicity check. eps is an absolute coordinate tolerance.
inline bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2, double eps) {
  const Vec2 r = p2 - p1;
  const Vec2 s = q2 - q1;
  const double denom = cross(r, s);
  const double qp = cross(q1 - p1, r);
  const double area_eps = eps * (r.norm() + s.norm() + 1.0);
  if (std::abs(denom) <= area_eps) {
    if (std::abs(qp) > area_eps) return false;  // parallel, not collinear
    // Collinear: overlap iff the projected intervals intersect.
    const double rr = dot(r, r);
    if (rr <= eps * eps) return false;
    double t0 = dot(q1 - p1, r) / rr;
    double t1 = dot(q2 - p1, r) / rr;
    if (t0 > t1) std::swap(t0, t1);
    return t0 < 1.0 - eps && t1 > eps;
  }
  const double t = cross(q1 - p1, s) / denom;
  const double u = qp / denom;
  return t > eps && t < 1.0 - eps && u > eps && u < 1.0 - eps;
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 e = b - a;
  const double ee = dot(e, e);
  if (ee == 0.0) return (p - a).norm();
  const double t = std::clamp(dot(p - a, e) / ee, 0.0, 1.0);
  return (p - (a + e * t)).norm();
}

}  // namespace detail

// Target polygon: counterclockwise directed edges plus the anchor, the
// position of the tail of edge 1 at t = 0. Vertices are always derived from
// (anchor, edges); they are never stored separately.
class PolygonTarget {
 public:
  static PolygonTarget make(std::vector<DirectedEdge> edges, Vec2 anchor) {
    PolygonTarget p(std::move(edges), anchor);
    p.validate();
    return p;
  }

  // For degenerate fixtures (e.g. a zero-area two-edge sliver standing in
  // for an isolated edge) where simplicity/orientation do not apply.
  static PolygonTarget make_unchecked(std::vector<DirectedEdge> edges, Vec2 anchor) {
    return PolygonTarget(std::move(edges), anchor);
  }

  const std::vector<DirectedEdge>& edges() const { return edges_; }
  Vec2 anchor() const { return anchor_; }
  std::size_t edge_count() const { return edges_.size(); }

  // Vertex chain: vertices()[j] is the tail of edge j; one entry per edge.
  std::vector<Vec2> vertices() const {
    std::vector<Vec2> v;
    v.reserve(edges_.size());
    Vec2 p = anchor_;
    for (const auto& e : edges_) {
      v.push_back(p);
      p = p + Vec2{e.length * e.direction.cos(), e.length * e.direction.sin()};
    }
    return v;
  }

  double perimeter() const {
    double s = 0.0;
    for (const auto& e : edges_) s += e.length;
    return s;
  }

  double signed_area() const {
    const auto v = vertices();
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2& p = v[i];
      const Vec2& q = v[(i + 1) % v.size()];
      a += cross(p, q);
    }
    return 0.5 * a;
  }

  void bounding_box(Vec2& lo, Vec2& hi) const {
    const auto v = vertices();
    lo = hi = v.empty() ? anchor_ : v[0];
    for (const auto& p : v) {
      lo.x = std::min(lo.x, p.x);
      lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x);
      hi.y = std::max(hi.y, p.y);
    }
  }

 private:
  PolygonTarget(std::vector<DirectedEdge> edges, Vec2 anchor)
      : edges_(std::move(edges)), anchor_(anchor) {}

  void validate() const {
    if (edges_.size() < 3) throw std::invalid_argument("polygon needs at least 3 edges");
    for (const auto& e : edges_) {
      if (!(e.length > 0.0) || !std::isfinite(e.length))
        throw std::invalid_argument("edge length must be positive and finite");
    }
    const Vec2 gap = closure_gap(edges_);
    const double eps_close = 1e-9 * perimeter();
    if (std::abs(gap.x) > eps_close || std::abs(gap.y) > eps_close)
      throw std::invalid_argument("polygon boundary does not close");
    if (signed_area() <= 0.0)
      throw std::invalid_argument("polygon must be counterclockwise");
    check_simple();
  }

  void check_simple() const {
    const auto v = vertices();
    const std::size_t n = v.size();
    const double eps = 1e-9;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a1 = v[i];
      const Vec2 a2 = v[(i + 1) % n];
      // Adjacent edges may only meet at the shared vertex: reject fold-backs.
      const Vec2 e1 = a2 - a1;
      const Vec2 e2 = v[(i + 2) % n] - a2;
      if (std::abs(cross(e1, e2)) <= eps * (e1.norm() + e2.norm()) && dot(e1, e2) < 0.0)
        throw std::invalid_argument("adjacent edges fold back onto each other");
      for (std::size_t j = i + 1; j < n; ++j) {
        if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;  // adjacent
        if (detail::segments_intersect(a1, a2, v[j], v[(j + 1) % n], eps))
          throw std::invalid_argument("polygon boundary self-intersects");
      }
    }
  }

  std::vector<DirectedEdge> edges_;
  Vec2 anchor_;
};

// Point-in-polygon with boundary points (within eps) counted as inside.
inline bool point_in_polygon(Vec2 p, std::span<const Vec2> vertices, double eps = kHitTol) {
  const std::size_t n = vertices.size();
  if (n < 2) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (detail::point_segment_distance(p, vertices[i], vertices[(i + 1) % n]) <= eps)
      return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = vertices[i];
    const Vec2& b = vertices[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

// Result of a range query: distance along the ray and the boundary edge hit.
// edge_index == -1 means the origin lies inside the target (distance 0).
struct RayHit {
  double distance = 0.0;
  int edge_index = -1;
};

// Minimum s in [0, r_max] with origin + s*(cos theta, sin theta) inside or on
// the target translated by poly_offset. Grazing and vertex hits count as hits
// (kHitTol); ties between coincident edges prefer the detectable one.
inline std::optional<RayHit> ray_polygon_hit(Vec2 origin, Angle theta,
                                             const PolygonTarget& poly,
                                             Vec2 poly_offset, double r_max) {
  if (!(r_max > 0.0)) throw std::invalid_argument("r_max must be positive");
  const Vec2 o = origin - poly_offset;  // work in the polygon's local frame
  const auto verts = poly.vertices();
  if (point_in_polygon(o, verts)) return RayHit{0.0, -1};

  const Vec2 d{theta.cos(), theta.sin()};
  const std::size_t n = verts.size();
  std::optional<RayHit> best;
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 p = verts[j];
    const Vec2 e = verts[(j + 1) % n] - p;
    const double elen = e.norm();
    if (elen <= 0.0) continue;
    const double denom = cross(d, e);
    double s = -1.0;
    if (std::abs(denom) <= kHitTol) {
      // Ray parallel to the edge: a hit only if collinear within tolerance.
      if (std::abs(cross(p - o, d)) > kHitTol * (1.0 + elen)) continue;
      const double s1 = dot(p - o, d);
      const double s2 = dot(p + e - o, d);
      const double lo = std::min(s1, s2);
      const double hi = std::max(s1, s2);
      if (hi < -kHitTol) continue;
      s = std::max(lo, 0.0);
    } else {
      s = cross(p - o, e) / denom;
      const double u = cross(p - o, d) / denom;
      const double eps_u = kHitTol / elen;
      if (u < -eps_u || u > 1.0 + eps_u) continue;
    }
    if (s < -kHitTol || s > r_max + kHitTol) continue;
    s = std::clamp(s, 0.0, r_max);
    const int idx = static_cast<int>(j);
    if (!best || s < best->distance - kHitTol) {
      best = RayHit{s, idx};
    } else if (s <= best->distance + kHitTol) {
      // Tie: prefer the edge whose outer side faces the sensor.
      const bool best_det = edge_detectable(poly.edges()[best->edge_index].direction, theta);
      const bool this_det = edge_detectable(poly.edges()[j].direction, theta);
      if (this_det && !best_det) best = RayHit{s, idx};
    }
  }
  return best;
}

inline std::optional<double> ray_polygon_distance(Vec2 origin, Angle theta,
                                                  const PolygonTarget& poly,
                                                  Vec2 poly_offset, double r_max) {
  const auto hit = ray_polygon_hit(origin, theta, poly, poly_offset, r_max);
  if (!hit) return std::nullopt;
  return hit->distance;
}

// Measured duration and slope of one whole-edge detection period for an edge
// (lambda, xi) seen by a sensor of direction theta while the target moves at
// speed v: v*l_d*|sin theta| = lambda*sin(theta - xi) and
// s_d = -sin xi / sin(theta - xi). Returns nothing when the edge is not
// detectable from theta or the period is unbounded (sin theta == 0).
struct WholeEdgeObservation {
  double l_d = 0.0;
  double s_d = 0.0;
};

inline std::optional<WholeEdgeObservation> whole_edge_observation(double lambda, Angle xi,
                                                                  Angle theta, double v) {
  if (!(lambda > 0.0) || !(v > 0.0)) return std::nullopt;
  const double rel = normalize_angle(theta.rad() - xi.rad());
  if (rel >= kPi) return std::nullopt;  // Eq. (2) fails
  const double sin_rel = std::sin(rel);
  const double sin_theta = std::abs(theta.sin());
  if (sin_rel <= 0.0 || sin_theta <= 0.0) return std::nullopt;
  return WholeEdgeObservation{lambda * sin_rel / (v * sin_theta), -xi.sin() / sin_rel};
}

}  // namespace shapesense
