#pragma once
// Named target shapes. The triangle follows the reference evaluation setup;
// the vehicle outlines are hand-digitized silhouettes (closed, simple,
// counterclockwise) chosen to exercise horizontal edges, near-vertical edges
// and, for the tank, concave vertices that occlude the deck.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "shapesense/geometry.hpp"

namespace shapesense {

inline PolygonTarget polygon_from_vertices(const std::vector<Vec2>& verts) {
  std::vector<DirectedEdge> edges;
  edges.reserve(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const Vec2 d = verts[(i + 1) % verts.size()] - verts[i];
    edges.push_back({d.norm(), Angle(std::atan2(d.y, d.x))});
  }
  return PolygonTarget::make(std::move(edges), verts.front());
}

// (50*sqrt(3), 0), (100, 5*pi/6), (50, 3*pi/2), scalable.
inline PolygonTarget make_triangle(double scale = 1.0) {
  std::vector<DirectedEdge> edges = {
      {scale * 50.0 * std::sqrt(3.0), Angle(0.0)},
      {scale * 100.0, Angle(5.0 * kPi / 6.0)},
      {scale * 50.0, Angle(3.0 * kPi / 2.0)},
  };
  return PolygonTarget::make(std::move(edges), {0.0, 0.0});
}

inline PolygonTarget make_truck() {
  return polygon_from_vertices({
      {0, 0}, {140, 0}, {145, 5}, {150, 35}, {145, 40}, {5, 40},
  });
}

inline PolygonTarget make_sports_car() {
  return polygon_from_vertices({
      {0, 0}, {62, 0}, {70, 6}, {72, 15}, {65, 22}, {8, 22}, {1, 16}, {-1, 8},
  });
}

// Hull with a raised turret; the deck (36, pi) appears fore and aft of the
// turret and each half is blocked at its turret-side vertex.
inline PolygonTarget make_tank() {
  return polygon_from_vertices({
      {0, 0}, {160, 0}, {172, 15}, {136, 15}, {136, 30},
      {66, 30}, {66, 15}, {30, 15},
  });
}

// Thin rectangular sliver standing in for one isolated edge: edge 0 is the
// face (lambda, xi) exactly; the body behind it is thick enough that sensors
// in the target's path register r = 0 instead of a truncated sweep.
inline PolygonTarget make_single_edge(double lambda, double xi, double width = 2.0) {
  const Vec2 u{std::cos(xi), std::sin(xi)};
  const Vec2 n{-std::sin(xi), std::cos(xi)};  // interior side of the face
  return polygon_from_vertices({
      {0.0, 0.0},
      {lambda * u.x, lambda * u.y},
      {lambda * u.x + width * n.x, lambda * u.y + width * n.y},
      {width * n.x, width * n.y},
  });
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"triangle", "small_triangle", "truck",
                                                 "sports_car", "tank"};
  return names;
}

inline PolygonTarget make_preset(const std::string& name) {
  if (name == "triangle") return make_triangle();
  if (name == "small_triangle") return make_triangle(0.5);
  if (name == "truck") return make_truck();
  if (name == "sports_car") return make_sports_car();
  if (name == "tank") return make_tank();
  throw std::invalid_argument("unknown preset: " + name);
}

}  // namespace shapesense
