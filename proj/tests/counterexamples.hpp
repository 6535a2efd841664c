#pragma once

// Contours built to violate one structural condition each.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "illusory/energy.hpp"
#include "illusory/geometry.hpp"
#include "illusory/scene.hpp"

namespace counterexamples {

using namespace illusory;

struct Case {
  Configuration config;
  Contour contour;
};

inline Configuration blank(double size = 128.0) {
  Configuration c;
  c.domain = {0.0, 0.0, size - 1.0, size - 1.0};
  return c;
}

inline Region box(double x0, double y0, double x1, double y1) {
  return make_region({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

// Ideal contour with the midpoint of its first imaginary side pushed outward.
inline Case bent_imaginary(SceneKind kind, double offset) {
  SceneSpec spec;
  spec.kind = kind;
  const GeneratedScene scene = generate(spec);
  const Contour& ideal = *scene.ideal;
  const Decomposition d = decompose(ideal, scene.config);
  const std::size_t k = d.components.front().start_vertex;
  const Contour& lab = d.labeled;
  const Point a = lab.vertex(k);
  const Point b = lab.vertex(k + 1);
  Point centre;
  for (Point p : ideal.vertices) centre = centre + (1.0 / static_cast<double>(ideal.size())) * p;
  Point n = perp(unit(b - a));
  const Point m = 0.5 * (a + b);
  if (dot(n, m - centre) < 0.0) n = -1.0 * n;
  Case out{scene.config, {}};
  out.contour.vertices = lab.vertices;
  out.contour.vertices.insert(out.contour.vertices.begin() + static_cast<std::ptrdiff_t>(k + 1), m + offset * n);
  return out;
}

// Two imaginary sides meet at a corner of one square while the rest of the
// contour runs along a second square: a shared hinge with opening below pi.
inline Case shared_hinge() {
  Case out{blank(), {}};
  out.config.regions.push_back(box(40, 40, 60, 60));
  out.config.regions.push_back(box(10, 10, 30, 30));
  out.contour.vertices = {{40, 40}, {30, 30}, {10, 30}};
  if (signed_area(out.contour.vertices) < 0.0) std::swap(out.contour.vertices[1], out.contour.vertices[2]);
  return out;
}

inline double hinge_opening(const Case& c, Point hinge) {
  const auto& v = c.contour.vertices;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (distance(v[k], hinge) > 1e-12) continue;
    const Point a = unit(v[(k + v.size() - 1) % v.size()] - v[k]);
    const Point b = unit(v[(k + 1) % v.size()] - v[k]);
    return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Kanizsa square whose first imaginary side is re-rooted on the outer arc of
// its pac-man, at the arc vertex whose turn is closest to 2 pi / 3.
struct BluntTurn {
  Case c;
  Point junction;
  double turn = 0.0;
};

inline BluntTurn blunt_turn_square(double target = 2.0 * kPi / 3.0) {
  SceneSpec spec;
  spec.kind = SceneKind::kanizsa_square;
  const GeneratedScene scene = generate(spec);
  const std::vector<Point>& ideal = scene.ideal->vertices;
  // Ideal layout: corner, apex, corner per inducer.
  const Point corner = ideal[2];
  const Point facing = ideal[3];
  const Region& pm = scene.config.regions[0];
  const std::size_t nv = pm.vertices.size();
  std::size_t ci = 0;
  for (std::size_t k = 0; k < nv; ++k) {
    if (distance(pm.vertices[k], corner) < 1e-9) ci = k;
  }
  const Point apex = ideal[1];
  // walk the arc away from the apex
  const int step = distance(pm.vertices[(ci + 1) % nv], apex) < 1e-9 ? -1 : 1;
  auto build = [&](const std::vector<Point>& arc) {
    Contour c;
    c.vertices = {ideal[0], ideal[1], ideal[2]};
    for (Point p : arc) c.vertices.push_back(p);
    for (std::size_t k = 3; k < ideal.size(); ++k) c.vertices.push_back(ideal[k]);
    return c;
  };
  std::vector<Point> arc;
  BluntTurn best;
  best.c.config = scene.config;
  double best_gap = std::numeric_limits<double>::infinity();
  Point prev = corner;
  for (std::size_t s = 1; s + 2 < nv; ++s) {
    const Point p = pm.vertices[(ci + nv + step * static_cast<long>(s)) % nv];
    arc.push_back(p);
    const Point t_re = unit(p - prev);
    const Point t_im = unit(facing - p);
    const double turn = std::acos(std::clamp(dot(t_re, t_im), -1.0, 1.0));
    prev = p;
    Contour candidate = build(arc);
    if (!is_admissible(candidate, scene.config).ok) break;
    if (std::abs(turn - target) < best_gap) {
      best_gap = std::abs(turn - target);
      best.turn = turn;
      best.junction = p;
      best.c.contour = std::move(candidate);
    }
  }
  return best;
}

// Equilateral triangle hanging under the bottom edge of a square: both
// junctions sit at square corners with turn 2 pi / 3.
inline Case blunt_triangle() {
  Case out{blank(), {}};
  out.config.regions.push_back(box(40, 40, 60, 60));
  const double h = 20.0 * std::sqrt(3.0) / 2.0;
  out.contour.vertices = {{40, 40}, {50, 40 - h}, {60, 40}};
  if (signed_area(out.contour.vertices) < 0.0) std::swap(out.contour.vertices[0], out.contour.vertices[2]);
  return out;
}

// Junction at a square corner whose imaginary side leaves at an acute idle
// angle to the unused right edge of the square.
inline Case acute_idle() {
  Case out{blank(), {}};
  out.config.regions.push_back(box(40, 40, 60, 60));
  out.contour.vertices = {{40, 40}, {60, 40}, {80, 70}, {80, 20}, {40, 20}};
  return out;
}

}  // namespace counterexamples
