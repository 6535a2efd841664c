#pragma once

#include <cmath>
#include <vector>

#include "illusory/geometry.hpp"

namespace testing_support {

using namespace illusory;

inline Configuration empty_config(double size = 128.0) {
  Configuration c;
  c.domain = {0.0, 0.0, size - 1.0, size - 1.0};
  return c;
}

inline Region square_region(double x0, double y0, double side) {
  return make_region({{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}});
}

inline Contour polygon(std::vector<Point> v) {
  Contour c;
  c.vertices = std::move(v);
  return c;
}

inline Contour circle(Point centre, double r, int n) {
  Contour c;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * kPi * k / n;
    c.vertices.push_back(centre + r * Point{std::cos(a), std::sin(a)});
  }
  return c;
}

inline Contour rectangle_contour(double x0, double y0, double x1, double y1) {
  return polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

}  // namespace testing_support
