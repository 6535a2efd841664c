#include "illusory/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace illusory {

std::string to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::kanizsa_triangle: return "kanizsa-triangle";
    case SceneKind::kanizsa_square: return "kanizsa-square";
    case SceneKind::bundle_square: return "bundle-square";
    case SceneKind::complex_bar: return "complex-bar";
    case SceneKind::custom: return "custom";
  }
  return "custom";
}

SceneKind parse_scene_kind(const std::string& name) {
  for (SceneKind k : {SceneKind::kanizsa_triangle, SceneKind::kanizsa_square, SceneKind::bundle_square,
                      SceneKind::complex_bar, SceneKind::custom}) {
    if (to_string(k) == name) return k;
  }
  throw SceneError("unknown scene kind '" + name + "'");
}

Region pacman(Point apex, double radius, Point dir_a, Point dir_b, int arc_vertices) {
  if (arc_vertices < 3) throw SceneError("pac-man needs at least 3 arc vertices");
  const double a0 = std::atan2(dir_a.y, dir_a.x);
  double a1 = std::atan2(dir_b.y, dir_b.x);
  while (a1 <= a0) a1 += 2.0 * kPi;
  std::vector<Point> v{apex, apex + radius * dir_a};
  std::vector<bool> smooth{false, false};
  const int n = arc_vertices - 1;
  for (int k = 1; k < n; ++k) {
    const double a = a0 + (a1 - a0) * k / n;
    v.push_back(apex + radius * Point{std::cos(a), std::sin(a)});
    smooth.push_back(true);
  }
  v.push_back(apex + radius * dir_b);
  smooth.push_back(false);
  return Region{std::move(v), std::move(smooth)};
}

namespace {

Region rectangle(double x0, double y0, double x1, double y1) {
  return make_region({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

// Square of half-size h centred at c, minus the quadrant pointing along (sx, sy).
Region notched_square(Point c, double h, int sx, int sy) {
  std::vector<Point> v;
  // Walk the full square counter-clockwise and replace the notched corner by
  // the two notch edges meeting at c.
  const Point corners[4] = {{c.x - h, c.y - h}, {c.x + h, c.y - h}, {c.x + h, c.y + h}, {c.x - h, c.y + h}};
  for (const Point& q : corners) {
    const bool notched = (q.x > c.x) == (sx > 0) && (q.y > c.y) == (sy > 0);
    if (!notched) {
      v.push_back(q);
      continue;
    }
    const Point along_x{c.x + sx * h, c.y};
    const Point along_y{c.x, c.y + sy * h};
    // Counter-clockwise order depends on which corner is removed.
    if (sx * sy > 0) {
      v.push_back(along_x);
      v.push_back(c);
      v.push_back(along_y);
    } else {
      v.push_back(along_y);
      v.push_back(c);
      v.push_back(along_x);
    }
  }
  return make_region(v);
}

// Pac-man at every vertex with its mouth bisected by the direction to the
// centroid; the ideal contour runs through each apex and its mouth corners.
void polygon_figure(const std::vector<Point>& vertices, double radius, double mouth, int arc_vertices,
                    Configuration& config, Contour& ideal) {
  Point centroid;
  for (Point v : vertices) centroid = centroid + (1.0 / vertices.size()) * v;
  auto rotate = [](Point d, double a) {
    return Point{std::cos(a) * d.x - std::sin(a) * d.y, std::sin(a) * d.x + std::cos(a) * d.y};
  };
  for (Point v : vertices) {
    const Point bisector = unit(centroid - v);
    const Point prev = rotate(bisector, 0.5 * mouth);
    const Point next = rotate(bisector, -0.5 * mouth);
    config.regions.push_back(pacman(v, radius, prev, next, arc_vertices));
    ideal.vertices.push_back(v + radius * prev);
    ideal.vertices.push_back(v);
    ideal.vertices.push_back(v + radius * next);
  }
}

void check_inside_grid(const Configuration& config, int width, int height) {
  auto ok = [&](Point p) { return p.x >= 1.0 && p.y >= 1.0 && p.x <= width - 2 && p.y <= height - 2; };
  for (const Region& r : config.regions) {
    for (Point p : r.vertices) {
      if (!ok(p)) throw SceneError("region touches the grid border");
    }
  }
  for (const Polyline& l : config.bundle) {
    for (Point p : l) {
      if (!ok(p)) throw SceneError("bundle touches the grid border");
    }
  }
}

}  // namespace

GeneratedScene generate(const SceneSpec& spec) {
  if (spec.width < kMinFieldSize || spec.height < kMinFieldSize) {
    throw SceneError("grid must be at least 8x8");
  }
  GeneratedScene out;
  out.spec = spec;
  Configuration& config = out.config;
  config.domain = {0.0, 0.0, static_cast<double>(spec.width - 1), static_cast<double>(spec.height - 1)};
  const Point c{(spec.width - 1) / 2.0, (spec.height - 1) / 2.0};
  const double scale = std::min(spec.width, spec.height) / 128.0;
  auto pick = [](double v, double fallback) { return v > 0.0 ? v : fallback; };

  switch (spec.kind) {
    case SceneKind::kanizsa_triangle:
    case SceneKind::kanizsa_square: {
      const bool tri = spec.kind == SceneKind::kanizsa_triangle;
      const double side = pick(spec.side, (tri ? 72.0 : 64.0) * scale);
      const double radius = pick(spec.radius, 14.0 * scale);
      const double mouth = pick(spec.mouth_angle, kPi / 2.0);
      out.spec.side = side;
      out.spec.radius = radius;
      out.spec.mouth_angle = mouth;
      if (mouth >= kPi) throw SceneError("mouth angle must be below pi");
      if (side <= 2.0 * radius) throw SceneError("pac-men overlap: side must exceed twice the radius");
      std::vector<Point> vertices;
      if (tri) {
        const double rho = side / std::sqrt(3.0);
        // Centre the bounding box of the three discs on the grid.
        const Point centroid{c.x, c.y - rho / 4.0};
        for (int k = 0; k < 3; ++k) {
          const double a = kPi / 2.0 + 2.0 * kPi * k / 3.0;
          vertices.push_back(centroid + rho * Point{std::cos(a), std::sin(a)});
        }
      } else {
        const double h = side / 2.0;
        vertices = {{c.x - h, c.y - h}, {c.x + h, c.y - h}, {c.x + h, c.y + h}, {c.x - h, c.y + h}};
      }
      Contour ideal;
      polygon_figure(vertices, radius, mouth, spec.arc_vertices, config, ideal);
      out.ideal = std::move(ideal);
      break;
    }
    case SceneKind::bundle_square: {
      const double side = pick(spec.side, 64.0 * scale);
      const double length = pick(spec.bundle_length, 20.0 * scale);
      const double offset = pick(spec.anchor_offset, 2.0 * scale);
      out.spec.side = side;
      out.spec.bundle_length = length;
      out.spec.anchor_offset = offset;
      if (offset >= side / 4.0) throw SceneError("anchor offset must be below a quarter of the side");
      const double h = side / 2.0;
      const Point corners[4] = {{c.x - h, c.y - h}, {c.x + h, c.y - h}, {c.x + h, c.y + h}, {c.x - h, c.y + h}};
      Contour ideal;
      // Three spokes per side, perpendicular to it: near both corners and at the midpoint.
      for (int k = 0; k < 4; ++k) {
        const Point a = corners[k];
        const Point b = corners[(k + 1) % 4];
        const Point t = unit(b - a);
        const Point out_dir{t.y, -t.x};
        for (Point e : {a + offset * t, a + h * t, b - offset * t}) {
          config.bundle.push_back({e, e + length * out_dir});
          ideal.vertices.push_back(e);
        }
      }
      out.ideal = std::move(ideal);
      break;
    }
    case SceneKind::complex_bar: {
      const double s = scale;
      const double x0 = c.x - 44.0 * s;
      const double x1 = c.x + 44.0 * s;
      const double y0 = c.y - 16.0 * s;
      const double y1 = c.y + 16.0 * s;
      const double h = 10.0 * s;
      config.regions.push_back(notched_square({x0, y0}, h, 1, 1));
      config.regions.push_back(notched_square({x1, y0}, h, -1, 1));
      config.regions.push_back(notched_square({x1, y1}, h, -1, -1));
      config.regions.push_back(notched_square({x0, y1}, h, 1, -1));
      const double w = 8.0 * s;
      const double tall = 20.0 * s;
      for (double left : {20.0, 38.0, 56.0}) {
        config.regions.push_back(rectangle(x0 + left * s, y1, x0 + left * s + w, y1 + tall));
      }
      for (double left : {26.0, 50.0}) {
        config.regions.push_back(rectangle(x0 + left * s, y0 - tall, x0 + left * s + w, y0));
      }
      break;
    }
    case SceneKind::custom: {
      config = spec.custom;
      if (config.domain.x_max <= config.domain.x_min) {
        config.domain = {0.0, 0.0, static_cast<double>(spec.width - 1), static_cast<double>(spec.height - 1)};
      }
      break;
    }
  }
  try {
    validate(config);
  } catch (const GeometryError& e) {
    throw SceneError(std::string("invalid scene: ") + e.what());
  }
  check_inside_grid(config, spec.width, spec.height);
  return out;
}

namespace {

constexpr double kStrokeRadius = 0.7071067811865476 + 1e-9;

bool near_bundle(Point p, const Configuration& config) {
  for (const Polyline& l : config.bundle) {
    for (std::size_t k = 0; k + 1 < l.size(); ++k) {
      if (distance_point_segment(p, l[k], l[k + 1]) <= kStrokeRadius) return true;
    }
  }
  return false;
}

template <class F>
void for_each_covered_cell(const Configuration& config, int width, int height, F&& f) {
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      const Point p{static_cast<double>(i), static_cast<double>(j)};
      bool hit = false;
      for (const Region& r : config.regions) {
        if (point_in_polygon(p, r.vertices)) {
          hit = true;
          break;
        }
      }
      if (!hit) hit = near_bundle(p, config);
      if (hit) f(i, j);
    }
  }
}

}  // namespace

ScalarField rasterize(const Configuration& config, int width, int height) {
  check_inside_grid(config, width, height);
  ScalarField u(width, height, 0.0);
  for_each_covered_cell(config, width, height, [&](int i, int j) { u(i, j) = 1.0; });
  return u;
}

Mask supervision_mask(const Configuration& config, int width, int height) {
  Mask m(width, height);
  for_each_covered_cell(config, width, height, [&](int i, int j) { m.set(i, j, true); });
  return m;
}

ScalarField mollify(const ScalarField& u, double sigma) {
  if (!(sigma > 0.0)) throw FieldError("sigma must be positive");
  const int W = u.width;
  const int H = u.height;
  const double border = u(0, 0);
  double margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < H; ++j) {
    for (int i = 0; i < W; ++i) {
      const bool on_border = i == 0 || j == 0 || i == W - 1 || j == H - 1;
      if (u(i, j) == border) continue;
      if (on_border) throw FieldError("mollify needs a constant value along the grid border");
      margin = std::min<double>(margin, std::min({i, j, W - 1 - i, H - 1 - j}));
    }
  }
  if (sigma >= margin) {
    throw FieldError("sigma " + std::to_string(sigma) + " exceeds the margin " + std::to_string(margin) +
                     " between the data and the grid border");
  }
  const int r = static_cast<int>(std::floor(sigma));
  struct Tap {
    int di, dj;
    double w;
  };
  std::vector<Tap> taps;
  double total = 0.0;
  for (int dj = -r; dj <= r; ++dj) {
    for (int di = -r; di <= r; ++di) {
      const double q = (di * di + dj * dj) / (sigma * sigma);
      if (q >= 1.0) continue;
      const double w = (1.0 - q) * (1.0 - q) * (1.0 - q);
      taps.push_back({di, dj, w});
      total += w;
    }
  }
  for (Tap& t : taps) t.w /= total;
  auto reflect = [](int k, int n) {
    if (k < 0) return -k - 1;
    if (k >= n) return 2 * n - k - 1;
    return k;
  };
  // Rounding in the normalized sum can step one ulp outside the input range.
  const double lo = u.min();
  const double hi = u.max();
  ScalarField out(W, H, 0.0);
  for (int j = 0; j < H; ++j) {
    for (int i = 0; i < W; ++i) {
      double s = 0.0;
      for (const Tap& t : taps) s += t.w * u(reflect(i + t.di, W), reflect(j + t.dj, H));
      out(i, j) = std::clamp(s, lo, hi);
    }
  }
  return out;
}

ScalarField edge_indicator(const ScalarField& u_sigma, double lambda) {
  if (!(lambda > 0.0)) throw FieldError("lambda must be positive");
  const int W = u_sigma.width;
  const int H = u_sigma.height;
  ScalarField g(W, H, 1.0);
  for (int j = 0; j < H; ++j) {
    for (int i = 0; i < W; ++i) {
      double gx, gy;
      if (i == 0) {
        gx = u_sigma(1, j) - u_sigma(0, j);
      } else if (i == W - 1) {
        gx = u_sigma(W - 1, j) - u_sigma(W - 2, j);
      } else {
        gx = 0.5 * (u_sigma(i + 1, j) - u_sigma(i - 1, j));
      }
      if (j == 0) {
        gy = u_sigma(i, 1) - u_sigma(i, 0);
      } else if (j == H - 1) {
        gy = u_sigma(i, H - 1) - u_sigma(i, H - 2);
      } else {
        gy = 0.5 * (u_sigma(i, j + 1) - u_sigma(i, j - 1));
      }
      g(i, j) = 1.0 / (1.0 + lambda * (gx * gx + gy * gy));
    }
  }
  return g;
}

ScalarField speed_field(const ScalarField& g, const EnergyWeights& w) {
  if (w.alpha < 0.0 || !(w.beta > 0.0)) throw FieldError("speed field needs alpha >= 0 and beta > 0");
  ScalarField G = g;
  for (double& v : G.values) v = w.alpha + w.beta * v;
  return G;
}

double relaxed_energy(std::span<const Point> polyline, bool closed, const ScalarField& G, double max_step) {
  if (!(max_step > 0.0)) throw FieldError("quadrature step must be positive");
  for (Point p : polyline) {
    if (!G.contains(p)) throw FieldError("contour leaves the grid");
  }
  const std::size_t n = polyline.size();
  const std::size_t edges = closed ? n : (n == 0 ? 0 : n - 1);
  double total = 0.0;
  for (std::size_t k = 0; k < edges; ++k) {
    const Point a = polyline[k];
    const Point b = polyline[(k + 1) % n];
    const double len = distance(a, b);
    if (len == 0.0) continue;
    const auto steps = static_cast<std::size_t>(std::ceil(len / max_step));
    const double h = len / static_cast<double>(steps);
    double s = 0.0;
    for (std::size_t q = 0; q < steps; ++q) {
      const double t = (q + 0.5) / static_cast<double>(steps);
      s += G.sample(a + t * (b - a));
    }
    total += s * h;
  }
  return total;
}

double relaxed_energy(const Contour& contour, const ScalarField& G, double max_step) {
  if (contour.size() < 3) throw FieldError("contour needs at least 3 vertices");
  return relaxed_energy(contour.vertices, true, G, max_step);
}

SceneFields compute_fields(const Configuration& config, int width, int height, const FieldParams& p) {
  SceneFields f;
  f.u = rasterize(config, width, height);
  f.u_sigma = mollify(f.u, p.sigma);
  f.g = edge_indicator(f.u_sigma, p.lambda);
  f.G = speed_field(f.g, p.weights);
  f.mask = supervision_mask(config, width, height);
  return f;
}

}  // namespace illusory
