#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "illusory/geometry.hpp"
#include "illusory/scene.hpp"
#include "support.hpp"

using namespace illusory;
using namespace testing_support;

namespace {

GeneratedScene scene_of(SceneKind kind) {
  SceneSpec spec;
  spec.kind = kind;
  return generate(spec);
}

bool near_boundary_cell(int i, int j, const Configuration& c, double d) {
  return distance_to_boundary({static_cast<double>(i), static_cast<double>(j)}, c) <= d;
}

}  // namespace

TEST_SUITE("scene") {

TEST_CASE("generated scenes validate and carry their ideal contours") {
  for (SceneKind k : {SceneKind::kanizsa_triangle, SceneKind::kanizsa_square, SceneKind::bundle_square,
                      SceneKind::complex_bar}) {
    const auto s = scene_of(k);
    CHECK_NOTHROW(validate(s.config));
    CHECK(s.ideal.has_value() == (k != SceneKind::complex_bar));
    if (s.ideal) CHECK(is_admissible(*s.ideal, s.config).ok);
    CHECK(parse_scene_kind(to_string(k)) == k);
  }
  CHECK(scene_of(SceneKind::kanizsa_triangle).config.regions.size() == 3);
  CHECK(scene_of(SceneKind::kanizsa_square).config.regions.size() == 4);
  CHECK_THROWS_AS(parse_scene_kind("kanizsa-pentagon"), SceneError);
}

TEST_CASE("bundle-square ideal runs through every bundle endpoint") {
  const auto s = scene_of(SceneKind::bundle_square);
  const auto ends = bundle_endpoints(s.config);
  std::size_t on = 0;
  for (Point e : ends) {
    for (Point v : s.ideal->vertices) on += distance(e, v) < 1e-12;
  }
  CHECK(on == s.ideal->size());
  CHECK(s.config.regions.empty());
}

TEST_CASE("overlapping pac-men are rejected") {
  SceneSpec spec;
  spec.kind = SceneKind::kanizsa_square;
  spec.radius = 20;
  spec.side = 30;
  CHECK_THROWS_AS(generate(spec), SceneError);
}

TEST_CASE("rasterize: empty configuration and border contact") {
  const ScalarField u = rasterize(empty_config(32), 32, 32);
  CHECK(u.sum() == 0.0);
  Configuration c = empty_config(32);
  c.regions.push_back(square_region(0.5, 10, 5));
  CHECK_THROWS(rasterize(c, 32, 32));
}

TEST_CASE("rasterize: Kanizsa square foreground matches the analytic area") {
  const auto s = scene_of(SceneKind::kanizsa_square);
  const ScalarField u = rasterize(s.config, 128, 128);
  const double r = s.spec.radius;
  const double analytic = 4.0 * (kPi * r * r - 0.5 * r * r * s.spec.mouth_angle);
  CHECK(u.sum() == doctest::Approx(analytic).epsilon(0.01));
}

TEST_CASE("mollify: constant field and delta-like kernel") {
  ScalarField c(32, 32, 0.25);
  const ScalarField m = mollify(c, 3.0);
  for (double v : m.values) CHECK(v == doctest::Approx(0.25).epsilon(1e-14));
  const auto s = scene_of(SceneKind::kanizsa_triangle);
  const ScalarField u = rasterize(s.config, 128, 128);
  CHECK(mollify(u, 0.5).values == u.values);
  CHECK(mollify(u, 1.0).values == u.values);
}

TEST_CASE("mollify: step edge against a 1-D convolution oracle") {
  Configuration c = empty_config(64);
  c.regions.push_back(make_region({{20.5, 5.5}, {58.5, 5.5}, {58.5, 58.5}, {20.5, 58.5}}));
  const ScalarField u = rasterize(c, 64, 64);
  for (double sigma : {1.5, 2.0, 3.0}) {
    const ScalarField us = mollify(u, sigma);
    // marginal of the (1 - r^2/sigma^2)^3 kernel along x
    const int r = static_cast<int>(std::floor(sigma));
    std::vector<double> w1(2 * r + 1, 0.0);
    double total = 0.0;
    for (int dj = -r; dj <= r; ++dj) {
      for (int di = -r; di <= r; ++di) {
        const double q = (di * di + dj * dj) / (sigma * sigma);
        if (q >= 1.0) continue;
        const double w = std::pow(1.0 - q, 3);
        w1[di + r] += w;
        total += w;
      }
    }
    const int j = 32;
    double previous = -1.0;
    int first = -1, last = -1;
    for (int i = 10; i < 32; ++i) {
      double expected = 0.0;
      for (int di = -r; di <= r; ++di) expected += w1[di + r] / total * u(i + di, j);
      CHECK(us(i, j) == doctest::Approx(expected).epsilon(1e-12));
      CHECK(us(i, j) >= previous);
      previous = us(i, j);
      if (us(i, j) > 1e-12 && first < 0) first = i;
      if (us(i, j) < 1.0 - 1e-12) last = i;
    }
    // ramp width in cells, and the value halfway between the last outside and first inside cell
    CHECK(last - first + 1 <= 2.0 * sigma);
    CHECK(0.5 * (us(20, j) + us(21, j)) == doctest::Approx(0.5).epsilon(0.05 / 0.5));
  }
}

TEST_CASE("mollify: mass, range and margin") {
  const auto s = scene_of(SceneKind::kanizsa_triangle);
  const ScalarField u = rasterize(s.config, 128, 128);
  for (double sigma : {1.0, 2.0, 4.0}) {
    const ScalarField us = mollify(u, sigma);
    CHECK(us.sum() == doctest::Approx(u.sum()).epsilon(1e-6));
    CHECK(us.min() >= 0.0);
    CHECK(us.max() <= 1.0);
  }
  CHECK_THROWS_AS(mollify(u, 40.0), FieldError);
  CHECK_THROWS_AS(mollify(u, 0.0), FieldError);
}

TEST_CASE("edge indicator: flat field, exact gradient, range") {
  ScalarField flat(16, 16, 0.3);
  for (double v : edge_indicator(flat, 100.0).values) CHECK(v == 1.0);
  const double lambda = 100.0;
  ScalarField ramp(16, 16);
  for (int j = 0; j < 16; ++j) {
    for (int i = 0; i < 16; ++i) ramp(i, j) = i / std::sqrt(lambda);
  }
  for (double v : edge_indicator(ramp, lambda).values) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));

  const auto s = scene_of(SceneKind::kanizsa_triangle);
  const ScalarField us = mollify(rasterize(s.config, 128, 128), 2.0);
  const ScalarField g = edge_indicator(us, lambda);
  double boundary_min = 1.0;
  for (int j = 0; j < 128; ++j) {
    for (int i = 0; i < 128; ++i) {
      CHECK(g(i, j) > 0.0);
      CHECK(g(i, j) <= 1.0);
      if (near_boundary_cell(i, j, s.config, 1.0)) boundary_min = std::min(boundary_min, g(i, j));
    }
  }
  CHECK(boundary_min < 0.05);
  MESSAGE("min g on boundary cells, sigma 2, lambda 100: " << boundary_min);
}

TEST_CASE("edge indicator is 1 exactly where the discrete gradient vanishes") {
  const auto s = scene_of(SceneKind::kanizsa_square);
  const ScalarField us = mollify(rasterize(s.config, 128, 128), 2.0);
  const ScalarField g = edge_indicator(us, 100.0);
  for (int j = 1; j < 127; ++j) {
    for (int i = 1; i < 127; ++i) {
      const bool flat = us(i + 1, j) == us(i - 1, j) && us(i, j + 1) == us(i, j - 1);
      CHECK((g(i, j) == 1.0) == flat);
    }
  }
}

TEST_CASE("speed field") {
  const EnergyWeights w{0.1, 1.0};
  for (double v : speed_field(ScalarField(8, 8, 1.0), w).values) CHECK(v == doctest::Approx(1.1));
  for (double v : speed_field(ScalarField(8, 8, 0.0), w).values) CHECK(v == doctest::Approx(0.1));
  CHECK_THROWS_AS(speed_field(ScalarField(8, 8, 1.0), {0.1, 0.0}), FieldError);

  const auto s = scene_of(SceneKind::kanizsa_triangle);
  const auto f = compute_fields(s.config, 128, 128, {2.0, 100.0, w});
  CHECK(f.G.min() >= w.alpha);
  CHECK(f.G.max() <= w.alpha + w.beta);
  const auto lo = std::min_element(f.G.values.begin(), f.G.values.end()) - f.G.values.begin();
  const int li = static_cast<int>(lo % 128), lj = static_cast<int>(lo / 128);
  CHECK(near_boundary_cell(li, lj, s.config, 1.5));
  CHECK(f.G(2, 2) == w.alpha + w.beta);
  CHECK(f.G.max() == w.alpha + w.beta);
}

TEST_CASE("relaxed energy in flat background and outside the grid") {
  const auto s = scene_of(SceneKind::kanizsa_square);
  const auto f = compute_fields(s.config, 128, 128, {2.0, 100.0, {0.1, 1.0}});
  const Contour c = circle({63.5, 63.5}, 10, 48);
  CHECK(relaxed_energy(c, f.G) == doctest::Approx(1.1 * contour_length(c)).epsilon(1e-3));
  CHECK_THROWS_AS(relaxed_energy(circle({5, 5}, 10, 16), f.G), FieldError);
}

TEST_CASE("relaxed energy quadrature converges at second order") {
  const auto s = scene_of(SceneKind::kanizsa_square);
  const auto f = compute_fields(s.config, 128, 128, {2.0, 100.0, {0.1, 1.0}});
  // Bilinear G is only piecewise smooth. Along a lattice diagonal it is
  // quadratic inside each cell, so panels that end on the cell corners see a
  // smooth integrand and the midpoint rule shows its h^2 error cleanly.
  const std::vector<Point> diagonal{{20, 20}, {36, 36}};
  const double base = std::sqrt(2.0) / 4.0 * (1.0 + 1e-9);
  const double fine = relaxed_energy(diagonal, false, f.G, base / 64.0);
  const double e1 = std::abs(relaxed_energy(diagonal, false, f.G, base) - fine);
  const double e2 = std::abs(relaxed_energy(diagonal, false, f.G, base / 2.0) - fine);
  MESSAGE("quadrature errors " << e1 << " " << e2);
  CHECK(e1 > 0.0);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("real edges of the ideal contour follow the 0.5 level of u_sigma") {
  for (SceneKind k : {SceneKind::kanizsa_triangle, SceneKind::kanizsa_square}) {
    const auto s = scene_of(k);
    const ScalarField us = mollify(rasterize(s.config, 128, 128), 2.0);
    const auto d = decompose(*s.ideal, s.config);
    for (std::size_t e = 0; e < d.labeled.size(); ++e) {
      if (d.labeled.labels[e] != EdgeLabel::real) continue;
      const Point a = d.labeled.vertex(e), b = d.labeled.vertex(e + 1);
      for (double t = 0.05; t < 1.0; t += 0.1) {
        const Point p = a + t * (b - a);
        double lo = 1.0, hi = 0.0;
        for (int q = 0; q < 16; ++q) {
          const Point x = p + 1.0 * Point{std::cos(q * kPi / 8), std::sin(q * kPi / 8)};
          lo = std::min(lo, us.sample(x));
          hi = std::max(hi, us.sample(x));
        }
        CHECK(lo <= 0.5);
        CHECK(hi >= 0.5);
      }
    }
  }
}

TEST_CASE("supervision mask covers region interiors and bundle strokes") {
  const auto tri = scene_of(SceneKind::kanizsa_triangle);
  const Mask m = supervision_mask(tri.config, 128, 128);
  const ScalarField u = rasterize(tri.config, 128, 128);
  CHECK(static_cast<double>(m.count()) == u.sum());
  const auto bs = scene_of(SceneKind::bundle_square);
  const Mask mb = supervision_mask(bs.config, 128, 128);
  CHECK(mb.count() > 0);
  for (Point e : bundle_endpoints(bs.config)) {
    CHECK(mb(static_cast<int>(std::lround(e.x)), static_cast<int>(std::lround(e.y))));
  }
}

TEST_CASE("sigma sweep approaches the imaginary length" * doctest::description("approximation surrogate")) {
  const auto s = scene_of(SceneKind::kanizsa_triangle);
  const auto d = decompose(*s.ideal, s.config);
  std::vector<double> integral, gap;
  for (double sigma : {4.0, 2.0, 1.0}) {
    const auto f = compute_fields(s.config, 128, 128, {sigma, 100.0, {0.0, 1.0}});
    integral.push_back(relaxed_energy(*s.ideal, f.G));
    gap.push_back(std::abs(integral.back() - d.imaginary_length));
  }
  MESSAGE("L_im " << d.imaginary_length << "  int g: " << integral[0] << " " << integral[1] << " " << integral[2]);
  CHECK(integral[1] < integral[0]);
  CHECK(integral[2] < integral[1]);
  CHECK(gap[1] < gap[0]);
  CHECK(gap[2] < gap[1]);
  CHECK(gap[2] <= 0.05 * d.imaginary_length);
}

}  // TEST_SUITE
