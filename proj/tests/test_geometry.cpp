#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "illusory/geometry.hpp"
#include "illusory/scene.hpp"
#include "support.hpp"

using namespace illusory;
using namespace testing_support;

namespace {

Region equilateral(Point c, double r) {
  std::vector<Point> v;
  for (int k = 0; k < 3; ++k) {
    const double a = kPi / 2.0 + 2.0 * kPi * k / 3.0;
    v.push_back(c + r * Point{std::cos(a), std::sin(a)});
  }
  return make_region(v);
}

// Contour hugging the bottom edge of a square region and closing through
// random points on a lower half-circle.
Contour random_cap(std::mt19937_64& rng, Point centre, double half) {
  std::uniform_real_distribution<double> radius(half + 2.0, 3.0 * half);
  std::uniform_real_distribution<double> angle(kPi + 0.05, 2.0 * kPi - 0.05);
  std::vector<double> angles(5);
  for (double& a : angles) a = angle(rng);
  std::sort(angles.rbegin(), angles.rend());
  Contour c;
  c.vertices.push_back({centre.x - half, centre.y});
  c.vertices.push_back({centre.x + half, centre.y});
  for (double a : angles) c.vertices.push_back(centre + radius(rng) * Point{std::cos(a), std::sin(a)});
  // counter-clockwise when the cap is traversed this way round
  std::reverse(c.vertices.begin(), c.vertices.end());
  return c;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("square region has four right-angle kinks") {
  Configuration c = empty_config();
  c.regions.push_back(square_region(10, 10, 1));
  const auto kinks = kink_set(c);
  REQUIRE(kinks.size() == 4);
  for (const auto& k : kinks) {
    CHECK(k.outer_span == doctest::Approx(3.0 * kPi / 2.0).epsilon(1e-12));
    CHECK(k.inner_span == doctest::Approx(kPi / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("equilateral triangle kinks") {
  Configuration c = empty_config();
  c.regions.push_back(equilateral({50, 50}, 10));
  const auto kinks = kink_set(c);
  REQUIRE(kinks.size() == 3);
  for (const auto& k : kinks) {
    CHECK(k.inner_span == doctest::Approx(kPi / 3.0).epsilon(1e-12));
    CHECK(k.outer_span == doctest::Approx(5.0 * kPi / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("pac-man has exactly three kinks") {
  Configuration c = empty_config();
  c.regions.push_back(pacman({60, 60}, 14, {0, 1}, {1, 0}, 64));
  const auto kinks = kink_set(c);
  REQUIRE(kinks.size() == 3);
  // Oracle: the vertex angles of the polygon, taken independently.
  const auto& v = c.regions[0].vertices;
  const std::size_t n = v.size();
  std::size_t above = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = v[(k + n - 1) % n], b = v[k], d = v[(k + 1) % n];
    const double turn = std::abs(std::atan2(cross(b - a, d - b), dot(b - a, d - b)));
    if (turn > 0.1) ++above;
  }
  CHECK(above == 3);
  const auto apex = std::find_if(kinks.begin(), kinks.end(), [](const KinkRecord& k) {
    return distance(k.point, {60, 60}) < 1e-12;
  });
  REQUIRE(apex != kinks.end());
  CHECK(apex->inner_span == doctest::Approx(3.0 * kPi / 2.0).epsilon(1e-9));
}

TEST_CASE("kinks sorted by region then vertex") {
  Configuration c = empty_config();
  c.regions.push_back(square_region(10, 10, 5));
  c.regions.push_back(equilateral({60, 60}, 10));
  const auto kinks = kink_set(c);
  for (std::size_t k = 1; k < kinks.size(); ++k) {
    CHECK(std::pair(kinks[k - 1].region, kinks[k - 1].vertex) < std::pair(kinks[k].region, kinks[k].vertex));
  }
}

TEST_CASE("min spans") {
  Configuration c = empty_config();
  c.regions.push_back(square_region(10, 10, 5));
  auto s = min_spans(c);
  CHECK(s.outer_min == doctest::Approx(3.0 * kPi / 2.0));
  CHECK(s.inner_min == doctest::Approx(kPi / 2.0));
  c.regions.push_back(equilateral({60, 60}, 10));
  s = min_spans(c);
  CHECK(s.outer_min == doctest::Approx(3.0 * kPi / 2.0));
  CHECK(s.inner_min == doctest::Approx(kPi / 3.0));
}

TEST_CASE("min spans over 60-degree pac-men match brute force") {
  SceneSpec spec;
  spec.mouth_angle = kPi / 3.0;
  const auto scene = generate(spec);
  double brute = 2.0 * kPi;
  for (const auto& k : kink_set(scene.config)) brute = std::min(brute, k.inner_span);
  CHECK(min_spans(scene.config).inner_min == brute);
  CHECK(brute > 0.0);
  CHECK(brute < kPi);
}

TEST_CASE("min spans without kinks") {
  Configuration c = empty_config();
  Region disc;
  for (int k = 0; k < 90; ++k) {
    const double a = 2.0 * kPi * k / 90;
    disc.vertices.push_back(Point{50, 50} + 10.0 * Point{std::cos(a), std::sin(a)});
  }
  c.regions.push_back(make_region(disc.vertices));
  CHECK(kink_set(c).empty());
  CHECK_THROWS_AS(min_spans(c), GeometryError);
}

TEST_CASE("cusp is rejected as non-generic") {
  Configuration c = empty_config();
  c.regions.push_back(make_region({{10, 10}, {30, 10}, {10, 10.5}}));
  CHECK_THROWS_WITH_AS(kink_set(c, 0.1), doctest::Contains("non-generic"), GeometryError);
}

TEST_CASE("validate rejects overlapping and out-of-domain regions") {
  Configuration c = empty_config(64);
  c.regions.push_back(square_region(10, 10, 10));
  c.regions.push_back(square_region(15, 15, 10));
  CHECK_THROWS_AS(validate(c), GeometryError);
  c.regions.pop_back();
  c.regions.push_back(square_region(55, 55, 20));
  CHECK_THROWS_AS(validate(c), GeometryError);
  c.regions.pop_back();
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("decompose all-real triangle") {
  Configuration c = empty_config();
  c.regions.push_back(equilateral({50, 50}, 10));
  Contour t = polygon(c.regions[0].vertices);
  const auto d = decompose(t, c);
  CHECK(d.real_length == doctest::Approx(polygon_perimeter(t.vertices)).epsilon(1e-12));
  CHECK(d.imaginary_length == 0.0);
  for (auto l : d.labeled.labels) CHECK(l == EdgeLabel::real);
}

TEST_CASE("decompose circle in empty configuration") {
  const Contour circ = circle({50, 50}, 10, 200);
  const auto d = decompose(circ, empty_config());
  CHECK(d.real_length == 0.0);
  CHECK(d.imaginary_length == doctest::Approx(contour_length(circ)).epsilon(1e-12));
  CHECK(d.imaginary_loop);
}

TEST_CASE("decompose ideal Kanizsa triangle against placement oracle") {
  SceneSpec spec;
  const auto scene = generate(spec);
  const double r = scene.spec.radius;
  const double side = scene.spec.side;
  // Rebuild the mouth corners from the placement parameters.
  const double rho = side / std::sqrt(3.0);
  const Point centroid{63.5, 63.5 - rho / 4.0};
  std::vector<Point> apex;
  for (int k = 0; k < 3; ++k) {
    const double a = kPi / 2.0 + 2.0 * kPi * k / 3.0;
    apex.push_back(centroid + rho * Point{std::cos(a), std::sin(a)});
  }
  auto corner = [&](int k, double sign) {
    const Point b = unit(centroid - apex[k]);
    const double a = sign * kPi / 4.0;
    return apex[k] + r * Point{std::cos(a) * b.x - std::sin(a) * b.y, std::sin(a) * b.x + std::cos(a) * b.y};
  };
  double imaginary = 0.0;
  for (int k = 0; k < 3; ++k) imaginary += distance(corner(k, -1.0), corner((k + 1) % 3, 1.0));
  const auto d = decompose(*scene.ideal, scene.config);
  CHECK(d.real_length == doctest::Approx(6.0 * r).epsilon(1e-9));
  CHECK(d.imaginary_length == doctest::Approx(imaginary).epsilon(1e-9));
  CHECK(d.components.size() == 3);
  // independent per-edge measurement
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < d.labeled.size(); ++k) {
    (d.labeled.labels[k] == EdgeLabel::real ? re : im) += d.labeled.edge_length(k);
  }
  CHECK(re == doctest::Approx(d.real_length).epsilon(1e-12));
  CHECK(im == doctest::Approx(d.imaginary_length).epsilon(1e-12));
}

TEST_CASE("decompose rejects a contour through Q interior") {
  Configuration c = empty_config();
  c.regions.push_back(square_region(40, 40, 20));
  CHECK_THROWS_WITH_AS(decompose(rectangle_contour(30, 30, 50, 50), c), doctest::Contains("inadmissible"),
                       GeometryError);
}

TEST_CASE("junction turn: collinear and perpendicular") {
  Configuration c = empty_config();
  c.regions.push_back(square_region(40, 40, 20));
  // Runs along the bottom edge then leaves it straight on: turn 0 at (60,40).
  Contour straight = polygon({{40, 40}, {60, 40}, {80, 40}, {80, 10}, {40, 10}});
  // Leaves the bottom edge at its right corner heading down: turn pi/2.
  Contour bent = polygon({{40, 40}, {60, 40}, {60, 10}, {40, 10}});
  for (auto [contour, expected] : {std::pair{straight, 0.0}, std::pair{bent, kPi / 2.0}}) {
    const auto d = decompose(contour, c);
    const auto js = junction_set(d, c);
    REQUIRE(js.size() == 2);
    const auto it = std::find_if(js.begin(), js.end(), [](const JunctionRecord& j) {
      return distance(j.point, {60, 40}) < 1e-9;
    });
    REQUIRE(it != js.end());
    CHECK(it->turn == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("Kanizsa square junctions") {
  SceneSpec spec;
  spec.kind = SceneKind::kanizsa_square;
  const auto scene = generate(spec);
  const auto d = decompose(*scene.ideal, scene.config);
  const auto js = junction_set(d, scene.config);
  REQUIRE(js.size() == 8);
  // Oracle: the first arc chord leaves the mouth corner half an arc step off
  // the tangent; the 270-degree arc is split into arc_vertices - 1 chords.
  const double half_step = 0.5 * (1.5 * kPi) / (scene.spec.arc_vertices - 1);
  for (const auto& j : js) {
    CHECK(j.turn == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(j.has_idle);
    CHECK(j.idle_angle - kPi / 2.0 == doctest::Approx(half_step).epsilon(1e-9));
  }
}

TEST_CASE("dangling imaginary endpoint") {
  // Labels forced by hand so that an imaginary run ends away from dQ.
  Configuration c = empty_config();
  c.regions.push_back(square_region(40, 40, 20));
  Decomposition d;
  d.labeled = polygon({{40, 40}, {60, 40}, {60, 10}, {40, 10}});
  d.labeled.labels = {EdgeLabel::real, EdgeLabel::real, EdgeLabel::imaginary, EdgeLabel::imaginary};
  d.labeled.on_boundary = {true, true, false, true};
  d.components = imaginary_components(d.labeled);
  CHECK_THROWS_WITH_AS(junction_set(d, c), doctest::Contains("dangling"), GeometryError);
}

TEST_CASE("admissibility verdicts") {
  Configuration c = empty_config();
  c.regions.push_back(square_region(40, 40, 20));
  auto through = is_admissible(rectangle_contour(45, 45, 80, 80), c);
  CHECK_FALSE(through.ok);
  CHECK(through.diagnostic.find("intersects Q interior") != std::string::npos);
  auto touching = is_admissible(polygon({{40, 40}, {60, 40}, {60, 10}, {40, 10}}), c);
  CHECK(touching.ok);
  auto eight = is_admissible(polygon({{0 + 10, 10}, {20, 20}, {20, 10}, {10, 20}}), empty_config());
  CHECK_FALSE(eight.ok);
  CHECK(eight.diagnostic == "not simple");
}

TEST_CASE("admissibility against bundle interior") {
  Configuration c = empty_config();
  c.bundle.push_back({{50, 20}, {50, 40}});
  CHECK_FALSE(is_admissible(rectangle_contour(40, 30, 60, 50), c).ok);
  // touching the endpoint only
  CHECK(is_admissible(rectangle_contour(40, 40, 60, 60), c).ok);
}

TEST_CASE("property: span partition and rigid invariance") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(-kPi, kPi), shift(-5.0, 5.0);
  SceneSpec spec;
  spec.kind = SceneKind::kanizsa_square;
  const auto scene = generate(spec);
  Configuration base = scene.config;
  base.regions.push_back(equilateral({64, 64}, 8));
  const auto k0 = kink_set(base);
  const auto s0 = min_spans(base);
  for (const auto& k : k0) CHECK(std::abs(k.outer_span + k.inner_span - 2.0 * kPi) < 1e-9);
  for (int trial = 0; trial < 20; ++trial) {
    Similarity t{1.0, ang(rng), {shift(rng), shift(rng)}};
    Configuration moved = transformed(base, t);
    moved.domain = {-1000, -1000, 1000, 1000};
    const auto k1 = kink_set(moved);
    REQUIRE(k1.size() == k0.size());
    for (std::size_t i = 0; i < k0.size(); ++i) {
      CHECK(std::abs(k1[i].outer_span - k0[i].outer_span) < 1e-9);
      CHECK(std::abs(k1[i].inner_span - k0[i].inner_span) < 1e-9);
      CHECK(std::abs(k1[i].outer_span + k1[i].inner_span - 2.0 * kPi) < 1e-9);
    }
    const auto s1 = min_spans(moved);
    CHECK(std::abs(s1.outer_min - s0.outer_min) < 1e-9);
    CHECK(std::abs(s1.inner_min - s0.inner_min) < 1e-9);
  }
}

TEST_CASE("property: decomposition partition, label monotonicity, junction count") {
  std::mt19937_64 rng(11);
  Configuration c = empty_config();
  c.regions.push_back(square_region(50, 60, 20));
  for (int trial = 0; trial < 200; ++trial) {
    const Contour contour = random_cap(rng, {60, 60}, 10);
    REQUIRE(is_admissible(contour, c).ok);
    const double total = contour_length(contour);
    double previous_real = -1.0;
    for (double tol : {1e-9, 1e-6, 1e-3, 1e-1}) {
      DecomposeOptions o;
      o.tol = tol;
      const auto d = decompose(contour, c, o);
      CHECK(std::abs(d.real_length + d.imaginary_length - total) <= 1e-9 * total);
      // the bottom edge of the square lies exactly on dQ at every tolerance
      CHECK(d.real_length >= 20.0 - 1e-9);
      CHECK(d.real_length >= previous_real - 1e-9);
      previous_real = d.real_length;
      const auto js = junction_set(d, c, o);
      CHECK(js.size() == 2 * d.components.size());
    }
  }
}

}  // TEST_SUITE
