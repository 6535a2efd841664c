#include "illusory/extraction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace illusory {

namespace {

struct Segment {
  std::size_t from;  // grid edge ids
  std::size_t to;
};

}  // namespace

ExtractionResult zero_contour(const ScalarField& phi) {
  const int W = phi.width;
  const int H = phi.height;
  auto hid = [&](int i, int j) { return 2 * phi.index(i, j); };      // (i,j)-(i+1,j)
  auto vid = [&](int i, int j) { return 2 * phi.index(i, j) + 1; };  // (i,j)-(i,j+1)
  auto pos = [&](int i, int j) { return phi(i, j) > 0.0; };

  std::unordered_map<std::size_t, Point> points;
  auto crossing = [&](std::size_t id, int ia, int ja, int ib, int jb) {
    if (points.count(id)) return;
    const double a = phi(ia, ja);
    const double b = phi(ib, jb);
    const double t = std::clamp(a / (a - b), 1e-9, 1.0 - 1e-9);
    points[id] = Point{ia + t * (ib - ia), ja + t * (jb - ja)};
  };

  std::vector<Segment> segments;
  for (int j = 0; j + 1 < H; ++j) {
    for (int i = 0; i + 1 < W; ++i) {
      // Corners counter-clockwise and the edge leaving each corner.
      const std::array<std::pair<int, int>, 4> c{{{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}}};
      const std::array<std::size_t, 4> e{hid(i, j), vid(i + 1, j), hid(i, j + 1), vid(i, j)};
      std::array<bool, 4> s{};
      for (int k = 0; k < 4; ++k) s[k] = pos(c[k].first, c[k].second);
      if (s[0] == s[1] && s[1] == s[2] && s[2] == s[3]) continue;
      std::array<int, 4> kind{};  // +1: positive to negative, -1: negative to positive
      std::vector<int> order;
      for (int k = 0; k < 4; ++k) {
        const bool a = s[k];
        const bool b = s[(k + 1) % 4];
        if (a == b) continue;
        kind[k] = a ? 1 : -1;
        order.push_back(k);
        const auto [ia, ja] = c[k];
        const auto [ib, jb] = c[(k + 1) % 4];
        crossing(e[k], ia, ja, ib, jb);
      }
      const bool centre_positive =
          0.25 * (phi(i, j) + phi(i + 1, j) + phi(i + 1, j + 1) + phi(i, j + 1)) > 0.0;
      const std::size_t m = order.size();
      for (std::size_t q = 0; q < m; ++q) {
        const int k = order[q];
        if (kind[k] != 1) continue;
        // Pair with the neighbouring negative-to-positive crossing; which
        // neighbour depends on whether the saddle centre is positive.
        const int partner = centre_positive ? order[(q + 1) % m] : order[(q + m - 1) % m];
        segments.push_back({e[k], e[partner]});
      }
    }
  }

  std::unordered_map<std::size_t, std::size_t> by_from;
  std::unordered_map<std::size_t, std::size_t> by_to;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    by_from[segments[s].from] = s;
    by_to[segments[s].to] = s;
  }

  ExtractionResult result;
  std::vector<bool> used(segments.size(), false);
  for (std::size_t start = 0; start < segments.size(); ++start) {
    if (used[start]) continue;
    // Walk backwards to the beginning of an open chain, if any.
    std::size_t first = start;
    bool closed = false;
    for (;;) {
      const auto it = by_to.find(segments[first].from);
      if (it == by_to.end()) break;
      first = it->second;
      if (first == start) {
        closed = true;
        break;
      }
    }
    Polyline line;
    std::size_t s = first;
    line.push_back(points.at(segments[s].from));
    for (;;) {
      used[s] = true;
      const auto it = by_from.find(segments[s].to);
      if (it == by_from.end()) {
        line.push_back(points.at(segments[s].to));
        break;
      }
      if (it->second == first) break;
      line.push_back(points.at(segments[s].to));
      s = it->second;
    }
    if (closed && line.size() >= 3) {
      ExtractedContour c;
      c.contour.vertices = std::move(line);
      c.signed_area = signed_area(c.contour.vertices);
      result.contours.push_back(std::move(c));
    } else {
      result.fragments.push_back(std::move(line));
    }
  }
  std::stable_sort(result.contours.begin(), result.contours.end(),
                   [](const ExtractedContour& a, const ExtractedContour& b) {
                     return std::abs(a.signed_area) > std::abs(b.signed_area);
                   });
  return result;
}

namespace {

std::vector<Point> resample(const Contour& c, double step) {
  std::vector<Point> out;
  const std::size_t n = c.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = c.vertices[k];
    const Point b = c.vertices[(k + 1) % n];
    const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(distance(a, b) / step)));
    for (std::size_t q = 0; q < m; ++q) out.push_back(a + (static_cast<double>(q) / m) * (b - a));
  }
  return out;
}

double directed(const std::vector<Point>& samples, const Contour& target) {
  double worst = 0.0;
  const std::size_t n = target.size();
  for (Point p : samples) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n && best > worst; ++k) {
      best = std::min(best, distance_point_segment(p, target.vertices[k], target.vertices[(k + 1) % n]));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double hausdorff(const Contour& a, const Contour& b, double step) {
  if (a.size() < 3 || b.size() < 3) throw GeometryError("hausdorff needs contours with at least 3 vertices");
  return std::max(directed(resample(a, step), b), directed(resample(b, step), a));
}

Classification classify(const Contour& contour, const Configuration& config, double tol) {
  DecomposeOptions opts;
  opts.tol = tol;
  opts.min_real_length = 0.0;
  Classification c;
  c.decomposition = decompose(contour, config, opts);
  c.real_length = c.decomposition.real_length;
  c.imaginary_length = c.decomposition.imaginary_length;
  return c;
}

void annotate(ExtractionResult& result, const Configuration& config, double tol) {
  for (ExtractedContour& c : result.contours) {
    const Classification k = classify(c.contour, config, tol);
    c.real_length = k.real_length;
    c.imaginary_length = k.imaginary_length;
  }
}

double max_chord_deviation(const Decomposition& decomposition) {
  const Contour& lab = decomposition.labeled;
  double worst = 0.0;
  for (const ImaginaryComponent& comp : decomposition.components) {
    const Point a = lab.vertex(comp.start_vertex);
    const Point b = lab.vertex(comp.end_vertex);
    for (std::size_t q = 1; q < comp.edge_count; ++q) {
      worst = std::max(worst, distance_point_segment(lab.vertex(comp.start_vertex + q), a, b));
    }
  }
  return worst;
}

}  // namespace illusory
