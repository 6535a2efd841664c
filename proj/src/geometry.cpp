#include "illusory/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace illusory {

namespace {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] bool empty() const { return hi < lo; }
};

constexpr Interval kEmpty{1.0, 0.0};

Interval intersect(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

// {t : lo <= c0 + t*c1 <= hi}
Interval linear_band(double c0, double c1, double lo, double hi) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (c1 == 0.0) {
    return (c0 >= lo && c0 <= hi) ? Interval{-inf, inf} : kEmpty;
  }
  double a = (lo - c0) / c1;
  double b = (hi - c0) / c1;
  if (a > b) std::swap(a, b);
  return {a, b};
}

// {t : |p + t*d - c| <= r}
Interval line_disk(Point p, Point d, Point c, double r) {
  const Point w = p - c;
  const double a = dot(d, d);
  const double b = 2.0 * dot(w, d);
  const double cc = dot(w, w) - r * r;
  if (a == 0.0) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return cc <= 0.0 ? Interval{-inf, inf} : kEmpty;
  }
  const double disc = b * b - 4.0 * a * cc;
  if (disc < 0.0) return kEmpty;
  const double s = std::sqrt(disc);
  return {(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)};
}

// Parameters t of the line p + t*(q - p) whose distance to segment [a, b] is
// at most r. The set is convex, so it is the hull of the three pieces of the
// capsule around [a, b].
Interval capsule_interval(Point p, Point q, Point a, Point b, double r) {
  const Point d = q - p;
  Interval out = kEmpty;
  auto absorb = [&](Interval piece) {
    if (piece.empty()) return;
    if (out.empty()) {
      out = piece;
    } else {
      out.lo = std::min(out.lo, piece.lo);
      out.hi = std::max(out.hi, piece.hi);
    }
  };
  absorb(line_disk(p, d, a, r));
  absorb(line_disk(p, d, b, r));
  const double len = distance(a, b);
  if (len > 0.0) {
    const Point u = (1.0 / len) * (b - a);
    const Point n = perp(u);
    const Interval along = linear_band(dot(p - a, u), dot(d, u), 0.0, len);
    const Interval across = linear_band(dot(p - a, n), dot(d, n), -r, r);
    absorb(intersect(along, across));
  }
  return out;
}

template <class F>
void for_each_boundary_segment(const Configuration& config, bool include_bundle, F&& f) {
  for (const Region& region : config.regions) {
    const auto& v = region.vertices;
    for (std::size_t k = 0; k < v.size(); ++k) f(v[k], v[(k + 1) % v.size()]);
  }
  if (!include_bundle) return;
  for (const Polyline& line : config.bundle) {
    for (std::size_t k = 0; k + 1 < line.size(); ++k) f(line[k], line[k + 1]);
  }
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  auto orient = [](Point p, Point q, Point r) { return cross(q - p, r - p); };
  auto on_segment = [](Point p, Point q, Point r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  const double d1 = orient(c, d, a);
  const double d2 = orient(c, d, b);
  const double d3 = orient(a, b, c);
  const double d4 = orient(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(c, d, a)) return true;
  if (d2 == 0 && on_segment(c, d, b)) return true;
  if (d3 == 0 && on_segment(a, b, c)) return true;
  if (d4 == 0 && on_segment(a, b, d)) return true;
  return false;
}

// True when some sub-segment of [p, q] runs through the interior of the
// polygon at a distance above tol from its boundary.
bool segment_enters_polygon(Point p, Point q, std::span<const Point> polygon, double tol) {
  const Point d = q - p;
  const double len = norm(d);
  std::vector<double> ts{0.0, 1.0};
  const std::size_t n = polygon.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point a = polygon[k];
    const Point b = polygon[(k + 1) % n];
    const Point e = b - a;
    const double denom = cross(d, e);
    if (std::abs(denom) > 1e-14 * len * norm(e)) {
      const double t = cross(a - p, e) / denom;
      const double u = cross(a - p, d) / denom;
      if (t >= 0.0 && t <= 1.0 && u >= -1e-12 && u <= 1.0 + 1e-12) ts.push_back(t);
    }
    if (len > 0.0 && distance_point_segment(a, p, q) <= tol) {
      ts.push_back(std::clamp(dot(a - p, d) / (len * len), 0.0, 1.0));
    }
  }
  std::sort(ts.begin(), ts.end());
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    if (ts[k + 1] - ts[k] <= 1e-12) continue;
    const Point m = p + (0.5 * (ts[k] + ts[k + 1])) * d;
    if (point_in_polygon(m, polygon) && distance_to_polygon_boundary(m, polygon) > tol) return true;
  }
  return false;
}

}  // namespace

Point unit(Point a) {
  const double n = norm(a);
  if (n == 0.0) return {0.0, 0.0};
  return {a.x / n, a.y / n};
}

Point Contour::edge_direction(std::size_t k) const {
  return unit(vertex(k + 1) - vertex(k));
}

double Contour::edge_length(std::size_t k) const { return distance(vertex(k), vertex(k + 1)); }

double signed_area(std::span<const Point> polygon) {
  double a = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t k = 0; k < n; ++k) a += cross(polygon[k], polygon[(k + 1) % n]);
  return 0.5 * a;
}

double polygon_perimeter(std::span<const Point> polygon) {
  double s = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t k = 0; k < n; ++k) s += distance(polygon[k], polygon[(k + 1) % n]);
  return s;
}

double polyline_length(std::span<const Point> polyline) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < polyline.size(); ++k) s += distance(polyline[k], polyline[k + 1]);
  return s;
}

double contour_length(const Contour& contour) { return polygon_perimeter(contour.vertices); }

bool point_in_polygon(Point p, std::span<const Point> polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = polygon[i];
    const Point b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

Point closest_point_on_segment(Point p, Point a, Point b) {
  const Point d = b - a;
  const double l2 = dot(d, d);
  if (l2 == 0.0) return a;
  const double t = std::clamp(dot(p - a, d) / l2, 0.0, 1.0);
  return a + t * d;
}

double distance_point_segment(Point p, Point a, Point b) {
  return distance(p, closest_point_on_segment(p, a, b));
}

double distance_segment_segment(Point a, Point b, Point c, Point d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({distance_point_segment(a, c, d), distance_point_segment(b, c, d),
                   distance_point_segment(c, a, b), distance_point_segment(d, a, b)});
}

double distance_to_polygon_boundary(Point p, std::span<const Point> polygon) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = polygon.size();
  for (std::size_t k = 0; k < n; ++k) {
    best = std::min(best, distance_point_segment(p, polygon[k], polygon[(k + 1) % n]));
  }
  return best;
}

double distance_to_boundary(Point p, const Configuration& config, bool include_bundle) {
  double best = std::numeric_limits<double>::infinity();
  for_each_boundary_segment(config, include_bundle, [&](Point a, Point b) {
    best = std::min(best, distance_point_segment(p, a, b));
  });
  return best;
}

bool in_region_interior(Point p, const Configuration& config, double tol) {
  for (const Region& r : config.regions) {
    if (point_in_polygon(p, r.vertices) && distance_to_polygon_boundary(p, r.vertices) > tol) {
      return true;
    }
  }
  return false;
}

Point project_to_region_boundary(Point p, const Configuration& config) {
  double best = std::numeric_limits<double>::infinity();
  Point out = p;
  for_each_boundary_segment(config, false, [&](Point a, Point b) {
    const Point c = closest_point_on_segment(p, a, b);
    const double d = distance(p, c);
    if (d < best) {
      best = d;
      out = c;
    }
  });
  return out;
}

std::vector<Point> bundle_endpoints(const Configuration& config) {
  std::vector<Point> out;
  for (const Polyline& line : config.bundle) {
    if (line.empty()) continue;
    out.push_back(line.front());
    if (line.size() > 1) out.push_back(line.back());
  }
  return out;
}

Region make_region(std::vector<Point> vertices, std::vector<bool> smooth) {
  if (smooth.empty()) smooth.assign(vertices.size(), false);
  if (smooth.size() != vertices.size()) {
    throw GeometryError("smooth flags do not match region vertex count");
  }
  if (signed_area(vertices) < 0.0) {
    std::reverse(vertices.begin(), vertices.end());
    std::reverse(smooth.begin(), smooth.end());
  }
  return Region{std::move(vertices), std::move(smooth)};
}

bool is_simple(std::span<const Point> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  double scale = 0.0;
  for (Point p : polygon) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
  const double eps = 1e-12 * (1.0 + scale);
  for (std::size_t i = 0; i < n; ++i) {
    if (distance(polygon[i], polygon[(i + 1) % n]) <= eps) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = polygon[i];
    const Point b = polygon[(i + 1) % n];
    // Adjacent edge folding back onto this one.
    const Point c = polygon[(i + 2) % n];
    const Point d1 = b - a;
    const Point d2 = c - b;
    if (std::abs(cross(d1, d2)) <= 1e-12 * norm(d1) * norm(d2) && dot(d1, d2) < 0.0) return false;
    const double min_x = std::min(a.x, b.x) - eps;
    const double max_x = std::max(a.x, b.x) + eps;
    const double min_y = std::min(a.y, b.y) - eps;
    const double max_y = std::max(a.y, b.y) + eps;
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      const Point p = polygon[j];
      const Point q = polygon[(j + 1) % n];
      if (std::max(p.x, q.x) < min_x || std::min(p.x, q.x) > max_x ||
          std::max(p.y, q.y) < min_y || std::min(p.y, q.y) > max_y) {
        continue;
      }
      if (distance_segment_segment(a, b, p, q) <= eps) return false;
    }
  }
  return true;
}

void validate(const Configuration& config, double tau_kink) {
  const Rect& dom = config.domain;
  if (!(dom.x_max > dom.x_min && dom.y_max > dom.y_min)) throw GeometryError("empty domain");
  auto strictly_inside = [&](Point p) {
    return p.x > dom.x_min && p.x < dom.x_max && p.y > dom.y_min && p.y < dom.y_max;
  };
  for (std::size_t r = 0; r < config.regions.size(); ++r) {
    const Region& region = config.regions[r];
    const std::string name = "region " + std::to_string(r);
    if (region.vertices.size() < 3) throw GeometryError(name + " has fewer than 3 vertices");
    if (region.smooth.size() != region.vertices.size()) {
      throw GeometryError(name + " smooth flags do not match vertices");
    }
    if (std::abs(signed_area(region.vertices)) <= 0.0) throw GeometryError(name + " has zero area");
    if (!is_simple(region.vertices)) throw GeometryError(name + " is not simple");
    for (Point p : region.vertices) {
      if (!strictly_inside(p)) throw GeometryError(name + " is not strictly inside the domain");
    }
  }
  for (std::size_t r = 0; r < config.regions.size(); ++r) {
    for (std::size_t s = r + 1; s < config.regions.size(); ++s) {
      const auto& a = config.regions[r].vertices;
      const auto& b = config.regions[s].vertices;
      double sep = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
          sep = std::min(sep, distance_segment_segment(a[i], a[(i + 1) % a.size()], b[j],
                                                       b[(j + 1) % b.size()]));
        }
      }
      if (sep <= 0.0 || point_in_polygon(a.front(), b) || point_in_polygon(b.front(), a)) {
        throw GeometryError("regions " + std::to_string(r) + " and " + std::to_string(s) +
                            " are not disjoint");
      }
    }
  }
  for (std::size_t l = 0; l < config.bundle.size(); ++l) {
    const Polyline& line = config.bundle[l];
    const std::string name = "bundle polyline " + std::to_string(l);
    if (line.size() < 2) throw GeometryError(name + " has fewer than 2 vertices");
    for (Point p : line) {
      if (!strictly_inside(p)) throw GeometryError(name + " is not strictly inside the domain");
    }
    for (std::size_t k = 0; k + 1 < line.size(); ++k) {
      for (const Region& region : config.regions) {
        const auto& v = region.vertices;
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (distance_segment_segment(line[k], line[k + 1], v[i], v[(i + 1) % v.size()]) <= 0.0) {
            throw GeometryError(name + " touches a region");
          }
        }
        if (point_in_polygon(line[k], v)) throw GeometryError(name + " lies inside a region");
      }
    }
  }
  (void)kink_set(config, tau_kink);
}

std::vector<KinkRecord> kink_set(const Configuration& config, double tau_kink) {
  std::vector<KinkRecord> kinks;
  for (std::size_t r = 0; r < config.regions.size(); ++r) {
    const Region& region = config.regions[r];
    const auto& v = region.vertices;
    const std::size_t n = v.size();
    for (std::size_t k = 0; k < n; ++k) {
      if (!region.smooth.empty() && region.smooth[k]) continue;
      const Point d_in = v[k] - v[(k + n - 1) % n];
      const Point d_out = v[(k + 1) % n] - v[k];
      // Signed turning angle; positive turns keep the interior on the left.
      const double turning = std::atan2(cross(d_in, d_out), dot(d_in, d_out));
      if (std::abs(turning) <= tau_kink) continue;
      const double inner = kPi - turning;
      const double outer = 2.0 * kPi - inner;
      if (inner < tau_kink || outer < tau_kink) {
        throw GeometryError("non-generic configuration: cusp at region " + std::to_string(r) +
                            " vertex " + std::to_string(k));
      }
      kinks.push_back({v[k], r, k, outer, inner});
    }
  }
  return kinks;
}

Spans min_spans(const Configuration& config, double tau_kink) {
  const auto kinks = kink_set(config, tau_kink);
  if (kinks.empty()) throw GeometryError("no kinks");
  Spans s{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (const KinkRecord& k : kinks) {
    s.outer_min = std::min(s.outer_min, k.outer_span);
    s.inner_min = std::min(s.inner_min, k.inner_span);
  }
  return s;
}

namespace {

// Real part on the arc-length circle [0, total): a set of intervals (start,
// length), possibly wrapping, plus isolated contact positions.
struct ArcLabels {
  double total = 0.0;
  std::vector<std::pair<double, double>> real;
  std::vector<double> contacts;
};

bool arc_contains(const std::pair<double, double>& iv, double s, double total) {
  double rel = s - iv.first;
  if (rel < 0.0) rel += total;
  return rel <= iv.second;
}

}  // namespace

Decomposition decompose(const Contour& contour, const Configuration& config,
                        const DecomposeOptions& options) {
  const auto& v = contour.vertices;
  const std::size_t n = v.size();
  if (n < 3) throw GeometryError("inadmissible contour: fewer than 3 vertices");
  if (in_region_interior(v.front(), config, options.tol)) {
    throw GeometryError("inadmissible contour: intersects Q interior");
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (const Region& region : config.regions) {
      if (segment_enters_polygon(v[k], v[(k + 1) % n], region.vertices, options.tol)) {
        throw GeometryError("inadmissible contour: intersects Q interior");
      }
    }
  }

  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) cum[k + 1] = cum[k] + distance(v[k], v[(k + 1) % n]);
  const double total = cum[n];
  if (total <= 0.0) throw GeometryError("inadmissible contour: zero length");
  const double snap = 1e-12 * std::max(1.0, total);

  // Raw real intervals per edge, mapped to arc length and merged.
  std::vector<std::pair<double, double>> raw;
  for (std::size_t k = 0; k < n; ++k) {
    const Point p = v[k];
    const Point q = v[(k + 1) % n];
    const double len = cum[k + 1] - cum[k];
    if (len <= 0.0) continue;
    std::vector<Interval> ivs;
    for_each_boundary_segment(config, options.include_bundle, [&](Point a, Point b) {
      Interval iv = capsule_interval(p, q, a, b, options.tol);
      iv = intersect(iv, {0.0, 1.0});
      if (!iv.empty()) ivs.push_back(iv);
    });
    std::sort(ivs.begin(), ivs.end(), [](Interval a, Interval b) { return a.lo < b.lo; });
    for (const Interval& iv : ivs) {
      const double s0 = cum[k] + iv.lo * len;
      const double s1 = cum[k] + iv.hi * len;
      if (!raw.empty() && s0 <= raw.back().second + snap) {
        raw.back().second = std::max(raw.back().second, s1);
      } else {
        raw.push_back({s0, s1});
      }
    }
  }

  ArcLabels arc;
  arc.total = total;
  for (auto [s0, s1] : raw) arc.real.push_back({s0, s1 - s0});
  // Join the interval touching the end of the circle with the one at its start.
  if (arc.real.size() > 1 && arc.real.front().first <= snap &&
      arc.real.back().first + arc.real.back().second >= total - snap) {
    arc.real.back().second += arc.real.front().second + arc.real.front().first;
    arc.real.erase(arc.real.begin());
  }
  if (arc.real.size() == 1 && arc.real.front().second >= total - snap) {
    arc.real.front() = {0.0, total};
  }

  const double min_real = options.effective_min_real_length();
  if (min_real > 0.0 && !(arc.real.size() == 1 && arc.real.front().second >= total)) {
    // Short real runs become contact points, placed on a vertex when the run
    // contains one.
    std::vector<std::pair<double, double>> kept;
    for (const auto& iv : arc.real) {
      if (iv.second >= min_real) {
        kept.push_back(iv);
        continue;
      }
      const double mid = std::fmod(iv.first + 0.5 * iv.second, total);
      double where = mid;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) {
        if (arc_contains(iv, cum[k], total)) {
          double d = std::abs(cum[k] - mid);
          d = std::min(d, total - d);
          if (d < best) {
            best = d;
            where = cum[k];
          }
        }
      }
      arc.contacts.push_back(where);
    }
    arc.real = std::move(kept);

    // Short imaginary gaps between real features are absorbed.
    struct Feature {
      double start;
      double length;
    };
    std::vector<Feature> features;
    for (const auto& iv : arc.real) features.push_back({iv.first, iv.second});
    for (double c : arc.contacts) features.push_back({c, 0.0});
    std::sort(features.begin(), features.end(),
              [](const Feature& a, const Feature& b) { return a.start < b.start; });
    if (!features.empty()) {
      const std::size_t m = features.size();
      // gap[i] is the imaginary stretch following feature i.
      std::vector<double> gap(m);
      for (std::size_t i = 0; i < m; ++i) {
        const Feature& a = features[i];
        const Feature& b = features[(i + 1) % m];
        double g = b.start - (a.start + a.length);
        if (i + 1 == m) g += total;
        gap[i] = std::max(0.0, g);
      }
      std::vector<bool> fill(m);
      std::size_t filled = 0;
      for (std::size_t i = 0; i < m; ++i) {
        fill[i] = gap[i] < min_real;
        filled += fill[i] ? 1 : 0;
      }
      if (filled == m) {
        arc.real = {{0.0, total}};
        arc.contacts.clear();
      } else {
        // Start from a feature preceded by an unfilled gap.
        std::size_t first = 0;
        while (fill[(first + m - 1) % m]) ++first;
        std::vector<std::pair<double, double>> merged;
        std::vector<double> contacts;
        std::size_t i = first;
        for (std::size_t visited = 0; visited < m;) {
          double start = features[i].start;
          double length = features[i].length;
          std::size_t j = i;
          ++visited;
          while (fill[j] && visited < m) {
            const std::size_t nxt = (j + 1) % m;
            length += gap[j] + features[nxt].length;
            j = nxt;
            ++visited;
          }
          if (length > 0.0) {
            merged.push_back({start, length});
          } else {
            contacts.push_back(start);
          }
          i = (j + 1) % m;
        }
        arc.real = std::move(merged);
        arc.contacts = std::move(contacts);
      }
    }
  }

  // Breakpoints: vertices, interval ends and contacts.
  std::vector<double> cuts(cum.begin(), cum.end() - 1);
  for (const auto& iv : arc.real) {
    if (iv.second >= total) continue;
    cuts.push_back(iv.first);
    cuts.push_back(std::fmod(iv.first + iv.second, total));
  }
  for (double c : arc.contacts) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  // A contour edge leaving the boundary at an angle stays within tol of it for
  // a short stretch; breakpoints that close to a boundary vertex move onto it.
  const double vertex_snap = std::max(snap, 2.0 * options.tol);
  std::vector<bool> vertex_on_boundary(n);
  for (std::size_t k = 0; k < n; ++k) {
    vertex_on_boundary[k] = distance_to_boundary(v[k], config, options.include_bundle) <= options.tol;
  }
  // Likewise for the feet of boundary vertices lying on the contour.
  std::vector<double> feet;
  auto add_foot = [&](Point w) {
    for (std::size_t k = 0; k < n; ++k) {
      const Point p = v[k];
      const Point q = v[(k + 1) % n];
      const double len = cum[k + 1] - cum[k];
      if (len <= 0.0 || distance_point_segment(w, p, q) > options.tol) continue;
      feet.push_back(cum[k] + std::clamp(dot(w - p, q - p) / len, 0.0, len));
    }
  };
  for (const Region& region : config.regions) {
    for (Point w : region.vertices) add_foot(w);
  }
  if (options.include_bundle) {
    for (const Polyline& line : config.bundle) {
      for (Point w : line) add_foot(w);
    }
  }
  std::vector<double> positions;
  for (double c : cuts) {
    if (c >= total - snap) c = 0.0;
    const auto it = std::lower_bound(cum.begin(), cum.end(), c);
    const std::size_t hi = static_cast<std::size_t>(std::distance(cum.begin(), it));
    double best = std::numeric_limits<double>::infinity();
    double to = c;
    for (std::size_t k : {hi, hi == 0 ? n : hi - 1}) {
      if (k > n) continue;
      const double d = std::abs(cum[k] - c);
      const bool ok = d <= snap || (d <= vertex_snap && vertex_on_boundary[k % n]);
      if (ok && d < best) {
        best = d;
        to = cum[k];
      }
    }
    for (double f : feet) {
      double d = std::abs(f - c);
      d = std::min(d, total - d);
      if (d <= vertex_snap && d < best) {
        best = d;
        to = f;
      }
    }
    c = to;
    if (c >= total - snap) c = 0.0;
    positions.push_back(c);
  }
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end(),
                              [&](double a, double b) { return b - a <= snap; }),
                  positions.end());

  auto point_at = [&](double s) {
    const auto it = std::upper_bound(cum.begin(), cum.end(), s);
    const std::size_t k = static_cast<std::size_t>(std::distance(cum.begin(), it)) - 1;
    if (s == cum[k]) return v[k];
    const double t = (s - cum[k]) / (cum[k + 1] - cum[k]);
    return v[k] + t * (v[(k + 1) % n] - v[k]);
  };
  auto is_real = [&](double s) {
    for (const auto& iv : arc.real) {
      if (arc_contains(iv, s, total)) return true;
    }
    return false;
  };

  Decomposition out;
  Contour& lab = out.labeled;
  const std::size_t m = positions.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double s0 = positions[i];
    const double s1 = (i + 1 < m) ? positions[i + 1] : total;
    lab.vertices.push_back(point_at(s0));
    const bool real = is_real(0.5 * (s0 + s1));
    lab.labels.push_back(real ? EdgeLabel::real : EdgeLabel::imaginary);
    (real ? out.real_length : out.imaginary_length) += s1 - s0;
  }
  lab.on_boundary.assign(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    const bool prev_real = lab.labels[(i + m - 1) % m] == EdgeLabel::real;
    const bool next_real = lab.labels[i] == EdgeLabel::real;
    lab.on_boundary[i] = prev_real || next_real;
  }
  for (double c : arc.contacts) {
    for (std::size_t i = 0; i < m; ++i) {
      if (std::abs(positions[i] - c) <= vertex_snap || (c == 0.0 && positions[i] == 0.0)) {
        lab.on_boundary[i] = true;
      }
    }
  }
  out.components = imaginary_components(lab);
  out.imaginary_loop = out.real_length == 0.0 &&
                       std::none_of(lab.on_boundary.begin(), lab.on_boundary.end(),
                                    [](bool b) { return b; });
  return out;
}

std::vector<ImaginaryComponent> imaginary_components(const Contour& labeled) {
  std::vector<ImaginaryComponent> out;
  const std::size_t n = labeled.size();
  if (!labeled.labeled() || n == 0) return out;
  for (std::size_t k = 0; k < n; ++k) {
    if (!labeled.on_boundary[k] || labeled.labels[k] != EdgeLabel::imaginary) continue;
    ImaginaryComponent c;
    c.start_vertex = k;
    std::size_t w = k;
    do {
      c.length += labeled.edge_length(w);
      ++c.edge_count;
      w = (w + 1) % n;
    } while (!labeled.on_boundary[w] && c.edge_count < n);
    c.end_vertex = w;
    out.push_back(c);
  }
  return out;
}

std::vector<JunctionRecord> junction_set(const Decomposition& decomposition,
                                         const Configuration& config,
                                         const DecomposeOptions& options, double align_tol) {
  if (decomposition.imaginary_loop) {
    throw GeometryError("imaginary loop without endpoints");
  }
  const Contour& lab = decomposition.labeled;
  const std::size_t n = lab.size();
  const double tol = options.tol;

  auto boundary_directions = [&](Point z) {
    std::vector<Point> dirs;
    auto add = [&](Point d) {
      for (Point e : dirs) {
        if (dot(d, e) > 1.0 - 1e-12) return;
      }
      dirs.push_back(d);
    };
    for_each_boundary_segment(config, options.include_bundle, [&](Point a, Point b) {
      if (distance_point_segment(z, a, b) > tol) return;
      const double len = distance(a, b);
      if (len == 0.0) return;
      const double s = std::clamp(dot(z - a, b - a) / (len * len), 0.0, 1.0);
      if (s * len > tol) add(unit(a - b));
      if ((1.0 - s) * len > tol) add(unit(b - a));
    });
    return dirs;
  };

  std::vector<JunctionRecord> out;
  for (std::size_t c = 0; c < decomposition.components.size(); ++c) {
    const ImaginaryComponent& comp = decomposition.components[c];
    if (comp.start_vertex == comp.end_vertex) {
      throw GeometryError("imaginary component endpoints are not distinct");
    }
    for (int side = 0; side < 2; ++side) {
      JunctionRecord j;
      j.component = c;
      j.at_start = side == 0;
      if (j.at_start) {
        j.vertex = comp.start_vertex;
        j.t_im = lab.edge_direction(comp.start_vertex);
        const std::size_t prev = (comp.start_vertex + n - 1) % n;
        j.t_re = lab.edge_direction(prev);
        j.hinge = lab.labels[prev] == EdgeLabel::imaginary;
      } else {
        j.vertex = comp.end_vertex;
        const std::size_t last = (comp.end_vertex + n - 1) % n;
        j.t_im = -1.0 * lab.edge_direction(last);
        j.t_re = -1.0 * lab.edge_direction(comp.end_vertex);
        j.hinge = lab.labels[comp.end_vertex] == EdgeLabel::imaginary;
      }
      j.point = lab.vertex(j.vertex);
      if (distance_to_boundary(j.point, config, options.include_bundle) > tol) {
        throw GeometryError("dangling imaginary endpoint at vertex " + std::to_string(j.vertex));
      }
      j.turn = std::acos(std::clamp(dot(j.t_im, j.t_re), -1.0, 1.0));
      const Point back = -1.0 * j.t_re;
      for (Point d : boundary_directions(j.point)) {
        if (!j.hinge && std::acos(std::clamp(dot(d, back), -1.0, 1.0)) < align_tol) continue;
        const double a = std::acos(std::clamp(dot(d, j.t_im), -1.0, 1.0));
        if (!j.has_idle || a < j.idle_angle) {
          j.idle_angle = a;
          j.t_idle = d;
          j.has_idle = true;
        }
      }
      if (!j.has_idle) j.idle_angle = kPi;
      out.push_back(j);
    }
  }
  return out;
}

Admissibility is_admissible(const Contour& contour, const Configuration& config, double tol) {
  const auto& v = contour.vertices;
  const std::size_t n = v.size();
  if (n < 3) return {false, "not closed: fewer than 3 vertices"};
  if (!is_simple(v)) return {false, "not simple"};
  for (std::size_t k = 0; k < n; ++k) {
    for (const Region& region : config.regions) {
      if (segment_enters_polygon(v[k], v[(k + 1) % n], region.vertices, tol)) {
        return {false, "intersects Q interior at edge " + std::to_string(k)};
      }
    }
  }
  for (const Region& region : config.regions) {
    if (in_region_interior(v.front(), Configuration{{region}, {}, config.domain}, tol)) {
      return {false, "intersects Q interior at vertex 0"};
    }
  }
  for (const Polyline& line : config.bundle) {
    if (line.size() < 2) continue;
    const double line_len = polyline_length(line);
    double offset = 0.0;
    for (std::size_t s = 0; s + 1 < line.size(); ++s) {
      const Point a = line[s];
      const Point b = line[s + 1];
      const double seg = distance(a, b);
      for (std::size_t k = 0; k < n; ++k) {
        const Point p = v[k];
        const Point q = v[(k + 1) % n];
        if (distance_segment_segment(a, b, p, q) > tol) continue;
        // Portion of the bundle segment within tol of the contour edge, in
        // arc length along the polyline.
        Interval iv = intersect(capsule_interval(a, b, p, q, tol), {0.0, 1.0});
        if (iv.empty()) continue;
        const double s0 = offset + iv.lo * seg;
        const double s1 = offset + iv.hi * seg;
        const bool near_start = s1 <= 2.0 * tol;
        const bool near_end = s0 >= line_len - 2.0 * tol;
        if (!near_start && !near_end) {
          return {false, "intersects L interior at edge " + std::to_string(k)};
        }
      }
      offset += seg;
    }
  }
  return {true, ""};
}

Point Similarity::apply(Point p) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return Point{scale * (c * p.x - s * p.y), scale * (s * p.x + c * p.y)} + translation;
}

Configuration transformed(const Configuration& config, const Similarity& t) {
  Configuration out = config;
  for (Region& r : out.regions) {
    for (Point& p : r.vertices) p = t.apply(p);
    if (signed_area(r.vertices) < 0.0) {
      std::reverse(r.vertices.begin(), r.vertices.end());
      std::reverse(r.smooth.begin(), r.smooth.end());
    }
  }
  for (Polyline& line : out.bundle) {
    for (Point& p : line) p = t.apply(p);
  }
  const Rect& d = config.domain;
  const Point corners[4] = {t.apply({d.x_min, d.y_min}), t.apply({d.x_max, d.y_min}),
                            t.apply({d.x_max, d.y_max}), t.apply({d.x_min, d.y_max})};
  out.domain = {corners[0].x, corners[0].y, corners[0].x, corners[0].y};
  for (Point c : corners) {
    out.domain.x_min = std::min(out.domain.x_min, c.x);
    out.domain.y_min = std::min(out.domain.y_min, c.y);
    out.domain.x_max = std::max(out.domain.x_max, c.x);
    out.domain.y_max = std::max(out.domain.y_max, c.y);
  }
  return out;
}

Contour transformed(const Contour& contour, const Similarity& t) {
  Contour out = contour;
  for (Point& p : out.vertices) p = t.apply(p);
  return out;
}

}  // namespace illusory
