#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace illusory {

inline constexpr double kPi = 3.14159265358979323846;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline Point perp(Point a) { return {-a.y, a.x}; }
Point unit(Point a);

using Polyline = std::vector<Point>;

/// A simple closed polygon bounding one real object. Vertices are stored
/// counter-clockwise. `smooth[k]` marks vertices that sample a smooth arc
/// (polygonization artifacts); those are never reported as kinks.
struct Region {
  std::vector<Point> vertices;
  std::vector<bool> smooth;
};

struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
};

/// Real objects Q (regions), real contour bundle L (open polylines) and the
/// image domain.
struct Configuration {
  std::vector<Region> regions;
  std::vector<Polyline> bundle;
  Rect domain;
};

enum class EdgeLabel { real, imaginary };

/// Closed polygonal curve. `labels` and `on_boundary` are empty until the
/// contour has been decomposed; `labels[k]` describes the edge from vertex k to
/// vertex k+1 (cyclically) and `on_boundary[k]` marks vertices lying on the
/// boundary of the configuration, including isolated contact points.
struct Contour {
  std::vector<Point> vertices;
  std::vector<EdgeLabel> labels;
  std::vector<bool> on_boundary;

  [[nodiscard]] bool labeled() const { return !labels.empty(); }
  [[nodiscard]] std::size_t size() const { return vertices.size(); }
  [[nodiscard]] Point vertex(std::size_t k) const { return vertices[k % vertices.size()]; }
  [[nodiscard]] Point edge_direction(std::size_t k) const;
  [[nodiscard]] double edge_length(std::size_t k) const;
};

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KinkRecord {
  Point point;
  std::size_t region = 0;
  std::size_t vertex = 0;
  double outer_span = 0.0;
  double inner_span = 0.0;
};

struct Spans {
  double outer_min = 0.0;
  double inner_min = 0.0;
};

struct DecomposeOptions {
  /// Distance within which a contour point counts as lying on the boundary.
  double tol = 1e-6;
  /// Real runs shorter than this collapse to a contact point and imaginary
  /// gaps shorter than this are absorbed into the real part. Negative selects
  /// 8 * tol.
  double min_real_length = -1.0;
  /// Whether bundle polylines count as real boundary.
  bool include_bundle = true;

  [[nodiscard]] double effective_min_real_length() const {
    return min_real_length < 0.0 ? 8.0 * tol : min_real_length;
  }
};

/// Maximal run of imaginary edges between two boundary vertices.
struct ImaginaryComponent {
  std::size_t start_vertex = 0;  // boundary vertex the run leaves
  std::size_t end_vertex = 0;    // boundary vertex the run reaches
  std::size_t edge_count = 0;
  double length = 0.0;
};

struct Decomposition {
  double real_length = 0.0;
  double imaginary_length = 0.0;
  Contour labeled;
  std::vector<ImaginaryComponent> components;
  /// True when the whole contour is imaginary and never touches the boundary.
  bool imaginary_loop = false;
};

struct JunctionRecord {
  Point point;
  std::size_t vertex = 0;     // index into the labeled contour
  std::size_t component = 0;  // index into Decomposition::components
  bool at_start = true;       // start or end of the component
  double turn = 0.0;
  double idle_angle = kPi;
  /// The other side of the junction is imaginary as well (shared hinge).
  bool hinge = false;
  bool has_idle = false;
  Point t_re;
  Point t_im;
  Point t_idle;
};

struct Admissibility {
  bool ok = true;
  std::string diagnostic;

  explicit operator bool() const { return ok; }
};

double signed_area(std::span<const Point> polygon);
double polygon_perimeter(std::span<const Point> polygon);
double polyline_length(std::span<const Point> polyline);
double contour_length(const Contour& contour);

/// Crossing-number test; points on the boundary may go either way.
bool point_in_polygon(Point p, std::span<const Point> polygon);
double distance_point_segment(Point p, Point a, Point b);
Point closest_point_on_segment(Point p, Point a, Point b);
double distance_segment_segment(Point a, Point b, Point c, Point d);
double distance_to_polygon_boundary(Point p, std::span<const Point> polygon);
/// Distance from p to dQ (and to L when include_bundle is set).
double distance_to_boundary(Point p, const Configuration& config, bool include_bundle = true);
/// True when p lies in the interior of some region at a distance above tol
/// from its boundary.
bool in_region_interior(Point p, const Configuration& config, double tol);
/// Nearest point of dQ to p.
Point project_to_region_boundary(Point p, const Configuration& config);
std::vector<Point> bundle_endpoints(const Configuration& config);

/// Build a region with counter-clockwise orientation; `smooth` may be empty.
Region make_region(std::vector<Point> vertices, std::vector<bool> smooth = {});

/// Check every configuration invariant; throws GeometryError naming the first
/// violation.
void validate(const Configuration& config, double tau_kink = 0.1);

std::vector<KinkRecord> kink_set(const Configuration& config, double tau_kink = 0.1);
Spans min_spans(const Configuration& config, double tau_kink = 0.1);

Decomposition decompose(const Contour& contour, const Configuration& config,
                        const DecomposeOptions& options = {});
std::vector<ImaginaryComponent> imaginary_components(const Contour& labeled);

std::vector<JunctionRecord> junction_set(const Decomposition& decomposition,
                                         const Configuration& config,
                                         const DecomposeOptions& options = {},
                                         double align_tol = 1e-6);

Admissibility is_admissible(const Contour& contour, const Configuration& config,
                            double tol = 1e-6);
/// Simplicity test on a closed vertex list.
bool is_simple(std::span<const Point> polygon);

// Similarity transforms, used by invariance checks.
struct Similarity {
  double scale = 1.0;
  double angle = 0.0;
  Point translation;

  [[nodiscard]] Point apply(Point p) const;
};
Configuration transformed(const Configuration& config, const Similarity& t);
Contour transformed(const Contour& contour, const Similarity& t);

}  // namespace illusory
