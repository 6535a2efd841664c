#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "illusory/energy.hpp"
#include "illusory/field.hpp"
#include "illusory/geometry.hpp"

namespace illusory {

class SceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SceneKind { kanizsa_triangle, kanizsa_square, bundle_square, complex_bar, custom };

std::string to_string(SceneKind kind);
/// Accepts the dashed names used on the command line; throws SceneError.
SceneKind parse_scene_kind(const std::string& name);

/// Non-positive geometric values select the per-kind defaults.
struct SceneSpec {
  SceneKind kind = SceneKind::kanizsa_triangle;
  int width = 128;
  int height = 128;
  double radius = 0.0;       // pac-man radius
  double mouth_angle = 0.0;  // radians, default pi/2; the mouth is bisected by the direction to the centroid
  double side = 0.0;         // distance between inducer centres / square side
  double bundle_length = 0.0;  // spoke length for bundle-square
  double anchor_offset = 0.0;  // bundle-square: distance of the corner spokes from the corners
  int arc_vertices = 64;
  Configuration custom;  // used when kind == custom
};

struct GeneratedScene {
  SceneSpec spec;
  Configuration config;
  std::optional<Contour> ideal;
};

GeneratedScene generate(const SceneSpec& spec);

/// Pac-man centred at `apex` with the mouth opening between unit directions
/// `dir_a` and `dir_b` (counter-clockwise from dir_b to dir_a).
Region pacman(Point apex, double radius, Point dir_a, Point dir_b, int arc_vertices);

/// 1 at cell centres inside a region or within sqrt(2)/2 of a bundle polyline.
ScalarField rasterize(const Configuration& config, int width, int height);
/// Cells held at -1 by the supervision reset: region interiors and bundle strokes.
Mask supervision_mask(const Configuration& config, int width, int height);

ScalarField mollify(const ScalarField& u, double sigma);
ScalarField edge_indicator(const ScalarField& u_sigma, double lambda);
ScalarField speed_field(const ScalarField& g, const EnergyWeights& w);

/// Midpoint-rule line integral of G over the closed contour with steps of
/// at most `max_step` cells.
double relaxed_energy(const Contour& contour, const ScalarField& G, double max_step = 0.25);
double relaxed_energy(std::span<const Point> polyline, bool closed, const ScalarField& G,
                      double max_step = 0.25);

struct FieldParams {
  double sigma = 2.0;
  double lambda = 100.0;
  EnergyWeights weights;
};

struct SceneFields {
  ScalarField u;
  ScalarField u_sigma;
  ScalarField g;
  ScalarField G;
  Mask mask;
};

SceneFields compute_fields(const Configuration& config, int width, int height, const FieldParams& p);

}  // namespace illusory
