#pragma once

#include <vector>

#include "illusory/field.hpp"
#include "illusory/geometry.hpp"

namespace illusory {

struct ExtractedContour {
  Contour contour;
  /// Positive when the loop runs counter-clockwise, i.e. encloses a positive region.
  double signed_area = 0.0;
  double real_length = 0.0;
  double imaginary_length = 0.0;
};

struct ExtractionResult {
  std::vector<ExtractedContour> contours;  // largest |area| first
  std::vector<Polyline> fragments;         // pieces ending on the grid border
};

/// Marching squares on the zero level set; the positive side is on the left
/// of every loop. Saddles follow the sign of the cell-centre average.
ExtractionResult zero_contour(const ScalarField& phi);

/// Symmetric Hausdorff distance between two closed polygons, sampled at most
/// `step` apart with exact point-to-segment distances.
double hausdorff(const Contour& a, const Contour& b, double step = 0.25);

struct Classification {
  double real_length = 0.0;
  double imaginary_length = 0.0;
  Decomposition decomposition;
};

/// Raster decomposition: tolerance in cells, no minimum real run.
Classification classify(const Contour& contour, const Configuration& config, double tol = 1.0);

/// Fill the per-contour lengths of `result`.
void annotate(ExtractionResult& result, const Configuration& config, double tol = 1.0);

/// Largest distance of an imaginary component's interior vertices from its chord.
double max_chord_deviation(const Decomposition& decomposition);

}  // namespace illusory
