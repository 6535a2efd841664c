#include "illusory/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace illusory {

ScalarField::ScalarField(int w, int h, double fill) : width(w), height(h) {
  if (w < kMinFieldSize || h < kMinFieldSize) {
    throw FieldError("field must be at least " + std::to_string(kMinFieldSize) + " cells per side, got " +
                     std::to_string(w) + "x" + std::to_string(h));
  }
  values.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

bool ScalarField::contains(Point p) const {
  return p.x >= 0.0 && p.y >= 0.0 && p.x <= width - 1 && p.y <= height - 1;
}

double ScalarField::sample(Point p) const {
  if (!contains(p)) {
    throw FieldError("sample point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                     ") outside the grid");
  }
  const int i = std::min(static_cast<int>(std::floor(p.x)), width - 2);
  const int j = std::min(static_cast<int>(std::floor(p.y)), height - 2);
  const double fx = p.x - i;
  const double fy = p.y - j;
  const double a = (*this)(i, j) * (1.0 - fx) + (*this)(i + 1, j) * fx;
  const double b = (*this)(i, j + 1) * (1.0 - fx) + (*this)(i + 1, j + 1) * fx;
  return a * (1.0 - fy) + b * fy;
}

double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }
double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }
double ScalarField::sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

bool ScalarField::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

}  // namespace illusory
