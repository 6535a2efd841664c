#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "illusory/geometry.hpp"

namespace illusory {

class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMinFieldSize = 8;

/// Unit-spaced grid; cell (i, j) sits at x = i, y = j, stored row by row.
struct ScalarField {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(int w, int h, double fill = 0.0);

  [[nodiscard]] std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(width) + static_cast<std::size_t>(i);
  }
  double& operator()(int i, int j) { return values[index(i, j)]; }
  double operator()(int i, int j) const { return values[index(i, j)]; }

  [[nodiscard]] bool same_shape(const ScalarField& other) const {
    return width == other.width && height == other.height;
  }
  /// True when p lies in [0, width-1] x [0, height-1].
  [[nodiscard]] bool contains(Point p) const;
  /// Bilinear interpolation; throws FieldError outside the grid.
  [[nodiscard]] double sample(Point p) const;

  [[nodiscard]] double min() const;
  [[nodiscard]] double max() const;
  [[nodiscard]] double sum() const;
  [[nodiscard]] bool all_finite() const;
};

struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> cells;

  Mask() = default;
  Mask(int w, int h) : width(w), height(h), cells(static_cast<std::size_t>(w) * h, 0) {}

  [[nodiscard]] bool operator()(int i, int j) const {
    return cells[static_cast<std::size_t>(j) * width + i] != 0;
  }
  void set(int i, int j, bool v) { cells[static_cast<std::size_t>(j) * width + i] = v ? 1 : 0; }
  [[nodiscard]] std::size_t count() const;
};

}  // namespace illusory
