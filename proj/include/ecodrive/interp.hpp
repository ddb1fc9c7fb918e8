#pragma once

#include <vector>

namespace ecodrive {

/// y(x) by linear interpolation between breakpoints; held constant outside.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  PiecewiseLinear(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const;

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  bool empty() const { return xs_.empty(); }
  double x_min() const { return xs_.front(); }
  double x_max() const { return xs_.back(); }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// Rectangular grid z(x, y) with bilinear interpolation. Values are stored
/// row-major: one row per x breakpoint.
class BilinearGrid {
 public:
  BilinearGrid() = default;
  BilinearGrid(std::vector<double> xs, std::vector<double> ys, std::vector<double> values);

  /// Queries outside the grid are clamped to the boundary.
  double operator()(double x, double y) const;

  double at(std::size_t ix, std::size_t iy) const { return values_[ix * ys_.size() + iy]; }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  double max_value() const;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<double> values_;
};

}  // namespace ecodrive
