#include "ecodrive/interp.hpp"

#include <algorithm>
#include <stdexcept>

namespace ecodrive {
namespace {

void require_increasing(const std::vector<double>& xs, const char* what) {
  if (xs.size() < 2) throw std::invalid_argument(std::string(what) + ": need at least 2 breakpoints");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) {
      throw std::invalid_argument(std::string(what) + ": breakpoints must be strictly increasing");
    }
  }
}

// Index i such that xs[i] <= x <= xs[i+1], with x already clamped.
std::size_t bracket(const std::vector<double>& xs, double x) {
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const auto i = static_cast<std::size_t>(std::distance(xs.begin(), it));
  return std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, xs.size() - 2);
}

}  // namespace

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != ys_.size()) throw std::invalid_argument("PiecewiseLinear: size mismatch");
  require_increasing(xs_, "PiecewiseLinear");
}

double PiecewiseLinear::operator()(double x) const {
  if (x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  const std::size_t i = bracket(xs_, x);
  const double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
  return ys_[i] + t * (ys_[i + 1] - ys_[i]);
}

BilinearGrid::BilinearGrid(std::vector<double> xs, std::vector<double> ys, std::vector<double> values)
    : xs_(std::move(xs)), ys_(std::move(ys)), values_(std::move(values)) {
  require_increasing(xs_, "BilinearGrid rows");
  require_increasing(ys_, "BilinearGrid columns");
  if (values_.size() != xs_.size() * ys_.size()) {
    throw std::invalid_argument("BilinearGrid: value count does not match grid shape");
  }
}

double BilinearGrid::operator()(double x, double y) const {
  x = std::clamp(x, xs_.front(), xs_.back());
  y = std::clamp(y, ys_.front(), ys_.back());
  const std::size_t i = bracket(xs_, x);
  const std::size_t j = bracket(ys_, y);
  const double tx = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
  const double ty = (y - ys_[j]) / (ys_[j + 1] - ys_[j]);
  const double z00 = at(i, j), z01 = at(i, j + 1), z10 = at(i + 1, j), z11 = at(i + 1, j + 1);
  return (1.0 - tx) * ((1.0 - ty) * z00 + ty * z01) + tx * ((1.0 - ty) * z10 + ty * z11);
}

double BilinearGrid::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

}  // namespace ecodrive
