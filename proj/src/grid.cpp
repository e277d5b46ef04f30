#include "trisphere/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trisphere/kinematics.hpp"

namespace trisphere {

void GridSpec::validate() const {
  if (!(h > 0.0)) throw PreconditionError("grid: h must be positive");
  if (!(stretch >= 1.0)) throw PreconditionError("grid: stretch must be >= 1");
  if (!(core_half_x > 0.0 && core_half_x <= outer_half_x)) {
    throw PreconditionError("grid: need 0 < core_half_x <= outer_half_x");
  }
  if (!(core_rho > 0.0 && core_rho <= outer_rho)) {
    throw PreconditionError("grid: need 0 < core_rho <= outer_rho");
  }
  if (std::abs(core_half_x / h - std::round(core_half_x / h)) > 1e-9 ||
      std::abs(core_rho / h - std::round(core_rho / h)) > 1e-9) {
    throw PreconditionError("grid: core extents must be multiples of h");
  }
}

GridSpec GridSpec::coarsened(double factor) const {
  GridSpec s = *this;
  s.h *= factor;
  // Keep the core extents on whole cells.
  s.core_half_x = std::ceil(core_half_x / s.h - 1e-9) * s.h;
  s.core_rho = std::ceil(core_rho / s.h - 1e-9) * s.h;
  s.outer_half_x = std::max(s.outer_half_x, s.core_half_x);
  s.outer_rho = std::max(s.outer_rho, s.core_rho);
  return s;
}

namespace {

// Faces from `start` outwards to `end`, beginning with spacing h and
// multiplying by `stretch` per cell. Returns the faces after `start`.
std::vector<double> stretched_faces(double start, double end, double h,
                                    double stretch) {
  std::vector<double> faces;
  double pos = start;
  double d = h;
  while (end - pos > 1e-12 * std::max(1.0, std::abs(end))) {
    d *= stretch;
    if (pos + d >= end || end - (pos + d) < 0.5 * d * stretch) {
      faces.push_back(end);
      break;
    }
    pos += d;
    faces.push_back(pos);
  }
  return faces;
}

}  // namespace

AxisymmetricGrid::AxisymmetricGrid(const GridSpec& spec, double L) {
  spec.validate();
  h_ = spec.h * L;
  core_half_x_ = spec.core_half_x * L;
  const double outer_x = spec.outer_half_x * L;
  const auto n_core_x =
      static_cast<std::size_t>(std::llround(2.0 * spec.core_half_x / spec.h));
  const auto n_core_r =
      static_cast<std::size_t>(std::llround(spec.core_rho / spec.h));

  // x faces: mirror-symmetric stretched tails around the uniform core.
  std::vector<double> tail =
      stretched_faces(core_half_x_, outer_x, h_, spec.stretch);
  for (auto it = tail.rbegin(); it != tail.rend(); ++it) xf_.push_back(-*it);
  core_begin_ = xf_.size();
  for (std::size_t k = 0; k <= n_core_x; ++k) {
    xf_.push_back(-core_half_x_ + static_cast<double>(k) * h_);
  }
  core_end_ = xf_.size() - 1;
  for (double f : tail) xf_.push_back(f);

  for (std::size_t k = 0; k <= n_core_r; ++k) {
    rf_.push_back(static_cast<double>(k) * h_);
  }
  for (double f :
       stretched_faces(rf_.back(), spec.outer_rho * L, h_, spec.stretch)) {
    rf_.push_back(f);
  }

  for (std::size_t i = 0; i + 1 < xf_.size(); ++i) {
    xc_.push_back(0.5 * (xf_[i] + xf_[i + 1]));
  }
  for (std::size_t j = 0; j + 1 < rf_.size(); ++j) {
    rc_.push_back(0.5 * (rf_[j] + rf_[j + 1]));
    ring_area_.push_back(std::numbers::pi *
                         (rf_[j + 1] * rf_[j + 1] - rf_[j] * rf_[j]));
  }
}

double AxisymmetricGrid::rho_face_area(std::size_t i, std::size_t j) const {
  return 2.0 * std::numbers::pi * rf_[j] * dx(i);
}

std::size_t AxisymmetricGrid::column_of(double x) const {
  auto it = std::upper_bound(xf_.begin(), xf_.end(), x);
  if (it == xf_.begin()) return 0;
  const auto k = static_cast<std::size_t>(it - xf_.begin()) - 1;
  return std::min(k, nx() - 1);
}

}  // namespace trisphere
