#pragma once

#include <cstddef>
#include <vector>

namespace trisphere {

/// Layout of the axisymmetric (x, rho) window, in units of the sphere radius.
///
/// Cells are uniform with spacing h inside the core box |x| <= core_half_x,
/// rho <= core_rho and grow geometrically by `stretch` out to the window
/// extents. stretch == 1 with core == outer gives a uniform grid.
struct GridSpec {
  double h = 0.1;
  double core_half_x = 13.0;
  double outer_half_x = 24.0;
  double core_rho = 2.5;
  double outer_rho = 16.0;
  double stretch = 1.1;

  void validate() const;
  /// Doubles the core spacing (the --fast profile).
  GridSpec coarsened(double factor) const;
};

/// Cell-centered structured grid in window coordinates (x relative to the
/// window origin). Cells are annular rings of revolution about the x axis.
class AxisymmetricGrid {
 public:
  AxisymmetricGrid(const GridSpec& spec, double length_scale);

  std::size_t nx() const { return xc_.size(); }
  std::size_t nr() const { return rc_.size(); }
  std::size_t size() const { return nx() * nr(); }
  std::size_t index(std::size_t i, std::size_t j) const { return i * nr() + j; }

  const std::vector<double>& x_faces() const { return xf_; }
  const std::vector<double>& rho_faces() const { return rf_; }
  const std::vector<double>& x_centers() const { return xc_; }
  const std::vector<double>& rho_centers() const { return rc_; }

  double dx(std::size_t i) const { return xf_[i + 1] - xf_[i]; }
  double drho(std::size_t j) const { return rf_[j + 1] - rf_[j]; }
  double volume(std::size_t i, std::size_t j) const {
    return ring_area_[j] * dx(i);
  }
  /// Area of a face normal to x in row j.
  double x_face_area(std::size_t j) const { return ring_area_[j]; }
  /// Area of the face at rho_faces()[j] spanning column i.
  double rho_face_area(std::size_t i, std::size_t j) const;

  /// Uniform core spacing (absolute length).
  double h() const { return h_; }
  double core_half_x() const { return core_half_x_; }
  /// First and one-past-last column of the uniform core.
  std::size_t core_begin() const { return core_begin_; }
  std::size_t core_end() const { return core_end_; }

  /// Index of the cell column containing window coordinate x (clamped).
  std::size_t column_of(double x) const;

 private:
  std::vector<double> xf_, rf_, xc_, rc_;
  std::vector<double> ring_area_;
  double h_ = 0.0;
  double core_half_x_ = 0.0;
  std::size_t core_begin_ = 0;
  std::size_t core_end_ = 0;
};

}  // namespace trisphere
