#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace bobs {

/// Uniform grid along the internuclear distance Q (bohr).
class NuclearGrid {
 public:
  NuclearGrid() = default;
  /// n_points = round((q_max - q_min) / dq) + 1; throws std::invalid_argument
  /// for an empty range, a non-positive step, or fewer than 3 points.
  NuclearGrid(double q_min, double q_max, double dq);

  double q_min() const { return q_min_; }
  double q_max() const { return q_min_ + dq_ * static_cast<double>(n_points_ - 1); }
  double dq() const { return dq_; }
  std::size_t n_points() const { return n_points_; }
  double at(std::size_t i) const { return q_min_ + dq_ * static_cast<double>(i); }
  Eigen::VectorXd points() const;
  /// Trapezoidal quadrature weights.
  Eigen::VectorXd weights() const;

  bool operator==(const NuclearGrid& other) const;

 private:
  double q_min_ = 0.0;
  double dq_ = 1.0;
  std::size_t n_points_ = 0;
};

/// Cartesian sampling of the xz-plane (y = 0), symmetric about the origin.
/// Points are stored z-major: index = iz * nx + ix.
class ElectronicGrid {
 public:
  ElectronicGrid() = default;
  /// Both ranges must be symmetric about zero and contain the zero line.
  ElectronicGrid(double x_min, double x_max, double dx, double z_min, double z_max, double dz);

  std::size_t nx() const { return 2 * half_x_ + 1; }
  std::size_t nz() const { return 2 * half_z_ + 1; }
  std::size_t size() const { return nx() * nz(); }
  double dx() const { return dx_; }
  double dz() const { return dz_; }
  double x_max() const { return dx_ * static_cast<double>(half_x_); }
  double z_max() const { return dz_ * static_cast<double>(half_z_); }
  double cell_area() const { return dx_ * dz_; }

  // Coordinates are built from signed integer multiples of the step so that
  // x(ix) == -x(nx - 1 - ix) bit for bit.
  double x(std::size_t ix) const {
    return dx_ * (static_cast<double>(ix) - static_cast<double>(half_x_));
  }
  double z(std::size_t iz) const {
    return dz_ * (static_cast<double>(iz) - static_cast<double>(half_z_));
  }
  std::size_t index(std::size_t ix, std::size_t iz) const { return iz * nx() + ix; }
  std::size_t mirror_x(std::size_t ix) const { return nx() - 1 - ix; }
  std::size_t mirror_z(std::size_t iz) const { return nz() - 1 - iz; }
  std::size_t center_x() const { return half_x_; }
  std::size_t center_z() const { return half_z_; }

  /// Cylindrical volume weights pi |x| dx dz for every plane point; summing
  /// over the full plane counts each half once, giving a 3D integral for
  /// fields symmetric about the z-axis.
  Eigen::VectorXd cylindrical_weights() const;

  bool operator==(const ElectronicGrid& other) const;

 private:
  std::size_t half_x_ = 0;
  std::size_t half_z_ = 0;
  double dx_ = 1.0;
  double dz_ = 1.0;
};

}  // namespace bobs
