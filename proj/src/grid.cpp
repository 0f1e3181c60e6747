#include "bobs/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bobs/units.hpp"

namespace bobs {

NuclearGrid::NuclearGrid(double q_min, double q_max, double dq) {
  if (!std::isfinite(q_min) || !std::isfinite(q_max) || !std::isfinite(dq)) {
    throw std::invalid_argument("nuclear grid: non-finite bounds");
  }
  if (!(dq > 0.0)) throw std::invalid_argument("nuclear grid: dq must be positive");
  if (!(q_max > q_min)) throw std::invalid_argument("nuclear grid: q_max must exceed q_min");
  const double steps = std::round((q_max - q_min) / dq);
  const auto n = static_cast<std::size_t>(steps) + 1;
  if (n < 3) {
    throw std::invalid_argument("nuclear grid: " + std::to_string(n) +
                                " points, derivative stencils need at least 3");
  }
  q_min_ = q_min;
  dq_ = dq;
  n_points_ = n;
}

Eigen::VectorXd NuclearGrid::points() const {
  Eigen::VectorXd q(static_cast<Eigen::Index>(n_points_));
  for (std::size_t i = 0; i < n_points_; ++i) q[static_cast<Eigen::Index>(i)] = at(i);
  return q;
}

Eigen::VectorXd NuclearGrid::weights() const {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_points_), dq_);
  w[0] *= 0.5;
  w[w.size() - 1] *= 0.5;
  return w;
}

bool NuclearGrid::operator==(const NuclearGrid& other) const {
  return n_points_ == other.n_points_ && std::abs(q_min_ - other.q_min_) < 1e-12 &&
         std::abs(dq_ - other.dq_) < 1e-12;
}

namespace {

std::size_t symmetric_half_count(double lo, double hi, double step, const char* axis) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step)) {
    throw std::invalid_argument(std::string("electronic grid: non-finite ") + axis + " range");
  }
  if (!(step > 0.0)) {
    throw std::invalid_argument(std::string("electronic grid: d") + axis + " must be positive");
  }
  if (!(hi > 0.0) || std::abs(lo + hi) > 1e-9 * std::max(1.0, hi)) {
    throw std::invalid_argument(std::string("electronic grid: ") + axis +
                                " range must be symmetric about 0");
  }
  const double half = hi / step;
  const double rounded = std::round(half);
  if (std::abs(half - rounded) > 1e-6) {
    throw std::invalid_argument(std::string("electronic grid: ") + axis +
                                " range must be a whole number of steps from 0");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

ElectronicGrid::ElectronicGrid(double x_min, double x_max, double dx, double z_min, double z_max,
                               double dz)
    : half_x_(symmetric_half_count(x_min, x_max, dx, "x")),
      half_z_(symmetric_half_count(z_min, z_max, dz, "z")),
      dx_(dx),
      dz_(dz) {}

Eigen::VectorXd ElectronicGrid::cylindrical_weights() const {
  Eigen::VectorXd w(static_cast<Eigen::Index>(size()));
  for (std::size_t iz = 0; iz < nz(); ++iz) {
    for (std::size_t ix = 0; ix < nx(); ++ix) {
      w[static_cast<Eigen::Index>(index(ix, iz))] = units::kPi * std::abs(x(ix)) * cell_area();
    }
  }
  return w;
}

bool ElectronicGrid::operator==(const ElectronicGrid& other) const {
  return half_x_ == other.half_x_ && half_z_ == other.half_z_ &&
         std::abs(dx_ - other.dx_) < 1e-12 && std::abs(dz_ - other.dz_) < 1e-12;
}

}  // namespace bobs
