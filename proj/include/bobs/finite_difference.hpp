#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Dense>

#include "bobs/grid.hpp"

namespace bobs::fd {

/// Finite-difference weights for one output point: value = sum_k w[k] f[first + k],
/// still to be divided by h (first derivative) or h^2 (second derivative).
struct Stencil {
  std::size_t first = 0;
  std::size_t size = 0;
  std::array<double, 6> w{};
};

/// Fourth-order stencils (5-point central, one-sided near the ends) when
/// n >= 6; second-order 3-point stencils for shorter grids.
Stencil first_derivative(std::size_t n, std::size_t i);
Stencil second_derivative(std::size_t n, std::size_t i);

Eigen::VectorXd differentiate(const Eigen::VectorXd& f, double h, int order);

/// Derivative along the column index of f (each row is a function sampled
/// on the grid spanned by the columns).
Eigen::MatrixXd differentiate_columns(const Eigen::MatrixXd& f, double h, int order);

/// Four-point Lagrange interpolation weights on a uniform grid. The stencil is
/// shifted inwards near the ends; `inside` is false if q lies outside the grid.
struct CubicWeights {
  std::size_t first = 0;
  std::array<double, 4> w{};
  bool inside = true;
};

CubicWeights cubic_weights(const NuclearGrid& grid, double q);

/// Interpolates a sampled function, returning 0 outside the grid.
double interpolate(const NuclearGrid& grid, const Eigen::VectorXd& f, double q);

}  // namespace bobs::fd
