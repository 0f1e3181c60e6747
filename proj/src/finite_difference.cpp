#include "bobs/finite_difference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bobs::fd {

namespace {

Stencil make(std::size_t first, std::initializer_list<double> w, double scale) {
  Stencil s;
  s.first = first;
  s.size = w.size();
  std::size_t k = 0;
  for (double v : w) s.w[k++] = v / scale;
  return s;
}

}  // namespace

Stencil first_derivative(std::size_t n, std::size_t i) {
  if (n < 3) throw std::invalid_argument("first derivative needs at least 3 points");
  if (i >= n) throw std::out_of_range("stencil index out of range");
  if (n < 6) {
    if (i == 0) return make(0, {-3.0, 4.0, -1.0}, 2.0);
    if (i == n - 1) return make(n - 3, {1.0, -4.0, 3.0}, 2.0);
    return make(i - 1, {-1.0, 0.0, 1.0}, 2.0);
  }
  if (i == 0) return make(0, {-25.0, 48.0, -36.0, 16.0, -3.0}, 12.0);
  if (i == 1) return make(0, {-3.0, -10.0, 18.0, -6.0, 1.0}, 12.0);
  if (i == n - 2) return make(n - 5, {-1.0, 6.0, -18.0, 10.0, 3.0}, 12.0);
  if (i == n - 1) return make(n - 5, {3.0, -16.0, 36.0, -48.0, 25.0}, 12.0);
  return make(i - 2, {1.0, -8.0, 0.0, 8.0, -1.0}, 12.0);
}

Stencil second_derivative(std::size_t n, std::size_t i) {
  if (n < 3) throw std::invalid_argument("second derivative needs at least 3 points");
  if (i >= n) throw std::out_of_range("stencil index out of range");
  if (n < 6) {
    if (i == 0) return make(0, {1.0, -2.0, 1.0}, 1.0);
    if (i == n - 1) return make(n - 3, {1.0, -2.0, 1.0}, 1.0);
    return make(i - 1, {1.0, -2.0, 1.0}, 1.0);
  }
  if (i == 0) return make(0, {45.0, -154.0, 214.0, -156.0, 61.0, -10.0}, 12.0);
  if (i == 1) return make(0, {10.0, -15.0, -4.0, 14.0, -6.0, 1.0}, 12.0);
  if (i == n - 2) return make(n - 6, {1.0, -6.0, 14.0, -4.0, -15.0, 10.0}, 12.0);
  if (i == n - 1) return make(n - 6, {-10.0, 61.0, -156.0, 214.0, -154.0, 45.0}, 12.0);
  return make(i - 2, {-1.0, 16.0, -30.0, 16.0, -1.0}, 12.0);
}

namespace {

Stencil stencil_for(int order, std::size_t n, std::size_t i) {
  if (order == 1) return first_derivative(n, i);
  if (order == 2) return second_derivative(n, i);
  throw std::invalid_argument("derivative order must be 1 or 2");
}

}  // namespace

Eigen::VectorXd differentiate(const Eigen::VectorXd& f, double h, int order) {
  const auto n = static_cast<std::size_t>(f.size());
  const double scale = order == 1 ? h : h * h;
  Eigen::VectorXd out(f.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Stencil s = stencil_for(order, n, i);
    double acc = 0.0;
    for (std::size_t k = 0; k < s.size; ++k) {
      acc += s.w[k] * f[static_cast<Eigen::Index>(s.first + k)];
    }
    out[static_cast<Eigen::Index>(i)] = acc / scale;
  }
  return out;
}

Eigen::MatrixXd differentiate_columns(const Eigen::MatrixXd& f, double h, int order) {
  const auto n = static_cast<std::size_t>(f.cols());
  const double scale = order == 1 ? h : h * h;
  Eigen::MatrixXd out(f.rows(), f.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const Stencil s = stencil_for(order, n, i);
    auto col = out.col(static_cast<Eigen::Index>(i));
    col.setZero();
    for (std::size_t k = 0; k < s.size; ++k) {
      if (s.w[k] != 0.0) col += s.w[k] * f.col(static_cast<Eigen::Index>(s.first + k));
    }
    col /= scale;
  }
  return out;
}

CubicWeights cubic_weights(const NuclearGrid& grid, double q) {
  CubicWeights cw;
  const std::size_t n = grid.n_points();
  const double u = (q - grid.q_min()) / grid.dq();
  const double last = static_cast<double>(n - 1);
  if (u < -1e-9 || u > last + 1e-9) cw.inside = false;
  const double uc = std::clamp(u, 0.0, last);
  auto base = static_cast<std::ptrdiff_t>(std::floor(uc)) - 1;
  base = std::clamp<std::ptrdiff_t>(base, 0, static_cast<std::ptrdiff_t>(n) - 4);
  cw.first = static_cast<std::size_t>(base);
  const double t = uc - static_cast<double>(base);
  // Lagrange basis on nodes 0, 1, 2, 3.
  cw.w[0] = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  cw.w[1] = t * (t - 2.0) * (t - 3.0) / 2.0;
  cw.w[2] = -t * (t - 1.0) * (t - 3.0) / 2.0;
  cw.w[3] = t * (t - 1.0) * (t - 2.0) / 6.0;
  return cw;
}

double interpolate(const NuclearGrid& grid, const Eigen::VectorXd& f, double q) {
  if (grid.n_points() < 4) throw std::invalid_argument("cubic interpolation needs 4 points");
  const CubicWeights cw = cubic_weights(grid, q);
  if (!cw.inside) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < 4; ++k) acc += cw.w[k] * f[static_cast<Eigen::Index>(cw.first + k)];
  return acc;
}

}  // namespace bobs::fd
