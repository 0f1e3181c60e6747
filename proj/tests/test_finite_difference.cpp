#include "doctest.h"

#include <cmath>

#include "bobs/finite_difference.hpp"

using namespace bobs;

namespace {

Eigen::VectorXd sample(const NuclearGrid& g, double (*f)(double)) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.n_points()));
  for (std::size_t i = 0; i < g.n_points(); ++i) v[static_cast<Eigen::Index>(i)] = f(g.at(i));
  return v;
}

double quartic(double q) { return 0.5 - q + 2.0 * q * q - 0.25 * q * q * q + 0.1 * q * q * q * q; }
double quartic_d1(double q) { return -1.0 + 4.0 * q - 0.75 * q * q + 0.4 * q * q * q; }
double quartic_d2(double q) { return 4.0 - 1.5 * q + 1.2 * q * q; }

}  // namespace

TEST_CASE("stencils are exact for quartics, including the one-sided ends") {
  const NuclearGrid g(-1.0, 2.0, 0.1);
  const Eigen::VectorXd f = sample(g, quartic);
  const Eigen::VectorXd d1 = fd::differentiate(f, g.dq(), 1);
  const Eigen::VectorXd d2 = fd::differentiate(f, g.dq(), 2);
  for (std::size_t i = 0; i < g.n_points(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    CHECK(d1[k] == doctest::Approx(quartic_d1(g.at(i))).epsilon(1e-10));
    CHECK(d2[k] == doctest::Approx(quartic_d2(g.at(i))).epsilon(1e-8));
  }
}

TEST_CASE("second derivative of a quadratic is exact to machine precision") {
  const NuclearGrid g(0.4, 18.06, 0.02);
  Eigen::VectorXd f(static_cast<Eigen::Index>(g.n_points()));
  for (std::size_t i = 0; i < g.n_points(); ++i) {
    const double q = g.at(i);
    f[static_cast<Eigen::Index>(i)] = 3.0 * q * q - q + 2.0;
  }
  const Eigen::VectorXd d2 = fd::differentiate(f, g.dq(), 2);
  for (Eigen::Index k = 2; k + 2 < d2.size(); ++k) CHECK(std::abs(d2[k] - 6.0) < 1e-7);
}

TEST_CASE("fourth-order convergence on a smooth function") {
  auto max_err = [](double h) {
    const NuclearGrid g(0.0, 3.0, h);
    const Eigen::VectorXd f = sample(g, [](double q) { return std::sin(2.0 * q); });
    const Eigen::VectorXd d1 = fd::differentiate(f, g.dq(), 1);
    double e = 0.0;
    for (std::size_t i = 0; i < g.n_points(); ++i) {
      e = std::max(e, std::abs(d1[static_cast<Eigen::Index>(i)] - 2.0 * std::cos(2.0 * g.at(i))));
    }
    return e;
  };
  const double ratio = max_err(0.05) / max_err(0.025);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("short grids fall back to three-point stencils") {
  const Eigen::Vector4d f(1.0, 4.0, 9.0, 16.0);  // (i+1)^2
  const Eigen::VectorXd d1 = fd::differentiate(f, 1.0, 1);
  const Eigen::VectorXd d2 = fd::differentiate(f, 1.0, 2);
  CHECK(d1[1] == doctest::Approx(4.0));
  CHECK(d1[0] == doctest::Approx(2.0));
  CHECK(d2[2] == doctest::Approx(2.0));
  CHECK(fd::first_derivative(4, 1).size == 3);
}

TEST_CASE("column differentiation matches per-row differentiation") {
  const NuclearGrid g(0.0, 1.0, 0.05);
  Eigen::MatrixXd m(2, static_cast<Eigen::Index>(g.n_points()));
  m.row(0) = sample(g, quartic).transpose();
  m.row(1) = sample(g, [](double q) { return std::exp(q); }).transpose();
  const Eigen::MatrixXd d = fd::differentiate_columns(m, g.dq(), 2);
  CHECK((d.row(0).transpose() - fd::differentiate(m.row(0).transpose(), g.dq(), 2))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("cubic interpolation reproduces cubics and vanishes outside") {
  const NuclearGrid g(0.0, 2.0, 0.1);
  const Eigen::VectorXd f = sample(g, [](double q) { return 1.0 + q - 2.0 * q * q * q; });
  for (double q : {0.0, 0.03, 0.55, 1.234, 1.97, 2.0}) {
    CHECK(fd::interpolate(g, f, q) == doctest::Approx(1.0 + q - 2.0 * q * q * q).epsilon(1e-12));
  }
  CHECK(fd::interpolate(g, f, -0.01) == 0.0);
  CHECK(fd::interpolate(g, f, 2.01) == 0.0);
  CHECK_FALSE(fd::cubic_weights(g, 2.5).inside);
}
