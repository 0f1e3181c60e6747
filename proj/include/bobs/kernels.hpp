#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "bobs/electronic.hpp"
#include "bobs/grid.hpp"
#include "bobs/nuclear.hpp"

namespace bobs {

/// Scalar field on an ElectronicGrid, z-major.
using Field = Eigen::VectorXd;

/// In-plane components of a vector field. The y component vanishes on the
/// y = 0 plane for Sigma states and is not stored.
struct VectorField {
  Field x;
  Field z;
};

struct StatePair {
  std::size_t m = 0;
  std::size_t n = 0;  // m < n
};

/// Q-integrated spatial factors of the second-order correlated continuity
/// equation in the vibrational eigenbasis. Column p of each matrix belongs to
/// pairs[p]; all time dependence is sin/cos(omega[p] t).
///
///   f0  = int dQ |phi|^2 chi_n chi_m
///   f2a = int dQ (phi'' phi - phi'^2) chi_n chi_m
///   f2b = int dQ |phi|^2 (chi_n'' chi_m - 2 chi_n' chi_m' + chi_n chi_m'')
///   g   = int dQ (phi grad phi' - phi' grad phi) (chi_n chi_m' - chi_n' chi_m)
struct PairKernels {
  ElectronicGrid grid;
  std::size_t n_states = 0;
  std::vector<StatePair> pairs;
  Eigen::VectorXd omega;  // (E_m - E_n) / hbar, atomic units
  Eigen::MatrixXd f0, f2a, f2b, gx, gz;
  // m == n terms; time independent, only needed for the density itself.
  Eigen::MatrixXd diag_f0, diag_f2a, diag_f2b;
  // Orientation of j relative to the g kernels; see calibrate_flux_sign().
  double flux_sign = -1.0;

  std::size_t n_pairs() const { return pairs.size(); }
};

/// Trapezoidal quadrature over Q, once per scan/basis combination.
/// Throws std::invalid_argument when the scan and basis grids differ.
PairKernels build_pair_kernels(const ElectronicScan& scan, const VibrationalBasis& basis,
                               std::size_t n_states);

/// Kernels for a single ordered pair (m, n), m and n in any order.
struct PairKernelFields {
  Field f0, f2a, f2b, gx, gz;
};
PairKernelFields ordered_pair_kernels(const ElectronicScan& scan, const VibrationalBasis& basis,
                                      std::size_t m, std::size_t n);

/// d rho_c / dt for correlation length squared s (bohr^2). At s = 0 this is
/// the Born-Oppenheimer electron flow.
Field flow_field(const PairKernels& k, const WavepacketState& state, double t_fs, double s);

/// j_c = flux_sign * (2 hbar s / m_e) sum_{m<n} a_n a_m sin(omega_mn t) g_mn.
VectorField flux_field(const PairKernels& k, const WavepacketState& state, double t_fs, double s);

/// d jx/dx + d jz/dz with second-order central differences, one-sided at the edges.
Field divergence_field(const VectorField& j, const ElectronicGrid& grid);

/// Second-order correlated density rho_c(t; s).
Field correlated_density(const PairKernels& k, const WavepacketState& state, double t_fs,
                         double s);

/// sqrt(sum f^2 dx dz).
double planar_l2(const Field& f, const ElectronicGrid& grid);

struct Residual {
  Field field;
  double l2 = 0.0;
  double per_point = 0.0;  // l2 / number of grid points
};

/// R = flow + div j.
Residual residual(const PairKernels& k, const WavepacketState& state, double t_fs, double s);

/// The residual is affine in s: R(s) = constant + s * slope.
struct AffineResidual {
  Field constant;
  Field slope;
};
AffineResidual affine_residual(const PairKernels& k, const WavepacketState& state, double t_fs);

/// Untruncated fields from explicitly translated chi_n(Q +- delta) and
/// phi(r; Q +- delta) (cubic interpolation along Q). The Q integral covers the
/// grid points whose translates stay inside the grid.
struct NonlinearFields {
  Field rho_c_dot;
  VectorField flux;
  Field div_j;
};
NonlinearFields nonlinear_fields(const ElectronicScan& scan, const VibrationalBasis& basis,
                                 const WavepacketState& state, double t_fs, double delta_q,
                                 std::size_t n_states, double flux_sign = -1.0);

}  // namespace bobs
