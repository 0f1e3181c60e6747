#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bobs/grid.hpp"

namespace bobs {

/// Potential energy curve V(Q) in hartree on a nuclear grid.
struct PotentialCurve {
  NuclearGrid grid;
  Eigen::VectorXd values;
  double reduced_mass = 1.0;  // electron masses
};

/// Morse curve D (1 - exp(-a (Q - Qe)))^2 with a fixed by the harmonic
/// frequency and the reduced mass.
struct MorseParameters {
  double well_depth = 0.1026;   // hartree
  double equilibrium = 2.0;     // bohr
  double harmonic_frequency = 0.0;  // hartree

  /// H2+ surrogate: depth and bond length of the ion, harmonic frequency
  /// chosen so that E1 - E0 corresponds to the given vibrational period.
  static MorseParameters h2plus_surrogate(double fundamental_period_fs = 14.8);
  static MorseParameters from_period(double fundamental_period_fs, double well_depth,
                                     double equilibrium);

  double range_parameter(double reduced_mass) const;
  /// Analytic eigenvalue measured from the well bottom.
  double level(std::size_t n) const;
};

PotentialCurve morse_curve(const NuclearGrid& grid, const MorseParameters& p, double reduced_mass);
PotentialCurve harmonic_curve(const NuclearGrid& grid, double reduced_mass, double omega,
                              double q0);

/// Two-column text `Q V` under a `# nuclear-curve v1` header; Q must be uniform.
PotentialCurve load_curve(const std::filesystem::path& path, double reduced_mass);
void save_curve(const std::filesystem::path& path, const PotentialCurve& curve);

/// Vibrational eigenpairs. Columns of `states`, `d1`, `d2` are chi_n, chi_n',
/// chi_n'' sampled on `grid`, normalised as sum chi_n^2 dq = 1.
struct VibrationalBasis {
  NuclearGrid grid;
  double reduced_mass = 1.0;
  Eigen::VectorXd energies;
  Eigen::MatrixXd states;
  Eigen::MatrixXd d1;
  Eigen::MatrixXd d2;

  std::size_t size() const { return static_cast<std::size_t>(energies.size()); }
  /// omega_mn = (E_m - E_n) / hbar in atomic units.
  double omega(std::size_t m, std::size_t n) const;
};

/// Sine-DVR diagonalisation of -(1/2mu) d^2/dQ^2 + V with zero boundary
/// values at both grid ends. Throws std::runtime_error if fewer than
/// n_states eigenvalues lie below the lower of the two edge potentials.
VibrationalBasis solve_eigenstates(const PotentialCurve& pes, std::size_t n_states);

struct ShiftedGround {
  double shift = 0.0;  // bohr, along +Q
};
struct ExplicitCoefficients {
  std::vector<double> coeffs;
};
using InitialShape = std::variant<ShiftedGround, ExplicitCoefficients>;

/// Real expansion coefficients a_n of the nuclear wavepacket at time t.
struct WavepacketState {
  std::shared_ptr<const VibrationalBasis> basis;
  Eigen::VectorXd coeffs;
  double t = 0.0;              // fs
  double norm_deficit = 0.0;   // 1 - sum a_n^2 before renormalisation
};

/// Throws std::runtime_error when the projection loses more than 5% of the norm.
WavepacketState build_wavepacket(std::shared_ptr<const VibrationalBasis> basis,
                                 const InitialShape& shape);

/// a_n exp(-i E_n (t - state.t) / hbar).
Eigen::VectorXcd evolve(const WavepacketState& state, double t_fs);

struct NuclearObservables {
  Eigen::VectorXd density;
  Eigen::VectorXd flux;
  double mean_q = 0.0;
  double variance = 0.0;
};

NuclearObservables nuclear_observables(const WavepacketState& state, double t_fs);

/// Exact d|chi|^2/dt from the eigenbasis (atomic time units).
Eigen::VectorXd nuclear_density_rate(const WavepacketState& state, double t_fs);

}  // namespace bobs
