#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bobs/grid.hpp"
#include "bobs/nuclear.hpp"

namespace bobs {

/// Real adiabatic electronic wavefunction phi(r; Q) on the xz-plane for every
/// nuclear grid point. All arrays are (electronic point) x (Q index).
struct ElectronicScan {
  ElectronicGrid e_grid;
  NuclearGrid n_grid;
  Eigen::MatrixXd phi;
  Eigen::MatrixXd grad_x;
  Eigen::MatrixXd grad_z;
  Eigen::MatrixXd d1_q;
  Eigen::MatrixXd d2_q;
  std::optional<Eigen::VectorXd> energy;  // total energy per Q, hartree
  std::optional<double> lcao_zeta;        // set for the built-in two-centre model
};

/// Overlap of two 1s orbitals of exponent zeta a distance q apart.
double lcao_overlap(double q, double zeta);
/// Ground-state LCAO energy of H2+ including the 1/Q nuclear repulsion.
double lcao_energy(double q, double zeta);

/// phi = N(Q) [s_A + s_B] with 1s orbitals at z = +Q/2 and z = -Q/2.
ElectronicScan lcao_scan(const ElectronicGrid& e_grid, const NuclearGrid& n_grid, double zeta);

/// Scan file `# electronic-scan v1`. Derivative blocks absent from the file
/// are recomputed; symmetry violations are appended to `warnings`.
ElectronicScan load_scan(const std::filesystem::path& path,
                         std::vector<std::string>* warnings = nullptr);

struct ScanBlocks {
  bool gradients = true;
  bool d1_q = true;
  bool d2_q = true;
};
void save_scan(const std::filesystem::path& path, const ElectronicScan& scan,
               ScanBlocks blocks = {});

/// Energy curve of the scan: analytic for the LCAO model, the stored energy
/// column otherwise.
PotentialCurve pes_from_scan(const ElectronicScan& scan, double reduced_mass);

/// Largest |phi(x,z) - phi(-x,z)| and |phi(x,z) - phi(x,-z)| over the scan.
struct ScanSymmetry {
  double mirror_x = 0.0;
  double mirror_z = 0.0;
};
ScanSymmetry scan_symmetry(const ElectronicScan& scan);

}  // namespace bobs
