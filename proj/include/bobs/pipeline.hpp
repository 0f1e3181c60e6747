#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bobs/analysis.hpp"
#include "bobs/electronic.hpp"
#include "bobs/kernels.hpp"
#include "bobs/nuclear.hpp"
#include "bobs/optimizer.hpp"
#include "bobs/units.hpp"

namespace bobs {

/// Every default reproduces the H2+ reference calculation on the surrogate model.
struct RunConfig {
  // "builtin-morse", "scan" (energy of the electronic scan) or a curve file path.
  std::string pes = "builtin-morse";
  double morse_period = 14.8;      // fs, E1 - E0
  double morse_depth = 0.1026;     // hartree
  double morse_equilibrium = 2.0;  // bohr
  double reduced_mass = units::kH2PlusReducedMass;

  // "builtin-lcao" or a scan file path (the file then fixes both grids).
  std::string scan = "builtin-lcao";
  double zeta = 1.24;

  double q_min = 0.4, q_max = 18.06, dq = 0.02;
  double x_min = -2.2, x_max = 2.2, dx = 0.1;
  double z_min = -3.5, z_max = 3.5, dz = 0.1;

  std::size_t n_states = 16;
  double shift = 2.0;                // bohr, ground state displaced along +Q
  std::vector<double> coefficients;  // explicit a_n; overrides shift when set

  std::optional<double> span;  // fs; unset means twice the recurrence time
  double dt = 0.3;             // fs
  std::vector<double> snapshots{3.00, 6.45, 11.05};

  double oracle_delta = 0.04;  // bohr, for the check suite
  bool hann_window = false;

  std::filesystem::path out = "out";
  unsigned threads = 1;

  /// Throws std::invalid_argument for inconsistent values.
  void validate() const;
};

/// Everything derived from a config before any time stepping.
struct Model {
  RunConfig config;
  ElectronicScan scan;
  PotentialCurve pes;
  std::shared_ptr<const VibrationalBasis> basis;
  WavepacketState state;
  PairKernels kernels;
  double span = 0.0;  // resolved, fs
  double vibrational_period = 0.0;
  double recurrence_time = 0.0;
  std::vector<std::string> warnings;
};

/// Throws on any module error; no files are touched.
Model build_model(const RunConfig& config);

/// Uniform time axis 0, dt, ..., covering the resolved span.
std::vector<double> time_axis(const Model& model);

struct SeriesData {
  std::vector<double> times;
  std::vector<OptimizationResult> opt;
  std::vector<double> sigma2, mean_q, l2_per_point;
};
SeriesData compute_series(const Model& model);

struct RunSummary {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
};

/// Full pipeline into config.out: series, spectra, snapshot fields and
/// manifest.json. On error every file written so far is removed and the
/// exception propagates.
RunSummary run(const RunConfig& config);

/// Eigenvalues and the potential curve.
RunSummary write_eigenstates(const RunConfig& config);
/// Fields at a single time.
RunSummary write_fields(const RunConfig& config, double t_fs);
/// Series and both spectra.
RunSummary write_spectra(const RunConfig& config);

struct CheckItem {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckItem> items;
  bool all_pass() const;
};

/// Invariant suite. Never throws: failures, including model construction
/// errors, are report items.
CheckReport check(const RunConfig& config);

}  // namespace bobs
