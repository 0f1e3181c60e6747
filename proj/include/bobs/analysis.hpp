#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bobs/kernels.hpp"
#include "bobs/optimizer.hpp"

namespace bobs {

/// One-sided power spectrum, normalised to a unit peak.
struct PowerSpectrum {
  Eigen::VectorXd frequencies;  // angular frequency, rad/fs
  Eigen::VectorXd power;        // in [0, 1]
  std::string source;
  double peak_power = 0.0;      // un-normalised power of the largest bin
  bool even_length = true;      // series length; fixes the Nyquist bin weight

  /// Un-normalised one-sided total; equals the variance of the series
  /// when no window is applied.
  double total_power() const;
  double bin_width() const { return frequencies.size() > 1 ? frequencies[1] : 0.0; }
};

/// Mean-removed DFT power |X_k|^2 / N^2 of a uniformly sampled series.
/// Throws std::invalid_argument for non-uniform times or fewer than 8 samples.
PowerSpectrum power_spectrum(std::span<const double> times_fs, std::span<const double> values,
                             std::string source, bool hann_window = false);

/// Indices of interior local maxima with normalised power >= threshold.
std::vector<std::size_t> find_peaks(const PowerSpectrum& spectrum, double threshold);

/// All metrics relative to max |j|.
struct SymmetryMetrics {
  double inversion = 0.0;       // max |j(-r) + j(r)|
  double radial_on_axis = 0.0;  // max |j_x| on x = 0
  double axial_on_midplane = 0.0;  // max |j_z| on z = 0
  double max_magnitude = 0.0;

  double worst() const;
};

SymmetryMetrics symmetry_metrics(const VectorField& j, const ElectronicGrid& grid);

struct NormDrift {
  std::vector<double> times;  // fs
  std::vector<double> drift;  // accumulated change of the electronic norm
  double max_abs = 0.0;
};

/// Norm change generated by the second-order flow corrections:
/// int_0^t s_opt(t') int dV d(rho_c)/dt|_{O(s)} dt', cylindrical volume weights.
NormDrift norm_drift(const PairKernels& k, const WavepacketState& state,
                     const std::vector<OptimizationResult>& series);

/// int dV of the flow field at t (cylindrical weights).
double flow_volume_integral(const PairKernels& k, const WavepacketState& state, double t_fs,
                            double s);

/// Spearman rank correlation (average ranks for ties).
double rank_correlation(std::span<const double> a, std::span<const double> b);

/// Indices of interior local extrema (sign change of the forward difference).
std::vector<std::size_t> turning_indices(std::span<const double> values);

/// Extremum time refined by a parabola through the three samples around index i.
double refine_extremum(std::span<const double> times, std::span<const double> values,
                       std::size_t i);

/// Period taken from the mean spacing of successive local maxima; 0 if fewer than two.
double mean_period(std::span<const double> times, std::span<const double> values);

/// First maximum of the autocorrelation beyond its first zero crossing, in
/// lag units of `dt`; 0 when none is found.
double autocorrelation_period(std::span<const double> values, double dt);

/// Revival time of the wavepacket: maximum of |<chi(0)|chi(t)>|^2 near the
/// estimate 4 pi hbar / |E''| at the mean excitation.
double recurrence_time(const WavepacketState& state);

/// Classical vibrational period 2 pi / |E_{n+1} - E_n| at the mean excitation, fs.
double vibrational_period(const WavepacketState& state);

}  // namespace bobs
