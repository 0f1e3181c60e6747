#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "bobs/kernels.hpp"

namespace bobs {

enum class OptimizationMethod { closed_form, newton, degenerate };

const char* to_string(OptimizationMethod m);

struct OptimizationResult {
  double t = 0.0;          // fs
  double s_opt = 0.0;      // delta_q^2, bohr^2
  double delta_q = 0.0;    // bohr
  double l2_at_opt = 0.0;
  double l2_at_zero = 0.0;
  OptimizationMethod method = OptimizationMethod::closed_form;
  bool clamped = false;    // unconstrained optimum was negative
  int iterations = 0;
};

/// Exact minimiser of ||A + s D|| over s >= 0 under the planar inner product.
/// Degenerate (s = 0) when <D,D> is negligible relative to <A,A>.
OptimizationResult optimize_closed_form(const Field& constant, const Field& slope,
                                        const ElectronicGrid& grid);

struct NewtonOptions {
  int max_iterations = 100;
  /// Step for the numerical derivatives, relative to max(|s|, scale).
  double relative_step = 1e-3;
  double scale = 1e-3;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_iterate)
      : std::runtime_error(what), last_iterate_(last_iterate) {}
  double last_iterate() const { return last_iterate_; }

 private:
  double last_iterate_;
};

/// Damped Newton iteration on d(cost^2)/ds with central-difference
/// derivatives, projected onto s >= 0. `cost` returns the residual norm.
OptimizationResult optimize_newton(const std::function<double(double)>& cost, double s0,
                                   const NewtonOptions& options = {});

/// Independent closed-form optimisation at every time; `threads` > 1 splits
/// the times across worker threads. Results are in input order.
std::vector<OptimizationResult> optimize_series(const PairKernels& k, const WavepacketState& state,
                                                const std::vector<double>& times_fs,
                                                unsigned threads = 1);

/// Fixes the orientation of the flux relative to the g kernels: keeps the
/// sign whose optimum gives the smaller continuity residual at t_fs.
/// Returns the chosen sign and stores it in k.
double calibrate_flux_sign(PairKernels& k, const WavepacketState& state, double t_fs);

}  // namespace bobs
