#include "bobs/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace bobs {

const char* to_string(OptimizationMethod m) {
  switch (m) {
    case OptimizationMethod::closed_form: return "closed_form";
    case OptimizationMethod::newton: return "newton";
    case OptimizationMethod::degenerate: return "degenerate";
  }
  return "unknown";
}

OptimizationResult optimize_closed_form(const Field& constant, const Field& slope,
                                        const ElectronicGrid& grid) {
  if (constant.size() != slope.size() || constant.size() != static_cast<Eigen::Index>(grid.size())) {
    throw std::invalid_argument("optimize_closed_form: fields do not share the grid");
  }
  const double area = grid.cell_area();
  const double aa = constant.squaredNorm() * area;
  const double ad = constant.dot(slope) * area;
  const double dd = slope.squaredNorm() * area;
  OptimizationResult r;
  r.l2_at_zero = std::sqrt(aa);
  if (dd <= 1e-12 * aa + std::numeric_limits<double>::min()) {
    r.method = OptimizationMethod::degenerate;
    r.l2_at_opt = r.l2_at_zero;
    return r;
  }
  double s = -ad / dd;
  if (s < 0.0) {
    s = 0.0;
    r.clamped = true;
  }
  r.s_opt = s;
  r.delta_q = std::sqrt(s);
  // aa + 2 s ad + s^2 dd loses digits near the optimum; evaluate directly.
  r.l2_at_opt = std::sqrt((constant + s * slope).squaredNorm() * area);
  return r;
}

OptimizationResult optimize_newton(const std::function<double(double)>& cost, double s0,
                                   const NewtonOptions& options) {
  if (!(s0 >= 0.0)) throw std::invalid_argument("optimize_newton: s0 must be >= 0");
  auto objective = [&](double s) {
    const double c = cost(s);
    return c * c;
  };
  OptimizationResult r;
  r.method = OptimizationMethod::newton;
  r.l2_at_zero = cost(0.0);
  double s = s0;
  double f = objective(s);
  for (int it = 1; it <= options.max_iterations; ++it) {
    r.iterations = it;
    const double h = options.relative_step * std::max(std::abs(s), options.scale);
    // Stay on the s >= 0 side for the stencil when s is pinned near the bound.
    const double centre = std::max(s, h);
    const double fp = objective(centre + h);
    const double fc = centre == s ? f : objective(centre);
    const double fm = objective(centre - h);
    const double g = (fp - fm) / (2.0 * h) + (s - centre) * (fp - 2.0 * fc + fm) / (h * h);
    const double curv = (fp - 2.0 * fc + fm) / (h * h);
    double step = curv > 0.0 ? -g / curv : -std::copysign(std::max(std::abs(s), options.scale), g);
    double trial = std::max(0.0, s + step);
    double ft = objective(trial);
    int damping = 0;
    while (ft > f && damping < 60) {
      step *= 0.5;
      trial = std::max(0.0, s + step);
      ft = objective(trial);
      ++damping;
    }
    // No descent left within rounding: s is the minimiser.
    const bool stalled = ft > f;
    const double ds = stalled ? 0.0 : trial - s;
    if (!stalled) {
      s = trial;
      f = ft;
    }
    if (stalled || std::abs(ds) < 1e-14 + 1e-10 * std::abs(s)) {
      r.s_opt = s;
      r.delta_q = std::sqrt(s);
      r.l2_at_opt = std::sqrt(f);
      r.clamped = s == 0.0 && g > 0.0;
      return r;
    }
  }
  throw ConvergenceError("optimize_newton: no convergence in " +
                             std::to_string(options.max_iterations) + " iterations",
                         s);
}

std::vector<OptimizationResult> optimize_series(const PairKernels& k, const WavepacketState& state,
                                                const std::vector<double>& times_fs,
                                                unsigned threads) {
  for (std::size_t i = 0; i < times_fs.size(); ++i) {
    if (!std::isfinite(times_fs[i])) throw std::invalid_argument("optimize_series: non-finite time");
    if (i > 0 && !(times_fs[i] > times_fs[i - 1])) {
      throw std::invalid_argument("optimize_series: times must be ascending");
    }
  }
  std::vector<OptimizationResult> out(times_fs.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const AffineResidual a = affine_residual(k, state, times_fs[i]);
      out[i] = optimize_closed_form(a.constant, a.slope, k.grid);
      out[i].t = times_fs[i];
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(times_fs.size())));
  if (threads <= 1) {
    work(0, times_fs.size());
    return out;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (times_fs.size() + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(times_fs.size(), b + chunk);
    if (b < e) pool.emplace_back(work, b, e);
  }
  for (auto& th : pool) th.join();
  return out;
}

double calibrate_flux_sign(PairKernels& k, const WavepacketState& state, double t_fs) {
  double best_sign = k.flux_sign;
  double best_l2 = std::numeric_limits<double>::infinity();
  for (const double sign : {-1.0, 1.0}) {
    k.flux_sign = sign;
    const AffineResidual a = affine_residual(k, state, t_fs);
    const OptimizationResult r = optimize_closed_form(a.constant, a.slope, k.grid);
    if (r.method != OptimizationMethod::degenerate && r.l2_at_opt < best_l2) {
      best_l2 = r.l2_at_opt;
      best_sign = sign;
    }
  }
  k.flux_sign = best_sign;
  return best_sign;
}

}  // namespace bobs
