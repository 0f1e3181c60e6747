// One PASS/FAIL line per acceptance criterion on the default H2+ surrogate.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "bobs/analysis.hpp"
#include "bobs/kernels.hpp"
#include "bobs/nuclear.hpp"
#include "bobs/optimizer.hpp"
#include "bobs/pipeline.hpp"
#include "bobs/units.hpp"

using namespace bobs;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}
std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double max_abs(const Field& f) { return f.size() ? f.cwiseAbs().maxCoeff() : 0.0; }
double max_abs(const VectorField& j) { return std::max(max_abs(j.x), max_abs(j.z)); }

int failures = 0;

void report(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = elapsed < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s criterion %2d %s: %s [%.2f s of %.0f s]\n", pass ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), elapsed, limit_s);
  std::fflush(stdout);
}

// Model shared by every criterion. Built once; its cost is reported separately.
const Model& model() {
  static const Model m = build_model(RunConfig{});
  return m;
}

// Two vibrational periods at the default step.
const Model& two_periods() {
  static const Model m = [] {
    Model c = model();
    c.span = 2.0 * c.vibrational_period;
    return c;
  }();
  return m;
}

const SeriesData& two_period_series() {
  static const SeriesData s = compute_series(two_periods());
  return s;
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const Model& m = model();
  const PairKernels& k = m.kernels;
  const std::vector<double>& snaps = m.config.snapshots;
  std::printf("model: %zu states, vibrational period %.3f fs, recurrence %.2f fs, built in %.2f s\n",
              k.n_states, m.vibrational_period, m.recurrence_time,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

  report(1, "zero correlation length", 1.0, [&] {
    bool ok = true;
    double worst_nl = 0.0;
    for (double t : snaps) {
      const VectorField j = flux_field(k, m.state, t, 0.0);
      const Field div = divergence_field(j, k.grid);
      const Residual r = residual(k, m.state, t, 0.0);
      ok = ok && max_abs(j) == 0.0 && max_abs(div) == 0.0 &&
           r.l2 == planar_l2(flow_field(k, m.state, t, 0.0), k.grid);
      const NonlinearFields nl = nonlinear_fields(m.scan, *m.basis, m.state, t, 0.0, k.n_states);
      worst_nl = std::max({worst_nl, max_abs(nl.flux), max_abs(nl.div_j)});
    }
    ok = ok && worst_nl == 0.0;
    return Outcome{ok, ok ? "flux and divergence identically zero, residual equals flow norm"
                          : "nonzero field at zero correlation length"};
  });

  report(2, "stationary eigenstate", 1.0, [&] {
    std::vector<double> c(k.n_states, 0.0);
    c[0] = 1.0;
    const WavepacketState ground = build_wavepacket(m.basis, ExplicitCoefficients{c});
    std::vector<double> times;
    for (int i = 0; i <= 20; ++i) times.push_back(0.3 + 2.2 * i);
    double worst = 0.0;
    for (double t : times) {
      const AffineResidual a = affine_residual(k, ground, t);
      worst = std::max({worst, max_abs(flow_field(k, ground, t, 1e-3)),
                        max_abs(flux_field(k, ground, t, 1e-3)), max_abs(a.constant),
                        max_abs(a.slope)});
    }
    const auto series = optimize_series(k, ground, times);
    const bool degenerate = std::all_of(series.begin(), series.end(), [](const auto& r) {
      return r.method == OptimizationMethod::degenerate && r.s_opt == 0.0;
    });
    return Outcome{worst == 0.0 && degenerate,
                   fmt("max field %.1e over %.0f times, ", worst, times.size()) +
                       (degenerate ? "optimizer degenerate" : "optimizer not degenerate")};
  });

  report(3, "fourth-order oracle", 60.0, [&] {
    const double d = 0.04;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double t : snaps) {
      double err[2][3];
      for (int i = 0; i < 2; ++i) {
        const double di = i == 0 ? d : 0.5 * d;
        const NonlinearFields nl =
            nonlinear_fields(m.scan, *m.basis, m.state, t, di, k.n_states, k.flux_sign);
        const VectorField j = flux_field(k, m.state, t, di * di);
        err[i][0] = max_abs(nl.rho_c_dot - flow_field(k, m.state, t, di * di));
        err[i][1] = std::max(max_abs(nl.flux.x - j.x), max_abs(nl.flux.z - j.z));
        err[i][2] = max_abs(nl.div_j - divergence_field(j, k.grid));
      }
      for (int f = 0; f < 3; ++f) {
        const double r = err[0][f] / err[1][f];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    }
    return Outcome{lo >= 8.0 && hi <= 32.0,
                   fmt("error ratios for flow, flux, divergence at delta 0.04/0.02 in [%.2f, %.2f]",
                       lo, hi)};
  });

  report(4, "affine least squares", 60.0, [&] {
    const Model& two = two_periods();
    const std::vector<double> times = time_axis(two);
    double worst_scan = 0.0, worst_newton = 0.0;
    std::size_t degenerate = 0;
    bool ok = true;
    for (double t : times) {
      const AffineResidual a = affine_residual(k, m.state, t);
      const OptimizationResult cf = optimize_closed_form(a.constant, a.slope, k.grid);
      if (cf.method == OptimizationMethod::degenerate) {
        ++degenerate;
        ok = ok && max_abs(a.slope) == 0.0;
        continue;
      }
      auto cost = [&](double s) { return planar_l2(a.constant + s * a.slope, k.grid); };
      const double range = 2.0 * cf.s_opt + 1e-6;
      const int n = 10000;
      const double step = range / (n - 1);
      double best = std::numeric_limits<double>::infinity(), s_scan = 0.0;
      for (int i = 0; i < n; ++i) {
        const double s = i * step;
        const double c = cost(s);
        if (c < best) {
          best = c;
          s_scan = s;
        }
      }
      worst_scan = std::max(worst_scan, std::abs(s_scan - cf.s_opt) / step);
      const OptimizationResult nw = optimize_newton(cost, 0.0);
      const double rel = std::abs(nw.s_opt - cf.s_opt) / std::max(cf.s_opt, 1e-300);
      worst_newton = std::max(worst_newton, rel);
    }
    ok = ok && worst_scan <= 1.0 && worst_newton <= 1e-10;
    return Outcome{ok, fmt("%.0f times; scan offset up to %.2f scan steps, ", times.size(),
                           worst_scan) +
                           fmt("Newton relative deviation %.2e, %.0f degenerate",
                               worst_newton, static_cast<double>(degenerate))};
  });

  report(5, "flux symmetry", 60.0, [&] {
    double worst = 0.0;
    for (double t : snaps) {
      const AffineResidual a = affine_residual(k, m.state, t);
      const double s = optimize_closed_form(a.constant, a.slope, k.grid).s_opt;
      worst = std::max(worst, symmetry_metrics(flux_field(k, m.state, t, s), k.grid).worst());
    }
    return Outcome{worst < 1e-8, fmt("worst relative metric %.2e", worst)};
  });

  report(6, "continuity by construction", 60.0, [&] {
    const double h = 1e-4;
    double worst = 0.0;
    for (double t : snaps) {
      const AffineResidual a = affine_residual(k, m.state, t);
      const double s_opt = optimize_closed_form(a.constant, a.slope, k.grid).s_opt;
      for (double s : {0.0, s_opt}) {
        const Field fd = (correlated_density(k, m.state, t + h, s) -
                          correlated_density(k, m.state, t - h, s)) /
                         units::fs_to_au(2.0 * h);
        const Field flow = flow_field(k, m.state, t, s);
        worst = std::max(worst, max_abs(fd - flow) / max_abs(flow));
      }
    }
    return Outcome{worst <= 1e-8, fmt("worst relative deviation %.2e", worst)};
  });

  report(7, "residual quality", 60.0, [&] {
    double worst = 0.0;
    for (double t : snaps) {
      const AffineResidual a = affine_residual(k, m.state, t);
      const double s = optimize_closed_form(a.constant, a.slope, k.grid).s_opt;
      const Residual r = residual(k, m.state, t, s);
      worst = std::max(worst, r.per_point / max_abs(flow_field(k, m.state, t, s)));
    }
    return Outcome{worst <= 0.1, fmt("residual per point / max|flow| up to %.2e", worst)};
  });

  report(8, "dynamics shape", 60.0, [&] {
    std::vector<double> times, mean_q;
    for (int i = 0; i <= 2000; ++i) {
      times.push_back(0.01 * i);
      mean_q.push_back(nuclear_observables(m.state, times.back()).mean_q);
    }
    const auto turns = turning_indices(mean_q);
    if (turns.empty()) return Outcome{false, "no turning point within 20 fs"};
    const double t_turn = refine_extremum(times, mean_q, turns.front());
    const Eigen::VectorXd flux = nuclear_observables(m.state, t_turn).flux;
    Eigen::Index lo, hi;
    flux.minCoeff(&lo);
    flux.maxCoeff(&hi);
    if (lo > hi) std::swap(lo, hi);
    const NuclearGrid& g = m.basis->grid;
    double q_node = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index i = lo; i < hi; ++i) {
      if ((flux[i] <= 0.0) != (flux[i + 1] <= 0.0)) {
        q_node = g.at(static_cast<std::size_t>(i)) + g.dq() * flux[i] / (flux[i] - flux[i + 1]);
        break;
      }
    }
    const bool ok = t_turn >= 8.0 && t_turn <= 14.0 && std::abs(q_node - 2.4) <= 0.5;
    return Outcome{ok, fmt("first turning at %.2f fs, nuclear flux node at Q = %.3f bohr", t_turn,
                           q_node)};
  });

  report(9, "correlation length series", 300.0, [&] {
    const SeriesData& s = two_period_series();
    std::vector<double> d2;
    for (const auto& r : s.opt) d2.push_back(r.s_opt);
    // The packet is released at rest, so t = 0 opens the first segment.
    std::vector<std::size_t> bounds{0};
    for (std::size_t i : turning_indices(s.mean_q)) bounds.push_back(i);
    double worst = 1.0;
    std::string rhos;
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
      const std::size_t a = bounds[b], e = bounds[b + 1] + 1;
      const double rho = rank_correlation(std::span(d2).subspan(a, e - a),
                                          std::span(s.sigma2).subspan(a, e - a));
      worst = std::min(worst, rho);
      rhos += (rhos.empty() ? "" : ", ") + fmt("%.3f", rho);
    }
    const double dt = m.config.dt;
    const double p_d2 = autocorrelation_period(d2, dt);
    const double p_q = autocorrelation_period(s.mean_q, dt);
    const bool ok = bounds.size() >= 2 && worst > 0.8 && std::abs(p_d2 - p_q) <= 2.0 * dt;
    return Outcome{ok, "segment rank correlations " + rhos +
                           fmt("; period of delta^2 %.2f fs vs nuclear %.2f fs", p_d2, p_q)};
  });

  report(10, "spectra", 300.0, [&] {
    const SeriesData s = compute_series(m);
    std::vector<double> d2;
    for (const auto& r : s.opt) d2.push_back(r.s_opt);
    const PowerSpectrum ps = power_spectrum(s.times, d2, "delta_q2");
    const PowerSpectrum pv = power_spectrum(s.times, s.sigma2, "sigma2");
    const auto sig_peaks = find_peaks(pv, 0.1);
    const auto d2_present = find_peaks(ps, 0.01);
    const auto d2_strong = find_peaks(ps, 0.1);
    std::size_t missing = 0, top = 0;
    for (std::size_t p : sig_peaks) {
      top = std::max(top, p);
      const bool found = std::any_of(d2_present.begin(), d2_present.end(), [&](std::size_t q) {
        return (q > p ? q - p : p - q) <= 1;
      });
      if (!found) ++missing;
    }
    std::size_t extra = 0;
    for (std::size_t q : d2_strong) extra += q > top + 1;
    const bool ok = !sig_peaks.empty() && missing == 0 && extra >= 1;
    return Outcome{ok, fmt("span %.1f fs, %.0f sigma^2 peaks above 10%%, ", m.span,
                           static_cast<double>(sig_peaks.size())) +
                           fmt("%.0f missing from delta^2, %.0f extra higher delta^2 peaks",
                               static_cast<double>(missing), static_cast<double>(extra))};
  });

  report(11, "norm perturbation", 300.0, [&] {
    const NormDrift d = norm_drift(k, m.state, two_period_series().opt);
    return Outcome{d.max_abs < 0.02, fmt("max accumulated drift %.3e over %.1f fs", d.max_abs,
                                         two_periods().span)};
  });

  std::printf("%s\n", failures == 0 ? "all criteria passed" : "some criteria failed");
  return failures == 0 ? 0 : 1;
}
