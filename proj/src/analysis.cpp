#include "bobs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "bobs/units.hpp"

namespace bobs {

double PowerSpectrum::total_power() const {
  const auto n = power.size();
  double total = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) total += power[k];
  // Interior bins stand for +-k; the DC bin once and, for even N, the last once.
  total = 2.0 * total - power[0];
  if (n > 1 && even_length) total -= power[n - 1];
  return total * peak_power;
}

PowerSpectrum power_spectrum(std::span<const double> times, std::span<const double> values,
                             std::string source, bool hann_window) {
  if (times.size() != values.size()) throw std::invalid_argument("power_spectrum: size mismatch");
  const std::size_t n = values.size();
  if (n < 8) throw std::invalid_argument("power_spectrum: need at least 8 samples");
  const double dt = (times[n - 1] - times[0]) / static_cast<double>(n - 1);
  if (!(dt > 0.0)) throw std::invalid_argument("power_spectrum: times must increase");
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(times[i] - times[i - 1] - dt) > 1e-6 * dt) {
      throw std::invalid_argument("power_spectrum: non-uniform sampling at index " +
                                  std::to_string(i));
    }
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (hann_window) w = 0.5 - 0.5 * std::cos(2.0 * units::kPi * static_cast<double>(i) / static_cast<double>(n - 1));
    x[i] = w * (values[i] - mean);
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, x);

  const std::size_t half = n / 2;
  PowerSpectrum ps;
  ps.source = std::move(source);
  ps.even_length = n % 2 == 0;
  ps.frequencies.resize(static_cast<Eigen::Index>(half + 1));
  ps.power.resize(static_cast<Eigen::Index>(half + 1));
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  for (std::size_t k = 0; k <= half; ++k) {
    ps.frequencies[static_cast<Eigen::Index>(k)] =
        2.0 * units::kPi * static_cast<double>(k) / (static_cast<double>(n) * dt);
    ps.power[static_cast<Eigen::Index>(k)] = std::norm(spec[k]) / n2;
  }
  ps.peak_power = ps.power.maxCoeff();
  if (ps.peak_power > 0.0) ps.power /= ps.peak_power;
  return ps;
}

std::vector<std::size_t> find_peaks(const PowerSpectrum& spectrum, double threshold) {
  std::vector<std::size_t> peaks;
  const auto& p = spectrum.power;
  for (Eigen::Index k = 1; k + 1 < p.size(); ++k) {
    if (p[k] > p[k - 1] && p[k] >= p[k + 1] && p[k] >= threshold && p[k] > 0.0) {
      peaks.push_back(static_cast<std::size_t>(k));
    }
  }
  return peaks;
}

double SymmetryMetrics::worst() const {
  return std::max({inversion, radial_on_axis, axial_on_midplane});
}

SymmetryMetrics symmetry_metrics(const VectorField& j, const ElectronicGrid& g) {
  if (j.x.size() != static_cast<Eigen::Index>(g.size()) ||
      j.z.size() != static_cast<Eigen::Index>(g.size())) {
    throw std::invalid_argument("symmetry_metrics: field does not match the grid");
  }
  SymmetryMetrics m;
  m.max_magnitude = (j.x.cwiseAbs2() + j.z.cwiseAbs2()).cwiseSqrt().maxCoeff();
  if (m.max_magnitude == 0.0) return m;
  for (std::size_t iz = 0; iz < g.nz(); ++iz) {
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      const auto k = static_cast<Eigen::Index>(g.index(ix, iz));
      const auto km = static_cast<Eigen::Index>(g.index(g.mirror_x(ix), g.mirror_z(iz)));
      m.inversion = std::max({m.inversion, std::abs(j.x[k] + j.x[km]), std::abs(j.z[k] + j.z[km])});
    }
  }
  for (std::size_t iz = 0; iz < g.nz(); ++iz) {
    m.radial_on_axis = std::max(m.radial_on_axis,
                                std::abs(j.x[static_cast<Eigen::Index>(g.index(g.center_x(), iz))]));
  }
  for (std::size_t ix = 0; ix < g.nx(); ++ix) {
    m.axial_on_midplane = std::max(
        m.axial_on_midplane, std::abs(j.z[static_cast<Eigen::Index>(g.index(ix, g.center_z()))]));
  }
  m.inversion /= m.max_magnitude;
  m.radial_on_axis /= m.max_magnitude;
  m.axial_on_midplane /= m.max_magnitude;
  return m;
}

namespace {

// Per-pair volume integrals of the O(s) flow kernels.
double second_order_volume_rate(const PairKernels& k, const WavepacketState& state,
                                          double t_fs, const Eigen::RowVectorXd& v2a,
                                          const Eigen::RowVectorXd& v2b) {
  const double t = units::fs_to_au(t_fs - state.t);
  Eigen::VectorXd alpha(static_cast<Eigen::Index>(k.n_pairs()));
  for (Eigen::Index p = 0; p < alpha.size(); ++p) {
    const StatePair& pr = k.pairs[static_cast<std::size_t>(p)];
    alpha[p] = -2.0 * k.omega[p] * state.coeffs[static_cast<Eigen::Index>(pr.n)] *
               state.coeffs[static_cast<Eigen::Index>(pr.m)] * std::sin(k.omega[p] * t);
  }
  return v2a.dot(alpha) + 0.5 * v2b.dot(alpha);
}

}  // namespace

NormDrift norm_drift(const PairKernels& k, const WavepacketState& state,
                     const std::vector<OptimizationResult>& series) {
  NormDrift d;
  if (series.empty()) return d;
  const Eigen::VectorXd cw = k.grid.cylindrical_weights();
  const Eigen::RowVectorXd v2a = cw.transpose() * k.f2a;
  const Eigen::RowVectorXd v2b = cw.transpose() * k.f2b;
  std::vector<double> rate(series.size(), 0.0);
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (k.n_pairs() == 0 || series[i].s_opt == 0.0) continue;
    rate[i] = series[i].s_opt * second_order_volume_rate(k, state, series[i].t, v2a, v2b);
  }
  double acc = 0.0;
  d.times.push_back(series[0].t);
  d.drift.push_back(0.0);
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double dt = units::fs_to_au(series[i].t - series[i - 1].t);
    acc += 0.5 * dt * (rate[i] + rate[i - 1]);
    d.times.push_back(series[i].t);
    d.drift.push_back(acc);
    d.max_abs = std::max(d.max_abs, std::abs(acc));
  }
  return d;
}

double flow_volume_integral(const PairKernels& k, const WavepacketState& state, double t_fs,
                            double s) {
  return k.grid.cylindrical_weights().dot(flow_field(k, state, t_fs, s));
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double rank_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("rank_correlation: need two equal-length series of >= 2 samples");
  }
  const std::vector<double> ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

std::vector<std::size_t> turning_indices(std::span<const double> v) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const double left = v[i] - v[i - 1];
    const double right = v[i + 1] - v[i];
    if ((left > 0.0 && right <= 0.0) || (left < 0.0 && right >= 0.0)) out.push_back(i);
  }
  return out;
}

double refine_extremum(std::span<const double> t, std::span<const double> v, std::size_t i) {
  if (i == 0 || i + 1 >= v.size()) return t[i];
  const double denom = v[i - 1] - 2.0 * v[i] + v[i + 1];
  if (denom == 0.0) return t[i];
  const double offset = 0.5 * (v[i - 1] - v[i + 1]) / denom;
  return t[i] + offset * 0.5 * (t[i + 1] - t[i - 1]);
}

double mean_period(std::span<const double> t, std::span<const double> v) {
  std::vector<double> maxima;
  for (std::size_t i : turning_indices(v)) {
    if (v[i] > v[i - 1]) maxima.push_back(refine_extremum(t, v, i));
  }
  if (maxima.size() < 2) return 0.0;
  return (maxima.back() - maxima.front()) / static_cast<double>(maxima.size() - 1);
}

double autocorrelation_period(std::span<const double> values, double dt) {
  const std::size_t n = values.size();
  if (n < 4) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = values[i] - mean;
  const std::size_t max_lag = (3 * n) / 4;
  std::vector<double> r(max_lag + 1);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) acc += x[i] * x[i + lag];
    r[lag] = acc / static_cast<double>(n - lag);
  }
  std::size_t lag = 1;
  while (lag <= max_lag && r[lag] > 0.0) ++lag;
  if (lag > max_lag) return 0.0;
  std::size_t best = 0;
  for (; lag < max_lag; ++lag) {
    if (r[lag] > r[lag - 1] && r[lag] >= r[lag + 1] && r[lag] > 0.0) {
      best = lag;
      break;
    }
  }
  if (best == 0) return 0.0;
  const double denom = r[best - 1] - 2.0 * r[best] + r[best + 1];
  const double offset = denom != 0.0 ? 0.5 * (r[best - 1] - r[best + 1]) / denom : 0.0;
  return (static_cast<double>(best) + offset) * dt;
}

namespace {

double mean_level(const WavepacketState& state) {
  double n_bar = 0.0;
  for (Eigen::Index n = 0; n < state.coeffs.size(); ++n) {
    n_bar += static_cast<double>(n) * state.coeffs[n] * state.coeffs[n];
  }
  return n_bar;
}

double autocorrelation(const WavepacketState& state, double t_au) {
  std::complex<double> acc = 0.0;
  for (Eigen::Index n = 0; n < state.coeffs.size(); ++n) {
    acc += state.coeffs[n] * state.coeffs[n] * std::polar(1.0, -state.basis->energies[n] * t_au);
  }
  return std::norm(acc);
}

}  // namespace

double vibrational_period(const WavepacketState& state) {
  const auto& e = state.basis->energies;
  if (e.size() < 2) return 0.0;
  const auto n = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(mean_level(state))), 0,
                                          e.size() - 2);
  return units::au_to_fs(2.0 * units::kPi * units::kHbar / (e[n + 1] - e[n]));
}

double recurrence_time(const WavepacketState& state) {
  const auto& e = state.basis->energies;
  if (e.size() < 3) return 0.0;
  const auto n = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::lround(mean_level(state))), 1,
                                          e.size() - 2);
  const double curvature = std::abs(e[n + 1] - 2.0 * e[n] + e[n - 1]);
  if (curvature == 0.0) return 0.0;
  const double estimate = 4.0 * units::kPi * units::kHbar / curvature;
  const double step = units::fs_to_au(vibrational_period(state)) / 200.0;
  double best_t = estimate, best = -1.0;
  for (double t = 0.75 * estimate; t <= 1.25 * estimate; t += step) {
    const double a = autocorrelation(state, t);
    if (a > best) {
      best = a;
      best_t = t;
    }
  }
  // Golden-section polish inside the bracketing samples.
  double lo = best_t - step, hi = best_t + step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (autocorrelation(state, a) > autocorrelation(state, b)) hi = b;
    else lo = a;
  }
  return units::au_to_fs(0.5 * (lo + hi));
}

}  // namespace bobs
