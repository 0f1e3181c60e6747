#include "bobs/nuclear.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bobs/finite_difference.hpp"
#include "bobs/units.hpp"

namespace bobs {

MorseParameters MorseParameters::h2plus_surrogate(double fundamental_period_fs) {
  return from_period(fundamental_period_fs, MorseParameters{}.well_depth,
                     MorseParameters{}.equilibrium);
}

MorseParameters MorseParameters::from_period(double fundamental_period_fs, double well_depth,
                                             double equilibrium) {
  if (!(fundamental_period_fs > 0.0) || !(well_depth > 0.0)) {
    throw std::invalid_argument("morse: period and well depth must be positive");
  }
  MorseParameters p;
  p.well_depth = well_depth;
  p.equilibrium = equilibrium;
  const double gap = 2.0 * units::kPi * units::kHbar / units::fs_to_au(fundamental_period_fs);
  // E1 - E0 = w - w^2 / (2 D) for a Morse oscillator.
  const double disc = 1.0 - 2.0 * gap / p.well_depth;
  if (disc <= 0.0) throw std::invalid_argument("morse: period too short for the well depth");
  p.harmonic_frequency = p.well_depth * (1.0 - std::sqrt(disc));
  return p;
}

double MorseParameters::range_parameter(double reduced_mass) const {
  return harmonic_frequency * std::sqrt(reduced_mass / (2.0 * well_depth));
}

double MorseParameters::level(std::size_t n) const {
  const double v = static_cast<double>(n) + 0.5;
  return harmonic_frequency * v -
         harmonic_frequency * harmonic_frequency / (4.0 * well_depth) * v * v;
}

PotentialCurve morse_curve(const NuclearGrid& grid, const MorseParameters& p,
                           double reduced_mass) {
  if (!(p.well_depth > 0.0) || !(p.harmonic_frequency > 0.0)) {
    throw std::invalid_argument("morse: depth and frequency must be positive");
  }
  const double a = p.range_parameter(reduced_mass);
  PotentialCurve c{grid, Eigen::VectorXd(static_cast<Eigen::Index>(grid.n_points())),
                   reduced_mass};
  for (std::size_t i = 0; i < grid.n_points(); ++i) {
    const double e = 1.0 - std::exp(-a * (grid.at(i) - p.equilibrium));
    c.values[static_cast<Eigen::Index>(i)] = p.well_depth * e * e;
  }
  return c;
}

PotentialCurve harmonic_curve(const NuclearGrid& grid, double reduced_mass, double omega,
                              double q0) {
  PotentialCurve c{grid, Eigen::VectorXd(static_cast<Eigen::Index>(grid.n_points())),
                   reduced_mass};
  for (std::size_t i = 0; i < grid.n_points(); ++i) {
    const double d = grid.at(i) - q0;
    c.values[static_cast<Eigen::Index>(i)] = 0.5 * reduced_mass * omega * omega * d * d;
  }
  return c;
}

PotentialCurve load_curve(const std::filesystem::path& path, double reduced_mass) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open curve file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("# nuclear-curve v1", 0) != 0) {
    throw std::runtime_error(path.string() + ": missing '# nuclear-curve v1' header");
  }
  std::vector<double> q, v;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double a = 0.0, b = 0.0;
    if (!(ss >> a >> b)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected two columns");
    }
    if (!std::isfinite(a) || !std::isfinite(b)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": non-finite value");
    }
    q.push_back(a);
    v.push_back(b);
  }
  if (q.size() < 3) throw std::runtime_error(path.string() + ": fewer than 3 curve points");
  const double dq = (q.back() - q.front()) / static_cast<double>(q.size() - 1);
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (std::abs(q[i] - q[i - 1] - dq) > 1e-6 * std::abs(dq)) {
      throw std::runtime_error(path.string() + ": Q values are not uniformly spaced");
    }
  }
  NuclearGrid grid(q.front(), q.back(), dq);
  return PotentialCurve{grid, Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())),
                        reduced_mass};
}

void save_curve(const std::filesystem::path& path, const PotentialCurve& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write curve file " + path.string());
  out << "# nuclear-curve v1\n";
  out.precision(17);
  for (std::size_t i = 0; i < curve.grid.n_points(); ++i) {
    out << curve.grid.at(i) << ' ' << curve.values[static_cast<Eigen::Index>(i)] << '\n';
  }
}

double VibrationalBasis::omega(std::size_t m, std::size_t n) const {
  return (energies[static_cast<Eigen::Index>(m)] - energies[static_cast<Eigen::Index>(n)]) /
         units::kHbar;
}

VibrationalBasis solve_eigenstates(const PotentialCurve& pes, std::size_t n_states) {
  if (n_states < 1) throw std::invalid_argument("solve_eigenstates: n_states must be >= 1");
  const NuclearGrid& grid = pes.grid;
  if (static_cast<std::size_t>(pes.values.size()) != grid.n_points()) {
    throw std::invalid_argument("solve_eigenstates: potential does not match its grid");
  }
  if (!pes.values.allFinite()) throw std::runtime_error("solve_eigenstates: non-finite potential");
  if (!(pes.reduced_mass > 0.0)) throw std::invalid_argument("solve_eigenstates: bad reduced mass");

  // Interior points 1..N-1 of the N-interval grid carry the sine-DVR basis.
  const std::size_t n_int = grid.n_points() - 1;
  const auto dim = static_cast<Eigen::Index>(n_int - 1);
  if (dim < static_cast<Eigen::Index>(n_states)) {
    throw std::runtime_error("solve_eigenstates: grid too small for the requested states");
  }
  const double length = grid.dq() * static_cast<double>(n_int);
  const double prefactor = units::kHbar * units::kHbar / (2.0 * pes.reduced_mass) *
                           units::kPi * units::kPi / (2.0 * length * length);
  const double N = static_cast<double>(n_int);
  Eigen::MatrixXd h(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const double i = static_cast<double>(a + 1);
    for (Eigen::Index b = 0; b < a; ++b) {
      const double j = static_cast<double>(b + 1);
      const double sm = std::sin(units::kPi * (i - j) / (2.0 * N));
      const double sp = std::sin(units::kPi * (i + j) / (2.0 * N));
      const double sign = ((a - b) % 2 == 0) ? 1.0 : -1.0;
      h(a, b) = h(b, a) = prefactor * sign * (1.0 / (sm * sm) - 1.0 / (sp * sp));
    }
    const double s = std::sin(units::kPi * i / N);
    h(a, a) = prefactor * ((2.0 * N * N + 1.0) / 3.0 - 1.0 / (s * s)) + pes.values[a + 1];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("solve_eigenstates: diagonalisation failed");

  const double plateau = std::min(pes.values[0], pes.values[pes.values.size() - 1]);
  std::size_t bound = 0;
  while (bound < static_cast<std::size_t>(dim) &&
         solver.eigenvalues()[static_cast<Eigen::Index>(bound)] < plateau) {
    ++bound;
  }
  if (bound < n_states) {
    throw std::runtime_error("solve_eigenstates: requested " + std::to_string(n_states) +
                             " states but the curve supports only " + std::to_string(bound) +
                             " bound states below the plateau");
  }

  VibrationalBasis basis;
  basis.grid = grid;
  basis.reduced_mass = pes.reduced_mass;
  const auto ns = static_cast<Eigen::Index>(n_states);
  const auto np = static_cast<Eigen::Index>(grid.n_points());
  basis.energies = solver.eigenvalues().head(ns);
  basis.states = Eigen::MatrixXd::Zero(np, ns);
  const double norm = 1.0 / std::sqrt(grid.dq());
  for (Eigen::Index n = 0; n < ns; ++n) {
    Eigen::VectorXd v = solver.eigenvectors().col(n) * norm;
    const double peak = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (std::abs(v[i]) > 1e-3 * peak) {
        if (v[i] < 0.0) v = -v;
        break;
      }
    }
    basis.states.col(n).segment(1, dim) = v;
  }
  for (Eigen::Index n = 1; n < ns; ++n) {
    if (!(basis.energies[n] > basis.energies[n - 1])) {
      throw std::runtime_error("solve_eigenstates: degenerate levels for a single-well curve");
    }
  }
  basis.d1 = fd::differentiate_columns(basis.states.transpose(), grid.dq(), 1).transpose();
  basis.d2 = fd::differentiate_columns(basis.states.transpose(), grid.dq(), 2).transpose();
  return basis;
}

namespace {

Eigen::VectorXd shifted_samples(const NuclearGrid& grid, const Eigen::VectorXd& f, double shift) {
  const auto n = static_cast<Eigen::Index>(grid.n_points());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  const double steps = shift / grid.dq();
  const double whole = std::round(steps);
  if (std::abs(steps - whole) < 1e-9) {
    const auto k = static_cast<Eigen::Index>(whole);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index src = i - k;
      if (src >= 0 && src < n) out[i] = f[src];
    }
    return out;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = fd::interpolate(grid, f, grid.at(static_cast<std::size_t>(i)) - shift);
  }
  return out;
}

constexpr double kMaxNormDeficit = 0.05;

}  // namespace

WavepacketState build_wavepacket(std::shared_ptr<const VibrationalBasis> basis,
                                 const InitialShape& shape) {
  if (!basis) throw std::invalid_argument("build_wavepacket: null basis");
  const auto ns = static_cast<Eigen::Index>(basis->size());
  WavepacketState state;
  state.basis = basis;
  if (const auto* sg = std::get_if<ShiftedGround>(&shape); sg && sg->shift == 0.0) {
    state.coeffs = Eigen::VectorXd::Unit(ns, 0);
  } else if (sg) {
    const Eigen::VectorXd f = shifted_samples(basis->grid, basis->states.col(0), sg->shift);
    state.coeffs = (basis->states.transpose() * f) * basis->grid.dq();
  } else {
    const auto& ex = std::get<ExplicitCoefficients>(shape);
    if (static_cast<Eigen::Index>(ex.coeffs.size()) > ns) {
      throw std::invalid_argument("build_wavepacket: more coefficients than basis states");
    }
    state.coeffs = Eigen::VectorXd::Zero(ns);
    for (std::size_t i = 0; i < ex.coeffs.size(); ++i) {
      if (!std::isfinite(ex.coeffs[i])) throw std::invalid_argument("build_wavepacket: non-finite coefficient");
      state.coeffs[static_cast<Eigen::Index>(i)] = ex.coeffs[i];
    }
  }
  const double norm2 = state.coeffs.squaredNorm();
  state.norm_deficit = 1.0 - norm2;
  if (state.norm_deficit > kMaxNormDeficit) {
    throw std::runtime_error("build_wavepacket: basis of " + std::to_string(ns) +
                             " states captures only " + std::to_string(100.0 * norm2) +
                             "% of the initial norm; increase the basis size");
  }
  if (std::abs(state.norm_deficit) > 1e-14) state.coeffs /= std::sqrt(norm2);
  return state;
}

Eigen::VectorXcd evolve(const WavepacketState& state, double t_fs) {
  const double t = units::fs_to_au(t_fs - state.t);
  const auto n = state.coeffs.size();
  Eigen::VectorXcd c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c[i] = state.coeffs[i] * std::polar(1.0, -state.basis->energies[i] * t / units::kHbar);
  }
  return c;
}

NuclearObservables nuclear_observables(const WavepacketState& state, double t_fs) {
  const VibrationalBasis& b = *state.basis;
  const Eigen::VectorXcd c = evolve(state, t_fs);
  const Eigen::VectorXcd chi = b.states.cast<std::complex<double>>() * c;
  const Eigen::VectorXcd dchi = b.d1.cast<std::complex<double>>() * c;
  NuclearObservables obs;
  obs.density = chi.cwiseAbs2();
  obs.flux = (units::kHbar / b.reduced_mass) * (chi.conjugate().cwiseProduct(dchi)).imag();
  const Eigen::VectorXd q = b.grid.points();
  const Eigen::VectorXd w = b.grid.weights();
  const double norm = w.dot(obs.density);
  obs.mean_q = w.dot(obs.density.cwiseProduct(q)) / norm;
  const double q2 = w.dot(obs.density.cwiseProduct(q.cwiseAbs2())) / norm;
  obs.variance = q2 - obs.mean_q * obs.mean_q;
  return obs;
}

Eigen::VectorXd nuclear_density_rate(const WavepacketState& state, double t_fs) {
  const VibrationalBasis& b = *state.basis;
  const double t = units::fs_to_au(t_fs - state.t);
  const auto ns = state.coeffs.size();
  Eigen::VectorXd rate = Eigen::VectorXd::Zero(b.states.rows());
  for (Eigen::Index n = 1; n < ns; ++n) {
    for (Eigen::Index m = 0; m < n; ++m) {
      const double w = b.omega(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
      const double c = -2.0 * w * state.coeffs[n] * state.coeffs[m] * std::sin(w * t);
      if (c != 0.0) rate += c * b.states.col(n).cwiseProduct(b.states.col(m));
    }
  }
  return rate;
}

}  // namespace bobs
