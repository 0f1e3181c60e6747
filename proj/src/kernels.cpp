#include "bobs/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "bobs/finite_difference.hpp"
#include "bobs/units.hpp"

namespace bobs {

namespace {

void require_same_grid(const ElectronicScan& scan, const VibrationalBasis& basis) {
  if (!(scan.n_grid == basis.grid)) {
    throw std::invalid_argument("electronic scan and vibrational basis use different Q grids");
  }
}

// Q-resolved electronic factors of the kernels, (electronic point) x (Q).
struct ElectronicFactors {
  Eigen::MatrixXd density;    // phi^2
  Eigen::MatrixXd spread;     // phi'' phi - phi'^2
  Eigen::MatrixXd coupling_x; // phi d_x phi' - phi' d_x phi
  Eigen::MatrixXd coupling_z;
};

ElectronicFactors electronic_factors(const ElectronicScan& scan) {
  ElectronicFactors e;
  e.density = scan.phi.cwiseAbs2();
  e.spread = scan.d2_q.cwiseProduct(scan.phi) - scan.d1_q.cwiseAbs2();
  const double dq = scan.n_grid.dq();
  const Eigen::MatrixXd gx1 = fd::differentiate_columns(scan.grad_x, dq, 1);
  const Eigen::MatrixXd gz1 = fd::differentiate_columns(scan.grad_z, dq, 1);
  e.coupling_x = scan.phi.cwiseProduct(gx1) - scan.d1_q.cwiseProduct(scan.grad_x);
  e.coupling_z = scan.phi.cwiseProduct(gz1) - scan.d1_q.cwiseProduct(scan.grad_z);
  return e;
}

struct PairTimeFactors {
  Eigen::VectorXd flow;  // -2 omega a_n a_m sin(omega t)
  Eigen::VectorXd flux;  // a_n a_m sin(omega t)
};

PairTimeFactors time_factors(const PairKernels& k, const WavepacketState& state, double t_fs) {
  if (static_cast<std::size_t>(state.coeffs.size()) < k.n_states) {
    throw std::invalid_argument("wavepacket has fewer coefficients than the kernel basis");
  }
  const double t = units::fs_to_au(t_fs - state.t);
  const auto np = static_cast<Eigen::Index>(k.n_pairs());
  PairTimeFactors f{Eigen::VectorXd(np), Eigen::VectorXd(np)};
  for (Eigen::Index p = 0; p < np; ++p) {
    const StatePair& pr = k.pairs[static_cast<std::size_t>(p)];
    const double aa = state.coeffs[static_cast<Eigen::Index>(pr.n)] *
                      state.coeffs[static_cast<Eigen::Index>(pr.m)];
    const double sn = std::sin(k.omega[p] * t);
    f.flow[p] = -2.0 * k.omega[p] * aa * sn;
    f.flux[p] = aa * sn;
  }
  return f;
}

}  // namespace

PairKernels build_pair_kernels(const ElectronicScan& scan, const VibrationalBasis& basis,
                               std::size_t n_states) {
  require_same_grid(scan, basis);
  if (n_states < 1 || n_states > basis.size()) {
    throw std::invalid_argument("build_pair_kernels: n_states must be in [1, basis size]");
  }
  PairKernels k;
  k.grid = scan.e_grid;
  k.n_states = n_states;
  for (std::size_t n = 1; n < n_states; ++n) {
    for (std::size_t m = 0; m < n; ++m) k.pairs.push_back({m, n});
  }
  const auto np = static_cast<Eigen::Index>(k.pairs.size());
  const auto nq = static_cast<Eigen::Index>(basis.grid.n_points());
  const auto ns = static_cast<Eigen::Index>(n_states);
  const Eigen::VectorXd w = basis.grid.weights();
  const Eigen::MatrixXd& chi = basis.states;
  const Eigen::MatrixXd& d1 = basis.d1;
  const Eigen::MatrixXd& d2 = basis.d2;

  k.omega.resize(np);
  Eigen::MatrixXd w_prod(nq, np), w_spread(nq, np), w_anti(nq, np);
  for (Eigen::Index p = 0; p < np; ++p) {
    const auto m = static_cast<Eigen::Index>(k.pairs[static_cast<std::size_t>(p)].m);
    const auto n = static_cast<Eigen::Index>(k.pairs[static_cast<std::size_t>(p)].n);
    k.omega[p] = basis.omega(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    w_prod.col(p) = w.cwiseProduct(chi.col(n).cwiseProduct(chi.col(m)));
    w_spread.col(p) = w.cwiseProduct(d2.col(n).cwiseProduct(chi.col(m)) -
                                      2.0 * d1.col(n).cwiseProduct(d1.col(m)) +
                                      chi.col(n).cwiseProduct(d2.col(m)));
    w_anti.col(p) = w.cwiseProduct(chi.col(n).cwiseProduct(d1.col(m)) -
                                   d1.col(n).cwiseProduct(chi.col(m)));
  }
  Eigen::MatrixXd w_diag(nq, ns), w_diag_spread(nq, ns);
  for (Eigen::Index n = 0; n < ns; ++n) {
    w_diag.col(n) = w.cwiseProduct(chi.col(n).cwiseAbs2());
    w_diag_spread.col(n) =
        w.cwiseProduct(2.0 * d2.col(n).cwiseProduct(chi.col(n)) - 2.0 * d1.col(n).cwiseAbs2());
  }

  const ElectronicFactors e = electronic_factors(scan);
  k.f0.noalias() = e.density * w_prod;
  k.f2a.noalias() = e.spread * w_prod;
  k.f2b.noalias() = e.density * w_spread;
  k.gx.noalias() = e.coupling_x * w_anti;
  k.gz.noalias() = e.coupling_z * w_anti;
  k.diag_f0.noalias() = e.density * w_diag;
  k.diag_f2a.noalias() = e.spread * w_diag;
  k.diag_f2b.noalias() = e.density * w_diag_spread;
  return k;
}

PairKernelFields ordered_pair_kernels(const ElectronicScan& scan, const VibrationalBasis& basis,
                                      std::size_t m, std::size_t n) {
  require_same_grid(scan, basis);
  if (m >= basis.size() || n >= basis.size()) throw std::out_of_range("pair index beyond basis");
  const auto mi = static_cast<Eigen::Index>(m);
  const auto ni = static_cast<Eigen::Index>(n);
  const Eigen::VectorXd w = basis.grid.weights();
  const Eigen::MatrixXd& chi = basis.states;
  const Eigen::MatrixXd& d1 = basis.d1;
  const Eigen::MatrixXd& d2 = basis.d2;
  const Eigen::VectorXd prod = w.cwiseProduct(chi.col(ni).cwiseProduct(chi.col(mi)));
  const Eigen::VectorXd spread =
      w.cwiseProduct(d2.col(ni).cwiseProduct(chi.col(mi)) -
                     2.0 * d1.col(ni).cwiseProduct(d1.col(mi)) + chi.col(ni).cwiseProduct(d2.col(mi)));
  const Eigen::VectorXd anti =
      w.cwiseProduct(chi.col(ni).cwiseProduct(d1.col(mi)) - d1.col(ni).cwiseProduct(chi.col(mi)));
  const ElectronicFactors e = electronic_factors(scan);
  return {e.density * prod, e.spread * prod, e.density * spread, e.coupling_x * anti,
          e.coupling_z * anti};
}

Field flow_field(const PairKernels& k, const WavepacketState& state, double t_fs, double s) {
  if (k.n_pairs() == 0) return Field::Zero(static_cast<Eigen::Index>(k.grid.size()));
  const PairTimeFactors f = time_factors(k, state, t_fs);
  Field out = k.f0 * f.flow;
  if (s != 0.0) out += s * (k.f2a * f.flow + k.f2b * (0.5 * f.flow));
  return out;
}

VectorField flux_field(const PairKernels& k, const WavepacketState& state, double t_fs,
                       double s) {
  const auto ne = static_cast<Eigen::Index>(k.grid.size());
  if (k.n_pairs() == 0 || s == 0.0) return {Field::Zero(ne), Field::Zero(ne)};
  const PairTimeFactors f = time_factors(k, state, t_fs);
  const double scale = k.flux_sign * 2.0 * units::kHbar * s / units::kElectronMass;
  return {scale * (k.gx * f.flux), scale * (k.gz * f.flux)};
}

Field divergence_field(const VectorField& j, const ElectronicGrid& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (j.x.size() != n || j.z.size() != n) {
    throw std::invalid_argument("divergence_field: field does not match the grid");
  }
  const std::size_t nx = g.nx(), nz = g.nz();
  auto derivative = [](auto value, std::size_t i, std::size_t count, double h) {
    if (i == 0) return (-3.0 * value(0) + 4.0 * value(1) - value(2)) / (2.0 * h);
    if (i == count - 1) {
      return (3.0 * value(count - 1) - 4.0 * value(count - 2) + value(count - 3)) / (2.0 * h);
    }
    return (value(i + 1) - value(i - 1)) / (2.0 * h);
  };
  Field div(n);
  for (std::size_t iz = 0; iz < nz; ++iz) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      auto along_x = [&](std::size_t i) { return j.x[static_cast<Eigen::Index>(g.index(i, iz))]; };
      auto along_z = [&](std::size_t i) { return j.z[static_cast<Eigen::Index>(g.index(ix, i))]; };
      div[static_cast<Eigen::Index>(g.index(ix, iz))] =
          derivative(along_x, ix, nx, g.dx()) + derivative(along_z, iz, nz, g.dz());
    }
  }
  return div;
}

Field correlated_density(const PairKernels& k, const WavepacketState& state, double t_fs,
                         double s) {
  const auto ns = static_cast<Eigen::Index>(k.n_states);
  if (state.coeffs.size() < ns) {
    throw std::invalid_argument("wavepacket has fewer coefficients than the kernel basis");
  }
  const Eigen::VectorXd pop = state.coeffs.head(ns).cwiseAbs2();
  Field rho = k.diag_f0 * pop + s * (k.diag_f2a * pop + k.diag_f2b * (0.5 * pop));
  if (k.n_pairs() == 0) return rho;
  const double t = units::fs_to_au(t_fs - state.t);
  Eigen::VectorXd cosf(static_cast<Eigen::Index>(k.n_pairs()));
  for (Eigen::Index p = 0; p < cosf.size(); ++p) {
    const StatePair& pr = k.pairs[static_cast<std::size_t>(p)];
    cosf[p] = 2.0 * state.coeffs[static_cast<Eigen::Index>(pr.n)] *
              state.coeffs[static_cast<Eigen::Index>(pr.m)] * std::cos(k.omega[p] * t);
  }
  rho += k.f0 * cosf + s * (k.f2a * cosf + k.f2b * (0.5 * cosf));
  return rho;
}

double planar_l2(const Field& f, const ElectronicGrid& grid) {
  return std::sqrt(f.squaredNorm() * grid.cell_area());
}

Residual residual(const PairKernels& k, const WavepacketState& state, double t_fs, double s) {
  Residual r;
  r.field = flow_field(k, state, t_fs, s) + divergence_field(flux_field(k, state, t_fs, s), k.grid);
  r.l2 = planar_l2(r.field, k.grid);
  r.per_point = r.l2 / static_cast<double>(k.grid.size());
  return r;
}

AffineResidual affine_residual(const PairKernels& k, const WavepacketState& state, double t_fs) {
  const auto ne = static_cast<Eigen::Index>(k.grid.size());
  if (k.n_pairs() == 0) return {Field::Zero(ne), Field::Zero(ne)};
  const PairTimeFactors f = time_factors(k, state, t_fs);
  AffineResidual a;
  a.constant = k.f0 * f.flow;
  const double scale = k.flux_sign * 2.0 * units::kHbar / units::kElectronMass;
  const VectorField j{scale * (k.gx * f.flux), scale * (k.gz * f.flux)};
  a.slope = k.f2a * f.flow + k.f2b * (0.5 * f.flow) + divergence_field(j, k.grid);
  return a;
}

NonlinearFields nonlinear_fields(const ElectronicScan& scan, const VibrationalBasis& basis,
                                 const WavepacketState& state, double t_fs, double delta_q,
                                 std::size_t n_states, double flux_sign) {
  require_same_grid(scan, basis);
  if (n_states < 1 || n_states > basis.size() ||
      static_cast<std::size_t>(state.coeffs.size()) < n_states) {
    throw std::invalid_argument("nonlinear_fields: inconsistent number of states");
  }
  const NuclearGrid& qg = basis.grid;
  const double shift = std::abs(delta_q);
  const double tol = 1e-9 * qg.dq();
  std::size_t lo = 0, hi = qg.n_points();
  while (lo < hi && qg.at(lo) - shift < qg.q_min() - tol) ++lo;
  while (hi > lo && qg.at(hi - 1) + shift > qg.q_max() + tol) --hi;
  if (hi < lo + 3) {
    throw std::invalid_argument("nonlinear_fields: translation by " + std::to_string(delta_q) +
                                " bohr exits the Q grid");
  }

  const double t = units::fs_to_au(t_fs - state.t);
  const auto ns = static_cast<Eigen::Index>(n_states);
  const auto ne = static_cast<Eigen::Index>(scan.e_grid.size());
  NonlinearFields out{Field::Zero(ne), {Field::Zero(ne), Field::Zero(ne)}, Field()};

  auto blend = [](const Eigen::MatrixXd& m, const fd::CubicWeights& cw) {
    Eigen::VectorXd v = cw.w[0] * m.col(static_cast<Eigen::Index>(cw.first));
    for (std::size_t k = 1; k < 4; ++k) v += cw.w[k] * m.col(static_cast<Eigen::Index>(cw.first + k));
    return v;
  };
  auto blend_states = [&](const fd::CubicWeights& cw) {
    Eigen::VectorXd v(ns);
    for (Eigen::Index n = 0; n < ns; ++n) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 4; ++k) acc += cw.w[k] * basis.states(static_cast<Eigen::Index>(cw.first + k), n);
      v[n] = acc;
    }
    return v;
  };

  Eigen::VectorXd flow_t(ns * ns), flux_t(ns * ns);
  flow_t.setZero();
  flux_t.setZero();
  for (Eigen::Index n = 1; n < ns; ++n) {
    for (Eigen::Index m = 0; m < n; ++m) {
      const double w = basis.omega(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
      const double aa = state.coeffs[n] * state.coeffs[m];
      flow_t[n * ns + m] = -w * aa * std::sin(w * t);
      flux_t[n * ns + m] = aa * std::sin(w * t);
    }
  }

  for (std::size_t i = lo; i < hi; ++i) {
    const double q = qg.at(i);
    const double weight = (i == lo || i == hi - 1) ? 0.5 * qg.dq() : qg.dq();
    const fd::CubicWeights up = fd::cubic_weights(qg, q + delta_q);
    const fd::CubicWeights down = fd::cubic_weights(qg, q - delta_q);
    const Eigen::VectorXd chi_p = blend_states(up);
    const Eigen::VectorXd chi_m = blend_states(down);
    double u = 0.0, v = 0.0;
    for (Eigen::Index n = 1; n < ns; ++n) {
      for (Eigen::Index m = 0; m < n; ++m) {
        const double sym = chi_m[n] * chi_p[m] + chi_p[n] * chi_m[m];
        const double anti = chi_m[n] * chi_p[m] - chi_p[n] * chi_m[m];
        u += flow_t[n * ns + m] * sym;
        v += flux_t[n * ns + m] * anti;
      }
    }
    if (u == 0.0 && v == 0.0) continue;
    const Eigen::VectorXd phi_p = blend(scan.phi, up);
    const Eigen::VectorXd phi_m = blend(scan.phi, down);
    out.rho_c_dot += (weight * u) * phi_m.cwiseProduct(phi_p);
    if (v != 0.0) {
      const double c = flux_sign * 0.5 * units::kHbar / units::kElectronMass * weight * v;
      out.flux.x += c * (phi_m.cwiseProduct(blend(scan.grad_x, up)) -
                         phi_p.cwiseProduct(blend(scan.grad_x, down)));
      out.flux.z += c * (phi_m.cwiseProduct(blend(scan.grad_z, up)) -
                         phi_p.cwiseProduct(blend(scan.grad_z, down)));
    }
  }
  out.div_j = divergence_field(out.flux, scan.e_grid);
  return out;
}

}  // namespace bobs
