#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bobs/electronic.hpp"
#include "bobs/finite_difference.hpp"
#include "bobs/units.hpp"
#include "h2plus.hpp"

using namespace bobs;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("bobs_test_electronic_" + name);
}

double slater(double x, double z, double zc, double zeta) {
  return std::sqrt(zeta * zeta * zeta / units::kPi) *
         std::exp(-zeta * std::sqrt(x * x + (z - zc) * (z - zc)));
}

// Small scan for file round trips.
ElectronicScan small_scan() {
  return lcao_scan(ElectronicGrid(-1.0, 1.0, 0.25, -1.5, 1.5, 0.25), NuclearGrid(1.2, 3.0, 0.2),
                   1.24);
}

}  // namespace

TEST_CASE("LCAO orbital at large separation is the normalised sum of atomic orbitals") {
  const ElectronicGrid eg(-1.0, 1.0, 0.5, -12.0, 12.0, 0.5);
  const NuclearGrid ng(14.0, 20.0, 1.0);
  const ElectronicScan s = lcao_scan(eg, ng, 1.0);
  CHECK(lcao_overlap(20.0, 1.0) < 1e-6);
  const auto j = static_cast<Eigen::Index>(ng.n_points() - 1);
  for (std::size_t iz = 0; iz < eg.nz(); ++iz) {
    for (std::size_t ix = 0; ix < eg.nx(); ++ix) {
      const double ref = (slater(eg.x(ix), eg.z(iz), 10.0, 1.0) + slater(eg.x(ix), eg.z(iz), -10.0, 1.0)) /
                         std::sqrt(2.0);
      CHECK(s.phi(static_cast<Eigen::Index>(eg.index(ix, iz)), j) ==
            doctest::Approx(ref).epsilon(1e-6).scale(1e-12));
    }
  }
}

TEST_CASE("overlap closed form against quadrature") {
  // S = int s_A s_B d^3r, cylindrical quadrature on a fine plane
  const double q = 2.0, zeta = 1.24;
  const ElectronicGrid eg(-8.0, 8.0, 0.02, -9.0, 9.0, 0.02);
  const Eigen::VectorXd w = eg.cylindrical_weights();
  double acc = 0.0;
  for (std::size_t iz = 0; iz < eg.nz(); ++iz) {
    for (std::size_t ix = 0; ix < eg.nx(); ++ix) {
      acc += w[static_cast<Eigen::Index>(eg.index(ix, iz))] *
             slater(eg.x(ix), eg.z(iz), q / 2, zeta) * slater(eg.x(ix), eg.z(iz), -q / 2, zeta);
    }
  }
  CHECK(lcao_overlap(q, zeta) == doctest::Approx(acc).epsilon(1e-3));
}

TEST_CASE("LCAO scan symmetries are exact") {
  const H2Plus& h = H2Plus::get();
  const ElectronicGrid& g = h.e_grid;
  for (std::size_t iz = 0; iz < g.nz(); ++iz) {
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      const auto a = static_cast<Eigen::Index>(g.index(ix, iz));
      const auto bx = static_cast<Eigen::Index>(g.index(g.mirror_x(ix), iz));
      const auto bz = static_cast<Eigen::Index>(g.index(ix, g.mirror_z(iz)));
      CHECK((h.scan.phi.row(a) - h.scan.phi.row(bx)).cwiseAbs().maxCoeff() == 0.0);
      CHECK((h.scan.phi.row(a) - h.scan.phi.row(bz)).cwiseAbs().maxCoeff() == 0.0);
      CHECK((h.scan.d1_q.row(a) - h.scan.d1_q.row(bx)).cwiseAbs().maxCoeff() == 0.0);
      CHECK((h.scan.d2_q.row(a) - h.scan.d2_q.row(bx)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  const ScanSymmetry sym = scan_symmetry(h.scan);
  CHECK(sym.mirror_x == 0.0);
  CHECK(sym.mirror_z == 0.0);
}

TEST_CASE("orbital is normalised in 3D") {
  const ElectronicGrid big(-8.0, 8.0, 0.05, -8.0, 8.0, 0.05);
  const ElectronicScan s = lcao_scan(big, NuclearGrid(1.2, 2.4, 0.2), 1.24);
  const Eigen::VectorXd w = big.cylindrical_weights();
  for (Eigen::Index j = 0; j < s.phi.cols(); ++j) CHECK(std::abs(w.dot(s.phi.col(j).cwiseAbs2()) - 1.0) < 1e-3);

  // the default plane cuts the radial tail
  const H2Plus& h = H2Plus::get();
  const Eigen::VectorXd wd = h.e_grid.cylindrical_weights();
  for (double q : {1.0, 2.0, 3.0}) {
    const auto j = static_cast<Eigen::Index>(std::lround((q - h.q_grid.q_min()) / h.q_grid.dq()));
    const double norm = wd.dot(h.scan.phi.col(j).cwiseAbs2());
    CHECK(norm > 0.9);
    CHECK(norm < 1.0);
  }
}

TEST_CASE("analytic electronic gradient converges to central differences at second order") {
  auto max_err = [](double d) {
    const ElectronicGrid eg(-2.0, 2.0, d, -3.0, 3.0, d);
    const ElectronicScan s = lcao_scan(eg, NuclearGrid(1.2, 1.6, 0.2), 1.24);
    const Eigen::Index j = 1;  // Q = 1.4, nuclei at z = +-0.7
    double e = 0.0;
    for (std::size_t iz = 1; iz + 1 < eg.nz(); ++iz) {
      for (std::size_t ix = 1; ix + 1 < eg.nx(); ++ix) {
        const double x = eg.x(ix), z = eg.z(iz);
        if (std::hypot(x, std::abs(z) - 0.7) < 0.3) continue;
        const auto k = [&](std::size_t a, std::size_t b) {
          return s.phi(static_cast<Eigen::Index>(eg.index(a, b)), j);
        };
        const double gx = (k(ix + 1, iz) - k(ix - 1, iz)) / (2.0 * d);
        const double gz = (k(ix, iz + 1) - k(ix, iz - 1)) / (2.0 * d);
        const auto p = static_cast<Eigen::Index>(eg.index(ix, iz));
        e = std::max({e, std::abs(gx - s.grad_x(p, j)), std::abs(gz - s.grad_z(p, j))});
      }
    }
    return e;
  };
  const double ratio = max_err(0.1) / max_err(0.05);
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("nuclear derivatives of the scan follow the five-point stencil") {
  const H2Plus& h = H2Plus::get();
  const Eigen::Index p = static_cast<Eigen::Index>(h.e_grid.index(30, 50));
  const Eigen::VectorXd f = h.scan.phi.row(p).transpose();
  CHECK((fd::differentiate(f, h.q_grid.dq(), 1) - h.scan.d1_q.row(p).transpose()).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK((fd::differentiate(f, h.q_grid.dq(), 2) - h.scan.d2_q.row(p).transpose()).cwiseAbs().maxCoeff() <
        1e-9);
}

TEST_CASE("LCAO energy curve") {
  double best_q = 0.0, best = 1e9;
  for (double q = 1.0; q < 5.0; q += 0.001) {
    const double e = lcao_energy(q, 1.0);
    if (e < best) {
      best = e;
      best_q = q;
    }
  }
  CHECK(best_q == doctest::Approx(2.5).epsilon(0.02));
  CHECK(lcao_energy(60.0, 1.0) == doctest::Approx(-0.5).epsilon(1e-6));
  for (double q = 0.5; q < best_q - 0.01; q += 0.01) CHECK(lcao_energy(q, 1.0) > lcao_energy(q + 0.01, 1.0));

  const H2Plus& h = H2Plus::get();
  const PotentialCurve c = pes_from_scan(h.scan, units::kH2PlusReducedMass);
  CHECK(c.values[100] == doctest::Approx(lcao_energy(h.q_grid.at(100), 1.24)));
}

TEST_CASE("scan on a Q grid too close to the origin is rejected") {
  CHECK_THROWS_AS(lcao_scan(ElectronicGrid(-1.0, 1.0, 0.5, -1.0, 1.0, 0.5), NuclearGrid(0.1, 2.0, 0.02), 1.0),
                  std::invalid_argument);
  CHECK_NOTHROW(lcao_scan(ElectronicGrid(-1.0, 1.0, 0.5, -1.0, 1.0, 0.5), NuclearGrid(1.2, 3.0, 0.2), 1.0));
}

TEST_CASE("scan files round trip") {
  const ElectronicScan s = small_scan();
  const auto path = temp_file("full.scan");
  save_scan(path, s);
  std::vector<std::string> warnings;
  const ElectronicScan r = load_scan(path, &warnings);
  CHECK(warnings.empty());
  CHECK(r.e_grid == s.e_grid);
  CHECK(r.n_grid == s.n_grid);
  CHECK((r.phi - s.phi).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.grad_x - s.grad_x).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.grad_z - s.grad_z).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.d1_q - s.d1_q).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.d2_q - s.d2_q).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE(r.energy.has_value());
  for (std::size_t j = 0; j < s.n_grid.n_points(); ++j) {
    CHECK((*r.energy)[static_cast<Eigen::Index>(j)] ==
          doctest::Approx(lcao_energy(s.n_grid.at(j), 1.24)).epsilon(1e-14));
  }

  const auto lean = temp_file("lean.scan");
  save_scan(lean, s, ScanBlocks{true, false, false});
  const ElectronicScan l = load_scan(lean);
  CHECK((l.d1_q - s.d1_q).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((l.d2_q - s.d2_q).cwiseAbs().maxCoeff() < 1e-9);
  std::filesystem::remove(lean);

  // truncated payload
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto cut = temp_file("cut.scan");
  {
    std::ofstream f(cut);
    f << text.substr(0, text.size() * 2 / 3);
  }
  try {
    load_scan(cut);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("dimension mismatch") != std::string::npos);
  }
  // non-finite value
  std::string bad = text;
  const auto pos = bad.find("slice 3");
  REQUIRE(pos != std::string::npos);
  const auto line = bad.find('\n', pos) + 1;
  bad.replace(line, bad.find(' ', line) - line, "nan");
  {
    std::ofstream f(cut);
    f << bad;
  }
  CHECK_THROWS(load_scan(cut));
  std::filesystem::remove(cut);
  std::filesystem::remove(path);
}

TEST_CASE("asymmetric external scan loads with a warning") {
  ElectronicScan s = small_scan();
  s.phi(0, 0) += 1e-3;
  s.energy.reset();
  s.lcao_zeta.reset();
  const auto path = temp_file("asym.scan");
  save_scan(path, s);
  std::vector<std::string> warnings;
  const ElectronicScan r = load_scan(path, &warnings);
  CHECK_FALSE(warnings.empty());
  CHECK_THROWS(pes_from_scan(r, 1.0));
  std::filesystem::remove(path);
}
