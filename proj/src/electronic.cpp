#include "bobs/electronic.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bobs/finite_difference.hpp"
#include "bobs/units.hpp"

namespace bobs {

double lcao_overlap(double q, double zeta) {
  const double w = zeta * q;
  return std::exp(-w) * (1.0 + w + w * w / 3.0);
}

double lcao_energy(double q, double zeta) {
  const double w = zeta * q;
  const double s = lcao_overlap(q, zeta);
  const double coulomb = (1.0 - (1.0 + w) * std::exp(-2.0 * w)) / q;
  const double exchange = zeta * (1.0 + w) * std::exp(-w);
  const double h_aa = 0.5 * zeta * zeta - zeta - coulomb;
  const double h_ab = -0.5 * zeta * zeta * s + zeta * exchange - 2.0 * exchange;
  return (h_aa + h_ab) / (1.0 + s) + 1.0 / q;
}

ElectronicScan lcao_scan(const ElectronicGrid& e_grid, const NuclearGrid& n_grid, double zeta) {
  if (!(zeta > 0.0)) throw std::invalid_argument("lcao_scan: zeta must be positive");
  if (n_grid.q_min() < 6.0 * n_grid.dq() * (1.0 - 1e-9)) {
    throw std::invalid_argument("lcao_scan: Q grid starts within six steps of Q = 0");
  }
  const auto ne = static_cast<Eigen::Index>(e_grid.size());
  const auto nq = static_cast<Eigen::Index>(n_grid.n_points());
  ElectronicScan scan;
  scan.e_grid = e_grid;
  scan.n_grid = n_grid;
  scan.lcao_zeta = zeta;
  scan.phi.resize(ne, nq);
  scan.grad_x.resize(ne, nq);
  scan.grad_z.resize(ne, nq);
  const double amp = std::sqrt(zeta * zeta * zeta / units::kPi);

  for (Eigen::Index j = 0; j < nq; ++j) {
    const double q = n_grid.at(static_cast<std::size_t>(j));
    const double norm = 1.0 / std::sqrt(2.0 + 2.0 * lcao_overlap(q, zeta));
    const double za = 0.5 * q;
    for (std::size_t iz = 0; iz < e_grid.nz(); ++iz) {
      const double z = e_grid.z(iz);
      for (std::size_t ix = 0; ix < e_grid.nx(); ++ix) {
        const double x = e_grid.x(ix);
        const double ua = z - za;
        const double ub = z + za;
        const double ra = std::sqrt(x * x + ua * ua);
        const double rb = std::sqrt(x * x + ub * ub);
        const double sa = amp * std::exp(-zeta * ra);
        const double sb = amp * std::exp(-zeta * rb);
        // The gradient of a 1s orbital is undefined at its nucleus; take 0.
        const double ga = ra > 0.0 ? -zeta * sa / ra : 0.0;
        const double gb = rb > 0.0 ? -zeta * sb / rb : 0.0;
        const auto k = static_cast<Eigen::Index>(e_grid.index(ix, iz));
        scan.phi(k, j) = norm * (sa + sb);
        scan.grad_x(k, j) = norm * (ga * x + gb * x);
        scan.grad_z(k, j) = norm * (ga * ua + gb * ub);
      }
    }
  }
  scan.d1_q = fd::differentiate_columns(scan.phi, n_grid.dq(), 1);
  scan.d2_q = fd::differentiate_columns(scan.phi, n_grid.dq(), 2);
  return scan;
}

namespace {

[[noreturn]] void scan_error(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

double parse_number(std::string_view tok, const std::filesystem::path& path) {
  double v = 0.0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    scan_error(path, "malformed number '" + std::string(tok) + "'");
  }
  if (!std::isfinite(v)) scan_error(path, "non-finite value in payload");
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!split(line).empty()) return true;
  }
  return false;
}

}  // namespace

void save_scan(const std::filesystem::path& path, const ElectronicScan& scan, ScanBlocks blocks) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scan file " + path.string());
  const ElectronicGrid& g = scan.e_grid;
  const NuclearGrid& q = scan.n_grid;
  out.precision(17);
  out << "# electronic-scan v1\n";
  out << "x " << -g.x_max() << ' ' << g.x_max() << ' ' << g.dx() << '\n';
  out << "z " << -g.z_max() << ' ' << g.z_max() << ' ' << g.dz() << '\n';
  out << "q " << q.q_min() << ' ' << q.q_max() << ' ' << q.dq() << ' ' << q.n_points() << '\n';
  out << "blocks phi";
  if (blocks.gradients) out << " grad_x grad_z";
  if (blocks.d1_q) out << " d1_q";
  if (blocks.d2_q) out << " d2_q";
  out << '\n';
  std::optional<Eigen::VectorXd> energy = scan.energy;
  if (!energy && scan.lcao_zeta) {
    energy = Eigen::VectorXd(static_cast<Eigen::Index>(q.n_points()));
    for (std::size_t j = 0; j < q.n_points(); ++j) {
      (*energy)[static_cast<Eigen::Index>(j)] = lcao_energy(q.at(j), *scan.lcao_zeta);
    }
  }
  out << "energy " << (energy ? "yes" : "no") << '\n';
  if (scan.lcao_zeta) out << "lcao_zeta " << *scan.lcao_zeta << '\n';
  out << "end\n";

  auto write_block = [&](const Eigen::MatrixXd& m, Eigen::Index j) {
    out << '\n';
    for (std::size_t iz = 0; iz < g.nz(); ++iz) {
      for (std::size_t ix = 0; ix < g.nx(); ++ix) {
        if (ix) out << ' ';
        out << m(static_cast<Eigen::Index>(g.index(ix, iz)), j);
      }
      out << '\n';
    }
  };
  for (std::size_t j = 0; j < q.n_points(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    out << "\nslice " << j << ' ' << q.at(j);
    if (energy) out << ' ' << (*energy)[jj];
    out << '\n';
    write_block(scan.phi, jj);
    if (blocks.gradients) {
      write_block(scan.grad_x, jj);
      write_block(scan.grad_z, jj);
    }
    if (blocks.d1_q) write_block(scan.d1_q, jj);
    if (blocks.d2_q) write_block(scan.d2_q, jj);
  }
  if (!out) throw std::runtime_error("error writing scan file " + path.string());
}

ElectronicScan load_scan(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) scan_error(path, "cannot open scan file");
  std::string line;
  if (!std::getline(in, line) || line.rfind("# electronic-scan v1", 0) != 0) {
    scan_error(path, "missing '# electronic-scan v1' header");
  }
  std::optional<std::array<double, 3>> x_range, z_range;
  std::optional<NuclearGrid> n_grid;
  std::vector<std::string> block_names;
  bool has_energy = false;
  std::optional<double> zeta;
  std::size_t declared_nq = 0;
  while (true) {
    if (!next_content_line(in, line)) scan_error(path, "header not terminated by 'end'");
    const auto tok = split(line);
    if (tok[0] == "end") break;
    if (tok[0][0] == '#') continue;
    auto num = [&](std::size_t i) {
      if (i >= tok.size()) scan_error(path, "short header line '" + line + "'");
      return parse_number(tok[i], path);
    };
    if (tok[0] == "x") {
      x_range = std::array<double, 3>{num(1), num(2), num(3)};
    } else if (tok[0] == "z") {
      z_range = std::array<double, 3>{num(1), num(2), num(3)};
    } else if (tok[0] == "q") {
      n_grid = NuclearGrid(num(1), num(2), num(3));
      declared_nq = tok.size() > 4 ? static_cast<std::size_t>(num(4)) : n_grid->n_points();
    } else if (tok[0] == "blocks") {
      block_names.assign(tok.begin() + 1, tok.end());
    } else if (tok[0] == "energy") {
      has_energy = tok.size() > 1 && tok[1] == "yes";
    } else if (tok[0] == "lcao_zeta") {
      zeta = num(1);
    } else {
      scan_error(path, "unknown header key '" + std::string(tok[0]) + "'");
    }
  }
  if (!x_range || !z_range || !n_grid) scan_error(path, "header lacks grid definitions");
  const std::optional<ElectronicGrid> e_grid =
      ElectronicGrid((*x_range)[0], (*x_range)[1], (*x_range)[2], (*z_range)[0], (*z_range)[1],
                     (*z_range)[2]);
  if (declared_nq != n_grid->n_points()) {
    scan_error(path, "dimension mismatch: header declares " + std::to_string(declared_nq) +
                         " Q slices but the Q range implies " + std::to_string(n_grid->n_points()));
  }
  if (block_names.empty() || block_names[0] != "phi") scan_error(path, "first block must be phi");

  ElectronicScan scan;
  scan.e_grid = *e_grid;
  scan.n_grid = *n_grid;
  scan.lcao_zeta = zeta;
  const auto ne = static_cast<Eigen::Index>(e_grid->size());
  const auto nq = static_cast<Eigen::Index>(n_grid->n_points());
  std::vector<Eigen::MatrixXd> blocks(block_names.size(), Eigen::MatrixXd(ne, nq));
  Eigen::VectorXd energy(nq);

  for (Eigen::Index j = 0; j < nq; ++j) {
    if (!next_content_line(in, line)) {
      scan_error(path, "dimension mismatch: payload ends after " + std::to_string(j) + " of " +
                           std::to_string(nq) + " Q slices");
    }
    const auto head = split(line);
    if (head[0] != "slice" || head.size() < 3 + (has_energy ? 1u : 0u)) {
      scan_error(path, "dimension mismatch: expected slice header, got '" + line + "'");
    }
    if (static_cast<Eigen::Index>(parse_number(head[1], path)) != j) {
      scan_error(path, "slice index out of order at slice " + std::to_string(j));
    }
    if (has_energy) energy[j] = parse_number(head[3], path);
    for (std::size_t b = 0; b < block_names.size(); ++b) {
      for (std::size_t iz = 0; iz < e_grid->nz(); ++iz) {
        if (!next_content_line(in, line)) {
          scan_error(path, "dimension mismatch: block '" + block_names[b] + "' of slice " +
                               std::to_string(j) + " is truncated");
        }
        const auto row = split(line);
        if (row.size() != e_grid->nx()) {
          scan_error(path, "dimension mismatch: row of " + std::to_string(row.size()) +
                               " values, header declares nx = " + std::to_string(e_grid->nx()));
        }
        for (std::size_t ix = 0; ix < row.size(); ++ix) {
          blocks[b](static_cast<Eigen::Index>(e_grid->index(ix, iz)), j) = parse_number(row[ix], path);
        }
      }
    }
  }
  if (next_content_line(in, line)) scan_error(path, "dimension mismatch: trailing data after last slice");

  bool have_gx = false, have_gz = false, have_d1 = false, have_d2 = false;
  for (std::size_t b = 0; b < block_names.size(); ++b) {
    const std::string& name = block_names[b];
    if (name == "phi") scan.phi = std::move(blocks[b]);
    else if (name == "grad_x") { scan.grad_x = std::move(blocks[b]); have_gx = true; }
    else if (name == "grad_z") { scan.grad_z = std::move(blocks[b]); have_gz = true; }
    else if (name == "d1_q") { scan.d1_q = std::move(blocks[b]); have_d1 = true; }
    else if (name == "d2_q") { scan.d2_q = std::move(blocks[b]); have_d2 = true; }
    else scan_error(path, "unknown block '" + name + "'");
  }
  if (!have_gx || !have_gz) {
    // Central differences on the plane, one-sided at the edges.
    const ElectronicGrid& g = *e_grid;
    scan.grad_x.resize(ne, nq);
    scan.grad_z.resize(ne, nq);
    for (Eigen::Index j = 0; j < nq; ++j) {
      for (std::size_t iz = 0; iz < g.nz(); ++iz) {
        Eigen::VectorXd row(static_cast<Eigen::Index>(g.nx()));
        for (std::size_t ix = 0; ix < g.nx(); ++ix) row[static_cast<Eigen::Index>(ix)] = scan.phi(static_cast<Eigen::Index>(g.index(ix, iz)), j);
        const Eigen::VectorXd d = fd::differentiate(row, g.dx(), 1);
        for (std::size_t ix = 0; ix < g.nx(); ++ix) scan.grad_x(static_cast<Eigen::Index>(g.index(ix, iz)), j) = d[static_cast<Eigen::Index>(ix)];
      }
      for (std::size_t ix = 0; ix < g.nx(); ++ix) {
        Eigen::VectorXd col(static_cast<Eigen::Index>(g.nz()));
        for (std::size_t iz = 0; iz < g.nz(); ++iz) col[static_cast<Eigen::Index>(iz)] = scan.phi(static_cast<Eigen::Index>(g.index(ix, iz)), j);
        const Eigen::VectorXd d = fd::differentiate(col, g.dz(), 1);
        for (std::size_t iz = 0; iz < g.nz(); ++iz) scan.grad_z(static_cast<Eigen::Index>(g.index(ix, iz)), j) = d[static_cast<Eigen::Index>(iz)];
      }
    }
  }
  if (!have_d1) scan.d1_q = fd::differentiate_columns(scan.phi, n_grid->dq(), 1);
  if (!have_d2) scan.d2_q = fd::differentiate_columns(scan.phi, n_grid->dq(), 2);
  if (has_energy) scan.energy = energy;

  if (warnings) {
    const ScanSymmetry sym = scan_symmetry(scan);
    const double scale = scan.phi.cwiseAbs().maxCoeff();
    if (sym.mirror_x > 1e-10 * scale) {
      warnings->push_back("phi is not symmetric under x -> -x (max deviation " +
                          std::to_string(sym.mirror_x) + ")");
    }
    if (sym.mirror_z > 1e-10 * scale) {
      warnings->push_back("phi is not symmetric under z -> -z (max deviation " +
                          std::to_string(sym.mirror_z) + "); not a homonuclear system?");
    }
  }
  return scan;
}

PotentialCurve pes_from_scan(const ElectronicScan& scan, double reduced_mass) {
  PotentialCurve c{scan.n_grid, Eigen::VectorXd(static_cast<Eigen::Index>(scan.n_grid.n_points())),
                   reduced_mass};
  if (scan.lcao_zeta) {
    for (std::size_t j = 0; j < scan.n_grid.n_points(); ++j) {
      c.values[static_cast<Eigen::Index>(j)] = lcao_energy(scan.n_grid.at(j), *scan.lcao_zeta);
    }
    return c;
  }
  if (!scan.energy) {
    throw std::runtime_error(
        "pes_from_scan: scan carries no energy data; supply an explicit nuclear-curve file");
  }
  c.values = *scan.energy;
  return c;
}

ScanSymmetry scan_symmetry(const ElectronicScan& scan) {
  const ElectronicGrid& g = scan.e_grid;
  ScanSymmetry s;
  for (std::size_t iz = 0; iz < g.nz(); ++iz) {
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      const auto k = static_cast<Eigen::Index>(g.index(ix, iz));
      const auto kx = static_cast<Eigen::Index>(g.index(g.mirror_x(ix), iz));
      const auto kz = static_cast<Eigen::Index>(g.index(ix, g.mirror_z(iz)));
      s.mirror_x = std::max(s.mirror_x, (scan.phi.row(k) - scan.phi.row(kx)).cwiseAbs().maxCoeff());
      s.mirror_z = std::max(s.mirror_z, (scan.phi.row(k) - scan.phi.row(kz)).cwiseAbs().maxCoeff());
    }
  }
  return s;
}

}  // namespace bobs
