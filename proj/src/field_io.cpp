#include "bobs/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bobs {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void write_header(std::ofstream& out, const FieldHeader& h, const ElectronicGrid& g,
                  const char* columns) {
  out << "# field " << h.name << '\n'
      << "# t_fs " << fmt("%.6f", h.t_fs) << '\n'
      << "# s_opt " << fmt("%.17g", h.s_opt) << '\n'
      << "# grid nx " << g.nx() << " nz " << g.nz() << '\n'
      << "# " << columns << '\n';
}

void check_size(const Field& f, const ElectronicGrid& g) {
  if (f.size() != static_cast<Eigen::Index>(g.size())) {
    throw std::invalid_argument("field size does not match the electronic grid");
  }
}

}  // namespace

void write_scalar_field(const std::filesystem::path& path, const FieldHeader& header,
                        const Field& f, const ElectronicGrid& grid) {
  check_size(f, grid);
  auto out = open_output(path);
  write_header(out, header, grid, "x z value");
  char line[128];
  for (std::size_t iz = 0; iz < grid.nz(); ++iz) {
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      std::snprintf(line, sizeof line, "%.6f %.6f %.10e\n", grid.x(ix), grid.z(iz),
                    f[static_cast<Eigen::Index>(grid.index(ix, iz))]);
      out << line;
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_vector_field(const std::filesystem::path& path, const FieldHeader& header,
                        const VectorField& j, const ElectronicGrid& grid) {
  check_size(j.x, grid);
  check_size(j.z, grid);
  auto out = open_output(path);
  write_header(out, header, grid, "x z jx jz");
  char line[160];
  for (std::size_t iz = 0; iz < grid.nz(); ++iz) {
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      const auto k = static_cast<Eigen::Index>(grid.index(ix, iz));
      std::snprintf(line, sizeof line, "%.6f %.6f %.10e %.10e\n", grid.x(ix), grid.z(iz), j.x[k],
                    j.z[k]);
      out << line;
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_series(const std::filesystem::path& path, const std::vector<SeriesRow>& rows) {
  auto out = open_output(path);
  out << "# t delta_q2 sigma2 meanQ l2_per_point clamped\n";
  char line[192];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%.6f %.10e %.10e %.10e %.10e %d\n", r.opt.t, r.opt.s_opt,
                  r.sigma2, r.mean_q, r.l2_per_point, r.opt.clamped ? 1 : 0);
    out << line;
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_spectrum(const std::filesystem::path& path, const PowerSpectrum& spectrum) {
  auto out = open_output(path);
  out << "# source " << spectrum.source << '\n' << "# omega power\n";
  char line[96];
  for (Eigen::Index k = 0; k < spectrum.power.size(); ++k) {
    std::snprintf(line, sizeof line, "%.10e %.10e\n", spectrum.frequencies[k], spectrum.power[k]);
    out << line;
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace bobs
