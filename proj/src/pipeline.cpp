#include "bobs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <system_error>

#include "json.hpp"

#include "bobs/field_io.hpp"

namespace bobs {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("config: " + what);
  };
  require(!pes.empty(), "pes must name builtin-morse, scan or a curve file");
  require(!scan.empty(), "scan must name builtin-lcao or a scan file");
  require(morse_period > 0.0 && morse_depth > 0.0, "morse_period and morse_depth must be positive");
  require(reduced_mass > 0.0, "reduced_mass must be positive");
  require(zeta > 0.0, "zeta must be positive");
  require(n_states >= 1, "n_states must be at least 1");
  require(std::isfinite(shift), "shift must be finite");
  require(coefficients.empty() || coefficients.size() == n_states,
          "coefficients must list exactly n_states values");
  require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
  if (span) require(std::isfinite(*span) && *span >= dt, "span must be at least dt");
  for (double t : snapshots) require(std::isfinite(t) && t >= 0.0, "snapshot times must be >= 0");
  require(oracle_delta > 0.0, "oracle_delta must be positive");
  require(threads >= 1, "threads must be at least 1");
}

namespace {

std::string format(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

ElectronicScan make_scan(const RunConfig& c, std::vector<std::string>& warnings) {
  if (c.scan == "builtin-lcao") {
    return lcao_scan(ElectronicGrid(c.x_min, c.x_max, c.dx, c.z_min, c.z_max, c.dz),
                     NuclearGrid(c.q_min, c.q_max, c.dq), c.zeta);
  }
  if (!fs::exists(c.scan)) throw std::runtime_error("scan file not found: " + c.scan);
  return load_scan(c.scan, &warnings);
}

PotentialCurve make_pes(const RunConfig& c, const ElectronicScan& scan) {
  if (c.pes == "builtin-morse") {
    return morse_curve(scan.n_grid,
                       MorseParameters::from_period(c.morse_period, c.morse_depth,
                                                    c.morse_equilibrium),
                       c.reduced_mass);
  }
  if (c.pes == "scan") return pes_from_scan(scan, c.reduced_mass);
  if (!fs::exists(c.pes)) throw std::runtime_error("curve file not found: " + c.pes);
  PotentialCurve curve = load_curve(c.pes, c.reduced_mass);
  if (!(curve.grid == scan.n_grid)) {
    throw std::invalid_argument("curve file grid does not match the nuclear grid of the scan");
  }
  return curve;
}

double resolve_span(const RunConfig& c, double recurrence, double period,
                    std::vector<std::string>& warnings) {
  if (c.span) return *c.span;
  if (recurrence > 0.0) return 2.0 * recurrence;
  double fallback = 8.0 * c.dt;
  for (double t : c.snapshots) fallback = std::max(fallback, t);
  if (period > 0.0) fallback = std::max(fallback, 2.0 * period);
  warnings.push_back("span: no recurrence for this basis, using " + format("%.3f", fallback) +
                     " fs");
  return fallback;
}

// Removes everything it handed out unless committed.
class OutputGuard {
 public:
  explicit OutputGuard(fs::path dir) : dir_(std::move(dir)) {
    created_ = !fs::exists(dir_);
    fs::create_directories(dir_);
  }
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    if (created_) fs::remove(dir_, ec);
  }

  fs::path add(const std::string& name) {
    files_.push_back(dir_ / name);
    return files_.back();
  }
  void commit() { committed_ = true; }
  const std::vector<fs::path>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool created_ = false;
  bool committed_ = false;
};

std::string snapshot_name(const char* field, double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_t%.3f.dat", field, t);
  return buf;
}

double max_abs(const Field& f) { return f.size() ? f.cwiseAbs().maxCoeff() : 0.0; }

// Field files for one time; returns s_opt.
double write_snapshot(OutputGuard& out, const Model& m, double t) {
  const PairKernels& k = m.kernels;
  const AffineResidual a = affine_residual(k, m.state, t);
  const OptimizationResult opt = optimize_closed_form(a.constant, a.slope, k.grid);
  const double s = opt.s_opt;
  const Field flow = flow_field(k, m.state, t, s);
  const VectorField j = flux_field(k, m.state, t, s);
  const Field div = divergence_field(j, k.grid);
  const Field res = flow + div;
  write_scalar_field(out.add(snapshot_name("flow", t)), {"flow", t, s}, flow, k.grid);
  write_vector_field(out.add(snapshot_name("flux", t)), {"flux", t, s}, j, k.grid);
  write_scalar_field(out.add(snapshot_name("divj", t)), {"divj", t, s}, div, k.grid);
  write_scalar_field(out.add(snapshot_name("residual", t)), {"residual", t, s}, res, k.grid);

  const NuclearObservables obs = nuclear_observables(m.state, t);
  const fs::path path = out.add(snapshot_name("nuclear", t));
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "# nuclear t_fs " << format("%.6f", t) << '\n' << "# Q density flux\n";
  char line[128];
  const NuclearGrid& g = m.basis->grid;
  for (std::size_t i = 0; i < g.n_points(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    std::snprintf(line, sizeof line, "%.6f %.10e %.10e\n", g.at(i), obs.density[e], obs.flux[e]);
    f << line;
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
  return s;
}

CheckItem make_item(std::string name, bool pass, std::string detail) {
  return CheckItem{std::move(name), pass, std::move(detail)};
}

// Invariants that need no time series; shared by run and check.
std::vector<CheckItem> static_invariants(const Model& m) {
  std::vector<CheckItem> items;
  const PairKernels& k = m.kernels;
  const VibrationalBasis& b = *m.basis;

  const Eigen::MatrixXd overlap = b.states.transpose() * b.states * b.grid.dq();
  const double ortho =
      (overlap - Eigen::MatrixXd::Identity(overlap.rows(), overlap.cols())).cwiseAbs().maxCoeff();
  items.push_back(make_item("basis orthonormality", ortho < 1e-10,
                            "max deviation " + format("%.3e", ortho)));

  items.push_back(make_item("wavepacket norm", std::abs(m.state.norm_deficit) < 0.05,
                            "projection deficit " + format("%.3e", m.state.norm_deficit)));

  const double t0 = m.config.snapshots.empty() ? 0.0 : m.config.snapshots.front();
  {
    const Field flow0 = flow_field(k, m.state, t0, 0.0);
    const VectorField j0 = flux_field(k, m.state, t0, 0.0);
    const Field div0 = divergence_field(j0, k.grid);
    const Residual r0 = residual(k, m.state, t0, 0.0);
    const bool zero = max_abs(j0.x) == 0.0 && max_abs(j0.z) == 0.0 && max_abs(div0) == 0.0;
    const bool same = r0.l2 == planar_l2(flow0, k.grid);
    items.push_back(make_item("zero correlation length", zero && same,
                              std::string(zero ? "flux and divergence vanish" : "flux nonzero") +
                                  (same ? ", residual equals flow norm" : ", residual differs")));
  }

  for (double t : m.config.snapshots) {
    const AffineResidual a = affine_residual(k, m.state, t);
    const double s = m.config.oracle_delta * m.config.oracle_delta;
    const Residual r = residual(k, m.state, t, s);
    const double dev = max_abs(r.field - (a.constant + s * a.slope));
    const double scale = max_abs(a.constant) + s * max_abs(a.slope);
    items.push_back(make_item("residual affine in s, t=" + format("%.2f", t),
                              dev <= 1e-12 * scale + std::numeric_limits<double>::min(),
                              "max deviation " + format("%.3e", dev)));

    const OptimizationResult opt = optimize_closed_form(a.constant, a.slope, k.grid);
    const SymmetryMetrics sm = symmetry_metrics(flux_field(k, m.state, t, opt.s_opt), k.grid);
    items.push_back(make_item("flux symmetry, t=" + format("%.2f", t), sm.worst() < 1e-8,
                              "inversion " + format("%.2e", sm.inversion) + ", on-axis jx " +
                                  format("%.2e", sm.radial_on_axis) + ", midplane jz " +
                                  format("%.2e", sm.axial_on_midplane)));
  }

  {
    PairKernels copy = k;
    const double sign = calibrate_flux_sign(copy, m.state, t0);
    items.push_back(make_item("flux orientation", sign == k.flux_sign,
                              "residual prefers sign " + format("%+.0f", sign)));
  }
  return items;
}

struct OracleRatio {
  double flow = 0.0;
  double flux = 0.0;
  bool vanishing = false;
};

OracleRatio oracle_ratio(const Model& m, double t, double delta) {
  const PairKernels& k = m.kernels;
  double err[2][2];
  const double deltas[2] = {delta, 0.5 * delta};
  for (int i = 0; i < 2; ++i) {
    const double d = deltas[i];
    const NonlinearFields nl =
        nonlinear_fields(m.scan, *m.basis, m.state, t, d, k.n_states, k.flux_sign);
    const Field flow = flow_field(k, m.state, t, d * d);
    const VectorField j = flux_field(k, m.state, t, d * d);
    err[i][0] = max_abs(nl.rho_c_dot - flow);
    err[i][1] = std::max(max_abs(nl.flux.x - j.x), max_abs(nl.flux.z - j.z));
  }
  OracleRatio r;
  r.vanishing = err[0][0] == 0.0 && err[0][1] == 0.0 && err[1][0] == 0.0 && err[1][1] == 0.0;
  if (!r.vanishing) {
    r.flow = err[0][0] / err[1][0];
    r.flux = err[0][1] / err[1][1];
  }
  return r;
}

Json config_json(const Model& m) {
  const RunConfig& c = m.config;
  Json j;
  j["pes"] = c.pes;
  j["morse_period"] = c.morse_period;
  j["morse_depth"] = c.morse_depth;
  j["morse_equilibrium"] = c.morse_equilibrium;
  j["reduced_mass"] = c.reduced_mass;
  j["scan"] = c.scan;
  j["zeta"] = c.zeta;
  const NuclearGrid& q = m.scan.n_grid;
  j["q_min"] = q.q_min();
  j["q_max"] = q.q_max();
  j["dq"] = q.dq();
  j["n_q"] = q.n_points();
  const ElectronicGrid& e = m.scan.e_grid;
  j["x_min"] = -e.x_max();
  j["x_max"] = e.x_max();
  j["dx"] = e.dx();
  j["z_min"] = -e.z_max();
  j["z_max"] = e.z_max();
  j["dz"] = e.dz();
  j["nx"] = e.nx();
  j["nz"] = e.nz();
  j["n_states"] = c.n_states;
  if (c.coefficients.empty()) j["shift"] = c.shift;
  else j["coefficients"] = c.coefficients;
  j["span"] = m.span;
  j["span_source"] = c.span ? "config" : "twice the recurrence time";
  j["dt"] = c.dt;
  j["snapshots"] = c.snapshots;
  j["oracle_delta"] = c.oracle_delta;
  j["hann_window"] = c.hann_window;
  return j;
}

Json items_json(const std::vector<CheckItem>& items) {
  Json arr = Json::array();
  for (const auto& it : items) arr.push_back({{"name", it.name}, {"pass", it.pass}, {"detail", it.detail}});
  return arr;
}

}  // namespace

Model build_model(const RunConfig& config) {
  config.validate();
  std::vector<std::string> warnings;
  ElectronicScan scan = make_scan(config, warnings);
  PotentialCurve pes = make_pes(config, scan);
  auto basis = std::make_shared<const VibrationalBasis>(solve_eigenstates(pes, config.n_states));

  InitialShape shape = ShiftedGround{config.shift};
  if (config.n_states == 1) {
    shape = ExplicitCoefficients{{1.0}};
    warnings.push_back("n_states=1: stationary ground state, every timestep is degenerate");
  } else if (!config.coefficients.empty()) {
    shape = ExplicitCoefficients{config.coefficients};
  }
  WavepacketState state = build_wavepacket(basis, shape);
  if (std::abs(state.norm_deficit) > 1e-3) {
    warnings.push_back("initial state: basis captures only " +
                       format("%.4f", 1.0 - state.norm_deficit) + " of the norm");
  }
  PairKernels kernels = build_pair_kernels(scan, *basis, config.n_states);

  const double period = vibrational_period(state);
  const double recurrence = recurrence_time(state);
  const double span = resolve_span(config, recurrence, period, warnings);
  for (double t : config.snapshots) {
    if (t > span + 1e-9) {
      throw std::invalid_argument("config: snapshot " + format("%.3f", t) +
                                  " fs lies beyond the span " + format("%.3f", span) + " fs");
    }
  }
  return Model{config,  std::move(scan), std::move(pes), std::move(basis), std::move(state),
               std::move(kernels), span, period, recurrence, std::move(warnings)};
}

std::vector<double> time_axis(const Model& m) {
  const auto n = static_cast<std::size_t>(std::floor(m.span / m.config.dt + 1e-9)) + 1;
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) * m.config.dt;
  return t;
}

SeriesData compute_series(const Model& m) {
  SeriesData s;
  s.times = time_axis(m);
  s.opt = optimize_series(m.kernels, m.state, s.times, m.config.threads);
  const double n_points = static_cast<double>(m.kernels.grid.size());
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const NuclearObservables obs = nuclear_observables(m.state, s.times[i]);
    s.sigma2.push_back(obs.variance);
    s.mean_q.push_back(obs.mean_q);
    s.l2_per_point.push_back(s.opt[i].l2_at_opt / n_points);
  }
  return s;
}

namespace {

void write_series_and_spectra(OutputGuard& out, const Model& m, const SeriesData& s,
                              std::vector<std::string>& warnings) {
  std::vector<SeriesRow> rows;
  std::vector<double> d2;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    rows.push_back({s.opt[i], s.sigma2[i], s.mean_q[i], s.l2_per_point[i]});
    d2.push_back(s.opt[i].s_opt);
  }
  write_series(out.add("series.dat"), rows);
  if (s.times.size() < 8) {
    warnings.push_back("spectra skipped: fewer than 8 timesteps");
    return;
  }
  write_spectrum(out.add("spectrum_delta_q2.dat"),
                 power_spectrum(s.times, d2, "delta_q2", m.config.hann_window));
  write_spectrum(out.add("spectrum_sigma2.dat"),
                 power_spectrum(s.times, s.sigma2, "sigma2", m.config.hann_window));
}

RunSummary finish(OutputGuard& out, std::vector<std::string> warnings) {
  out.commit();
  return RunSummary{out.files(), std::move(warnings)};
}

}  // namespace

RunSummary run(const RunConfig& config) {
  Model m = build_model(config);
  OutputGuard out(config.out);
  std::vector<std::string> warnings = m.warnings;

  const SeriesData s = compute_series(m);
  write_series_and_spectra(out, m, s, warnings);

  Json snaps = Json::array();
  for (double t : config.snapshots) {
    const double s_opt = write_snapshot(out, m, t);
    snaps.push_back({{"t", t}, {"s_opt", s_opt}});
  }

  std::vector<CheckItem> inv = static_invariants(m);
  const NormDrift drift = norm_drift(m.kernels, m.state, s.opt);
  inv.push_back(make_item("norm drift", drift.max_abs < 0.02,
                          "max accumulated drift " + format("%.3e", drift.max_abs)));

  std::size_t degenerate = 0, clamped = 0;
  for (const auto& r : s.opt) {
    degenerate += r.method == OptimizationMethod::degenerate;
    clamped += r.clamped;
  }
  if (degenerate == s.opt.size()) warnings.push_back("every timestep is degenerate (s_opt = 0)");

  Json man;
  man["format"] = "bobs-manifest v1";
  man["config"] = config_json(m);
  Json res;
  res["n_times"] = s.times.size();
  res["vibrational_period_fs"] = m.vibrational_period;
  res["recurrence_time_fs"] = m.recurrence_time;
  res["norm_deficit"] = m.state.norm_deficit;
  res["flux_sign"] = m.kernels.flux_sign;
  res["energies_hartree"] = std::vector<double>(m.basis->energies.data(),
                                                m.basis->energies.data() + m.basis->energies.size());
  res["coefficients"] = std::vector<double>(m.state.coeffs.data(),
                                            m.state.coeffs.data() + m.state.coeffs.size());
  res["degenerate_steps"] = degenerate;
  res["clamped_steps"] = clamped;
  res["snapshots"] = snaps;
  man["resolved"] = res;
  man["invariants"] = items_json(inv);
  man["warnings"] = warnings;
  Json files = Json::array();
  for (const auto& f : out.files()) files.push_back(f.filename().string());
  man["files"] = files;

  const fs::path mpath = out.add("manifest.json");
  std::ofstream mf(mpath);
  if (!mf) throw std::runtime_error("cannot write " + mpath.string());
  mf << man.dump(2) << '\n';
  if (!mf) throw std::runtime_error("write failed: " + mpath.string());
  mf.close();
  return finish(out, std::move(warnings));
}

RunSummary write_eigenstates(const RunConfig& config) {
  Model m = build_model(config);
  OutputGuard out(config.out);
  const fs::path path = out.add("eigenstates.dat");
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "# n energy_hartree energy_cm1 coefficient\n";
  char line[128];
  for (std::size_t n = 0; n < m.basis->size(); ++n) {
    const auto e = static_cast<Eigen::Index>(n);
    std::snprintf(line, sizeof line, "%zu %.12e %.6f %.12e\n", n, m.basis->energies[e],
                  m.basis->energies[e] * units::kHartreeToWavenumber, m.state.coeffs[e]);
    f << line;
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
  f.close();
  save_curve(out.add("potential.dat"), m.pes);
  return finish(out, m.warnings);
}

RunSummary write_fields(const RunConfig& config, double t_fs) {
  if (!std::isfinite(t_fs) || t_fs < 0.0) throw std::invalid_argument("fields: t must be >= 0");
  Model m = build_model(config);
  OutputGuard out(config.out);
  write_snapshot(out, m, t_fs);
  return finish(out, m.warnings);
}

RunSummary write_spectra(const RunConfig& config) {
  Model m = build_model(config);
  OutputGuard out(config.out);
  std::vector<std::string> warnings = m.warnings;
  write_series_and_spectra(out, m, compute_series(m), warnings);
  return finish(out, std::move(warnings));
}

bool CheckReport::all_pass() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.pass; });
}

CheckReport check(const RunConfig& config) {
  CheckReport report;
  if (config.scan == "builtin-lcao") {
    try {
      ElectronicGrid g(config.x_min, config.x_max, config.dx, config.z_min, config.z_max, config.dz);
      report.items.push_back(make_item("electronic grid symmetry", true,
                                       std::to_string(g.nx()) + " x " + std::to_string(g.nz())));
    } catch (const std::exception& e) {
      report.items.push_back(make_item("electronic grid symmetry", false, e.what()));
      return report;
    }
  }

  std::optional<Model> model;
  try {
    model.emplace(build_model(config));
    report.items.push_back(make_item("model construction", true,
                                     std::to_string(model->basis->size()) + " states, " +
                                         std::to_string(model->kernels.n_pairs()) + " pairs"));
  } catch (const std::exception& e) {
    report.items.push_back(make_item("model construction", false, e.what()));
    return report;
  }
  const Model& m = *model;
  for (const auto& w : m.warnings) report.items.push_back(make_item("warning", true, w));

  try {
    for (auto& it : static_invariants(m)) report.items.push_back(std::move(it));
  } catch (const std::exception& e) {
    report.items.push_back(make_item("invariants", false, e.what()));
  }

  for (double t : config.snapshots) {
    const std::string name = "oracle ratio, t=" + format("%.2f", t);
    try {
      const OracleRatio r = oracle_ratio(m, t, config.oracle_delta);
      if (r.vanishing) {
        report.items.push_back(make_item(name, true, "fields vanish identically"));
        continue;
      }
      const bool ok = r.flow >= 8.0 && r.flow <= 32.0 && r.flux >= 8.0 && r.flux <= 32.0;
      report.items.push_back(make_item(name, ok,
                                       "flow " + format("%.2f", r.flow) + ", flux " +
                                           format("%.2f", r.flux) + " (expected 8..32)"));
    } catch (const std::exception& e) {
      report.items.push_back(make_item(name, false, e.what()));
    }
  }
  return report;
}

}  // namespace bobs
