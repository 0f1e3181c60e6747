#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "bobs/pipeline.hpp"

namespace {

void add_config_options(CLI::App& app, bobs::RunConfig& c, std::string& span) {
  app.add_option("--out", c.out, "output directory")->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads for the series")->capture_default_str();
  app.add_option("--pes", c.pes, "builtin-morse, scan, or a curve file")->capture_default_str();
  app.add_option("--morse_period", c.morse_period, "fs")->capture_default_str();
  app.add_option("--morse_depth", c.morse_depth, "hartree")->capture_default_str();
  app.add_option("--morse_equilibrium", c.morse_equilibrium, "bohr")->capture_default_str();
  app.add_option("--reduced_mass", c.reduced_mass, "electron masses")->capture_default_str();
  app.add_option("--scan", c.scan, "builtin-lcao or a scan file")->capture_default_str();
  app.add_option("--zeta", c.zeta, "LCAO orbital exponent")->capture_default_str();
  app.add_option("--q_min", c.q_min)->capture_default_str();
  app.add_option("--q_max", c.q_max)->capture_default_str();
  app.add_option("--dq", c.dq)->capture_default_str();
  app.add_option("--x_min", c.x_min)->capture_default_str();
  app.add_option("--x_max", c.x_max)->capture_default_str();
  app.add_option("--dx", c.dx)->capture_default_str();
  app.add_option("--z_min", c.z_min)->capture_default_str();
  app.add_option("--z_max", c.z_max)->capture_default_str();
  app.add_option("--dz", c.dz)->capture_default_str();
  app.add_option("--n_states", c.n_states)->capture_default_str();
  app.add_option("--shift", c.shift, "initial displacement, bohr")->capture_default_str();
  app.add_option("--coefficients", c.coefficients, "explicit a_n, overrides shift");
  app.add_option("--span", span, "fs, or auto for twice the recurrence time")->capture_default_str();
  app.add_option("--dt", c.dt, "fs")->capture_default_str();
  app.add_option("--snapshots", c.snapshots, "fs")->capture_default_str();
  app.add_option("--oracle_delta", c.oracle_delta, "bohr")->capture_default_str();
  app.add_flag("--hann_window", c.hann_window, "Hann window for the spectra");
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Electronic flux density of a vibrating H2+ surrogate from translated vibronic densities"};
  app.set_config("--config", "", "key = value configuration file");
  app.require_subcommand(1);

  bobs::RunConfig config;
  std::string span = "auto";
  add_config_options(app, config, span);

  auto* run = app.add_subcommand("run", "series, spectra, snapshot fields and manifest");
  auto* check = app.add_subcommand("check", "invariant suite");
  auto* eigen = app.add_subcommand("eigenstates", "vibrational levels and potential curve");
  auto* fields = app.add_subcommand("fields", "fields at one time");
  auto* spectrum = app.add_subcommand("spectrum", "series and power spectra");
  double t_fields = 0.0;
  fields->add_option("--t", t_fields, "time, fs")->required();
  for (auto* sub : {run, check, eigen, fields, spectrum}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (span != "auto") {
      std::size_t used = 0;
      config.span = std::stod(span, &used);
      if (used != span.size()) throw std::invalid_argument("");
    }
  } catch (const std::exception&) {
    std::cerr << "error: --span expects a number of fs or auto\n";
    return 2;
  }

  try {
    if (check->parsed()) {
      const bobs::CheckReport report = bobs::check(config);
      for (const auto& it : report.items) {
        std::printf("%-4s %s: %s\n", it.pass ? "PASS" : "FAIL", it.name.c_str(), it.detail.c_str());
      }
      std::printf("%s\n", report.all_pass() ? "all checks passed" : "some checks failed");
      return report.all_pass() ? 0 : 1;
    }
    bobs::RunSummary summary;
    if (run->parsed()) summary = bobs::run(config);
    else if (eigen->parsed()) summary = bobs::write_eigenstates(config);
    else if (fields->parsed()) summary = bobs::write_fields(config, t_fields);
    else summary = bobs::write_spectra(config);
    print_warnings(summary.warnings);
    for (const auto& f : summary.files) std::cout << f.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
