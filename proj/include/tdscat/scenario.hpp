#pragma once

// Flat key=value run configuration and the scenario driver behind the
// command-line tool. Every scenario writes its CSVs plus manifest.txt into
// the output directory; the manifest is itself a valid config file holding
// the fully resolved configuration, with the outputs listed as comments.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tdscat/model.hpp"

namespace tdscat {

enum class Scenario { Evolve, StaticCheck, Coeffs, ShortTime, WidthSweep, Perturb, Compare };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

// Coefficient-equation path: delta uses the O(N) delta rate, general the full
// matrix-element table; auto picks delta for delta barriers.
enum class CoeffPath { Auto, Delta, General };

struct RunConfig {
  Scenario scenario = Scenario::Evolve;
  PhysParams pp{0.2};
  GaussianPacket packet{-3.0, 0.2, 50.0};
  BarrierSpec barrier{BarrierKind::Delta, 5.0, 0.0, 1.0, 7.0 * 2.0 * kPi / 0.3};

  double t_final = 0.3;
  std::vector<double> snapshot_times;  // t_final is always added
  double dx = 0.0;                     // 0: tdse default
  double dt = 0.0;                     // 0: tdse default

  // Coefficient dynamics (source state Psi_q^+).
  double q = 50.0;
  double kgrid_min = kKMin;
  double kgrid_max = 100.0;
  double kgrid_panel = 1.25;
  double coeff_dt = 0.0;  // 0: half the stability limit
  CoeffPath path = CoeffPath::Auto;

  // Short-time law and width sweep.
  double k = 51.0;
  double t_min = 1e-6;
  double t_max = 1e-4;
  int t_count = 9;
  double a_min = 0.15;
  double a_max = 0.24;
  int a_count = 10;

  // compare: Richardson-combine two resolutions.
  bool extrapolate = false;

  std::filesystem::path out = "out";

  bool operator==(const RunConfig&) const = default;
};

/// Named parameter sets, all with x0 = -3, sigma0 = 0.2, k0 = 50, eta = 0.2:
/// fig2 (static delta lambda = 6, static-check), fig3 (lambda = 5, alpha = 1,
/// evolve), fig4 (lambda = 3, alpha = 0.1, compare).
RunConfig preset(const std::string& name);

/// Apply one key=value assignment; ConfigError on unknown keys or bad values.
void set_value(RunConfig& cfg, const std::string& key, const std::string& value);
/// "key=value" form of set_value.
void apply_assignment(RunConfig& cfg, const std::string& assignment);

/// Parse config text on top of `base`. Blank lines and lines starting with
/// '#' are skipped; errors name the line.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Every key with its resolved value, one "key=value" per line.
std::string format_config(const RunConfig& cfg);

struct ScenarioOutput {
  std::vector<std::filesystem::path> files;  // relative to cfg.out, manifest last
};

/// Run the configured scenario, writing outputs under cfg.out and progress
/// and summary lines to `log`. Module errors propagate as exceptions.
ScenarioOutput run_scenario(const RunConfig& cfg, std::ostream& log);

/// Packet-momentum average of the delta transmission |D_k|^2.
double packet_averaged_transmission(const GaussianPacket& p, double beta);

}  // namespace tdscat
