#include "tdscat/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "tdscat/coeffdyn.hpp"
#include "tdscat/csv.hpp"
#include "tdscat/eigenbasis.hpp"
#include "tdscat/errors.hpp"
#include "tdscat/perturb1.hpp"
#include "tdscat/tdse.hpp"

namespace tdscat {

namespace {

const char* const kScenarioNames[] = {"evolve", "static-check", "coeffs", "shorttime", "widthsweep", "perturb", "compare"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty() || !std::isfinite(x))
    throw ConfigError("config", fmt::format("{}: '{}' is not a finite number", key, v));
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  int x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("config", fmt::format("{}: '{}' is not an integer", key, v));
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config", fmt::format("{}: '{}' is not true or false", key, v));
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> xs;
  std::stringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) xs.push_back(parse_double(key, trim(item)));
  return xs;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + format_number(xs[i]);
  return s;
}

struct Key {
  const char* name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

Key number(const char* name, double RunConfig::*field) {
  return {name, [=](RunConfig& c, const std::string& v) { c.*field = parse_double(name, v); },
          [=](const RunConfig& c) { return format_number(c.*field); }};
}

template <class S>
Key nested(const char* name, S RunConfig::*outer, double S::*field) {
  return {name, [=](RunConfig& c, const std::string& v) { (c.*outer).*field = parse_double(name, v); },
          [=](const RunConfig& c) { return format_number((c.*outer).*field); }};
}

Key integer(const char* name, int RunConfig::*field) {
  return {name, [=](RunConfig& c, const std::string& v) { c.*field = parse_int(name, v); },
          [=](const RunConfig& c) { return std::to_string(c.*field); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      {"scenario", [](RunConfig& c, const std::string& v) { c.scenario = scenario_from_string(v); },
       [](const RunConfig& c) { return to_string(c.scenario); }},
      nested("eta", &RunConfig::pp, &PhysParams::eta),
      nested("x0", &RunConfig::packet, &GaussianPacket::x0),
      nested("sigma0", &RunConfig::packet, &GaussianPacket::sigma0),
      nested("k0", &RunConfig::packet, &GaussianPacket::k0),
      {"barrier",
       [](RunConfig& c, const std::string& v) {
         try {
           c.barrier.kind = barrier_kind_from_string(v);
         } catch (const Error&) {
           throw ConfigError("config", fmt::format("barrier: '{}' is not delta or square", v));
         }
       },
       [](const RunConfig& c) { return to_string(c.barrier.kind); }},
      nested("lambda0", &RunConfig::barrier, &BarrierSpec::lambda0),
      nested("a", &RunConfig::barrier, &BarrierSpec::a),
      nested("alpha", &RunConfig::barrier, &BarrierSpec::alpha),
      nested("omega0", &RunConfig::barrier, &BarrierSpec::omega0),
      number("t_final", &RunConfig::t_final),
      {"snapshot_times", [](RunConfig& c, const std::string& v) { c.snapshot_times = parse_list("snapshot_times", v); },
       [](const RunConfig& c) { return join(c.snapshot_times); }},
      number("dx", &RunConfig::dx),
      number("dt", &RunConfig::dt),
      number("q", &RunConfig::q),
      number("kgrid_min", &RunConfig::kgrid_min),
      number("kgrid_max", &RunConfig::kgrid_max),
      number("kgrid_panel", &RunConfig::kgrid_panel),
      number("coeff_dt", &RunConfig::coeff_dt),
      {"path",
       [](RunConfig& c, const std::string& v) {
         if (v == "auto") c.path = CoeffPath::Auto;
         else if (v == "delta") c.path = CoeffPath::Delta;
         else if (v == "general") c.path = CoeffPath::General;
         else throw ConfigError("config", fmt::format("path: '{}' is not auto, delta or general", v));
       },
       [](const RunConfig& c) {
         return std::string(c.path == CoeffPath::Auto ? "auto" : c.path == CoeffPath::Delta ? "delta" : "general");
       }},
      number("k", &RunConfig::k),
      number("t_min", &RunConfig::t_min),
      number("t_max", &RunConfig::t_max),
      integer("t_count", &RunConfig::t_count),
      number("a_min", &RunConfig::a_min),
      number("a_max", &RunConfig::a_max),
      integer("a_count", &RunConfig::a_count),
      {"extrapolate", [](RunConfig& c, const std::string& v) { c.extrapolate = parse_bool("extrapolate", v); },
       [](const RunConfig& c) { return std::string(c.extrapolate ? "true" : "false"); }},
      {"out", [](RunConfig& c, const std::string& v) { c.out = v; }, [](const RunConfig& c) { return c.out.string(); }},
  };
  return k;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw PreconditionError("cli", "a sweep needs at least two points");
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return xs;
}

std::vector<double> logspace(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo)) throw PreconditionError("cli", "log sweep needs 0 < t_min < t_max");
  std::vector<double> xs = linspace(std::log(lo), std::log(hi), n);
  for (auto& x : xs) x = std::exp(x);
  xs.front() = lo;
  xs.back() = hi;
  return xs;
}

// Snapshot times in ascending order with t_final included once.
std::vector<double> sample_times(const RunConfig& cfg) {
  std::vector<double> ts = cfg.snapshot_times;
  for (double t : ts)
    if (!(t >= 0.0) || t > cfg.t_final) throw PreconditionError("cli", "snapshot times must lie in [0, t_final]");
  ts.push_back(cfg.t_final);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

class Outputs {
 public:
  explicit Outputs(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cli", fmt::format("cannot create output directory {}: {}", dir_.string(), ec.message()));
  }

  template <class Writer>
  void write(const std::string& name, Writer&& w) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw ConfigError("cli", fmt::format("cannot write {}", (dir_ / name).string()));
    w(f);
    f.flush();
    if (!f) throw ConfigError("cli", fmt::format("write to {} failed", (dir_ / name).string()));
    files_.push_back(name);
  }

  ScenarioOutput finish(const RunConfig& cfg) {
    write("manifest.txt", [&](std::ostream& o) {
      o << "# tdscat manifest: resolved configuration; outputs in this directory\n";
      for (const auto& f : files_) o << "# output: " << f.string() << '\n';
      o << format_config(cfg);
    });
    return {files_};
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
};

void evolve(const RunConfig& cfg, Outputs& out, std::ostream& log, bool static_check) {
  if (static_check && cfg.barrier.alpha != 0.0)
    throw PreconditionError("cli", "static-check needs an unmodulated barrier (alpha = 0)");
  RunOptions opt;
  opt.dx_max = cfg.dx;
  opt.dt = cfg.dt;
  const std::vector<double> ts = sample_times(cfg);
  const RunResult r = run(cfg.packet, cfg.barrier, cfg.pp, cfg.t_final, ts, opt);
  for (const WaveField& w : r.snapshots)
    out.write(snapshot_filename(w.t), [&](std::ostream& o) { write_snapshot_csv(o, w, cfg.pp); });
  out.write("summary.csv", [&](std::ostream& o) { write_summary_csv(o, r.summary); });
  const SummaryRow& last = r.summary.back();
  log << fmt::format("steps={} dt={} norm drift={:.3e} (max per step {:.3e}) max boundary |psi|={:.3e}\n", r.steps,
                     format_number(r.dt), r.total_drift, r.max_step_drift, r.max_boundary);
  log << fmt::format("t={} norm={:.12f} P_right={:.6f} left_mover_weight={:.3e}\n", format_number(last.t), last.norm,
                     last.p_right, last.left_mover_weight);
  if (static_check) {
    if (cfg.barrier.kind != BarrierKind::Delta)
      throw PreconditionError("cli", "static-check compares against the delta transmission");
    const double beta = cfg.barrier.beta(cfg.pp);
    log << fmt::format("P_right={:.5f}, T_plane={:.5f}, T_packet={:.5f}\n", last.p_right,
                       transmission(cfg.packet.k0, beta), packet_averaged_transmission(cfg.packet, beta));
  }
}

void coeffs(const RunConfig& cfg, Outputs& out, std::ostream& log) {
  const double pins[] = {cfg.q};
  const KGrid grid = KGrid::panels(cfg.kgrid_min, cfg.kgrid_max, cfg.kgrid_panel, 16, pins);
  const CoefficientSystem sys(cfg.barrier, cfg.pp, grid, cfg.q);
  const bool general = cfg.path == CoeffPath::General ||
                       (cfg.path == CoeffPath::Auto && cfg.barrier.kind != BarrierKind::Delta);
  if (cfg.path == CoeffPath::Delta && cfg.barrier.kind != BarrierKind::Delta)
    throw PreconditionError("cli", "the delta path needs a delta barrier");
  std::optional<MatrixElementTable> table;
  if (general) table = MatrixElementTable::build(sys);
  const Rhs rhs = [&](double t, const Eigen::VectorXcd& b) {
    return general ? rhs_general(sys, *table, t, b) : rhs_delta(sys, t, b);
  };
  const double rate = sys.max_phase_rate();
  const double dt = cfg.coeff_dt > 0.0 ? cfg.coeff_dt : 0.05 / rate;
  const std::vector<double> ts = sample_times(cfg);
  const Trajectory traj = integrate(rhs, sys.zero_field(), ts, dt, rate);
  out.write("coeffs.csv", [&](std::ostream& o) { write_trajectory_csv(o, sys, traj); });
  double max_b = 0.0;
  for (const auto& f : traj) max_b = std::max(max_b, f.b.cwiseAbs().maxCoeff());
  log << fmt::format("nodes={} path={} samples={} max|b|={:.6e} sigma defect={:.3e} norm defect={:.3e}\n",
                     grid.size(), general ? "general" : "delta", traj.size(), max_b,
                     sigma_symmetry_defect(traj, sys.source_index()), norm_defect(sys, traj.back()));
}

void shorttime(const RunConfig& cfg, Outputs& out, std::ostream& log) {
  const std::vector<double> ts = logspace(cfg.t_min, cfg.t_max, cfg.t_count);
  std::vector<double> lt, lv;
  out.write("shorttime.csv", [&](std::ostream& o) {
    CsvWriter csv(o, {"t", "k", "q", "re_c_minus", "im_c_minus", "abs_c_minus", "in_regime"});
    for (double t : ts) {
      const ShortTimeEstimate e = short_time_c_minus(cfg.k, cfg.q, t, cfg.barrier, cfg.pp);
      csv.row({t, cfg.k, cfg.q, e.value.real(), e.value.imag(), std::abs(e.value), e.in_regime ? 1.0 : 0.0});
      if (std::abs(e.value) > 0.0) {
        lt.push_back(std::log(t));
        lv.push_back(std::log(std::abs(e.value)));
      }
    }
  });
  if (lt.size() >= 2) log << fmt::format("log-log slope={:.6f}\n", fit_slope(lt, lv));
  else log << "all short-time coefficients vanish\n";
}

void widthsweep(const RunConfig& cfg, Outputs& out, std::ostream& log) {
  const std::vector<double> as = linspace(cfg.a_min, cfg.a_max, cfg.a_count);
  const std::vector<WidthSweepRow> rows = width_sweep(cfg.barrier.lambda0, cfg.pp, cfg.k, cfg.q, as);
  out.write("sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, cfg.k, rows); });
  std::vector<double> la, lr;
  for (const auto& r : rows) {
    la.push_back(r.a);
    lr.push_back(std::log(r.ratio));
  }
  const double gk = decay_rate(cfg.k, cfg.barrier.lambda0, cfg.pp.eta);
  const double gq = decay_rate(cfg.q, cfg.barrier.lambda0, cfg.pp.eta);
  log << fmt::format("gamma_k={:.6f} gamma_q={:.6f} fitted rate={:.6f} estimate={:.6f}\n", gk, gq, fit_slope(la, lr),
                     -(gk + gq) + std::abs(gk - gq));
}

FirstOrderParams first_order_params(const RunConfig& cfg) {
  FirstOrderParams fp;
  fp.barrier = cfg.barrier;
  fp.pp = cfg.pp;
  fp.packet = cfg.packet;
  return fp;
}

void perturb(const RunConfig& cfg, Outputs& out, std::ostream& log) {
  const FirstOrderParams fp = first_order_params(cfg);
  const FirstOrderCoeffs c = first_order_coeffs(fp, cfg.t_final);
  out.write("c1.csv", [&](std::ostream& o) {
    CsvWriter csv(o, {"k", "weight", "re_c1", "im_c1", "abs_c1"});
    for (std::size_t i = 0; i < c.grid.size(); ++i)
      csv.row({c.grid.k[i], c.grid.w[i], c.c1[i].real(), c.c1[i].imag(), std::abs(c.c1[i])});
  });
  RunOptions opt;
  opt.dx_max = cfg.dx;
  const SpatialGrid grid = run_grid(cfg.packet, cfg.barrier, cfg.pp, cfg.t_final, opt);
  const std::vector<cplx> psi1 = reconstruct_psi1(grid, c, fp);
  out.write("psi1.csv", [&](std::ostream& o) {
    CsvWriter csv(o, {"x", "re_psi1", "im_psi1", "abs_psi1"});
    for (std::size_t j = 0; j < grid.n; ++j) csv.row({grid.x(j), psi1[j].real(), psi1[j].imag(), std::abs(psi1[j])});
  });
  double n2 = 0.0;
  for (const cplx v : psi1) n2 += std::norm(v);
  log << fmt::format("k nodes={} x nodes={} ||psi1||={:.6e}\n", c.grid.size(), grid.n, std::sqrt(n2 * grid.dx()));
}

void compare(const RunConfig& cfg, Outputs& out, std::ostream& log) {
  ComparisonOptions opt;
  opt.run.dx_max = cfg.dx;
  opt.run.dt = cfg.dt;
  opt.extrapolate = cfg.extrapolate;
  const FirstOrderComparison c = compare_with_tdse(first_order_params(cfg), cfg.t_final, opt);
  out.write("comparison.csv", [&](std::ostream& o) { write_comparison_csv(o, c); });
  log << fmt::format("t={} relative L2 gap={:.6e} fitted constant=({:.6f},{:.6f}) gap after fit={:.6e}\n",
                     format_number(c.t), c.gap, c.fitted_constant.real(), c.fitted_constant.imag(), c.gap_after_fit);
}

}  // namespace

std::string to_string(Scenario s) { return kScenarioNames[static_cast<int>(s)]; }

Scenario scenario_from_string(const std::string& s) {
  for (int i = 0; i < 7; ++i)
    if (s == kScenarioNames[i]) return static_cast<Scenario>(i);
  throw ConfigError("config", fmt::format("unknown scenario '{}'", s));
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  const double omega = 7.0 * 2.0 * kPi / 0.3;
  if (name == "fig2") {
    c.scenario = Scenario::StaticCheck;
    c.barrier = {BarrierKind::Delta, 6.0, 0.0, 0.0, 0.0};
  } else if (name == "fig3") {
    c.scenario = Scenario::Evolve;
    c.barrier = {BarrierKind::Delta, 5.0, 0.0, 1.0, omega};
    c.snapshot_times = {0.1, 0.2};
  } else if (name == "fig4") {
    c.scenario = Scenario::Compare;
    c.barrier = {BarrierKind::Delta, 3.0, 0.0, 0.1, omega};
    c.dx = 1e-3;
    c.dt = 5e-5;
  } else {
    throw ConfigError("config", fmt::format("unknown preset '{}' (fig2, fig3 or fig4)", name));
  }
  return c;
}

void set_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const Key& k : keys())
    if (key == k.name) {
      k.set(cfg, value);
      return;
    }
  throw ConfigError("config", fmt::format("unknown key '{}'", key));
}

void apply_assignment(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("config", fmt::format("expected key=value, got '{}'", assignment));
  set_value(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunConfig parse_config(std::istream& in, RunConfig base) {
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    try {
      apply_assignment(base, s);
    } catch (const ConfigError& e) {
      throw ConfigError("config", fmt::format("line {}: {}", n, e.what()));
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", fmt::format("cannot read {}", path.string()));
  return parse_config(in, std::move(base));
}

std::string format_config(const RunConfig& cfg) {
  std::string s;
  for (const Key& k : keys()) s += fmt::format("{}={}\n", k.name, k.get(cfg));
  return s;
}

ScenarioOutput run_scenario(const RunConfig& cfg, std::ostream& log) {
  cfg.pp.validate();
  cfg.packet.validate();
  cfg.barrier.validate();
  if (!(cfg.t_final > 0.0)) throw PreconditionError("cli", "t_final must be positive");
  Outputs out(cfg.out);
  switch (cfg.scenario) {
    case Scenario::Evolve: evolve(cfg, out, log, false); break;
    case Scenario::StaticCheck: evolve(cfg, out, log, true); break;
    case Scenario::Coeffs: coeffs(cfg, out, log); break;
    case Scenario::ShortTime: shorttime(cfg, out, log); break;
    case Scenario::WidthSweep: widthsweep(cfg, out, log); break;
    case Scenario::Perturb: perturb(cfg, out, log); break;
    case Scenario::Compare: compare(cfg, out, log); break;
  }
  return out.finish(cfg);
}

double packet_averaged_transmission(const GaussianPacket& p, double beta) {
  p.validate();
  const KGrid g = KGrid::for_packet(p);
  const double s2 = p.sigma0 * p.sigma0;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = g.k[i] - p.k0;
    const double rho = g.w[i] * std::exp(-2.0 * s2 * d * d);
    num += rho * transmission(g.k[i], beta);
    den += rho;
  }
  return num / den;
}

}  // namespace tdscat
