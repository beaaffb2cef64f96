#include "tdscat/tdse.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "tdscat/csv.hpp"
#include "tdscat/errors.hpp"

namespace tdscat {

std::vector<double> potential_on_grid(const SpatialGrid& g, const BarrierSpec& b, double t) {
  std::vector<double> v(g.n, 0.0);
  const double lam = b.lambda_at(t);
  if (b.kind == BarrierKind::Delta) {
    v[g.zero_index()] = lam / g.dx();
    return v;
  }
  const double edge_tol = 1e-9 * g.dx();
  for (std::size_t j = 0; j < g.n; ++j) {
    const double ax = std::abs(g.x(j));
    if (ax < b.a - edge_tol) v[j] = lam;
    else if (ax <= b.a + edge_tol) v[j] = 0.5 * lam;
  }
  return v;
}

namespace {

// Zero far-tail values before they turn subnormal: arithmetic on subnormals
// is an order of magnitude slower and they carry no information.
void flush_tiny(std::vector<cplx>& v) {
  for (cplx& z : v) {
    if (std::abs(z.real()) < 1e-150) z.real(0.0);
    if (std::abs(z.imag()) < 1e-150) z.imag(0.0);
  }
}

}  // namespace

CrankNicolson::CrankNicolson(SpatialGrid grid, BarrierSpec barrier, PhysParams pp, double dt)
    : grid_(grid), barrier_(barrier), pp_(pp), dt_(dt) {
  grid_.validate();
  barrier_.validate();
  pp_.validate();
  if (!(dt_ > 0.0)) throw PreconditionError("tdse", "time step must be positive");
  const double dx = grid_.dx();
  off_ = cplx(0.0, -pp_.eta * dt_ / (2.0 * dx * dx));
  time_dependent_ = barrier_.lambda0 != 0.0 && barrier_.alpha != 0.0 && barrier_.omega0 != 0.0;

  if (!time_dependent_) {
    base_potential_ = potential_on_grid(grid_, barrier_, 0.0);
  } else {
    base_potential_.assign(grid_.n, 0.0);
  }
  base_ = factorize(base_potential_);
  if (time_dependent_ && barrier_.kind == BarrierKind::Delta) {
    zero_ = grid_.zero_index();
    unit_response_.assign(grid_.n, cplx{});
    unit_response_[zero_] = 1.0;
    solve(base_, unit_response_);
    flush_tiny(unit_response_);
  }
}

CrankNicolson::Factor CrankNicolson::factorize(const std::vector<double>& v) const {
  const std::size_t n = grid_.n;
  const double dx = grid_.dx();
  const double kin = 2.0 * pp_.eta / (dx * dx);
  Factor f;
  f.diag.assign(n, cplx{});
  f.upper.assign(n, cplx{});
  // Interior unknowns are nodes 1 .. n-2.
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const cplx d(1.0, 0.5 * dt_ * (kin + v[j]));
    const cplx piv = j == 1 ? d : d - off_ * f.upper[j - 1];
    if (std::abs(piv) == 0.0) throw ConvergenceError("tdse", "tridiagonal solver breakdown");
    f.diag[j] = piv;
    f.upper[j] = off_ / piv;
  }
  return f;
}

void CrankNicolson::solve(const Factor& f, std::vector<cplx>& x) const {
  const std::size_t n = grid_.n;
  x[0] = 0.0;
  x[n - 1] = 0.0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const cplx prev = j == 1 ? cplx{} : x[j - 1];
    x[j] = (x[j] - off_ * prev) / f.diag[j];
  }
  for (std::size_t j = n - 2; j-- > 1;) x[j] -= f.upper[j] * x[j + 1];
}

void CrankNicolson::step(WaveField& w) const {
  const std::size_t n = grid_.n;
  if (w.psi.size() != n) throw PreconditionError("tdse", "wave field does not match the propagator grid");
  const double dx = grid_.dx();
  const double kin = 2.0 * pp_.eta / (dx * dx);
  const double tm = w.t + 0.5 * dt_;

  std::vector<double> v_mid;
  const std::vector<double>* v = &base_potential_;
  if (time_dependent_ && barrier_.kind == BarrierKind::Square) {
    v_mid = potential_on_grid(grid_, barrier_, tm);
    v = &v_mid;
  }
  double delta_v = 0.0;
  if (time_dependent_ && barrier_.kind == BarrierKind::Delta) delta_v = barrier_.lambda_at(tm) / dx;

  // Right-hand side (I - i dt/2 H) psi.
  std::vector<cplx> r(n);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    double vj = (*v)[j];
    if (j == zero_ && delta_v != 0.0) vj += delta_v;
    r[j] = cplx(1.0, -0.5 * dt_ * (kin + vj)) * w.psi[j] - off_ * (w.psi[j - 1] + w.psi[j + 1]);
  }

  if (time_dependent_ && barrier_.kind == BarrierKind::Square) {
    solve(factorize(*v), r);
  } else {
    solve(base_, r);
    if (time_dependent_) {
      // Sherman-Morrison for the moving delta node.
      const cplx g(0.0, 0.5 * dt_ * delta_v);
      const cplx coef = g * r[zero_] / (1.0 + g * unit_response_[zero_]);
      for (std::size_t j = 1; j + 1 < n; ++j) r[j] -= coef * unit_response_[j];
    }
  }
  flush_tiny(r);
  w.psi.swap(r);
  w.psi[0] = 0.0;
  w.psi[n - 1] = 0.0;
  w.t += dt_;
}

Observables observables(const WaveField& w, const PhysParams& pp) {
  const std::size_t n = w.psi.size();
  const double dx = w.grid.dx();
  Observables o;
  o.density.resize(n);
  o.current.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) o.density[j] = std::norm(w.psi[j]);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const cplx d = (w.psi[j + 1] - w.psi[j - 1]) / (2.0 * dx);
    o.current[j] = 2.0 * pp.eta * (std::conj(w.psi[j]) * d).imag();
  }
  o.norm = l2_norm(w.psi, dx);
  double right = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = w.grid.x(j);
    if (std::abs(x) < 1e-9 * dx || j + 1 == n) right += 0.5 * o.density[j];
    else if (x > 0.0) right += o.density[j];
  }
  o.p_right = right * dx;
  return o;
}

double continuity_residual(const WaveField& before, const WaveField& after, const PhysParams& pp,
                           double exclude_half_width) {
  const std::size_t n = before.psi.size();
  if (after.psi.size() != n) throw PreconditionError("tdse", "fields on different grids");
  const double dt = after.t - before.t;
  if (!(dt > 0.0)) throw PreconditionError("tdse", "continuity residual needs after.t > before.t");
  const double dx = before.grid.dx();
  std::vector<cplx> mid(n);
  for (std::size_t j = 0; j < n; ++j) mid[j] = 0.5 * (before.psi[j] + after.psi[j]);
  auto link = [&](std::size_t j) { return 2.0 * pp.eta / dx * (std::conj(mid[j]) * mid[j + 1]).imag(); };
  double sum = 0.0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    if (std::abs(before.grid.x(j)) <= exclude_half_width) continue;
    const double drho = (std::norm(after.psi[j]) - std::norm(before.psi[j])) / dt;
    const double dj = (link(j) - link(j - 1)) / dx;
    sum += std::abs(drho + dj) * dx;
  }
  return sum;
}

namespace {

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

}  // namespace

double left_mover_weight(const WaveField& w, double x_cut, double roll) {
  const SpatialGrid& g = w.grid;
  const double dx = g.dx();
  if (!(x_cut > 0.0)) throw PreconditionError("tdse", "left-mover cut must lie at x > 0");
  if (roll < 10.0 * dx * (1.0 - 1e-12)) throw PreconditionError("tdse", "left-mover window must roll off over >= 10 dx");
  if (x_cut + roll >= g.x_max) throw PreconditionError("tdse", "left-mover window is wider than the domain");

  std::vector<cplx> f;
  for (std::size_t j = 0; j < g.n; ++j) {
    const double x = g.x(j);
    if (x < x_cut) continue;
    f.push_back(smooth_step((x - x_cut) / roll) * w.psi[j]);
  }
  const int n = static_cast<int>(f.size());
  std::vector<cplx> out(f.size());
  fftw_plan plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(f.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  // FFTW's forward transform uses e^{-ikx}, so bin m carries momentum +m dk
  // for m < n/2 and negative momentum above. k = 0 and Nyquist split evenly.
  double neg = 0.0;
  for (int m = 0; m < n; ++m) {
    const double p = std::norm(out[static_cast<std::size_t>(m)]);
    if (m == 0 || 2 * m == n) neg += 0.5 * p;
    else if (2 * m > n) neg += p;
  }
  return neg / n * dx;
}

SpatialGrid run_grid(const GaussianPacket& p, const BarrierSpec& b, const PhysParams& pp, double t_final,
                     const RunOptions& opt) {
  if (opt.grid) {
    opt.grid->validate();
    return *opt.grid;
  }
  double dx = opt.dx_max;
  if (dx == 0.0) {
    if (!(std::abs(p.k0) > 0.0))
      throw PreconditionError("tdse", "default grid spacing needs k0 != 0; set dx explicitly");
    dx = 2.0 * kPi / (40.0 * std::abs(p.k0));
  }
  return SpatialGrid::for_run(p, b, pp, t_final, dx);
}

double run_dt(const GaussianPacket& p, const PhysParams& pp, const SpatialGrid& g, const RunOptions& opt) {
  if (opt.dt > 0.0) return opt.dt;
  if (opt.dt < 0.0) throw PreconditionError("tdse", "time step must be positive");
  if (!(std::abs(p.k0) > 0.0)) throw PreconditionError("tdse", "default time step needs k0 != 0; set dt explicitly");
  return g.dx() / (20.0 * pp.eta * std::abs(p.k0));
}

RunResult run(const GaussianPacket& p, const BarrierSpec& b, const PhysParams& pp, double t_final,
              std::span<const double> snapshot_times, const RunOptions& opt) {
  if (!(t_final > 0.0)) throw PreconditionError("tdse", "t_final must be positive");
  const SpatialGrid g = run_grid(p, b, pp, t_final, opt);
  const double dt = run_dt(p, pp, g, opt);

  std::vector<double> times(snapshot_times.begin(), snapshot_times.end());
  times.push_back(t_final);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (times.front() < 0.0 || times.back() > t_final)
    throw PreconditionError("tdse", "snapshot times must lie in [0, t_final]");

  RunResult res;
  res.dt = dt;
  WaveField w = eval_packet(p, g);
  const double norm0 = w.norm();
  double norm_prev = norm0;
  const std::size_t n = g.n;
  const std::size_t edge = std::min<std::size_t>(6, n / 2);

  auto record = [&](const WaveField& f) {
    const Observables o = observables(f, pp);
    res.snapshots.push_back(f);
    res.summary.push_back({f.t, o.norm, o.p_right, left_mover_weight(f, opt.x_cut, opt.roll)});
  };

  std::optional<CrankNicolson> cn;
  for (double ts : times) {
    const double span = ts - w.t;
    if (span > 0.0) {
      const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt * (1.0 - 1e-12))));
      const double h = span / static_cast<double>(steps);
      if (!cn || std::abs(cn->dt() - h) > 1e-15 * h) cn.emplace(g, b, pp, h);
      const double t_start = w.t;
      for (long s = 0; s < steps; ++s) {
        cn->step(w);
        w.t = t_start + static_cast<double>(s + 1) * h;
        const double nrm = l2_norm(w.psi, g.dx());
        res.max_step_drift = std::max(res.max_step_drift, std::abs(nrm - norm_prev));
        norm_prev = nrm;
        double boundary = 0.0;
        for (std::size_t j = 1; j < edge; ++j)
          boundary = std::max({boundary, std::abs(w.psi[j]), std::abs(w.psi[n - 1 - j])});
        res.max_boundary = std::max(res.max_boundary, boundary);
        if (boundary > opt.boundary_tolerance)
          throw PreconditionError("tdse", "packet reached the domain walls at t = " + format_number(w.t));
      }
      res.steps += steps;
      w.t = ts;
    }
    record(w);
  }
  res.total_drift = std::abs(norm_prev - norm0);
  if (res.total_drift > opt.norm_drift_tolerance)
    throw ConvergenceError("tdse", "norm drift " + format_number(res.total_drift) + " exceeds tolerance");
  return res;
}

void write_snapshot_csv(std::ostream& out, const WaveField& w, const PhysParams& pp) {
  const Observables o = observables(w, pp);
  CsvWriter csv(out, {"x", "re_psi", "im_psi", "density", "current"});
  for (std::size_t j = 0; j < w.psi.size(); ++j)
    csv.row({w.grid.x(j), w.psi[j].real(), w.psi[j].imag(), o.density[j], o.current[j]});
}

std::string snapshot_filename(double t) { return fmt::format("snap_t{}.csv", t); }

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  CsvWriter csv(out, {"t", "norm", "P_right", "left_mover_weight"});
  for (const auto& r : rows) csv.row({r.t, r.norm, r.p_right, r.left_mover_weight});
}

}  // namespace tdscat
