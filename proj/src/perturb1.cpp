#include "tdscat/perturb1.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "tdscat/csv.hpp"
#include "tdscat/errors.hpp"

namespace tdscat {

cplx time_bracket(double theta, double t) {
  const double u = 0.5 * theta * t;
  // sinc to full precision; the series branch covers |u| < 1e-4 where
  // u^4/120 is below double resolution.
  const double sinc = std::abs(u) < 1e-4 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
  return kI * t * std::polar(sinc, u);
}

void FirstOrderParams::validate() const {
  if (barrier.kind != BarrierKind::Delta)
    throw PreconditionError("perturb1", "first-order formulas are for the delta barrier");
  barrier.validate();
  pp.validate();
  packet.validate();
}

KGrid first_order_grid(const FirstOrderParams& fp, double t) {
  const KGrid support = KGrid::for_packet(fp.packet);
  double width = 1.0 / (4.0 * fp.packet.sigma0);
  if (t > 0.0) width = std::min(width, kPi / (2.0 * fp.pp.eta * t * support.k_max()));
  return KGrid::for_packet(fp.packet, width);
}

namespace {

// w_l * weight(l) * [term_- + term_+] for every l node.
std::vector<cplx> l_integrand(const FirstOrderParams& fp, const KGrid& l_grid) {
  const GaussianPacket& p = fp.packet;
  const double beta = fp.barrier.beta(fp.pp);
  const double re_z = -p.x0 / (2.0 * p.sigma0);
  const double s2 = p.sigma0 * p.sigma0;
  std::vector<cplx> f(l_grid.size());
  for (std::size_t j = 0; j < l_grid.size(); ++j) {
    if (l_grid.w[j] == 0.0) continue;
    const double l = l_grid.k[j];
    const double dm = p.k0 - l, dp = p.k0 + l;
    const cplx gm = gauss_damped_erf(cplx(re_z, -p.sigma0 * dm));
    const cplx gp = gauss_damped_erf(cplx(re_z, -p.sigma0 * dp));
    const cplx term_m = std::polar(1.0, -l * p.x0) * (beta * gm + kI * l * std::exp(-s2 * dm * dm));
    const cplx term_p = std::polar(1.0, l * p.x0) * (-beta * gp + kI * l * std::exp(-s2 * dp * dp));
    const double weight = fp.weight == MomentumWeight::Linear ? l / (beta * beta + l * l)
                                                              : l * l / (beta * beta + l * l);
    f[j] = l_grid.w[j] * weight * (term_m + term_p);
  }
  return f;
}

cplx prefactor(const FirstOrderParams& fp) {
  const GaussianPacket& p = fp.packet;
  return fp.barrier.lambda0 * fp.barrier.alpha * p.sigma0 * std::sqrt(kPi) / (4.0 * kPi * kPi) * p.amplitude() *
         std::polar(1.0, p.k0 * p.x0);
}

cplx coefficient(double k, double t, const FirstOrderParams& fp, const KGrid& l_grid, const std::vector<cplx>& f,
                 cplx pref) {
  const double beta = fp.barrier.beta(fp.pp);
  const double w0 = fp.barrier.omega0;
  const double ek = fp.pp.energy(k);
  cplx sum = 0.0;
  for (std::size_t j = 0; j < l_grid.size(); ++j) {
    if (f[j] == cplx{}) continue;
    const double theta = ek - fp.pp.energy(l_grid.k[j]);
    sum += f[j] * (time_bracket(w0 + theta, t) - time_bracket(theta - w0, t));
  }
  return pref * (kI * k / cplx(beta, k)) * sum;
}

}  // namespace

FirstOrderCoeffs first_order_coeffs(const FirstOrderParams& fp, const KGrid& k_grid, const KGrid& l_grid, double t) {
  fp.validate();
  if (t < 0.0) throw PreconditionError("perturb1", "time must be non-negative");
  const std::vector<cplx> f = l_integrand(fp, l_grid);
  const cplx pref = prefactor(fp);
  FirstOrderCoeffs c{k_grid, t, std::vector<cplx>(k_grid.size())};
  for (std::size_t i = 0; i < k_grid.size(); ++i) c.c1[i] = coefficient(k_grid.k[i], t, fp, l_grid, f, pref);
  return c;
}

FirstOrderCoeffs first_order_coeffs(const FirstOrderParams& fp, double t) {
  const KGrid g = first_order_grid(fp, t);
  return first_order_coeffs(fp, g, g, t);
}

cplx c1_coeff(double k, double t, const FirstOrderParams& fp) {
  fp.validate();
  const KGrid g = first_order_grid(fp, t);
  return coefficient(k, t, fp, g, l_integrand(fp, g), prefactor(fp));
}

std::vector<cplx> reconstruct_psi1(const SpatialGrid& grid, const FirstOrderCoeffs& c, const FirstOrderParams& fp,
                                   StandingWaveSign sign) {
  const double beta = fp.barrier.beta(fp.pp);
  const std::size_t z = grid.zero_index();
  const double dx = grid.dx();
  std::vector<cplx> psi(grid.n, cplx{});
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    if (c.grid.w[i] == 0.0 || c.c1[i] == cplx{}) continue;
    const double k = c.grid.k[i];
    const cplx amp = c.grid.w[i] * std::polar(1.0, -fp.pp.energy(k) * c.t) * c.c1[i];
    const cplx s = sign == StandingWaveSign::Derived ? cplx(beta, k) / cplx(-beta, k)
                                                     : std::polar(1.0, 2.0 * std::atan(k / beta));
    const cplx step = std::polar(1.0, k * dx);
    // e^{ik|x|} walking outward from x = 0 on both sides.
    cplx e = 1.0;
    for (std::size_t d = 0; z + d < grid.n || d <= z; ++d) {
      const cplx v = amp * (std::conj(e) + s * e);
      if (z + d < grid.n) psi[z + d] += v;
      if (d > 0 && d <= z) psi[z - d] += v;
      e *= step;
    }
  }
  return psi;
}

cplx fit_global_constant(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw PreconditionError("perturb1", "fields of different length");
  cplx num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::conj(a[i]) * b[i];
    den += std::norm(a[i]);
  }
  if (den == 0.0) throw PreconditionError("perturb1", "cannot fit a constant to a zero field");
  return num / den;
}

double relative_l2_gap(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw PreconditionError("perturb1", "fields of different length");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  if (den == 0.0) throw PreconditionError("perturb1", "reference field is zero");
  return std::sqrt(num / den);
}

namespace {

struct Resolution {
  RunOptions opt;  // grid and dt resolved
};

std::vector<Resolution> resolutions(const FirstOrderParams& fp, double t, const ComparisonOptions& c) {
  RunOptions o = c.run;
  o.grid = run_grid(fp.packet, fp.barrier, fp.pp, t, c.run);
  o.dt = run_dt(fp.packet, fp.pp, *o.grid, c.run);
  std::vector<Resolution> r{{o}};
  if (c.extrapolate) {
    RunOptions f = o;
    f.grid = SpatialGrid{o.grid->x_min, o.grid->x_max, 2 * o.grid->n - 1};
    f.dt = 0.5 * o.dt;
    r.push_back({f});
  }
  return r;
}

struct Drift {
  double step = 0.0;
  double total = 0.0;
};

std::vector<cplx> final_psi(const FirstOrderParams& fp, const BarrierSpec& b, double t, const RunOptions& o,
                            Drift& drift) {
  RunResult r = run(fp.packet, b, fp.pp, t, {}, o);
  drift.step = std::max(drift.step, r.max_step_drift);
  drift.total = std::max(drift.total, r.total_drift);
  return std::move(r.snapshots.back().psi);
}

FirstOrderComparison assemble(const FirstOrderParams& fp, double t, const ComparisonOptions& c,
                              const std::vector<Resolution>& res, const std::vector<std::vector<cplx>>& diffs) {
  FirstOrderComparison out;
  out.grid = *res.front().opt.grid;
  out.t = t;
  out.numeric = diffs.front();
  if (diffs.size() == 2)
    for (std::size_t j = 0; j < out.grid.n; ++j)
      out.numeric[j] = (4.0 * diffs[1][2 * j] - diffs[0][j]) / 3.0;
  out.analytic = reconstruct_psi1(out.grid, first_order_coeffs(fp, t), fp, c.sign);
  out.gap = relative_l2_gap(out.analytic, out.numeric);
  out.fitted_constant = fit_global_constant(out.analytic, out.numeric);
  std::vector<cplx> scaled(out.analytic);
  for (auto& v : scaled) v *= out.fitted_constant;
  out.gap_after_fit = relative_l2_gap(scaled, out.numeric);
  return out;
}

std::vector<cplx> difference(std::vector<cplx> a, const std::vector<cplx>& b) {
  for (std::size_t j = 0; j < a.size(); ++j) a[j] -= b[j];
  return a;
}

}  // namespace

FirstOrderComparison compare_with_tdse(const FirstOrderParams& fp, double t, const ComparisonOptions& opt) {
  const double alpha = fp.barrier.alpha;
  return compare_alpha_sweep(fp, t, std::span<const double>(&alpha, 1), opt).front();
}

std::vector<FirstOrderComparison> compare_alpha_sweep(const FirstOrderParams& fp, double t,
                                                      std::span<const double> alphas,
                                                      const ComparisonOptions& opt) {
  fp.validate();
  if (!(t > 0.0)) throw PreconditionError("perturb1", "comparison time must be positive");
  if (alphas.empty()) throw PreconditionError("perturb1", "no modulation depths given");
  // Any alpha != 0 gives the same sideband reach, so one domain serves
  // every run, the static ones included.
  FirstOrderParams widest = fp;
  widest.barrier.alpha = 1.0;
  const std::vector<Resolution> res = resolutions(widest, t, opt);
  BarrierSpec still = fp.barrier;
  still.alpha = 0.0;
  Drift static_drift;
  std::vector<std::vector<cplx>> statics;
  for (const auto& r : res) statics.push_back(final_psi(fp, still, t, r.opt, static_drift));

  std::vector<FirstOrderComparison> out;
  for (double alpha : alphas) {
    FirstOrderParams f = fp;
    f.barrier.alpha = alpha;
    f.validate();
    Drift drift = static_drift;
    std::vector<std::vector<cplx>> diffs;
    for (std::size_t i = 0; i < res.size(); ++i)
      diffs.push_back(difference(final_psi(f, f.barrier, t, res[i].opt, drift), statics[i]));
    out.push_back(assemble(f, t, opt, res, diffs));
    out.back().max_step_drift = drift.step;
    out.back().max_total_drift = drift.total;
  }
  return out;
}

void write_comparison_csv(std::ostream& out, const FirstOrderComparison& c) {
  CsvWriter csv(out, {"x", "re_analytic", "im_analytic", "re_numeric", "im_numeric", "abs_diff"});
  for (std::size_t j = 0; j < c.grid.n; ++j) {
    const cplx a = c.analytic[j], n = c.numeric[j];
    csv.row({c.grid.x(j), a.real(), a.imag(), n.real(), n.imag(), std::abs(a - n)});
  }
}

}  // namespace tdscat
