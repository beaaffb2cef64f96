#include "tdscat/model.hpp"

#include <algorithm>
#include <cmath>

#include "tdscat/errors.hpp"
#include "tdscat/quadrature.hpp"

namespace tdscat {

void PhysParams::validate() const {
  if (!(eta > 0.0)) throw PreconditionError("model", "eta must be positive");
}

double GaussianPacket::amplitude() const {
  return std::pow(1.0 / (2.0 * kPi * sigma0 * sigma0), 0.25);
}

cplx GaussianPacket::operator()(double x) const {
  const double d = x - x0;
  return amplitude() * std::exp(-d * d / (4.0 * sigma0 * sigma0)) * std::polar(1.0, k0 * x);
}

double GaussianPacket::width_at(double t, const PhysParams& pp) const {
  const double s = pp.eta * t / (sigma0 * sigma0);
  return sigma0 * std::sqrt(1.0 + s * s);
}

void GaussianPacket::validate() const {
  if (!(sigma0 > 0.0)) throw PreconditionError("model", "sigma0 must be positive");
}

std::string to_string(BarrierKind kind) { return kind == BarrierKind::Delta ? "delta" : "square"; }

BarrierKind barrier_kind_from_string(const std::string& s) {
  if (s == "delta" || s == "Delta") return BarrierKind::Delta;
  if (s == "square" || s == "Square") return BarrierKind::Square;
  throw ConfigError("model", "unknown barrier kind '" + s + "'");
}

double BarrierSpec::lambda_at(double t) const {
  return lambda0 * (1.0 + alpha * std::sin(omega0 * t));
}

double BarrierSpec::delta_lambda(double t) const { return lambda0 * alpha * std::sin(omega0 * t); }

double BarrierSpec::beta(const PhysParams& pp) const {
  if (kind != BarrierKind::Delta) throw PreconditionError("model", "beta is defined for delta barriers only");
  return lambda0 / (2.0 * pp.eta);
}

void BarrierSpec::validate() const {
  if (kind == BarrierKind::Square && !(a > 0.0))
    throw PreconditionError("model", "square barrier needs a > 0");
  if (kind == BarrierKind::Delta && a != 0.0)
    throw PreconditionError("model", "delta barrier must have a = 0");
  if (lambda0 < 0.0) throw PreconditionError("model", "only repulsive barriers (lambda0 >= 0) are supported");
}

double lambda_at(const BarrierSpec& b, double t) { return b.lambda_at(t); }

std::size_t SpatialGrid::zero_index() const {
  const double h = dx();
  const double r = -x_min / h;
  const double i0 = std::round(r);
  if (i0 < 1.0 || i0 > static_cast<double>(n) - 2.0 || std::abs(r - i0) > 1e-8)
    throw PreconditionError("model", "spatial grid has no interior node at x = 0");
  return static_cast<std::size_t>(i0);
}

void SpatialGrid::validate() const {
  if (n < 3) throw PreconditionError("model", "spatial grid needs at least 3 points");
  if (!(x_min < x_max)) throw PreconditionError("model", "grid bounds must satisfy x_min < x_max");
  (void)zero_index();
}

SpatialGrid SpatialGrid::symmetric(double half_extent, double dx_max) {
  if (!(half_extent > 0.0) || !(dx_max > 0.0))
    throw PreconditionError("model", "grid extent and spacing must be positive");
  const auto m = static_cast<std::size_t>(std::ceil(half_extent / dx_max - 1e-12));
  return SpatialGrid{-half_extent, half_extent, 2 * m + 1};
}

SpatialGrid SpatialGrid::for_run(const GaussianPacket& p, const BarrierSpec& b, const PhysParams& pp,
                                 double t_final, double dx_max) {
  // A modulated barrier can hand the packet up to two quanta of omega0;
  // the fastest such sideband sets the reach on the transmitted side.
  double k_fast = std::abs(p.k0);
  if (b.alpha != 0.0 && b.omega0 != 0.0 && b.lambda0 != 0.0)
    k_fast = std::sqrt(p.k0 * p.k0 + 2.0 * std::abs(b.omega0) / pp.eta);
  const double travel = 2.0 * pp.eta * k_fast * t_final;
  // 12 widths keep the initial |psi| at the walls near e^{-36}.
  const double spread = 12.0 * std::max(p.sigma0, p.width_at(t_final, pp));
  const double extent = std::max(std::abs(p.x0), std::abs(p.x0 + std::copysign(travel, p.k0))) + spread + b.half_width();
  return symmetric(extent, dx_max);
}

double l2_norm(std::span<const cplx> psi, double dx) {
  double s = 0.0;
  for (const cplx& v : psi) s += std::norm(v);
  return s * dx;
}

double WaveField::norm() const { return l2_norm(psi, grid.dx()); }

WaveField eval_packet(const GaussianPacket& p, const SpatialGrid& g) {
  p.validate();
  g.validate();
  constexpr double kBoundaryTol = 1e-12;
  if (std::abs(p(g.x_min)) > kBoundaryTol || std::abs(p(g.x_max)) > kBoundaryTol)
    throw PreconditionError("model", "grid too narrow: packet amplitude at the boundary exceeds 1e-12");
  WaveField w{g, 0.0, std::vector<cplx>(g.n)};
  for (std::size_t i = 0; i < g.n; ++i) w.psi[i] = p(g.x(i));
  return w;
}

std::size_t KGrid::index_of(double q) const {
  auto it = std::lower_bound(k.begin(), k.end(), q * (1.0 - 1e-12));
  if (it == k.end() || std::abs(*it - q) > 1e-12 * std::max(1.0, std::abs(q)))
    throw PreconditionError("model", "wavenumber is not a node of the k-grid");
  return static_cast<std::size_t>(it - k.begin());
}

KGrid KGrid::panels(double lo, double hi, double max_panel_width, int nodes_per_panel,
                    std::span<const double> pins) {
  if (!(lo > 0.0) || !(hi > lo) || !(max_panel_width > 0.0))
    throw PreconditionError("model", "k-grid needs 0 < lo < hi and a positive panel width");
  std::vector<double> breaks{lo};
  std::vector<double> sorted(pins.begin(), pins.end());
  std::sort(sorted.begin(), sorted.end());
  for (double p : sorted) {
    if (!(p > lo && p < hi)) throw PreconditionError("model", "pinned wavenumber outside k-grid support");
    breaks.push_back(p);
  }
  breaks.push_back(hi);

  KGrid g;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s];
    const double b = breaks[s + 1];
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel_width - 1e-12)));
    const QuadratureRule r = composite_gauss_legendre(a, b, panels, nodes_per_panel);
    g.k.insert(g.k.end(), r.x.begin(), r.x.end());
    g.w.insert(g.w.end(), r.w.begin(), r.w.end());
    if (s + 2 < breaks.size()) {
      g.k.push_back(b);
      g.w.push_back(0.0);
    }
  }
  return g;
}

KGrid KGrid::for_packet(const GaussianPacket& p, double max_panel_width) {
  p.validate();
  const double lo = std::max(p.k0 - 10.0 / p.sigma0, kKMin);
  const double hi = p.k0 + 10.0 / p.sigma0;
  if (!(hi > lo)) throw PreconditionError("model", "packet has no support at positive wavenumbers");
  double width = 1.0 / (4.0 * p.sigma0);
  if (max_panel_width > 0.0) width = std::min(width, max_panel_width);
  return panels(lo, hi, width);
}

}  // namespace tdscat
