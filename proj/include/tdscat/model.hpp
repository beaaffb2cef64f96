#pragma once

// Shared physical parameters, grids, initial packets and barrier laws.
//
// Reduced units throughout: hbar = 1 and the mass is absorbed into the
// diffusion coefficient eta, so the wave equation reads
//
//   i dpsi/dt = -eta d2psi/dx2 + V(x, t) psi,
//
// plane waves e^{ikx} carry energy E_k = eta k^2, and a barrier
// lambda delta(x) has reduced strength beta = lambda / (2 eta).

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace tdscat {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

struct PhysParams {
  double eta = 0.2;

  double energy(double k) const { return eta * k * k; }
  bool operator==(const PhysParams&) const = default;
  void validate() const;
};

struct GaussianPacket {
  double x0 = -3.0;
  double sigma0 = 0.2;
  double k0 = 50.0;

  /// (1 / (2 pi sigma0^2))^{1/4}
  double amplitude() const;
  cplx operator()(double x) const;
  /// Position standard deviation of |psi|^2 after free evolution for time t.
  double width_at(double t, const PhysParams& pp) const;
  void validate() const;
  bool operator==(const GaussianPacket&) const = default;
};

enum class BarrierKind { Delta, Square };

std::string to_string(BarrierKind kind);
BarrierKind barrier_kind_from_string(const std::string& s);

// V(x, t) = lambda(t) v(x) with v = delta(x) or the indicator of [-a, a].
// For a square barrier lambda0 is the height V0.
struct BarrierSpec {
  BarrierKind kind = BarrierKind::Delta;
  double lambda0 = 0.0;
  double a = 0.0;
  double alpha = 0.0;
  double omega0 = 0.0;

  double lambda_at(double t) const;
  /// lambda(t) - lambda(0), computed without cancellation.
  double delta_lambda(double t) const;
  /// d lambda / dt at t = 0.
  double rate_at_zero() const { return lambda0 * alpha * omega0; }
  /// Half-width of the region where v(x) is nonzero (0 for a delta).
  double half_width() const { return kind == BarrierKind::Square ? a : 0.0; }
  /// Reduced delta strength lambda0 / (2 eta); Delta barriers only.
  double beta(const PhysParams& pp) const;
  void validate() const;
  bool operator==(const BarrierSpec&) const = default;
};

double lambda_at(const BarrierSpec& b, double t);

struct SpatialGrid {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t n = 3;

  double dx() const { return (x_max - x_min) / static_cast<double>(n - 1); }
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }
  /// Index of the node at x = 0.
  std::size_t zero_index() const;
  void validate() const;

  /// Grid on [-half_extent', half_extent'] with spacing <= dx_max and a node at 0.
  static SpatialGrid symmetric(double half_extent, double dx_max);
  /// Domain wide enough for a packet run up to t_final (see width rule in README).
  static SpatialGrid for_run(const GaussianPacket& p, const BarrierSpec& b,
                             const PhysParams& pp, double t_final, double dx_max);
};

struct WaveField {
  SpatialGrid grid;
  double t = 0.0;
  std::vector<cplx> psi;

  double norm() const;
};

/// Discrete L2 norm sum |psi|^2 dx.
double l2_norm(std::span<const cplx> psi, double dx);

WaveField eval_packet(const GaussianPacket& p, const SpatialGrid& g);

// Ascending positive wavenumbers with composite Gauss-Legendre weights.
// Pinned points are panel boundaries that also appear as zero-weight nodes,
// so a coefficient can be tracked exactly at that wavenumber without
// changing any quadrature.
struct KGrid {
  std::vector<double> k;
  std::vector<double> w;

  std::size_t size() const { return k.size(); }
  double k_min() const { return k.front(); }
  double k_max() const { return k.back(); }
  /// Index of a node equal to q (within 1e-12 relative); throws otherwise.
  std::size_t index_of(double q) const;

  static KGrid panels(double lo, double hi, double max_panel_width, int nodes_per_panel = 16,
                      std::span<const double> pins = {});
  /// Truncated support [max(k0 - 10/sigma0, k_min), k0 + 10/sigma0], panel width <= 1/(4 sigma0).
  static KGrid for_packet(const GaussianPacket& p, double max_panel_width = 0.0);
};

inline constexpr double kKMin = 1e-3;

}  // namespace tdscat
