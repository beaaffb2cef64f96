#pragma once

// Exact coefficient dynamics in the t = 0 eigenbasis.
//
// Writing psi(t) = int dl e^{-i E_l t} sum_tau c_l^tau(t) Psi_l^tau, the
// Schroedinger equation becomes
//
//   dc_k^s/dt = 1/(2 pi i) int dl e^{i (E_k - E_l) t}
//               sum_tau <Psi_k^s | dV(t) | Psi_l^tau> c_l^tau(t),
//
// with dV = V(x, t) - V(x, 0) = (lambda(t) - lambda0) v(x). A singular initial
// state Psi_q^+ is carried as c = delta(k - q) delta_{s+} + b: only the smooth
// part b lives on the k-grid and the delta contributes an analytic source term.

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "tdscat/eigenbasis.hpp"
#include "tdscat/model.hpp"

namespace tdscat {

// Smooth coefficients b on a k-grid, stored as [b^+(k_0..k_{N-1}), b^-(...)].
struct CoefficientField {
  double t = 0.0;
  Eigen::VectorXcd b;

  std::size_t size() const { return static_cast<std::size_t>(b.size() / 2); }
  cplx plus(std::size_t j) const { return b(static_cast<Eigen::Index>(j)); }
  cplx minus(std::size_t j) const { return b(static_cast<Eigen::Index>(size() + j)); }
  cplx at(Sigma s, std::size_t j) const { return s == Sigma::Plus ? plus(j) : minus(j); }
};

using Trajectory = std::vector<CoefficientField>;

// Barrier, grid and eigenstates shared by every right-hand side.
class CoefficientSystem {
 public:
  /// `source_q`, when set, must be a node of the grid (see KGrid pins).
  CoefficientSystem(BarrierSpec barrier, PhysParams pp, KGrid grid, std::optional<double> source_q = {});

  const BarrierSpec& barrier() const { return barrier_; }
  const PhysParams& phys() const { return pp_; }
  const KGrid& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }
  const ScatteringState& state(Sigma s, std::size_t j) const {
    return s == Sigma::Plus ? plus_[j] : minus_[j];
  }
  std::optional<std::size_t> source_index() const { return source_index_; }
  double energy(std::size_t j) const { return energy_[j]; }

  /// Largest phase rate in the equations: eta (k_max^2 - k_min^2) + |omega0|.
  double max_phase_rate() const;

  CoefficientField zero_field() const;
  /// c_k^s(0) = <Psi_k^s | packet> / (2 pi) on the grid; no singular source.
  CoefficientField packet_field(const GaussianPacket& p) const;

 private:
  BarrierSpec barrier_;
  PhysParams pp_;
  KGrid grid_;
  std::optional<std::size_t> source_index_;
  std::vector<ScatteringState> plus_;
  std::vector<ScatteringState> minus_;
  std::vector<double> energy_;
};

/// <Psi_k^s | v | Psi_l^t> for the barrier profile v (delta or indicator of
/// [-a, a]). Square barriers use Gauss-Legendre panels refined until two
/// successive levels agree to 1e-13; ConvergenceError otherwise.
cplx profile_element(const BarrierSpec& barrier, const ScatteringState& sk, const ScatteringState& sl);

/// <Psi_k^s | dV(t) | Psi_l^t> = (lambda(t) - lambda0) * profile_element.
cplx matrix_element(const BarrierSpec& barrier, double t, const ScatteringState& sk, const ScatteringState& sl);

// Profile overlaps P[ks, lt] for every pair of grid states; the table at time
// t is (lambda(t) - lambda0) P.
class MatrixElementTable {
 public:
  static MatrixElementTable build(const CoefficientSystem& sys);

  const Eigen::MatrixXcd& profile() const { return profile_; }
  std::size_t grid_size() const { return static_cast<std::size_t>(profile_.rows() / 2); }
  cplx at(double t, Sigma s, std::size_t k, Sigma u, std::size_t l) const;

 private:
  BarrierSpec barrier_;
  Eigen::MatrixXcd profile_;
};

/// Delta barrier: the matrix element factorizes as D_k* dlambda D_l, so the
/// rate is the same for both sigma and costs O(N).
Eigen::VectorXcd rhs_delta(const CoefficientSystem& sys, double t, const Eigen::VectorXcd& b);

/// General path through the full matrix-element table; O(N^2).
Eigen::VectorXcd rhs_general(const CoefficientSystem& sys, const MatrixElementTable& table, double t,
                             const Eigen::VectorXcd& b);

using Rhs = std::function<Eigen::VectorXcd(double t, const Eigen::VectorXcd& b)>;

/// Fixed-step classical RK4 from b0.t through every sample time (ascending,
/// >= b0.t); each interval is split into equal steps no longer than dt.
/// Rejects dt > 0.1 / max_phase_rate (PreconditionError).
Trajectory integrate(const Rhs& rhs, const CoefficientField& b0, std::span<const double> sample_times, double dt,
                     double max_phase_rate);

/// First-order (Born) dynamics: the rate is evaluated on the frozen initial
/// coefficients, c^(1)(t) = c(0) + int_0^t rhs(t', c(0)) dt'.
Rhs first_order(const Rhs& rhs, const CoefficientField& b0);

/// max over samples and k != q of |(b^-(t) - b^-(0)) - (b^+(t) - b^+(0))|.
/// For the singular initial state b(0) = 0 and this is |b^- - b^+|.
double sigma_symmetry_defect(const Trajectory& traj, std::optional<std::size_t> excluded = {});

/// 2 pi sum_s int |c_k^s|^2 dk: the norm of a normalizable state.
double total_probability(const CoefficientSystem& sys, const CoefficientField& f);

/// Change of <Psi|Psi> / (2 pi) relative to the singular initial state:
/// 2 Re b_q^+ + sum_s int |b_k^s|^2 dk (zero under exact unitary evolution).
double norm_defect(const CoefficientSystem& sys, const CoefficientField& f);

struct ShortTimeEstimate {
  cplx value;
  bool in_regime;  // |E_k - E_q| t <= 0.1 and omega0 t <= 0.1
};

/// c_k^s(t) ~ 1/(4 pi i) <Psi_k^s | dV/dt(x, 0) | Psi_q^+> t^2 for the initial
/// state Psi_q^+ at short times.
ShortTimeEstimate short_time_coeff(double k, Sigma s, double q, double t, const BarrierSpec& barrier,
                                   const PhysParams& pp);
ShortTimeEstimate short_time_c_minus(double k, double q, double t, const BarrierSpec& barrier,
                                     const PhysParams& pp);

/// Width-decay shape 2 sinh((gk - gq) a) / ((gk - gq)(gk + gq)) exp(-(gk + gq) a);
/// a proportionality, not an absolute value.
double ratio_estimate(double a, const DecayRates& gammas);

struct WidthSweepRow {
  double a;
  double ratio;           // |c_k^- / c_k^+| at short times, from matrix elements
  double ratio_estimate;  // shape function above
};

/// Short-time |c_k^-/c_k^+| for square barriers of height V0 and the given half-widths.
std::vector<WidthSweepRow> width_sweep(double V0, const PhysParams& pp, double k, double q,
                                       std::span<const double> half_widths);

/// Columns t, k, sigma, re_b, im_b, abs2_b.
void write_trajectory_csv(std::ostream& out, const CoefficientSystem& sys, const Trajectory& traj);
/// Columns a, k, ratio.
void write_sweep_csv(std::ostream& out, double k, std::span<const WidthSweepRow> rows);

/// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace tdscat
