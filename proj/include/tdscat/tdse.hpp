#pragma once

// Direct propagation of i psi_t = -eta psi_xx + V(x, t) psi on a uniform grid
// with hard walls, by the Crank-Nicolson (Cayley) scheme. The delta barrier is
// the potential lambda(t) / dx on the x = 0 node; a square barrier takes
// lambda(t) on nodes strictly inside [-a, a] and lambda(t) / 2 on its edges.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "tdscat/model.hpp"

namespace tdscat {

/// Potential samples V(x_j, t) on the grid (delta folded into one node).
std::vector<double> potential_on_grid(const SpatialGrid& g, const BarrierSpec& b, double t);

// One Crank-Nicolson step operator for fixed (grid, barrier, eta, dt). Only
// interior nodes are unknowns; the end nodes stay zero.
class CrankNicolson {
 public:
  CrankNicolson(SpatialGrid grid, BarrierSpec barrier, PhysParams pp, double dt);

  double dt() const { return dt_; }
  const SpatialGrid& grid() const { return grid_; }

  /// Advance w by dt, evaluating lambda at w.t + dt/2.
  void step(WaveField& w) const;

 private:
  struct Factor {
    std::vector<cplx> diag;  // Thomas pivots
    std::vector<cplx> upper; // normalized super-diagonal
  };
  Factor factorize(const std::vector<double>& v) const;
  void solve(const Factor& f, std::vector<cplx>& x) const;

  SpatialGrid grid_;
  BarrierSpec barrier_;
  PhysParams pp_;
  double dt_;
  cplx off_;  // off-diagonal of the implicit matrix, -i eta dt / (2 dx^2)
  bool time_dependent_;
  std::vector<double> base_potential_;
  Factor base_;
  // Delta barriers with a moving strength: A(t) = A0 + g(t) e_z e_z^T, solved
  // by a rank-one update on the fixed factorization of A0.
  std::size_t zero_ = 0;
  std::vector<cplx> unit_response_;
};

struct Observables {
  std::vector<double> density;
  std::vector<double> current;  // 2 eta Im(psi* dpsi/dx), central differences
  double norm = 0.0;
  double p_right = 0.0;  // trapezoid over x >= 0
};

Observables observables(const WaveField& w, const PhysParams& pp);

/// Integral over x of |d rho/dt + dJ/dx| for one step before -> after, with
/// J the link current of the time-centred state (psi^n + psi^{n+1}) / 2.
/// Nodes with |x| <= exclude_half_width are skipped.
double continuity_residual(const WaveField& before, const WaveField& after, const PhysParams& pp,
                           double exclude_half_width = -1.0);

/// Probability carried by negative momenta in psi restricted smoothly to
/// x > x_cut. The window rises from 0 at x_cut to 1 at x_cut + roll with a
/// C-infinity profile; roll must span at least 10 dx and fit in the domain.
double left_mover_weight(const WaveField& w, double x_cut, double roll);

struct RunOptions {
  double dx_max = 0.0;  // 0: 2 pi / (40 k0)
  double dt = 0.0;      // 0: dx / (20 eta k0)
  std::optional<SpatialGrid> grid;  // overrides the default domain
  double x_cut = 0.5;
  double roll = 1.5;
  double boundary_tolerance = 1e-8;
  double norm_drift_tolerance = 1e-8;
};

struct SummaryRow {
  double t;
  double norm;
  double p_right;
  double left_mover_weight;
};

struct RunResult {
  std::vector<WaveField> snapshots;
  std::vector<SummaryRow> summary;
  double dt = 0.0;
  long steps = 0;
  double max_step_drift = 0.0;   // largest |norm change| in a single step
  double total_drift = 0.0;      // |norm(t_final) - norm(0)|
  double max_boundary = 0.0;     // largest |psi| next to the walls
};

/// Resolved step and grid for a run (defaults filled in).
SpatialGrid run_grid(const GaussianPacket& p, const BarrierSpec& b, const PhysParams& pp, double t_final,
                     const RunOptions& opt);
double run_dt(const GaussianPacket& p, const PhysParams& pp, const SpatialGrid& g, const RunOptions& opt);

/// Propagate the packet to t_final, returning snapshots at the requested
/// times (t_final is always included). Throws PreconditionError when the
/// packet reaches the walls or the norm drifts beyond tolerance.
RunResult run(const GaussianPacket& p, const BarrierSpec& b, const PhysParams& pp, double t_final,
              std::span<const double> snapshot_times, const RunOptions& opt = {});

/// Columns x, re_psi, im_psi, density, current.
void write_snapshot_csv(std::ostream& out, const WaveField& w, const PhysParams& pp);
/// snap_t<time>.csv
std::string snapshot_filename(double t);
/// Columns t, norm, P_right, left_mover_weight.
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

}  // namespace tdscat
