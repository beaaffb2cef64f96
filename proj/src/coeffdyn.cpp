#include "tdscat/coeffdyn.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "tdscat/csv.hpp"
#include "tdscat/errors.hpp"
#include "tdscat/quadrature.hpp"

namespace tdscat {

namespace {

constexpr cplx kTwoPiI{0.0, 2.0 * kPi};

Eigen::Index idx(std::size_t j) { return static_cast<Eigen::Index>(j); }

int initial_panels(double a, const ScatteringState& sk, const ScatteringState& sl) {
  const double rate = std::abs(sk.p) + std::abs(sl.p);
  return std::max(2, static_cast<int>(std::ceil(2.0 * a * rate / 8.0)));
}

cplx square_profile(const ScatteringState& sk, const ScatteringState& sl, int panels, double& scale) {
  const QuadratureRule r = composite_gauss_legendre(-sk.a, sk.a, panels, 16);
  cplx sum = 0.0;
  scale = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const cplx f = std::conj(eval_eigenstate(sk, r.x[i])) * eval_eigenstate(sl, r.x[i]);
    sum += r.w[i] * f;
    scale += r.w[i] * std::abs(f);
  }
  return sum;
}

// Values of every grid state at the quadrature nodes, columns ordered as the
// coefficient vector.
Eigen::MatrixXcd sample_states(const CoefficientSystem& sys, const QuadratureRule& r) {
  const std::size_t n = sys.size();
  Eigen::MatrixXcd q(idx(r.x.size()), idx(2 * n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      q(idx(i), idx(j)) = eval_eigenstate(sys.state(Sigma::Plus, j), r.x[i]);
      q(idx(i), idx(n + j)) = eval_eigenstate(sys.state(Sigma::Minus, j), r.x[i]);
    }
  }
  return q;
}

Eigen::MatrixXcd square_table(const CoefficientSystem& sys, int panels) {
  const double a = sys.barrier().a;
  const QuadratureRule r = composite_gauss_legendre(-a, a, panels, 16);
  const Eigen::MatrixXcd q = sample_states(sys, r);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(r.w.data(), idx(r.w.size()));
  return q.adjoint() * (w.asDiagonal() * q);
}

}  // namespace

CoefficientSystem::CoefficientSystem(BarrierSpec barrier, PhysParams pp, KGrid grid, std::optional<double> source_q)
    : barrier_(barrier), pp_(pp), grid_(std::move(grid)) {
  barrier_.validate();
  pp_.validate();
  if (grid_.size() == 0) throw PreconditionError("coeffdyn", "empty k-grid");
  if (source_q) source_index_ = grid_.index_of(*source_q);
  plus_.reserve(grid_.size());
  minus_.reserve(grid_.size());
  energy_.reserve(grid_.size());
  for (double k : grid_.k) {
    plus_.push_back(make_state(barrier_, pp_, k, Sigma::Plus));
    minus_.push_back(make_state(barrier_, pp_, k, Sigma::Minus));
    energy_.push_back(pp_.energy(k));
  }
}

double CoefficientSystem::max_phase_rate() const {
  return pp_.eta * (grid_.k_max() * grid_.k_max() - grid_.k_min() * grid_.k_min()) + std::abs(barrier_.omega0);
}

CoefficientField CoefficientSystem::zero_field() const {
  return CoefficientField{0.0, Eigen::VectorXcd::Zero(idx(2 * size()))};
}

CoefficientField CoefficientSystem::packet_field(const GaussianPacket& p) const {
  CoefficientField f = zero_field();
  const std::size_t n = size();
  for (std::size_t j = 0; j < n; ++j) {
    f.b(idx(j)) = project_packet(p, plus_[j]);
    f.b(idx(n + j)) = project_packet(p, minus_[j]);
  }
  return f;
}

cplx profile_element(const BarrierSpec& barrier, const ScatteringState& sk, const ScatteringState& sl) {
  if (sk.kind != barrier.kind || sl.kind != barrier.kind)
    throw PreconditionError("coeffdyn", "states were built for a different barrier kind");
  if (barrier.kind == BarrierKind::Delta)
    return std::conj(eval_eigenstate(sk, 0.0)) * eval_eigenstate(sl, 0.0);

  if (sk.a != barrier.a || sl.a != barrier.a)
    throw PreconditionError("coeffdyn", "states were built for a different barrier width");
  int panels = initial_panels(barrier.a, sk, sl);
  double scale = 0.0;
  cplx prev = square_profile(sk, sl, panels, scale);
  for (int level = 0; level < 12; ++level) {
    panels *= 2;
    const cplx next = square_profile(sk, sl, panels, scale);
    if (std::abs(next - prev) <= 1e-13 * scale) return next;
    prev = next;
  }
  throw ConvergenceError("coeffdyn", "square-barrier matrix element did not converge under panel refinement");
}

cplx matrix_element(const BarrierSpec& barrier, double t, const ScatteringState& sk, const ScatteringState& sl) {
  return barrier.delta_lambda(t) * profile_element(barrier, sk, sl);
}

MatrixElementTable MatrixElementTable::build(const CoefficientSystem& sys) {
  MatrixElementTable table;
  table.barrier_ = sys.barrier();
  const std::size_t n = sys.size();
  if (sys.barrier().kind == BarrierKind::Delta) {
    Eigen::VectorXcd v(idx(2 * n));
    for (std::size_t j = 0; j < n; ++j) {
      v(idx(j)) = eval_eigenstate(sys.state(Sigma::Plus, j), 0.0);
      v(idx(n + j)) = eval_eigenstate(sys.state(Sigma::Minus, j), 0.0);
    }
    table.profile_ = v.conjugate() * v.transpose();
    return table;
  }

  double rate = 0.0;
  for (std::size_t j = 0; j < n; ++j) rate = std::max(rate, std::abs(sys.state(Sigma::Plus, j).p));
  int panels = std::max(2, static_cast<int>(std::ceil(2.0 * sys.barrier().a * 2.0 * rate / 8.0)));
  Eigen::MatrixXcd prev = square_table(sys, panels);
  for (int level = 0; level < 8; ++level) {
    panels *= 2;
    Eigen::MatrixXcd next = square_table(sys, panels);
    const double change = (next - prev).cwiseAbs().maxCoeff();
    if (change <= 1e-10 * next.cwiseAbs().maxCoeff()) {
      table.profile_ = std::move(next);
      return table;
    }
    prev = std::move(next);
  }
  throw ConvergenceError("coeffdyn", "matrix-element table did not converge under panel refinement");
}

cplx MatrixElementTable::at(double t, Sigma s, std::size_t k, Sigma u, std::size_t l) const {
  const std::size_t n = grid_size();
  const std::size_t r = s == Sigma::Plus ? k : n + k;
  const std::size_t c = u == Sigma::Plus ? l : n + l;
  return barrier_.delta_lambda(t) * profile_(idx(r), idx(c));
}

Eigen::VectorXcd rhs_delta(const CoefficientSystem& sys, double t, const Eigen::VectorXcd& b) {
  if (sys.barrier().kind != BarrierKind::Delta) throw PreconditionError("coeffdyn", "rhs_delta needs a delta barrier");
  const std::size_t n = sys.size();
  if (b.size() != idx(2 * n)) throw PreconditionError("coeffdyn", "coefficient vector does not match the k-grid");
  Eigen::VectorXcd r = Eigen::VectorXcd::Zero(b.size());
  const double dl = sys.barrier().delta_lambda(t);
  if (dl == 0.0) return r;

  // psi(0, t) of the smooth part plus the source mode.
  cplx psi0 = 0.0;
  const auto& w = sys.grid().w;
  for (std::size_t j = 0; j < n; ++j) {
    if (w[j] == 0.0) continue;
    psi0 += w[j] * sys.state(Sigma::Plus, j).D * std::polar(1.0, -sys.energy(j) * t) * (b(idx(j)) + b(idx(n + j)));
  }
  if (auto q = sys.source_index()) psi0 += sys.state(Sigma::Plus, *q).D * std::polar(1.0, -sys.energy(*q) * t);

  const cplx pref = dl * psi0 / kTwoPiI;
  for (std::size_t j = 0; j < n; ++j) {
    const cplx v = pref * std::conj(sys.state(Sigma::Plus, j).D) * std::polar(1.0, sys.energy(j) * t);
    r(idx(j)) = v;
    r(idx(n + j)) = v;
  }
  return r;
}

Eigen::VectorXcd rhs_general(const CoefficientSystem& sys, const MatrixElementTable& table, double t,
                             const Eigen::VectorXcd& b) {
  const std::size_t n = sys.size();
  if (table.grid_size() != n || b.size() != idx(2 * n))
    throw PreconditionError("coeffdyn", "matrix-element table and coefficients are on different k-grids");
  Eigen::VectorXcd r = Eigen::VectorXcd::Zero(b.size());
  const double dl = sys.barrier().delta_lambda(t);
  if (dl == 0.0) return r;

  std::vector<cplx> phase(n);
  for (std::size_t j = 0; j < n; ++j) phase[j] = std::polar(1.0, sys.energy(j) * t);
  Eigen::VectorXcd u(b.size());
  const auto& w = sys.grid().w;
  for (std::size_t j = 0; j < n; ++j) {
    const cplx f = w[j] * std::conj(phase[j]);
    u(idx(j)) = f * b(idx(j));
    u(idx(n + j)) = f * b(idx(n + j));
  }
  Eigen::VectorXcd v = table.profile() * u;
  if (auto q = sys.source_index()) v += table.profile().col(idx(*q)) * std::conj(phase[*q]);

  const cplx pref = dl / kTwoPiI;
  for (std::size_t j = 0; j < n; ++j) {
    r(idx(j)) = pref * phase[j] * v(idx(j));
    r(idx(n + j)) = pref * phase[j] * v(idx(n + j));
  }
  return r;
}

Trajectory integrate(const Rhs& rhs, const CoefficientField& b0, std::span<const double> sample_times, double dt,
                     double max_phase_rate) {
  if (!(dt > 0.0)) throw PreconditionError("coeffdyn", "time step must be positive");
  if (max_phase_rate > 0.0 && dt > 0.1 / max_phase_rate * (1.0 + 1e-12))
    throw PreconditionError("coeffdyn", "time step " + format_number(dt) + " does not resolve the phase rate " +
                                            format_number(max_phase_rate) + " (need dt <= 0.1 / rate)");
  Trajectory out;
  out.reserve(sample_times.size());
  double t = b0.t;
  Eigen::VectorXcd b = b0.b;
  for (double ts : sample_times) {
    if (ts < t) throw PreconditionError("coeffdyn", "sample times must be ascending and not before the start");
    const double span = ts - t;
    const long steps = span > 0.0 ? std::max(1L, static_cast<long>(std::ceil(span / dt * (1.0 - 1e-12)))) : 0L;
    const double h = steps > 0 ? span / static_cast<double>(steps) : 0.0;
    for (long s = 0; s < steps; ++s) {
      const double t0 = t + static_cast<double>(s) * h;
      const Eigen::VectorXcd k1 = rhs(t0, b);
      const Eigen::VectorXcd k2 = rhs(t0 + 0.5 * h, b + (0.5 * h) * k1);
      const Eigen::VectorXcd k3 = rhs(t0 + 0.5 * h, b + (0.5 * h) * k2);
      const Eigen::VectorXcd k4 = rhs(t0 + h, b + h * k3);
      b += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    t = ts;
    out.push_back(CoefficientField{t, b});
  }
  return out;
}

Rhs first_order(const Rhs& rhs, const CoefficientField& b0) {
  return [rhs, frozen = b0.b](double t, const Eigen::VectorXcd&) { return rhs(t, frozen); };
}

double sigma_symmetry_defect(const Trajectory& traj, std::optional<std::size_t> excluded) {
  if (traj.empty()) return 0.0;
  const CoefficientField& first = traj.front();
  double worst = 0.0;
  for (const auto& f : traj) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (excluded && *excluded == j) continue;
      const cplx dm = f.minus(j) - first.minus(j);
      const cplx dp = f.plus(j) - first.plus(j);
      worst = std::max(worst, std::abs(dm - dp));
    }
  }
  return worst;
}

double total_probability(const CoefficientSystem& sys, const CoefficientField& f) {
  const std::size_t n = sys.size();
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += sys.grid().w[j] * (std::norm(f.plus(j)) + std::norm(f.minus(j)));
  return 2.0 * kPi * sum;
}

double norm_defect(const CoefficientSystem& sys, const CoefficientField& f) {
  const auto q = sys.source_index();
  if (!q) throw PreconditionError("coeffdyn", "norm_defect needs a singular source mode");
  return 2.0 * f.plus(*q).real() + total_probability(sys, f) / (2.0 * kPi);
}

ShortTimeEstimate short_time_coeff(double k, Sigma s, double q, double t, const BarrierSpec& barrier,
                                   const PhysParams& pp) {
  const ScatteringState sk = make_state(barrier, pp, k, s);
  const ScatteringState sq = make_state(barrier, pp, q, Sigma::Plus);
  const cplx v = barrier.rate_at_zero() * profile_element(barrier, sk, sq) * t * t / (2.0 * kTwoPiI);
  const bool ok = std::abs(pp.energy(k) - pp.energy(q)) * t <= 0.1 && std::abs(barrier.omega0) * t <= 0.1;
  return {v, ok};
}

ShortTimeEstimate short_time_c_minus(double k, double q, double t, const BarrierSpec& barrier,
                                     const PhysParams& pp) {
  return short_time_coeff(k, Sigma::Minus, q, t, barrier, pp);
}

double ratio_estimate(double a, const DecayRates& gammas) {
  const double d = gammas.gamma_k - gammas.gamma_q;
  const double s = gammas.gamma_k + gammas.gamma_q;
  const double x = d * a;
  // 2 sinh(x) / d = 2 a sinh(x) / x
  const double shape = std::abs(x) < 1e-6 ? 2.0 * a * (1.0 + x * x / 6.0) : 2.0 * std::sinh(x) / d;
  return shape / s * std::exp(-s * a);
}

std::vector<WidthSweepRow> width_sweep(double V0, const PhysParams& pp, double k, double q,
                                       std::span<const double> half_widths) {
  const DecayRates g{decay_rate(k, V0, pp.eta), decay_rate(q, V0, pp.eta)};
  std::vector<WidthSweepRow> rows;
  for (double a : half_widths) {
    const BarrierSpec b{BarrierKind::Square, V0, a, 0.0, 0.0};
    const ScatteringState sq = make_state(b, pp, q, Sigma::Plus);
    const cplx pm = profile_element(b, make_state(b, pp, k, Sigma::Minus), sq);
    const cplx pp_ = profile_element(b, make_state(b, pp, k, Sigma::Plus), sq);
    rows.push_back({a, std::abs(pm / pp_), ratio_estimate(a, g)});
  }
  return rows;
}

void write_trajectory_csv(std::ostream& out, const CoefficientSystem& sys, const Trajectory& traj) {
  CsvWriter csv(out, {"t", "k", "sigma", "re_b", "im_b", "abs2_b"});
  for (const auto& f : traj) {
    for (Sigma s : {Sigma::Plus, Sigma::Minus}) {
      for (std::size_t j = 0; j < f.size(); ++j) {
        const cplx v = f.at(s, j);
        // sigma is written as +1 / -1 so every column stays numeric.
        csv.row({f.t, sys.grid().k[j], s == Sigma::Plus ? 1.0 : -1.0, v.real(), v.imag(), std::norm(v)});
      }
    }
  }
}

void write_sweep_csv(std::ostream& out, double k, std::span<const WidthSweepRow> rows) {
  CsvWriter csv(out, {"a", "k", "ratio"});
  for (const auto& r : rows) csv.row({r.a, k, r.ratio});
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("coeffdyn", "slope fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace tdscat
