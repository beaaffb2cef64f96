#include "tdscat/eigenbasis.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <ostream>

#include "tdscat/csv.hpp"
#include "tdscat/errors.hpp"
#include "tdscat/special.hpp"

namespace tdscat {

DeltaAmplitudes delta_amplitudes(double k, double beta) {
  const cplx den(-beta, k);
  return {beta / den, kI * k / den};
}

double transmission(double k, double beta) { return k * k / (beta * beta + k * k); }

double decay_rate(double k, double V0, double eta) {
  const double g2 = V0 / eta - k * k;
  if (!(g2 > 0.0)) throw PreconditionError("eigenbasis", "energy is not below the barrier top");
  return std::sqrt(g2);
}

ScatteringState square_amplitudes(double k, double V0, double a, double eta, Sigma sigma) {
  if (!(k > 0.0) || !(a > 0.0) || V0 < 0.0 || !(eta > 0.0))
    throw PreconditionError("eigenbasis", "square_amplitudes needs k > 0, a > 0, V0 >= 0");
  ScatteringState s;
  s.k = k;
  s.sigma = sigma;
  s.kind = BarrierKind::Square;
  s.a = a;
  s.p = std::sqrt(cplx(k * k - V0 / eta, 0.0));
  const cplx p = s.p;
  const cplx E = std::exp(2.0 * kI * p * a);  // e^{2ipa}, |E| <= 1
  const cplx eka = std::polar(1.0, k * a);    // e^{ika}
  const cplx emka = std::conj(eka);
  const cplx ipk = kI * p / k;                // derivative rows are divided by k

  // Unknowns (A, D, F, G); value and derivative/k continuity at both edges.
  Eigen::Matrix4cd m;
  Eigen::Vector4cd rhs;
  if (sigma == Sigma::Plus) {
    m << eka, 0.0, -1.0, -E,
        -kI * eka, 0.0, -ipk, ipk * E,
        0.0, eka, -E, -1.0,
        0.0, kI * eka, -ipk * E, ipk;
    rhs << -emka, -kI * emka, 0.0, 0.0;
  } else {
    m << eka, 0.0, -E, -1.0,
        kI * eka, 0.0, -ipk * E, ipk,
        0.0, eka, -1.0, -E,
        0.0, -kI * eka, -ipk, ipk * E;
    rhs << -emka, kI * emka, 0.0, 0.0;
  }
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(m);
  const auto& sv = svd.singularValues();
  s.condition = sv(3) > 0.0 ? sv(0) / sv(3) : std::numeric_limits<double>::infinity();
  if (!(s.condition < 1e12))
    throw PreconditionError("eigenbasis", "square-barrier matching is ill-conditioned (condition " +
                                              format_number(s.condition) + ")");
  const Eigen::Vector4cd sol = m.fullPivLu().solve(rhs);
  s.A = sol(0);
  s.D = sol(1);
  s.F = sol(2);
  s.G = sol(3);
  return s;
}

ScatteringState make_state(const BarrierSpec& barrier, const PhysParams& pp, double k, Sigma sigma) {
  if (!(k > 0.0)) throw PreconditionError("eigenbasis", "scattering states need k > 0");
  if (barrier.kind == BarrierKind::Square) {
    if (barrier.lambda0 == 0.0) {
      ScatteringState s;
      s.k = k;
      s.sigma = sigma;
      s.kind = BarrierKind::Square;
      s.a = barrier.a;
      s.p = k;
      // Free interior: e^{ikx} written in the edge-anchored basis.
      if (sigma == Sigma::Plus) s.F = std::polar(1.0, -k * barrier.a);
      else s.G = std::polar(1.0, -k * barrier.a);
      return s;
    }
    return square_amplitudes(k, barrier.lambda0, barrier.a, pp.eta, sigma);
  }
  const auto [A, D] = delta_amplitudes(k, barrier.beta(pp));
  ScatteringState s;
  s.k = k;
  s.sigma = sigma;
  s.kind = BarrierKind::Delta;
  s.A = A;
  s.D = D;
  return s;
}

namespace {

enum class Region { Left, Interior, Right };

Region region_of(const ScatteringState& s, double x, Side side) {
  const double a = s.a;
  if (x < -a || (x == -a && side == Side::Left && a > 0.0)) return Region::Left;
  if (x > a || (x == a && side == Side::Right)) return Region::Right;
  if (s.kind == BarrierKind::Delta) return side == Side::Left ? Region::Left : Region::Right;
  return Region::Interior;
}

}  // namespace

cplx eval_eigenstate(const ScatteringState& s, double x, Side side) {
  const double k = s.k;
  const cplx ep = std::polar(1.0, k * x);
  const cplx em = std::conj(ep);
  switch (region_of(s, x, side)) {
    case Region::Left:
      return s.sigma == Sigma::Plus ? ep + s.A * em : s.D * em;
    case Region::Right:
      return s.sigma == Sigma::Plus ? s.D * ep : em + s.A * ep;
    case Region::Interior:
      break;
  }
  return s.F * std::exp(kI * s.p * (x + s.a)) + s.G * std::exp(-kI * s.p * (x - s.a));
}

cplx eval_eigenstate_derivative(const ScatteringState& s, double x, Side side) {
  const double k = s.k;
  const cplx ep = std::polar(1.0, k * x);
  const cplx em = std::conj(ep);
  const cplx ik = kI * k;
  switch (region_of(s, x, side)) {
    case Region::Left:
      return s.sigma == Sigma::Plus ? ik * (ep - s.A * em) : -ik * s.D * em;
    case Region::Right:
      return s.sigma == Sigma::Plus ? ik * s.D * ep : ik * (s.A * ep - em);
    case Region::Interior:
      break;
  }
  const cplx ip = kI * s.p;
  return ip * (s.F * std::exp(ip * (x + s.a)) - s.G * std::exp(-ip * (x - s.a)));
}

double packet_mass_between(const GaussianPacket& p, double lo, double hi) {
  // |psi|^2 is a normal density with mean x0 and standard deviation sigma0.
  const double s = std::sqrt(2.0) * p.sigma0;
  const double u_lo = (lo - p.x0) / s;
  const double u_hi = (hi - p.x0) / s;
  if (u_lo >= 0.0) return 0.5 * (std::erfc(u_lo) - std::erfc(u_hi));
  if (u_hi <= 0.0) return 0.5 * (std::erfc(-u_hi) - std::erfc(-u_lo));
  return 0.5 * (std::erf(u_hi) - std::erf(u_lo));
}

namespace {

// int_{-inf}^{b} e^{i kappa x} psi0(x) dx (to_left) or int_{b}^{inf} (otherwise).
// Completing the square moves the centre to c = x0 + 2 i sigma0^2 K with
// K = k0 + kappa; the Gaussian factor e^{-sigma0^2 K^2} is folded into the
// error function so that neither overflows.
cplx half_line_transform(const GaussianPacket& p, double kappa, double b, bool to_left) {
  const double K = p.k0 + kappa;
  const double s0 = p.sigma0;
  const cplx z((b - p.x0) / (2.0 * s0), -s0 * K);
  const double g = std::exp(-s0 * s0 * K * K);
  const cplx damped = gauss_damped_erf(z);
  const cplx pref = p.amplitude() * s0 * std::sqrt(kPi) * std::polar(1.0, K * p.x0);
  return pref * (to_left ? g + damped : g - damped);
}

}  // namespace

cplx project_packet(const GaussianPacket& p, const ScatteringState& s) {
  p.validate();
  const double a = s.a;
  if (s.kind == BarrierKind::Square && packet_mass_between(p, -a, a) > 1e-8)
    throw PreconditionError("eigenbasis", "packet overlaps the barrier region");
  const double k = s.k;
  const cplx Ac = std::conj(s.A);
  const cplx Dc = std::conj(s.D);
  cplx overlap;
  if (s.sigma == Sigma::Plus) {
    // conj(Psi^+) = e^{-ikx} + A* e^{ikx} (x < -a),  D* e^{-ikx} (x > a)
    overlap = half_line_transform(p, -k, -a, true) + Ac * half_line_transform(p, k, -a, true) +
              Dc * half_line_transform(p, -k, a, false);
  } else {
    // conj(Psi^-) = e^{ikx} + A* e^{-ikx} (x > a),  D* e^{ikx} (x < -a)
    overlap = half_line_transform(p, k, a, false) + Ac * half_line_transform(p, -k, a, false) +
              Dc * half_line_transform(p, k, -a, true);
  }
  return overlap / (2.0 * kPi);
}

void write_amplitudes_csv(std::ostream& out, std::span<const double> ks, const BarrierSpec& barrier,
                          const PhysParams& pp) {
  CsvWriter csv(out, {"k", "reA", "imA", "reD", "imD", "T"});
  for (double k : ks) {
    const ScatteringState s = make_state(barrier, pp, k, Sigma::Plus);
    csv.row({k, s.A.real(), s.A.imag(), s.D.real(), s.D.imag(), std::norm(s.D)});
  }
}

}  // namespace tdscat
