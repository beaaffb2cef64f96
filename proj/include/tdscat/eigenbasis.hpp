#pragma once

// Scattering eigenstates of the t = 0 Hamiltonian -eta d2/dx2 + lambda0 v(x)
// for delta and square barriers.
//
// Right-going (sigma = +) states are
//   e^{ikx} + A e^{-ikx}   for x < -a,      D e^{ikx}   for x > a,
// left-going (sigma = -) states are their mirror images
//   e^{-ikx} + A e^{ikx}   for x > a,       D e^{-ikx}  for x < -a.
// They satisfy <Psi_k^s | Psi_l^t> = 2 pi delta(k - l) delta_st, so a state
// expands as psi = sum_s int_0^inf dk c_k^s Psi_k^s with
// c_k^s = <Psi_k^s | psi> / (2 pi).

#include <iosfwd>
#include <span>

#include "tdscat/model.hpp"

namespace tdscat {

enum class Sigma { Plus, Minus };

inline const char* to_string(Sigma s) { return s == Sigma::Plus ? "+" : "-"; }

struct ScatteringState {
  double k = 0.0;
  Sigma sigma = Sigma::Plus;
  BarrierKind kind = BarrierKind::Delta;
  double a = 0.0;
  cplx A{};
  cplx D{1.0, 0.0};
  // Square barriers only: interior solution F e^{ip(x+a)} + G e^{-ip(x-a)}
  // with p = sqrt(k^2 - V0/eta), Im p >= 0, so each exponential is at most 1
  // in magnitude on [-a, a] below the barrier top.
  cplx p{};
  cplx F{};
  cplx G{};
  double condition = 1.0;  // 2-norm condition number of the matching system
};

struct DeltaAmplitudes {
  cplx A;
  cplx D;
};

/// A = beta / (-beta + ik), D = ik / (-beta + ik).
DeltaAmplitudes delta_amplitudes(double k, double beta);

/// k^2 / (beta^2 + k^2).
double transmission(double k, double beta);

/// Evanescent decay rate sqrt(V0/eta - k^2); requires eta k^2 < V0.
double decay_rate(double k, double V0, double eta);

struct DecayRates {
  double gamma_k;
  double gamma_q;
};

/// Four-condition matching at x = +-a. Throws PreconditionError when the
/// matching system is numerically singular (condition number above 1e12,
/// e.g. exactly at the barrier top).
ScatteringState square_amplitudes(double k, double V0, double a, double eta, Sigma sigma = Sigma::Plus);

/// Eigenstate of the barrier's t = 0 Hamiltonian.
ScatteringState make_state(const BarrierSpec& barrier, const PhysParams& pp, double k, Sigma sigma);

enum class Side { Left, Right };

/// Psi(x). At a region boundary `side` picks the one-sided formula.
cplx eval_eigenstate(const ScatteringState& s, double x, Side side = Side::Right);
/// dPsi/dx, one-sided at region boundaries.
cplx eval_eigenstate_derivative(const ScatteringState& s, double x, Side side = Side::Right);

/// c_k^s(0) = <Psi_k^s | packet> / (2 pi), closed form through complex error
/// functions. For square barriers the packet must be supported outside
/// [-a, a] (mass inside below 1e-8), otherwise PreconditionError.
cplx project_packet(const GaussianPacket& p, const ScatteringState& s);

/// Probability of the packet inside [lo, hi].
double packet_mass_between(const GaussianPacket& p, double lo, double hi);

/// Columns k, reA, imA, reD, imD, T.
void write_amplitudes_csv(std::ostream& out, std::span<const double> ks, const BarrierSpec& barrier,
                          const PhysParams& pp);

}  // namespace tdscat
