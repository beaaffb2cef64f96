#include "tdscat/special.hpp"

#include <cmath>
#include <limits>

#include "tdscat/errors.hpp"

namespace tdscat {
namespace {

using lcplx = std::complex<long double>;

constexpr long double kSqrtPiL = 1.772453850905516027298167483341145182798L;
constexpr long double kTwoOverSqrtPiL = 1.128379167095512573896158903121545171688L;

// Below |z| = 4 the Maclaurin series loses at most e^{16} to cancellation,
// which the 64-bit long double mantissa absorbs. Close to the imaginary axis
// the terms do not cancel (loss ~ e^{2 Re(z)^2}) and the series remains the
// better choice out to large |Im z|, where the continued fraction converges
// slowly.
constexpr long double kSeriesRadius = 4.0L;
constexpr long double kImaginaryStrip = 1.5L;

bool use_series(const lcplx& z) {
  return std::abs(z) < kSeriesRadius || std::abs(z.real()) < kImaginaryStrip;
}

lcplx erf_series(const lcplx& z) {
  const lcplx z2 = z * z;
  const long double peak = std::norm(z);
  lcplx term = z;  // z (-z^2)^n / n!
  lcplx sum = z;
  for (int n = 1; n < 20000; ++n) {
    term *= -z2 / static_cast<long double>(n);
    const lcplx contrib = term / static_cast<long double>(2 * n + 1);
    sum += contrib;
    if (n > peak && std::abs(contrib) <= 1e-21L * std::abs(sum)) return kTwoOverSqrtPiL * sum;
  }
  throw ConvergenceError("perturb1", "erf power series did not converge");
}

// Laplace continued fraction
//   erfc(z) = e^{-z^2}/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
// evaluated with the modified Lentz algorithm; valid for Re z > 0.
lcplx erfcx_continued_fraction(const lcplx& z) {
  constexpr long double tiny = 1e-300L;
  lcplx f = z;
  if (std::abs(f) < tiny) f = tiny;
  lcplx c = f;
  lcplx d = 0.0L;
  for (int j = 1; j < 200000; ++j) {
    const long double aj = 0.5L * j;
    d = z + aj * d;
    if (std::abs(d) < tiny) d = tiny;
    c = z + aj / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0L / d;
    const lcplx delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0L) < 1e-20L) return 1.0L / (kSqrtPiL * f);
  }
  throw ConvergenceError("perturb1", "erfc continued fraction did not converge");
}

}  // namespace

std::complex<double> complex_erf(std::complex<double> z) {
  const double x = z.real();
  const double y = z.imag();
  if (!std::isfinite(x) || !(std::abs(y) <= 30.0) || y * y - x * x > 700.0)
    throw PreconditionError("perturb1", "complex_erf argument outside accuracy envelope");
  const bool flip = x < 0.0;
  const lcplx w = flip ? -lcplx(x, y) : lcplx(x, y);
  lcplx r;
  if (use_series(w)) {
    r = erf_series(w);
  } else {
    r = 1.0L - std::exp(-w * w) * erfcx_continued_fraction(w);
  }
  if (flip) r = -r;
  return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

std::complex<double> gauss_damped_erf(std::complex<double> z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw PreconditionError("perturb1", "gauss_damped_erf argument is not finite");
  const bool flip = z.real() < 0.0;
  const lcplx w = flip ? -lcplx(z.real(), z.imag()) : lcplx(z.real(), z.imag());
  const long double x = w.real();
  const long double y = w.imag();
  lcplx r;
  if (use_series(w)) {
    if (std::norm(w) > 10000.0L)
      throw PreconditionError("perturb1", "gauss_damped_erf argument too close to the imaginary axis");
    r = std::exp(-y * y) * erf_series(w);
  } else {
    // e^{-y^2} (1 - e^{-z^2} erfcx(z)) with e^{-y^2 - z^2} = e^{-x^2 - 2ixy}
    r = std::exp(-y * y) - std::exp(lcplx(-x * x, -2.0L * x * y)) * erfcx_continued_fraction(w);
  }
  if (flip) r = -r;
  return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

}  // namespace tdscat
