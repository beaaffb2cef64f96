#pragma once

#include <complex>

namespace tdscat {

/// Error function of a complex argument.
///
/// Accuracy envelope: |Im z| <= 30 and Im(z)^2 - Re(z)^2 <= 700 (outside the
/// second bound erf overflows a double). Throws PreconditionError outside it.
/// Relative accuracy is ~1e-13 except within ~1e-3 of the complex zeros of erf.
std::complex<double> complex_erf(std::complex<double> z);

/// e^{-Im(z)^2} erf(z). Bounded for Re z away from 0, so it stays finite where
/// erf itself overflows; this is the combination that appears in Gaussian
/// half-line Fourier integrals.
std::complex<double> gauss_damped_erf(std::complex<double> z);

}  // namespace tdscat
