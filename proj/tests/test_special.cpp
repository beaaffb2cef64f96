#include <doctest.h>

#include <cmath>
#include <complex>

#include "mpfr_erf_oracle.hpp"
#include "tdscat/errors.hpp"
#include "tdscat/special.hpp"

using tdscat::complex_erf;
using tdscat::gauss_damped_erf;
using tdscat::testing::erf_oracle;
using cd = std::complex<double>;

namespace {

double rel_err(cd got, cd want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

}  // namespace

TEST_CASE("complex_erf on the real axis matches std::erf") {
  CHECK(complex_erf(0.0) == cd(0.0, 0.0));
  for (double x : {0.5, 1.0, 2.0, 3.7, 5.5}) {
    const cd v = complex_erf(cd(x, 0.0));
    CHECK(v.real() == doctest::Approx(std::erf(x)).epsilon(1e-14));
    CHECK(std::abs(v.imag()) < 1e-300);
  }
}

TEST_CASE("complex_erf symmetries") {
  for (cd z : {cd(0.3, 1.2), cd(4.5, -2.0), cd(-7.0, 12.0), cd(1.0, 25.0)}) {
    const cd v = complex_erf(z);
    CHECK(rel_err(complex_erf(-z), -v) < 1e-15);
    CHECK(rel_err(complex_erf(std::conj(z)), std::conj(v)) < 1e-15);
  }
}

TEST_CASE("complex_erf against the MPFR series") {
  for (cd z : {cd(0.5, 0.5), cd(1.0, 0.0), cd(2.0, 3.0), cd(3.9, -0.1), cd(4.1, 2.5), cd(6.0, -5.0),
               cd(-8.0, 20.0), cd(1.2, 26.0), cd(0.0, 15.0), cd(20.0, 29.0), cd(15.0, 2.0)}) {
    CHECK(rel_err(complex_erf(z), erf_oracle(z)) < 1e-13);
  }
}

TEST_CASE("complex_erf rejects arguments outside the envelope") {
  CHECK_THROWS_AS(complex_erf(cd(0.0, 30.5)), tdscat::PreconditionError);
  CHECK_THROWS_AS(complex_erf(cd(1.0, 27.0)), tdscat::PreconditionError);
  CHECK_THROWS_AS(complex_erf(cd(std::nan(""), 0.0)), tdscat::PreconditionError);
  CHECK_NOTHROW(complex_erf(cd(10.0, 28.0)));
}

TEST_CASE("gauss_damped_erf is erf scaled by exp(-Im z^2)") {
  for (cd z : {cd(0.5, 2.0), cd(-3.0, 5.0), cd(7.0, -20.0), cd(7.0, 25.0)}) {
    const cd want = std::exp(-z.imag() * z.imag()) * erf_oracle(z);
    CHECK(rel_err(gauss_damped_erf(z), want) < 1e-13);
  }
  // Far beyond where erf overflows, the damped value stays finite: e^{-y^2} erf(z) -> 1 - ...
  const cd far = gauss_damped_erf(cd(15.0, -60.0));
  CHECK(std::isfinite(far.real()));
  CHECK(std::abs(far) < 1.0);
}
