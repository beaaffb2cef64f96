#include "mpfr_erf_oracle.hpp"

#include <mpfr.h>

#include <cmath>

namespace tdscat::testing {
namespace {

struct Mp {
  mpfr_t v;
  explicit Mp(mpfr_prec_t prec) { mpfr_init2(v, prec); mpfr_set_zero(v, 1); }
  ~Mp() { mpfr_clear(v); }
  Mp(const Mp&) = delete;
  Mp& operator=(const Mp&) = delete;
};

}  // namespace

std::complex<double> erf_oracle(std::complex<double> z) {
  const double mag2 = std::norm(z);
  const auto prec = static_cast<mpfr_prec_t>(160 + std::ceil(mag2 * 1.4426950408889634));
  constexpr mpfr_rnd_t rnd = MPFR_RNDN;

  Mp zr(prec), zi(prec), w_r(prec), w_i(prec), tr(prec), ti(prec);
  Mp sr(prec), si(prec), ar(prec), ai(prec), tmp(prec), tmp2(prec), absT(prec), absS(prec);
  mpfr_set_d(zr.v, z.real(), rnd);
  mpfr_set_d(zi.v, z.imag(), rnd);
  // w = -z^2 = -(x^2 - y^2) - 2ixy
  mpfr_sqr(tmp.v, zr.v, rnd);
  mpfr_sqr(tmp2.v, zi.v, rnd);
  mpfr_sub(w_r.v, tmp2.v, tmp.v, rnd);
  mpfr_mul(w_i.v, zr.v, zi.v, rnd);
  mpfr_mul_si(w_i.v, w_i.v, -2, rnd);

  mpfr_set(tr.v, zr.v, rnd);
  mpfr_set(ti.v, zi.v, rnd);
  mpfr_set(sr.v, zr.v, rnd);
  mpfr_set(si.v, zi.v, rnd);

  for (long n = 1;; ++n) {
    // t *= w / n
    mpfr_mul(tmp.v, tr.v, w_r.v, rnd);
    mpfr_mul(tmp2.v, ti.v, w_i.v, rnd);
    mpfr_sub(ar.v, tmp.v, tmp2.v, rnd);
    mpfr_mul(tmp.v, tr.v, w_i.v, rnd);
    mpfr_mul(tmp2.v, ti.v, w_r.v, rnd);
    mpfr_add(ai.v, tmp.v, tmp2.v, rnd);
    mpfr_div_si(tr.v, ar.v, n, rnd);
    mpfr_div_si(ti.v, ai.v, n, rnd);
    // s += t / (2n + 1)
    mpfr_div_si(tmp.v, tr.v, 2 * n + 1, rnd);
    mpfr_add(sr.v, sr.v, tmp.v, rnd);
    mpfr_div_si(tmp.v, ti.v, 2 * n + 1, rnd);
    mpfr_add(si.v, si.v, tmp.v, rnd);
    if (static_cast<double>(n) > mag2 + 10.0) {
      mpfr_hypot(absT.v, tr.v, ti.v, rnd);
      mpfr_hypot(absS.v, sr.v, si.v, rnd);
      mpfr_mul_d(absS.v, absS.v, 1e-40, rnd);
      if (mpfr_cmp(absT.v, absS.v) < 0) break;
    }
  }
  Mp two_over_sqrt_pi(prec);
  mpfr_const_pi(tmp.v, rnd);
  mpfr_sqrt(tmp.v, tmp.v, rnd);
  mpfr_ui_div(two_over_sqrt_pi.v, 2, tmp.v, rnd);
  mpfr_mul(sr.v, sr.v, two_over_sqrt_pi.v, rnd);
  mpfr_mul(si.v, si.v, two_over_sqrt_pi.v, rnd);
  return {mpfr_get_d(sr.v, rnd), mpfr_get_d(si.v, rnd)};
}

}  // namespace tdscat::testing
