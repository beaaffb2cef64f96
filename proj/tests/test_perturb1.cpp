#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "tdscat/coeffdyn.hpp"
#include "tdscat/errors.hpp"
#include "tdscat/perturb1.hpp"

using namespace tdscat;

namespace {

const double kOmega = 7.0 * 2.0 * kPi / 0.3;

FirstOrderParams fig4(double alpha = 0.1) {
  FirstOrderParams fp;
  fp.barrier = {BarrierKind::Delta, 3.0, 0.0, alpha, kOmega};
  fp.pp = PhysParams{0.2};
  fp.packet = {-3.0, 0.2, 50.0};
  return fp;
}

// (e^{i theta t} - 1) / theta evaluated with 50 digits.
cplx bracket_oracle(double theta, double t) {
  using big = boost::multiprecision::cpp_bin_float_50;
  const big th(theta), u = big(theta) * big(t);
  return {static_cast<double>((cos(u) - 1) / th), static_cast<double>(sin(u) / th)};
}

double weighted_gap(const KGrid& g, const std::vector<cplx>& a, const Eigen::VectorXcd& b, std::size_t offset) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    num += g.w[j] * std::norm(a[j] - b[offset + j]);
    den += g.w[j] * std::norm(b[offset + j]);
  }
  return std::sqrt(num / den);
}

struct OdeRoutes {
  CoefficientSystem sys;
  CoefficientField b0;
  CoefficientField full;
  CoefficientField born;
};

OdeRoutes ode_routes(const FirstOrderParams& fp, const KGrid& g, double t) {
  CoefficientSystem sys(fp.barrier, fp.pp, g);
  const CoefficientField b0 = sys.packet_field(fp.packet);
  const Rhs rhs = [&sys](double s, const Eigen::VectorXcd& b) { return rhs_delta(sys, s, b); };
  const double times[] = {t};
  const double dt = 0.1 / sys.max_phase_rate();
  CoefficientField full = integrate(rhs, b0, times, dt, sys.max_phase_rate()).back();
  CoefficientField born = integrate(first_order(rhs, b0), b0, times, dt, sys.max_phase_rate()).back();
  return {sys, b0, full, born};
}

}  // namespace

TEST_CASE("time_bracket against a 50-digit oracle") {
  CHECK(time_bracket(0.0, 0.3) == cplx(0.0, 0.3));
  CHECK(std::abs(time_bracket(2.0 * kPi / 0.3, 0.3)) < 1e-15);
  for (double theta : {1e-9, -3e-6, 1e-3, 0.7, -12.0, 146.6, 2500.0}) {
    for (double t : {1e-4, 0.1, 0.3}) {
      const cplx ref = bracket_oracle(theta, t);
      CHECK(std::abs(time_bracket(theta, t) - ref) <= 1e-15 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("first-order coefficients vanish without modulation and at t = 0") {
  const KGrid g = KGrid::for_packet(fig4().packet);
  for (const cplx v : first_order_coeffs(fig4(0.0), g, g, 0.2).c1) CHECK(v == cplx{});
  for (const cplx v : first_order_coeffs(fig4(), g, g, 0.0).c1) CHECK(v == cplx{});
}

TEST_CASE("first-order coefficients are linear in alpha") {
  const KGrid g = KGrid::for_packet(fig4().packet);
  const auto a = first_order_coeffs(fig4(0.1), g, g, 0.2).c1;
  const auto b = first_order_coeffs(fig4(0.3), g, g, 0.2).c1;
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(3.0 * a[i] - b[i]) <= 1e-13 * std::abs(b[i]) + 1e-300);
}

TEST_CASE("closed-form coefficients against the ODE route") {
  const FirstOrderParams fp = fig4();
  const double t = 0.1;
  const KGrid g = first_order_grid(fp, t);
  const OdeRoutes r = ode_routes(fp, g, t);
  const auto c1 = first_order_coeffs(fp, g, g, t).c1;
  const Eigen::VectorXcd born = r.born.b - r.b0.b;
  const Eigen::VectorXcd full = r.full.b - r.b0.b;

  // Born dynamics is exactly first order: only quadrature error remains.
  CHECK(weighted_gap(g, c1, born, 0) < 1e-8);
  CHECK(weighted_gap(g, c1, born, g.size()) < 1e-8);
  // Full dynamics differs at second order in alpha.
  CHECK(weighted_gap(g, c1, full, 0) < 0.03);
  CHECK(weighted_gap(g, c1, full, g.size()) < 0.03);

  FirstOrderParams quad = fp;
  quad.weight = MomentumWeight::Quadratic;
  CHECK(weighted_gap(g, first_order_coeffs(quad, g, g, t).c1, full, 0) > 0.5);

  CHECK(std::abs(c1_coeff(g.k[100], t, fp) - c1[100]) <= 1e-12 * std::abs(c1[100]));
}

TEST_CASE("reconstruct_psi1 is linear and zero for zero coefficients") {
  const FirstOrderParams fp = fig4();
  const SpatialGrid grid = SpatialGrid::symmetric(4.0, 0.01);
  const KGrid g = KGrid::for_packet(fp.packet);
  FirstOrderCoeffs c{g, 0.2, std::vector<cplx>(g.size())};
  for (const cplx v : reconstruct_psi1(grid, c, fp)) CHECK(v == cplx{});

  c = first_order_coeffs(fp, g, g, 0.2);
  const auto one = reconstruct_psi1(grid, c, fp);
  for (auto& v : c.c1) v *= 2.0;
  const auto two = reconstruct_psi1(grid, c, fp);
  for (std::size_t j = 0; j < grid.n; ++j) CHECK(std::abs(two[j] - 2.0 * one[j]) <= 1e-13 * std::abs(two[j]) + 1e-300);
  // Even in x.
  const std::size_t z = grid.zero_index();
  for (std::size_t d = 1; d <= z; d += 37) CHECK(std::abs(one[z + d] - one[z - d]) <= 1e-12 * std::abs(one[z + d]) + 1e-300);
}

TEST_CASE("fit and gap helpers") {
  const std::vector<cplx> a{{1.0, 0.0}, {0.0, 2.0}, {-1.0, 1.0}};
  std::vector<cplx> b(a);
  for (auto& v : b) v *= cplx(0.5, -2.0);
  CHECK(std::abs(fit_global_constant(a, b) - cplx(0.5, -2.0)) < 1e-15);
  CHECK(relative_l2_gap(b, b) == 0.0);
  CHECK(relative_l2_gap(std::vector<cplx>(3), b) == doctest::Approx(1.0));
  CHECK_THROWS_AS(relative_l2_gap(a, std::vector<cplx>(2)), PreconditionError);
  CHECK_THROWS_AS(fit_global_constant(std::vector<cplx>(3), b), PreconditionError);
}

TEST_CASE("square barriers and negative times are rejected") {
  FirstOrderParams fp = fig4();
  fp.barrier = {BarrierKind::Square, 580.0, 0.2, 0.1, kOmega};
  CHECK_THROWS_AS(fp.validate(), PreconditionError);
  const KGrid g = KGrid::for_packet(fig4().packet);
  CHECK_THROWS_AS(first_order_coeffs(fig4(), g, g, -0.1), PreconditionError);
}

TEST_CASE("psi1 against two direct runs") {
  const FirstOrderParams fp = fig4();
  ComparisonOptions opt;
  opt.run.dx_max = 1e-3;
  opt.run.dt = 5e-5;
  const FirstOrderComparison c = compare_with_tdse(fp, 0.3, opt);
  CHECK(c.gap < 0.10);
  CHECK(std::abs(c.fitted_constant - 1.0) < 0.05);

  const auto plus = reconstruct_psi1(c.grid, first_order_coeffs(fp, 0.3), fp, StandingWaveSign::Plus);
  CHECK(relative_l2_gap(plus, c.numeric) > 0.5);

  std::ostringstream out;
  write_comparison_csv(out, c);
  const std::string s = out.str();
  CHECK(s.rfind("x,re_analytic,im_analytic,re_numeric,im_numeric,abs_diff\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(c.grid.n) + 1);
}
