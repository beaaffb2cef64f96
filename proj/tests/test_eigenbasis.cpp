#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "tdscat/eigenbasis.hpp"
#include "tdscat/errors.hpp"

using namespace tdscat;

namespace {

const PhysParams kPP{0.2};

// Transmission amplitude of a square barrier on [-a, a] from the textbook
// closed form, with p = sqrt(k^2 - V0/eta) and E = e^{2ipa}:
//   D e^{2ika} = 4 k p E / ((k + p)^2 - (k - p)^2 E^2).
cplx square_D_closed_form(double k, double V0, double a, double eta) {
  const cplx p = std::sqrt(cplx(k * k - V0 / eta, 0.0));
  const cplx E = std::exp(2.0 * kI * p * a);
  const cplx t = 4.0 * k * p * E / ((k + p) * (k + p) - (k - p) * (k - p) * E * E);
  return t * std::polar(1.0, -2.0 * k * a);
}

// <Psi|psi0> by adaptive Gauss-Kronrod on each side of the barrier.
cplx numeric_overlap(const GaussianPacket& p, const ScatteringState& s) {
  using boost::math::quadrature::gauss_kronrod;
  const double lo = p.x0 - 14.0 * p.sigma0;
  const double hi = p.x0 + 14.0 * p.sigma0;
  auto piece = [&](double a, double b) {
    if (b <= a) return cplx{};
    auto re = [&](double x) { return (std::conj(eval_eigenstate(s, x)) * p(x)).real(); };
    auto im = [&](double x) { return (std::conj(eval_eigenstate(s, x)) * p(x)).imag(); };
    return cplx(gauss_kronrod<double, 61>::integrate(re, a, b, 10, 1e-13),
                gauss_kronrod<double, 61>::integrate(im, a, b, 10, 1e-13));
  };
  return piece(lo, std::min(hi, -s.a)) + piece(std::max(lo, s.a), hi);
}

}  // namespace

TEST_CASE("delta amplitudes") {
  auto free = delta_amplitudes(3.0, 0.0);
  CHECK(std::abs(free.A) == 0.0);
  CHECK(std::abs(free.D - 1.0) == 0.0);

  auto half = delta_amplitudes(15.0, 15.0);
  CHECK(std::norm(half.A) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::norm(half.D) == doctest::Approx(0.5).epsilon(1e-14));

  auto fast = delta_amplitudes(1e8, 15.0);
  CHECK(std::abs(fast.A) < 1e-6);
  CHECK(std::abs(fast.D - 1.0) < 1e-6);
}

TEST_CASE("transmission of the delta barrier") {
  CHECK(transmission(50.0, 15.0) == doctest::Approx(2500.0 / 2725.0).epsilon(1e-15));
  CHECK(transmission(50.0, 15.0) == doctest::Approx(0.917431).epsilon(1e-6));
  CHECK(transmission(7.0, 0.0) == 1.0);
  CHECK(transmission(1e-9, 15.0) < 1e-18);
  for (double k : {0.5, 10.0, 50.0, 300.0}) {
    CHECK(transmission(k, 15.0) == doctest::Approx(std::norm(delta_amplitudes(k, 15.0).D)).epsilon(1e-14));
  }
}

TEST_CASE("flux conservation and sigma degeneracy on the k-grid") {
  const KGrid g = KGrid::panels(1e-3, 120.0, 5.0);
  const BarrierSpec delta{BarrierKind::Delta, 6.0, 0.0, 0.0, 0.0};
  const BarrierSpec square{BarrierKind::Square, 580.0, 0.1, 0.0, 0.0};
  for (double k : g.k) {
    for (const auto& b : {delta, square}) {
      const ScatteringState sp = make_state(b, kPP, k, Sigma::Plus);
      const ScatteringState sm = make_state(b, kPP, k, Sigma::Minus);
      CHECK(std::abs(std::norm(sp.A) + std::norm(sp.D) - 1.0) < 1e-12);
      CHECK(std::abs(sp.A - sm.A) < 1e-12);
      CHECK(std::abs(sp.D - sm.D) < 1e-12);
    }
  }
}

TEST_CASE("delta eigenstate continuity and derivative jump") {
  const double beta = 15.0;
  const BarrierSpec b{BarrierKind::Delta, 6.0, 0.0, 0.0, 0.0};
  for (double k : {1.0, 15.0, 50.0, 97.3}) {
    for (Sigma s : {Sigma::Plus, Sigma::Minus}) {
      const ScatteringState st = make_state(b, kPP, k, s);
      const cplx left = eval_eigenstate(st, 0.0, Side::Left);
      const cplx right = eval_eigenstate(st, 0.0, Side::Right);
      CHECK(std::abs(left - right) < 1e-14);
      CHECK(std::abs(1.0 + st.A - st.D) < 1e-14);
      const cplx jump =
          eval_eigenstate_derivative(st, 0.0, Side::Right) - eval_eigenstate_derivative(st, 0.0, Side::Left);
      CHECK(std::abs(jump / right - 2.0 * beta) < 1e-10 * 2.0 * beta);
    }
    const ScatteringState st = make_state(b, kPP, k, Sigma::Plus);
    const double x = -0.37;
    CHECK(std::abs(eval_eigenstate(st, x) - (std::polar(1.0, k * x) + st.A * std::polar(1.0, -k * x))) < 1e-14);
  }
}

TEST_CASE("square matching agrees with the closed form and is continuous") {
  for (double V0 : {0.0, 100.0, 580.0, 2000.0}) {
    for (double k : {5.0, 47.7, 50.0, 80.0}) {
      const double a = 0.12;
      if (V0 > 0.0 && std::abs(k * k - V0 / 0.2) < 1.0) continue;
      for (Sigma s : {Sigma::Plus, Sigma::Minus}) {
        const ScatteringState st = square_amplitudes(k, V0, a, 0.2, s);
        CHECK(std::abs(st.D - square_D_closed_form(k, V0, a, 0.2)) < 1e-12);
        CHECK(std::abs(std::norm(st.A) + std::norm(st.D) - 1.0) < 1e-12);
        for (double edge : {-a, a}) {
          CHECK(std::abs(eval_eigenstate(st, edge, Side::Left) - eval_eigenstate(st, edge, Side::Right)) < 1e-12);
          CHECK(std::abs(eval_eigenstate_derivative(st, edge, Side::Left) -
                         eval_eigenstate_derivative(st, edge, Side::Right)) < 1e-10 * k);
        }
      }
    }
  }
  const ScatteringState free = square_amplitudes(30.0, 0.0, 0.2, 0.2);
  CHECK(std::abs(free.A) < 1e-14);
  CHECK(std::abs(free.D - 1.0) < 1e-14);
}

TEST_CASE("square interior decays at the evanescent rate") {
  const double V0 = 580.0, eta = 0.2, k = 40.0, a = 0.25;
  const double gamma = decay_rate(k, V0, eta);
  CHECK(gamma == doctest::Approx(std::sqrt(2900.0 - 1600.0)));
  const ScatteringState st = square_amplitudes(k, V0, a, eta);
  // Least-squares slope of log|psi| over the left half of the barrier.
  std::vector<double> xs, ys;
  for (int i = 0; i <= 100; ++i) {
    const double x = -a + 0.5 * a * i / 100.0;
    xs.push_back(x);
    ys.push_back(std::log(std::abs(eval_eigenstate(st, x))));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= xs.size(), my /= ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
  CHECK(-sxy / sxx == doctest::Approx(gamma).epsilon(0.01));
  CHECK_THROWS_AS(decay_rate(60.0, V0, eta), PreconditionError);
}

TEST_CASE("thin square barrier converges to the delta barrier") {
  const double lambda = 6.0, eta = 0.2, k = 50.0;
  const auto ref = delta_amplitudes(k, lambda / (2.0 * eta));
  double prev = 1.0;
  for (double a : {1e-2, 1e-3, 1e-4}) {
    const ScatteringState st = square_amplitudes(k, lambda / (2.0 * a), a, eta);
    const double err = std::abs(st.D - ref.D) + std::abs(st.A - ref.A);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("deep square barrier transmission falls as exp(-2 gamma a)") {
  const double V0 = 580.0, eta = 0.2, k = 40.0;
  const double gamma = decay_rate(k, V0, eta);
  const double a1 = 0.15, a2 = 0.25;
  const double slope = (std::log(std::abs(square_amplitudes(k, V0, a2, eta).D)) -
                        std::log(std::abs(square_amplitudes(k, V0, a1, eta).D))) / (a2 - a1);
  CHECK(slope == doctest::Approx(-2.0 * gamma).epsilon(0.02));
}

TEST_CASE("matching at the barrier top is rejected") {
  const double V0 = 500.0, eta = 0.2;
  CHECK_THROWS_AS(square_amplitudes(50.0, V0, 0.2, eta), PreconditionError);
}

TEST_CASE("packet projection: free limit is the Fourier amplitude") {
  const GaussianPacket p{-3.0, 0.2, 50.0};
  const BarrierSpec none{BarrierKind::Delta, 0.0, 0.0, 0.0, 0.0};
  double best_k = 0.0, best = 0.0;
  for (double k = 40.0; k <= 60.0; k += 0.25) {
    const cplx c = project_packet(p, make_state(none, kPP, k, Sigma::Plus));
    // psi_hat(k) / (2 pi) with psi_hat(k) = int e^{-ikx} psi0
    const cplx ft = p.amplitude() * 2.0 * p.sigma0 * std::sqrt(kPi) *
                    std::exp(-p.sigma0 * p.sigma0 * (p.k0 - k) * (p.k0 - k)) * std::polar(1.0, (p.k0 - k) * p.x0);
    CHECK(std::abs(c - ft / (2.0 * kPi)) < 1e-14);
    if (std::abs(c) > best) best = std::abs(c), best_k = k;
  }
  CHECK(best_k == 50.0);
}

TEST_CASE("packet projection closed form matches adaptive quadrature") {
  const GaussianPacket p{-3.0, 0.2, 50.0};
  const BarrierSpec b{BarrierKind::Delta, 6.0, 0.0, 0.0, 0.0};
  for (double k : {45.0, 50.0, 55.0}) {
    for (Sigma s : {Sigma::Plus, Sigma::Minus}) {
      const ScatteringState st = make_state(b, kPP, k, s);
      const cplx closed = project_packet(p, st);
      const cplx numeric = numeric_overlap(p, st) / (2.0 * kPi);
      if (s == Sigma::Plus) {
        CHECK(std::abs(closed - numeric) < 1e-8 * std::abs(numeric));
      } else {
        // Negligible overlap: only an absolute statement is meaningful.
        CHECK(std::abs(closed - numeric) < 1e-14);
      }
    }
  }
  // A packet sitting on the delta is still handled exactly.
  const GaussianPacket centred{0.05, 0.2, 20.0};
  const ScatteringState st = make_state(b, kPP, 22.0, Sigma::Plus);
  const cplx numeric = numeric_overlap(GaussianPacket{centred}, st);
  CHECK(std::abs(project_packet(centred, st) - numeric / (2.0 * kPi)) < 1e-8 * std::abs(numeric));

  const BarrierSpec sq{BarrierKind::Square, 580.0, 0.2, 0.0, 0.0};
  for (Sigma s : {Sigma::Plus, Sigma::Minus}) {
    const ScatteringState sst = make_state(sq, kPP, 49.0, s);
    const cplx num = numeric_overlap(p, sst) / (2.0 * kPi);
    CHECK(std::abs(project_packet(p, sst) - num) < 1e-8 * std::max(std::abs(num), 1e-6));
  }
  CHECK_THROWS_AS(project_packet(GaussianPacket{-0.3, 0.2, 50.0}, make_state(sq, kPP, 49.0, Sigma::Plus)),
                  PreconditionError);
}

TEST_CASE("eigenbasis expansion reconstructs the packet") {
  const GaussianPacket p{-3.0, 0.2, 50.0};
  const BarrierSpec b{BarrierKind::Delta, 6.0, 0.0, 0.0, 0.0};
  const KGrid g = KGrid::for_packet(p);
  std::vector<ScatteringState> plus, minus;
  std::vector<cplx> cp, cm;
  for (double k : g.k) {
    plus.push_back(make_state(b, kPP, k, Sigma::Plus));
    minus.push_back(make_state(b, kPP, k, Sigma::Minus));
    cp.push_back(project_packet(p, plus.back()));
    cm.push_back(project_packet(p, minus.back()));
  }
  const SpatialGrid xg = SpatialGrid::symmetric(6.0, 4e-3);
  double err2 = 0.0;
  for (std::size_t i = 0; i < xg.n; ++i) {
    const double x = xg.x(i);
    cplx rec{};
    for (std::size_t j = 0; j < g.size(); ++j)
      rec += g.w[j] * (cp[j] * eval_eigenstate(plus[j], x) + cm[j] * eval_eigenstate(minus[j], x));
    err2 += std::norm(rec - p(x)) * xg.dx();
  }
  CHECK(std::sqrt(err2) < 1e-6);
}

TEST_CASE("windowed eigenstates are orthogonal in the narrow-window limit") {
  // phi_{k,s}(x) = int dk' g_eps(k' - k) Psi_{k'}^s(x) with a Gaussian window;
  // the normalized overlap must vanish as eps -> 0 for k != l, and for
  // k = l with opposite sigma.
  const BarrierSpec b{BarrierKind::Delta, 6.0, 0.0, 0.0, 0.0};
  auto windowed = [&](double k, Sigma s, double eps, const SpatialGrid& xg) {
    const KGrid kg = KGrid::panels(k - 8.0 * eps, k + 8.0 * eps, eps / 2.0);
    std::vector<cplx> phi(xg.n);
    for (std::size_t j = 0; j < kg.size(); ++j) {
      const double wgt = kg.w[j] * std::exp(-0.5 * std::pow((kg.k[j] - k) / eps, 2));
      const ScatteringState st = make_state(b, kPP, kg.k[j], s);
      for (std::size_t i = 0; i < xg.n; ++i) phi[i] += wgt * eval_eigenstate(st, xg.x(i));
    }
    return phi;
  };
  auto cosine = [](const std::vector<cplx>& u, const std::vector<cplx>& v) {
    cplx uv{};
    double uu = 0, vv = 0;
    for (std::size_t i = 0; i < u.size(); ++i) uv += std::conj(u[i]) * v[i], uu += std::norm(u[i]), vv += std::norm(v[i]);
    return std::abs(uv) / std::sqrt(uu * vv);
  };
  double prev_kl = 1.0;
  for (double eps : {2.0, 1.0, 0.5}) {
    const SpatialGrid xg = SpatialGrid::symmetric(14.0 / eps, 0.01);
    const auto a = windowed(50.0, Sigma::Plus, eps, xg);
    const auto c = windowed(53.0, Sigma::Plus, eps, xg);
    const auto m = windowed(50.0, Sigma::Minus, eps, xg);
    const double kl = cosine(a, c);
    CHECK(kl < prev_kl);
    prev_kl = kl;
    CHECK(cosine(a, m) < 1e-3);
  }
  CHECK(prev_kl < std::exp(-9.0));  // Gaussian-window overlap bound e^{-(k-l)^2/(4 eps^2)}
}

TEST_CASE("amplitude CSV export") {
  std::ostringstream out;
  const double ks[] = {50.0};
  write_amplitudes_csv(out, ks, BarrierSpec{BarrierKind::Delta, 6.0, 0.0, 0.0, 0.0}, kPP);
  const std::string s = out.str();
  CHECK(s.rfind("k,reA,imA,reD,imD,T\n", 0) == 0);
  CHECK(s.find("0.91743119266055") != std::string::npos);
}
