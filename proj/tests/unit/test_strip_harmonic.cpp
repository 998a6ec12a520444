#include "ehdwave/strip_harmonic.hpp"

#include "../oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ehdwave;

namespace {

TraceD sample(const GridD& g, double (*f)(double)) {
  TraceD t(g.size());
  for (Eigen::Index j = 0; j < g.size(); ++j) t[j] = f(g.x()[j]);
  return t;
}

double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

}  // namespace

TEST_CASE("ddx is exact on modes and kills constants") {
  const GridD g(7.0, 64);
  const double k = std::numbers::pi / 7.0;
  TraceD c(64), s(64);
  for (Eigen::Index j = 0; j < 64; ++j) {
    c[j] = std::cos(k * g.x()[j]);
    s[j] = -k * std::sin(k * g.x()[j]);
  }
  CHECK((ddx(c, g) - s).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(ddx(TraceD(TraceD::Constant(64, 3.0)), g).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS_AS(ddx(TraceD(TraceD::Zero(10)), g), ValidationError);
}

TEST_CASE("ddx agrees with sixth-order differences at O(h^6)") {
  double prev = 0;
  for (int n : {256, 512}) {
    const GridD g(20.0, n);
    const TraceD t = sample(g, sech2);
    const double err = (ddx(t, g) - oracle::fd6_derivative(t, g.spacing())).cwiseAbs().maxCoeff();
    if (prev > 0) {
      const double order = std::log2(prev / err);
      CHECK(order > 5.5);
    }
    prev = err;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("dtn on constants and on cos x") {
  const GridD g(std::numbers::pi, 32);
  CHECK((dtn(TraceD(TraceD::Ones(32)), g) - TraceD::Ones(32)).cwiseAbs().maxCoeff() < 1e-14);
  TraceD c(32);
  for (Eigen::Index j = 0; j < 32; ++j) c[j] = std::cos(g.x()[j]);
  const double coth1 = std::cosh(1.0) / std::sinh(1.0);
  CHECK(coth1 == doctest::Approx(1.3130352855).epsilon(1e-9));
  CHECK((dtn(c, g) - coth1 * c).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("dtn matches a finite-difference Laplace solve on the strip") {
  // L = 24 so the traces decay to round-off at the box edge; the oracle is
  // second order, Richardson on (32, 64) with N = 16 M removes the h^2 term.
  std::mt19937 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const double L = 24.0;
    std::vector<double> errs;
    TraceD coarse_fd, coarse_exact;
    TraceD fine_fd;
    for (int m : {16, 32, 64}) {
      const GridD g(L, 16 * m);
      std::mt19937 local = rng;
      const TraceD t = oracle::random_even_trace(g, local);
      const TraceD exact = dtn(t, g);
      const TraceD fd = oracle::laplace_fd_dtn(t, L, m);
      errs.push_back((fd - exact).cwiseAbs().maxCoeff() / exact.cwiseAbs().maxCoeff());
      if (m == 32) {
        coarse_fd = fd;
        coarse_exact = exact;
      }
      if (m == 64) fine_fd = fd;
    }
    rng.discard(10);
    for (std::size_t i = 1; i < errs.size(); ++i) {
      const double order = std::log2(errs[i - 1] / errs[i]);
      CHECK(order > 1.8);
      CHECK(order < 2.3);
    }
    TraceD extrap(coarse_fd.size());
    for (Eigen::Index j = 0; j < extrap.size(); ++j) extrap[j] = (4.0 * fine_fd[2 * j] - coarse_fd[j]) / 3.0;
    const double rel = (extrap - coarse_exact).cwiseAbs().maxCoeff() / coarse_exact.cwiseAbs().maxCoeff();
    CHECK(rel < 1e-6);
  }
}

TEST_CASE("dtn is symmetric and bounded below") {
  const GridD g(12.0, 128);
  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    TraceD a(128), b(128);
    for (Eigen::Index j = 0; j < 128; ++j) {
      a[j] = nd(rng);
      b[j] = nd(rng);
    }
    CHECK(std::abs(dtn(a, g).dot(b) - a.dot(dtn(b, g))) < 1e-12 * a.norm() * b.norm() * 64);
    CHECK(dtn(a, g).dot(a) >= a.dot(a) * (1.0 - 1e-12));
  }
  const auto& k = g.wavenumbers();
  for (Eigen::Index n = 1; n < k.size(); ++n) CHECK(dtn_symbol(k[n]) > dtn_symbol(k[n - 1]));
  CHECK(dtn_symbol(0.0) == 1.0);
}

TEST_CASE("hyperbolic symbols stay finite at large k") {
  for (double k : {1e-8, 1.0, 20.0, 400.0, 1e4}) {
    CHECK(std::isfinite(dtn_symbol(k)));
    CHECK(std::isfinite(extension_symbol(k, 0.5)));
    CHECK(std::isfinite(extension_dy_symbol(k, 0.5)));
    CHECK(extension_dy_symbol(k, 1.0) == doctest::Approx(dtn_symbol(k)).epsilon(1e-14));
  }
  CHECK(dtn_symbol(1e4) == doctest::Approx(1e4).epsilon(1e-14));
  CHECK(dtn_symbol(1e-8) == doctest::Approx(1.0).epsilon(1e-14));
  // moderate k against the textbook form
  CHECK(extension_symbol(3.0, 0.3) == doctest::Approx(std::sinh(0.9) / std::sinh(3.0)).epsilon(1e-14));
}

TEST_CASE("interior evaluation") {
  const GridD g(10.0, 128);
  std::mt19937 rng(11);
  const TraceD t = oracle::random_even_trace(g, rng);
  CHECK((eval_interior(t, g, 1.0) - t).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(eval_interior(t, g, 0.0).cwiseAbs().maxCoeff() < 1e-16);
  CHECK((eval_interior(TraceD(TraceD::Ones(128)), g, 0.5) - TraceD(TraceD::Constant(128, 0.5))).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((eval_interior_dy(t, g, 1.0) - dtn(t, g)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((eval_interior_dy(TraceD(TraceD::Constant(128, 2.0)), g, 0.3) - TraceD(TraceD::Constant(128, 2.0))).cwiseAbs().maxCoeff() < 1e-14);
  // centered difference in y
  double prev = 0;
  for (double dy : {1e-2, 5e-3}) {
    const TraceD fd = (eval_interior(t, g, 0.6 + dy) - eval_interior(t, g, 0.6 - dy)) / (2 * dy);
    const double err = (fd - eval_interior_dy(t, g, 0.6)).cwiseAbs().maxCoeff();
    if (prev > 0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.05));
    prev = err;
  }
  CHECK_THROWS_AS(eval_interior(t, g, 1.5), ValidationError);
  CHECK_THROWS_AS(eval_interior_dy(t, g, -0.1), ValidationError);
}

TEST_CASE("conjugate primitive inverts ddx") {
  const GridD g(5.0, 64);
  const double k = 2 * std::numbers::pi / 5.0;
  TraceD t(64), c(64);
  for (Eigen::Index j = 0; j < 64; ++j) {
    t[j] = -k * std::sin(k * g.x()[j]);
    c[j] = std::cos(k * g.x()[j]);
  }
  const ConjugatePrimitive<double> p = conjugate_primitive(t, g);
  CHECK((p.values - c).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(conjugate_primitive(TraceD(TraceD::Zero(64)), g).values.cwiseAbs().maxCoeff() == 0.0);
  const GridD h(20.0, 256);
  const TraceD s = sample(h, sech2);
  const TraceD zm = (s.array() - s.mean()).matrix();
  const ConjugatePrimitive<double> q = conjugate_primitive(zm, h);
  CHECK(std::abs(q.dropped_mean) < 1e-14);
  CHECK((ddx(q.values, h) - zm).cwiseAbs().maxCoeff() < 1e-12);
  // even input gives an odd primitive
  for (Eigen::Index j = 1; j < 256; ++j) CHECK(std::abs(q.values[j] + q.values[h.mirror(j)]) < 1e-13);
}

TEST_CASE("interpolate reproduces grid values and band-limited functions") {
  const GridD g(4.0, 32);
  const double k = 3 * std::numbers::pi / 4.0;
  TraceD t(32);
  for (Eigen::Index j = 0; j < 32; ++j) t[j] = std::cos(k * g.x()[j]) + 0.5;
  CHECK(interpolate(t, g, g.x()[5]) == doctest::Approx(t[5]).epsilon(1e-13));
  CHECK(interpolate(t, g, 0.123) == doctest::Approx(std::cos(k * 0.123) + 0.5).epsilon(1e-13));
}
