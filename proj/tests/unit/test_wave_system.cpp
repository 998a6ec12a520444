#include "ehdwave/wave_system.hpp"

#include "../oracles.hpp"
#include "ehdwave/newton.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ehdwave;

namespace {

TraceD mode(const GridD& g, int n) {
  TraceD t(g.size());
  const double k = g.wavenumbers()[n];
  for (Eigen::Index j = 0; j < g.size(); ++j) t[j] = std::cos(k * g.x()[j]);
  return t;
}

}  // namespace

TEST_CASE("assembled traces") {
  const GridD g(10.0, 64);
  const auto b0 = assemble_traces(TraceD(TraceD::Zero(64)), make_params(0.3, 0.5, 1.0), g);
  CHECK(b0.t2.cwiseAbs().maxCoeff() == 0.0);
  CHECK(b0.w1y.cwiseAbs().maxCoeff() == 0.0);
  CHECK(b0.w2y.cwiseAbs().maxCoeff() == 0.0);
  const auto b1 = assemble_traces(TraceD(TraceD::Constant(64, 0.1)), make_params(0.4, 0.5, 1.0), g);
  CHECK((b1.t2.array() + 0.042).abs().maxCoeff() < 1e-16);
  CHECK(b1.w3.cwiseAbs().maxCoeff() == 0.0);
  CHECK(b1.w3y.cwiseAbs().maxCoeff() == 0.0);
  std::mt19937 rng(1);
  const auto b2 = assemble_traces(oracle::random_even_trace(g, rng), make_params(0.0, 0.5, 1.0), g);
  CHECK(b2.t2.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("the trivial state solves the equation for every parameter triple") {
  const GridD g(8.0, 32);
  for (double gamma : {-1.0, -0.3, 0.0, 0.4, 1.2})
    for (double eps1 : {0.0, 0.25, 0.5, 1.0, 3.0})
      for (double alpha : {0.2, 0.7, 1.0, 1.5, 4.0})
        CHECK(residual(TraceD(TraceD::Zero(32)), make_params(gamma, eps1, alpha), g).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear symbol values") {
  CHECK(linear_multiplier(0.0, make_params(0.0, 0.5, 1.0)) == doctest::Approx(-1.0).epsilon(1e-15));
  const ParamsD cr = make_params(0.2, 0.3, 1.1);
  CHECK(std::abs(linear_multiplier(0.0, cr)) < 1e-15);
}

TEST_CASE("dispersion root against a fixed-point oracle") {
  const ParamsD p = make_params(0.2, 0.3, 1.3);
  const double k = dispersion_root(p);
  CHECK(k == doctest::Approx(oracle::dispersion_root_fixed_point(1.5 / 1.3)).epsilon(1e-12));
  CHECK(k == doctest::Approx(0.69).epsilon(0.01));
  CHECK(std::abs(linear_multiplier(k, p)) < 1e-13);
  CHECK(dispersion_root(make_params(0.0, 0.5, 1.0)) < 0);
  CHECK(dispersion_root(make_params(0.0, 0.0, 1.0)) < 0);
}

TEST_CASE("no real root below alpha_cr, one above") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ug(-1, 1), ue(0, 2), ua(-0.9, 0.9);
  for (int i = 0; i < 200; ++i) {
    const double gamma = ug(rng), eps1 = ue(rng);
    const double acr = 1 - gamma + eps1;
    const double alpha = std::max(0.01, acr + ua(rng));
    const ParamsD p = make_params(gamma, eps1, alpha);
    int sign_changes = 0;
    double prev = linear_multiplier(0.0, p);
    for (int s = 1; s <= 4000; ++s) {
      const double m = linear_multiplier(0.005 * s, p);
      if ((m < 0) != (prev < 0)) ++sign_changes;
      prev = m;
    }
    if (alpha < acr) {
      CHECK(sign_changes == 0);
      CHECK(prev < 0);
    } else if (alpha > acr && (gamma + alpha) / (1 + eps1) * 1.0 < 20.0) {
      CHECK(sign_changes == 1);
    }
  }
}

TEST_CASE("residual of a tiny mode is the linear symbol") {
  const GridD g(std::numbers::pi * 4, 64);
  const ParamsD p = make_params(0.2, 0.3, 0.9);
  for (int n : {1, 3, 7}) {
    const TraceD c = mode(g, n);
    const double m = linear_multiplier(g.wavenumbers()[n], p);
    const TraceD r = residual(TraceD(1e-6 * c), p, g);
    CHECK((r - 1e-6 * m * c).cwiseAbs().maxCoeff() <= 1e-4 * 1e-6 * std::abs(m));
  }
}

TEST_CASE("jacobian at zero on pure modes is exact") {
  const GridD g(std::numbers::pi * 4, 64);
  const ParamsD p = make_params(-0.3, 0.5, 1.1);
  for (int n = 0; n < 32; ++n) {
    const TraceD c = mode(g, n);
    const double m = linear_multiplier(g.wavenumbers()[n], p);
    CHECK((jacobian_apply(TraceD(TraceD::Zero(64)), c, p, g) - m * c).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, std::abs(m)));
  }
}

TEST_CASE("jacobian agrees with centered differences and is linear") {
  const GridD g(12.0, 128);
  std::mt19937 rng(2);
  const ParamsD p = make_params(0.4, 0.5, 1.2);
  const TraceD t = oracle::random_even_trace(g, rng, 0.2);
  const TraceD u = oracle::random_even_trace(g, rng, 1.0);
  const TraceD v = oracle::random_even_trace(g, rng, 1.0);
  const TraceD ju = jacobian_apply(t, u, p, g);
  std::vector<double> errs;
  for (double h : {1e-4, 1e-5}) {
    const TraceD fd = (residual(TraceD(t + h * u), p, g) - residual(TraceD(t - h * u), p, g)) / (2 * h);
    errs.push_back((fd - ju).cwiseAbs().maxCoeff());
  }
  CHECK(errs[0] < 1e-7 * ju.cwiseAbs().maxCoeff());
  CHECK(errs[1] < errs[0]);
  CHECK((jacobian_apply(t, TraceD(2.0 * u - 3.0 * v), p, g) - (2.0 * ju - 3.0 * jacobian_apply(t, v, p, g)))
            .cwiseAbs()
            .maxCoeff() < 1e-12 * ju.cwiseAbs().maxCoeff() * 10);
  CHECK(jacobian_apply(t, TraceD(TraceD::Zero(128)), p, g).cwiseAbs().maxCoeff() == 0.0);
  // residual_dalpha against a difference in alpha
  const double da = 1e-6;
  const TraceD fa = (residual(t, p.with_alpha(p.alpha + da), g) - residual(t, p.with_alpha(p.alpha - da), g)) / (2 * da);
  CHECK((fa - residual_dalpha(t, p, g)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("even input gives even residual") {
  const GridD g(12.0, 128);
  std::mt19937 rng(9);
  const TraceD t = oracle::random_even_trace(g, rng, 0.2);
  CHECK(is_even(residual(t, make_params(0.3, 0.2, 1.0), g), 1e-12));
}

TEST_CASE("non-finite traces abort") {
  const GridD g(4.0, 16);
  TraceD t = TraceD::Zero(16);
  t[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(residual(t, make_params(0.0, 0.0, 1.0), g), std::overflow_error);
}

TEST_CASE("lambda_min at the trivial state") {
  const GridD g(4.0, 32);
  CHECK(lambda_min(TraceD(TraceD::Zero(32)), make_params(0.0, 0.5, 1.0), g) == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(lambda_min(TraceD(TraceD::Zero(32)), make_params(0.0, 0.0, 1.0), g) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("full three-trace residual reduces to the eliminated one") {
  const GridD g(10.0, 64);
  std::mt19937 rng(4);
  const ParamsD p = make_params(0.3, 0.5, 1.2);
  const TraceD t1 = oracle::random_even_trace(g, rng, 0.1);
  const FullTraces<double> w{t1, stream_trace(t1, p), TraceD::Zero(64)};
  const FullTraces<double> f = full_residual(w, p, g);
  CHECK(f.t1.cwiseAbs().maxCoeff() < 1e-16);
  CHECK(f.t3.cwiseAbs().maxCoeff() == 0.0);
  CHECK((f.t2 - residual(t1, p, g)).cwiseAbs().maxCoeff() < 1e-15);
  // full Jacobian against differences
  const FullTraces<double> dw{oracle::random_even_trace(g, rng, 1.0), oracle::random_even_trace(g, rng, 1.0),
                              oracle::random_even_trace(g, rng, 1.0)};
  const double h = 1e-6;
  auto shift = [&](double s) {
    return FullTraces<double>{TraceD(w.t1 + s * dw.t1), TraceD(w.t2 + s * dw.t2), TraceD(w.t3 + s * dw.t3)};
  };
  const FullTraces<double> fp = full_residual(shift(h), p, g), fm = full_residual(shift(-h), p, g);
  const FullTraces<double> j = full_jacobian_apply(w, dw, p, g);
  CHECK((TraceD((fp.t2 - fm.t2) / (2 * h)) - j.t2).cwiseAbs().maxCoeff() < 1e-7);
  CHECK((TraceD((fp.t1 - fm.t1) / (2 * h)) - j.t1).cwiseAbs().maxCoeff() < 1e-8);
}
