#include "ehdwave/conjugate_flow.hpp"

#include "../oracles.hpp"
#include "ehdwave/diagnostics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ehdwave;

TEST_CASE("Q at the undisturbed depth") {
  for (double g : {-0.5, 0.0, 0.7})
    for (double e : {0.0, 0.5})
      for (double a : {0.5, 1.0, 2.0}) CHECK(qhat(1.0, make_params(g, e, a)) == doctest::Approx(1.0 + e));
}

TEST_CASE("derivatives against differences") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ug(-1, 1), ue(0, 1), ua(0.3, 2.5), ud(0.4, 3.0);
  for (int i = 0; i < 100; ++i) {
    const ParamsD p = make_params(ug(rng), ue(rng), ua(rng));
    const double d = ud(rng), h = 1e-6;
    CHECK(std::abs((qhat(d + h, p) - qhat(d - h, p)) / (2 * h) - qhat_d(d, p)) < 1e-7);
    CHECK(std::abs((qhat_d(d + h, p) - qhat_d(d - h, p)) / (2 * h) - qhat_dd(d, p)) < 1e-6);
    CHECK(std::abs((shat(d + h, p) - shat(d - h, p)) / (2 * h) - 0.5 * (qhat(1, p) - qhat(d, p))) < 1e-8);
  }
}

TEST_CASE("critical depth") {
  CHECK(find_dcr(make_params(0.0, 0.5, 1.0)) == doctest::Approx(std::cbrt(1.5)).epsilon(1e-12));
  CHECK(find_dcr(make_params(0.0, 0.5, 1.5)) == doctest::Approx(1.0).epsilon(1e-12));
  const ParamsD p = make_params(0.2, 0.3, 1.0);
  CHECK(std::abs(qhat_d(find_dcr(p), p)) < 1e-12);
}

TEST_CASE("conjugate depth") {
  const ParamsD p = make_params(0.0, 0.5, 1.0);
  const auto ds = find_dstar(p);
  REQUIRE(ds);
  const double oracle_root = oracle::bisect([](double d) { return 1.5 / (d * d) + 2 * d - 2 - 1.5; }, 1.2, 2.0);
  CHECK(*ds == doctest::Approx(oracle_root).epsilon(1e-12));
  CHECK(std::abs(*ds - 1.3196) < 1e-3);
  CHECK(*ds > find_dcr(p));
  CHECK(std::abs(qhat(*ds, p) - qhat(1, p)) < 1e-12);
  CHECK(!find_dstar(make_params(0.0, 0.5, 1.5)).has_value());
  const auto below = find_dstar(make_params(0.0, 0.0, 1.5));
  REQUIRE(below);
  CHECK(*below < find_dcr(make_params(0.0, 0.0, 1.5)));
}

TEST_CASE("bore verdicts") {
  const ConjugateFlowReport a = bore_verdict(make_params(0.0, 0.5, 1.0));
  CHECK(a.shat_at_1 == doctest::Approx(2.0));
  CHECK(*a.shat_at_star == doctest::Approx(2.0070).epsilon(1e-4));
  CHECK(a.bore_excluded);
  CHECK(a.sign_consistent);
  // matches the flow force of the trivial stream
  CHECK(a.shat_at_1 == doctest::Approx(trivial_flow_force(make_params(0.0, 0.5, 1.0))).epsilon(1e-14));

  const ConjugateFlowReport b = bore_verdict(make_params(0.0, 0.0, 1.5));
  CHECK(*b.shat_at_star < b.shat_at_1);
  CHECK(b.bore_excluded);
  CHECK(b.sign_consistent);

  const ConjugateFlowReport c = bore_verdict(make_params(0.0, 0.5, 1.5));
  CHECK(!c.d_star);
  CHECK(c.bore_excluded);
  CHECK(c.reason.find("unique depth") != std::string::npos);
}
