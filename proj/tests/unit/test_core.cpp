#include "ehdwave/core.hpp"

#include <doctest.h>

#include <numbers>

using namespace ehdwave;

TEST_CASE("make_params derives alpha_cr and the Froude number") {
  const ParamsD p = make_params(0.0, 0.5, 1.0);
  CHECK(p.alpha_cr() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(p.froude() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(make_params(0.2, 0.3, 1.0).alpha_cr() == doctest::Approx(1.1).epsilon(1e-15));
  for (double a : {0.1, 0.7, 1.3, 5.0}) {
    const ParamsD q = make_params(-0.4, 0.2, a);
    CHECK(std::abs(q.froude() * q.froude() * q.alpha - 1.0) < 1e-15);
  }
}

TEST_CASE("make_params rejects bad fields by name") {
  try {
    make_params(0.0, -0.1, 1.0);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "eps1");
  }
  try {
    make_params(0.0, 0.1, 0.0);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "alpha");
  }
  CHECK_THROWS_AS(make_params(std::nan(""), 0.1, 1.0), ValidationError);
}

TEST_CASE("grid abscissae and wavenumbers") {
  const GridD g = make_grid(std::numbers::pi, 16);
  for (Eigen::Index n = 0; n <= 8; ++n) CHECK(g.wavenumbers()[n] == doctest::Approx(double(n)).epsilon(1e-14));
  CHECK(g.x()[0] == -std::numbers::pi);
  CHECK(g.x()[g.center()] == 0.0);
  const GridD h = make_grid(40.0, 512);
  CHECK(h.spacing() == 0.15625);
  for (Eigen::Index j = 1; j < h.size(); ++j) CHECK(h.x()[j] > h.x()[j - 1]);
  for (Eigen::Index j = 0; j < h.size(); ++j)
    if (j != 0) CHECK(h.x()[h.mirror(j)] == -h.x()[j]);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(make_grid(10.0, 15), ValidationError);
  CHECK_THROWS_AS(make_grid(10.0, 8), ValidationError);
  CHECK_THROWS_AS(make_grid(-1.0, 64), ValidationError);
}

TEST_CASE("symmetrize, symmetry defect and tail") {
  const GridD g(10.0, 32);
  TraceD t(32);
  for (Eigen::Index j = 0; j < 32; ++j) t[j] = std::exp(-g.x()[j] * g.x()[j]) + 0.01 * g.x()[j];
  CHECK(symmetry_defect(t) > 1e-3);
  const TraceD s = symmetrize(t);
  CHECK(is_even(s));
  CHECK(symmetry_defect(TraceD::Zero(32)) == 0.0);
  TraceD bump = TraceD::Zero(32);
  bump[0] = 0.5;  // x = -L
  CHECK(tail_of(bump, g) == 0.5);
  const WaveSolution sol = make_solution(make_params(0.0, 0.0, 0.9), g, s, 1e-12);
  CHECK(sol.amplitude == s[g.center()]);
  CHECK_THROWS_AS(make_solution(make_params(0.0, 0.0, 0.9), g, TraceD::Zero(30), 0.0), ValidationError);
}
