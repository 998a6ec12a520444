#include "ehdwave/io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

using namespace ehdwave;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ehdwave_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("hex floats round-trip bit for bit") {
  for (double v : {0.0, -0.0, 1.0 / 3.0, 1e-300, -2.5e17, std::numeric_limits<double>::denorm_min()}) {
    const double back = io::real_from_json(io::real_to_json(v));
    CHECK(std::signbit(back) == std::signbit(v));
    CHECK(back == v);
  }
  CHECK(io::real_from_json(io::json(0.25)) == 0.25);
  CHECK_THROWS_AS(io::parse_hex("not a number"), io::FormatError);
}

TEST_CASE("run config round-trip") {
  io::RunConfig rc;
  rc.command = "continue";
  rc.gamma = 0.1;
  rc.eps1 = 1.0 / 7.0;
  rc.eps = 3e-3;
  rc.continuation.budget = 17;
  rc.newton.tol = 1e-10;
  rc.q0_list = {0.25, 1.0};
  const io::RunConfig back = io::run_config_from_json(io::to_json(rc));
  CHECK(back.command == "continue");
  CHECK(back.eps1 == rc.eps1);
  CHECK(back.eps == rc.eps);
  CHECK(!back.alpha);
  CHECK(back.resolved_alpha() == doctest::Approx(1 - 0.1 + 1.0 / 7.0 - 3e-3).epsilon(1e-15));
  CHECK(back.continuation.budget == 17);
  CHECK(back.newton.tol == 1e-10);
  CHECK(back.q0_list == rc.q0_list);
}

TEST_CASE("solution file round-trip") {
  const GridD g(12.0, 32);
  TraceD t(32);
  for (Eigen::Index j = 0; j < 32; ++j) t[j] = 1.0 / (3.0 + g.x()[j] * g.x()[j]);
  const WaveSolution s = make_solution(make_params(0.2, 0.3, 1.0), g, t, 1.25e-12);
  const fs::path dir = scratch("solution");
  io::write_json(dir / "s.json", io::solution_to_json(s, io::RunConfig{}));
  const WaveSolution r = io::solution_from_json(io::read_json(dir / "s.json"));
  CHECK(r.t1 == s.t1);
  CHECK(r.params.alpha == s.params.alpha);
  CHECK(r.grid.half_length() == 12.0);
  CHECK(r.residual_norm == s.residual_norm);
  fs::remove_all(dir);
}

TEST_CASE("wrong versions and kinds are rejected") {
  const GridD g(4.0, 16);
  io::json j = io::solution_to_json(make_solution(make_params(0.0, 0.5, 1.0), g, TraceD::Zero(16), 0), {});
  j["version"] = 99;
  CHECK_THROWS_AS(io::solution_from_json(j), io::FormatError);
  j["version"] = io::kFormatVersion;
  j["kind"] = "branch";
  CHECK_THROWS_AS(io::solution_from_json(j), io::FormatError);
}

TEST_CASE("branch file round-trip") {
  Branch b;
  b.flow = {0.0, 0.5};
  for (int i = 0; i < 3; ++i) {
    BranchPoint p;
    p.s = 0.1 * i;
    p.alpha = 1.5 - 0.01 * (i + 1);
    p.amplitude = 0.003 * (i + 1);
    p.n_points = 64;
    p.half_length = 20;
    b.points.push_back(p);
  }
  b.solutions.emplace_back(2, make_solution(make_params(0.0, 0.5, 1.47), GridD(20.0, 64), TraceD::Zero(64), 0));
  b.stop_reason = StopReason::kBudget;
  const fs::path dir = scratch("branch");
  io::RunConfig rc;
  rc.command = "continue";
  io::write_branch(dir, b, rc);
  CHECK(fs::exists(dir / "solutions" / "point_00002.json"));
  const io::BranchFile f = io::read_branch(dir);
  REQUIRE(f.points.size() == 3);
  CHECK(f.points[1].alpha == b.points[1].alpha);
  CHECK(f.points[2].amplitude == b.points[2].amplitude);
  CHECK(f.stop["stop_reason"] == "BUDGET");
  fs::remove_all(dir);
}

TEST_CASE("atomic writes leave no temporary behind") {
  const fs::path dir = scratch("atomic");
  io::write_atomic(dir / "a.txt", "one");
  io::write_atomic(dir / "a.txt", "two");
  CHECK(io::read_file(dir / "a.txt") == "two");
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}) == 1);
  fs::remove_all(dir);
}
