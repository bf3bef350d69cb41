#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"
#include "ucs/lp.hpp"
#include "ucs/rng.hpp"

using namespace ucs;

TEST_CASE("simplex solves textbook problems") {
  SECTION("maximize over a simplex with a variable cap") {
    LinearProgram lp;
    lp.objective_sense = Sense::MAX;
    lp.add_var(0, 10, 1.0);
    lp.add_var(0, 10, 1.0);
    lp.add_row(-kInf, 4.0, {{0, 1.0}, {1, 1.0}});
    lp.add_row(-kInf, 3.0, {{0, 1.0}});
    const LPSolution s = solve_lp(lp);
    REQUIRE(s.status == LPStatus::OPTIMAL);
    CHECK(s.objective_value == Catch::Approx(4.0));
  }
  SECTION("equality row drives phase 1") {
    LinearProgram lp;
    lp.objective_sense = Sense::MIN;
    lp.add_var(0, 10, 2.0);
    lp.add_var(0, 10, 1.0);
    lp.add_row(5.0, 5.0, {{0, 1.0}, {1, 1.0}});
    const LPSolution s = solve_lp(lp);
    REQUIRE(s.status == LPStatus::OPTIMAL);
    CHECK(s.objective_value == Catch::Approx(5.0));
    CHECK(s.primal[1] == Catch::Approx(5.0));
  }
  SECTION("free variable lands on the constraint") {
    LinearProgram lp;
    lp.objective_sense = Sense::MAX;
    lp.add_var(-kInf, kInf, 1.0);
    lp.add_row(-kInf, 7.5, {{0, 1.0}});
    const LPSolution s = solve_lp(lp);
    REQUIRE(s.status == LPStatus::OPTIMAL);
    CHECK(s.objective_value == Catch::Approx(7.5));
  }
}

TEST_CASE("simplex classifies infeasible and unbounded problems") {
  SECTION("contradictory row and variable bound") {
    LinearProgram lp;
    lp.add_var(0, 1, 1.0);
    lp.add_row(2.0, kInf, {{0, 1.0}});
    const LPSolution s = solve_lp(lp);
    CHECK(s.status == LPStatus::INFEASIBLE);
    CHECK_FALSE(s.farkas_ray.empty());
  }
  SECTION("crossed row bounds rejected up front") {
    LinearProgram lp;
    lp.add_var(0, 1, 1.0);
    lp.add_row(3.0, 2.0, {{0, 1.0}});
    CHECK(solve_lp(lp).status == LPStatus::INFEASIBLE);
  }
  SECTION("unbounded ray reported") {
    LinearProgram lp;
    lp.objective_sense = Sense::MAX;
    lp.add_var(-kInf, kInf, 1.0);
    lp.add_row(0.0, kInf, {{0, 1.0}});
    const LPSolution s = solve_lp(lp);
    REQUIRE(s.status == LPStatus::UNBOUNDED);
    REQUIRE(s.unbounded_ray.size() == 1);
    CHECK(s.unbounded_ray[0] > 0.0);
  }
}

TEST_CASE("random LPs match the vertex-enumeration oracle") {
  Rng rng(20240601);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const LinearProgram lp = testsup::random_lp(rng);
    const testsup::VertexOracleResult oracle = testsup::vertex_oracle(lp);
    const LPSolution s = solve_lp(lp);
    INFO("trial " << trial << "\n" << dump_lp(lp));
    if (oracle.feasible) {
      ++optimal;
      REQUIRE(s.status == LPStatus::OPTIMAL);
      CHECK(s.objective_value == Catch::Approx(oracle.objective).margin(1e-7));
    } else {
      ++infeasible;
      REQUIRE(s.status == LPStatus::INFEASIBLE);
    }
  }
  // The generator must exercise both outcomes.
  CHECK(optimal > 30);
  CHECK(infeasible > 5);
}

TEST_CASE("strong duality holds on random feasible LPs") {
  Rng rng(77);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const LinearProgram lp = testsup::random_lp(rng);
    const LPSolution s = solve_lp(lp);
    if (s.status != LPStatus::OPTIMAL) continue;
    ++checked;
    CHECK(s.dual_objective ==
          Catch::Approx(s.objective_value).margin(1e-6).epsilon(1e-9));
  }
  CHECK(checked > 20);
}

TEST_CASE("dual sign convention on a binding row") {
  // max x, x + y <= 4: the row binds at its upper bound, dual = +1.
  LinearProgram lp;
  lp.objective_sense = Sense::MAX;
  lp.add_var(0, 10, 1.0);
  lp.add_var(0, 10, 0.0);
  lp.add_row(-kInf, 4.0, {{0, 1.0}, {1, 1.0}});
  const LPSolution s = solve_lp(lp);
  REQUIRE(s.status == LPStatus::OPTIMAL);
  CHECK(s.duals[0] == Catch::Approx(1.0));
}

TEST_CASE("iteration limit raises an error") {
  Rng rng(5);
  const LinearProgram lp = testsup::random_lp(rng, 6, 4);
  LPOptions opt;
  opt.iteration_limit = 1;
  CHECK_THROWS_AS(solve_lp(lp, opt), IterationLimitError);
}

TEST_CASE("restricted solves pin variables") {
  LinearProgram lp;
  lp.objective_sense = Sense::MAX;
  lp.add_var(0, 10, 1.0);
  lp.add_var(0, 10, 1.0);
  lp.add_row(-kInf, 12.0, {{0, 1.0}, {1, 1.0}});

  SECTION("fix inside bounds") {
    const LPSolution s = solve_lp_restricted(lp, {{0, 3.0}});
    REQUIRE(s.status == LPStatus::OPTIMAL);
    CHECK(s.primal[0] == Catch::Approx(3.0));
    CHECK(s.objective_value == Catch::Approx(12.0));
  }
  SECTION("fix outside bounds is immediately infeasible") {
    CHECK(solve_lp_restricted(lp, {{0, 11.0}}).status == LPStatus::INFEASIBLE);
  }
}

TEST_CASE("degenerate problems terminate") {
  // Many redundant rows through the origin force degenerate pivots.
  LinearProgram lp;
  lp.objective_sense = Sense::MAX;
  lp.add_var(0, 1, 1.0);
  lp.add_var(0, 1, 1.0);
  for (int i = 0; i < 6; ++i)
    lp.add_row(-kInf, 0.0, {{0, 1.0 + i * 0.0}, {1, -1.0}});
  lp.add_row(-kInf, 1.0, {{0, 1.0}, {1, 1.0}});
  const LPSolution s = solve_lp(lp);
  REQUIRE(s.status == LPStatus::OPTIMAL);
  CHECK(s.objective_value == Catch::Approx(1.0));
}

TEST_CASE("LP dump uses stable names") {
  LinearProgram lp;
  lp.add_var(0, 1, 2.0);
  lp.add_row(0.0, 1.0, {{0, 1.0}});
  const std::string text = dump_lp(lp);
  CHECK(text.find("x0") != std::string::npos);
  CHECK(text.find("r0") != std::string::npos);
  CHECK(text.find("Minimize") != std::string::npos);
}
