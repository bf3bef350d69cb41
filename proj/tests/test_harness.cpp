#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ucs/fixtures.hpp"
#include "ucs/harness.hpp"

using namespace ucs;

TEST_CASE("load sampling stays in the requested box") {
  const LoadProfile nominal = fixtures::fix39_loads();
  const double r = 0.4;
  const auto samples = gen_samples(nominal, r, 50, 7);
  REQUIRE(samples.size() == 50);
  double mean_ratio = 0.0;
  int entries = 0;
  for (const auto& s : samples)
    for (int b = 0; b < nominal.nb(); ++b)
      for (int t = 1; t <= nominal.horizon(); ++t) {
        const double v = nominal.at(b, t);
        if (v == 0.0) {
          CHECK(s.at(b, t) == 0.0);
          continue;
        }
        CHECK(s.at(b, t) >= (1.0 - r) * v - 1e-12);
        CHECK(s.at(b, t) <= (1.0 + r) * v + 1e-12);
        mean_ratio += s.at(b, t) / v;
        ++entries;
      }
  // Entries are uniform around the nominal value.
  CHECK(mean_ratio / entries == Catch::Approx(1.0).margin(0.02));
}

TEST_CASE("sampling edge cases") {
  const LoadProfile nominal = fixtures::fixa_loads();
  SECTION("r of zero reproduces the nominal profile") {
    for (const auto& s : gen_samples(nominal, 0.0, 3, 1)) CHECK(s == nominal);
  }
  SECTION("identical seeds give bitwise-identical draws") {
    CHECK(gen_samples(nominal, 0.5, 4, 99) == gen_samples(nominal, 0.5, 4, 99));
  }
  SECTION("sample i does not depend on the count") {
    const auto few = gen_samples(nominal, 0.5, 2, 5);
    const auto many = gen_samples(nominal, 0.5, 6, 5);
    CHECK(few[0] == many[0]);
    CHECK(few[1] == many[1]);
  }
  SECTION("invalid arguments rejected") {
    CHECK_THROWS_AS(gen_samples(nominal, 1.0, 1, 1), InvalidRangeError);
    CHECK_THROWS_AS(gen_samples(nominal, -0.1, 1, 1), InvalidRangeError);
    CHECK_THROWS_AS(gen_samples(nominal, 0.5, 0, 1), InvalidRangeError);
  }
}

TEST_CASE("exhaustive commitment oracle") {
  SECTION("two-bus fixture prices the load at marginal cost") {
    const UCInstance inst = fixtures::make_fix2();
    const OracleUCResult res = oracle_uc(inst, fixtures::fix2_loads());
    REQUIRE(res.feasible);
    CHECK(res.objective == Catch::Approx(10.0 * (40.0 + 50.0)));
    CHECK(res.schedule.on(0, 1));
    CHECK(res.schedule.on(0, 2));
  }
  SECTION("agrees with branch and bound on the triangle fixture") {
    const UCInstance inst = fixtures::make_fixa();
    const LoadProfile loads = fixtures::fixa_loads();
    const OracleUCResult res = oracle_uc(inst, loads);
    UCProblem prob = build_uc(inst, loads, inst.horizon);
    const MIPSolution s = solve_mip(prob.mip);
    REQUIRE(res.feasible);
    REQUIRE(s.status == MIPStatus::OPTIMAL);
    CHECK(res.objective == Catch::Approx(s.objective_value).margin(1e-6));
    CHECK(res.objective == Catch::Approx(1400.0));
  }
  SECTION("reports infeasible loads") {
    const UCInstance inst = fixtures::make_fix2();
    LoadProfile loads = fixtures::fix2_loads();
    loads.values(1, 0) = 500.0;  // beyond total capacity
    CHECK_FALSE(oracle_uc(inst, loads).feasible);
  }
  SECTION("refuses oversized enumerations") {
    CHECK_THROWS_AS(oracle_uc(fixtures::make_fix39(), fixtures::fix39_loads()),
                    TooLargeError);
  }
}

TEST_CASE("binding-value oracle maximizes the targeted flow") {
  SECTION("two-bus flow is pinned by the balance rows") {
    const UCInstance inst = fixtures::make_fix2();
    const OracleBindingResult res =
        oracle_binding(inst, fixtures::fix2_loads(), {0, BoundSense::UPPER, 1});
    REQUIRE_FALSE(res.region_empty);
    CHECK(res.value == Catch::Approx(40.0).margin(1e-6));
  }
  SECTION("triangle fixture: exact binding value under ramping") {
    const UCInstance inst = fixtures::make_fixa();
    const OracleBindingResult res =
        oracle_binding(inst, fixtures::fixa_loads(), {0, BoundSense::UPPER, 2});
    REQUIRE_FALSE(res.region_empty);
    CHECK(res.value == Catch::Approx(135.0 / 7.0).margin(1e-6));
    // The dual bound certifies the value from above for an UPPER target.
    CHECK(res.certified_bound >= res.value - 1e-6);
  }
}

TEST_CASE("ramp-aware eliminations on the triangle fixture are certified") {
  const UCInstance inst = fixtures::make_fixa();
  const LoadProfile loads = fixtures::fixa_loads();
  const ScreeningResult res = screen(inst, loads, ScreeningMethod::multi_aware());
  for (const auto& target : res.eliminated_set()) {
    INFO("line " << target.line << " sense " << to_string(target.sense)
                 << " t " << target.timestep);
    CHECK(certify_elimination(inst, loads, target));
  }
}

TEST_CASE("random instances are feasible by construction") {
  for (int trial = 0; trial < 10; ++trial) {
    Rng rng = Rng::derive(555, trial);
    LoadProfile loads;
    const UCInstance inst =
        gen_random_instance(rng, rng.uniform_int(3, 6), rng.uniform_int(2, 4),
                            rng.uniform_int(2, 3), &loads);
    REQUIRE_NOTHROW(validate(inst));
    UCProblem prob = build_uc(inst, loads, inst.horizon);
    const MIPSolution s = solve_mip(prob.mip);
    INFO("trial " << trial);
    CHECK(s.status == MIPStatus::OPTIMAL);
  }
}

TEST_CASE("full solutions respect every original flow bound") {
  const UCInstance inst = fixtures::make_fixa();
  const LoadProfile loads = fixtures::fixa_loads();
  UCProblem prob = build_uc(inst, loads, inst.horizon);
  const MIPSolution s = solve_mip(prob.mip);
  REQUIRE(s.status == MIPStatus::OPTIMAL);
  CHECK(respects_all_flow_bounds(inst, prob, s.primal));
}

TEST_CASE("experiment runner produces a coherent report") {
  ExperimentConfig cfg;
  cfg.instance = fixtures::make_fixa();
  cfg.nominal = fixtures::fixa_loads();
  // The nominal profile is exactly at the fixture's feasibility boundary;
  // back off so every sampled profile stays solvable.
  for (int b = 0; b < cfg.nominal.nb(); ++b)
    for (int t = 0; t < cfg.nominal.horizon(); ++t)
      cfg.nominal.values(b, t) *= 0.9;
  cfg.r_values = {0.05};
  cfg.sample_count = 3;
  cfg.methods = {MethodKind::SINGLE, MethodKind::MULTI_AWARE};
  cfg.seed = 17;
  cfg.oracle_enabled = true;

  const MetricsReport rep = run_experiment(cfg);
  CHECK(rep.total_constraints == 12);
  REQUIRE(rep.methods.size() == 2);
  for (const auto& m : rep.methods) {
    CHECK(m.samples == 3);
    CHECK(m.remaining_counts.size() == 3);
    CHECK(m.mean_remaining >= 0.0);
    CHECK(m.mean_remaining <= 12.0);
    CHECK(m.screening_rate ==
          Catch::Approx(1.0 - m.mean_remaining / 12.0).margin(1e-9));
    CHECK(m.full_feasible == 3);
    CHECK(m.reduced_feasible == 3);
    CHECK(std::fabs(m.mean_objective_gap) < 1e-7);
    CHECK(m.oracle_failures == 0);
    CHECK(m.oracle_checked > 0);
  }
  // Single-step eliminations stay inside the ramp-aware set on every sample.
  const std::string key = "single<=multi@r=0.05";
  REQUIRE(rep.inclusion_total.count(key));
  CHECK(rep.inclusion_pass.at(key) == rep.inclusion_total.at(key));
  CHECK(rep.sample_errors.empty());

  SECTION("report serialization carries the headline numbers") {
    const nlohmann::json doc = report_to_json(rep);
    CHECK(doc["total_constraints"] == 12);
    CHECK(doc["methods"].size() == 2);
    const std::string table = report_table(rep);
    CHECK(table.find("single") != std::string::npos);
    CHECK(table.find("multi") != std::string::npos);
  }

  SECTION("runner is deterministic") {
    const MetricsReport again = run_experiment(cfg);
    REQUIRE(again.methods.size() == rep.methods.size());
    for (std::size_t i = 0; i < rep.methods.size(); ++i)
      CHECK(again.methods[i].remaining_counts == rep.methods[i].remaining_counts);
  }
}

TEST_CASE("experiment config validation") {
  ExperimentConfig cfg;
  cfg.instance = fixtures::make_fixa();
  cfg.nominal = fixtures::fixa_loads();
  SECTION("bad r") {
    cfg.r_values = {1.5};
    CHECK_THROWS_AS(run_experiment(cfg), InvalidRangeError);
  }
  SECTION("bad sample count") {
    cfg.sample_count = 0;
    CHECK_THROWS_AS(run_experiment(cfg), InvalidRangeError);
  }
  SECTION("partial method needs training samples") {
    cfg.methods = {MethodKind::MULTI_PARTIAL};
    cfg.knn_training_samples = 0;
    CHECK_THROWS_AS(run_experiment(cfg), EmptyTrainingError);
  }
}
