#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ucs/fixtures.hpp"
#include "ucs/mip.hpp"
#include "ucs/screening.hpp"

using namespace ucs;

TEST_CASE("single-step sweep on the triangle fixture") {
  const UCInstance inst = fixtures::make_fixa();
  const LoadProfile loads = fixtures::fixa_loads();
  const ScreeningResult res = screen(inst, loads, ScreeningMethod::single());
  REQUIRE(res.verdicts.size() == 12);  // 3 lines x 2 senses x 2 steps
  CHECK(res.eliminated_count() == 10);
  CHECK(res.kept_count() == 2);
  // The congested sense stays at its limit and must be kept.
  const Verdict& v = res.verdicts.at({0, BoundSense::UPPER, 2});
  CHECK(v.verdict == VerdictKind::KEPT);
  CHECK(v.s_star == Catch::Approx(30.0).margin(1e-6));
  CHECK(v.bound == Catch::Approx(30.0));
  CHECK(v.margin > 0.0);
}

TEST_CASE("ramp-aware sweep eliminates strictly more on the triangle fixture") {
  const UCInstance inst = fixtures::make_fixa();
  const LoadProfile loads = fixtures::fixa_loads();
  const ScreeningResult res = screen(inst, loads, ScreeningMethod::multi_aware());
  CHECK(res.eliminated_count() == 11);
  CHECK(res.kept_count() == 1);
  const Verdict& v = res.verdicts.at({0, BoundSense::UPPER, 2});
  CHECK(v.verdict == VerdictKind::ELIMINATED);
  CHECK(v.s_star == Catch::Approx(172.5 / 7.0).margin(1e-6));
}

TEST_CASE("single-step eliminations are contained in the ramp-aware set") {
  const UCInstance inst = fixtures::make_fixa();
  const LoadProfile loads = fixtures::fixa_loads();
  const ScreeningResult a = screen(inst, loads, ScreeningMethod::single());
  const ScreeningResult b = screen(inst, loads, ScreeningMethod::multi_aware());
  const ComparisonReport rep = compare_results(a, b);
  CHECK(rep.a_subset_of_b);
  CHECK_FALSE(rep.b_subset_of_a);
  REQUIRE(rep.only_b.size() == 1);
  CHECK(rep.only_b[0] == ScreeningTarget{0, BoundSense::UPPER, 2});
}

TEST_CASE("reduced problem matches the full optimum") {
  const UCInstance inst = fixtures::make_fixa();
  const LoadProfile loads = fixtures::fixa_loads();
  const ScreeningResult res = screen(inst, loads, ScreeningMethod::multi_aware());
  const ReducedInstance red = reduce(inst, res);
  CHECK(red.kept_targets.size() == 1);

  UCProblem full = build_uc(inst, loads, inst.horizon);
  const MIPSolution fs = solve_mip(full.mip);
  const MIPSolution rs = solve_reduced(red, loads);
  REQUIRE(fs.status == MIPStatus::OPTIMAL);
  REQUIRE(rs.status == MIPStatus::OPTIMAL);
  CHECK(rs.objective_value == Catch::Approx(fs.objective_value).margin(1e-6));
}

TEST_CASE("reduce refuses a partial verdict set") {
  const UCInstance inst = fixtures::make_fixa();
  const LoadProfile loads = fixtures::fixa_loads();
  ScreeningResult res = screen(inst, loads, ScreeningMethod::single());
  res.verdicts.erase(res.verdicts.begin());
  CHECK_THROWS_AS(reduce(inst, res), CoverageError);
}

TEST_CASE("comparison requires matching target universes") {
  const UCInstance inst = fixtures::make_fixa();
  const LoadProfile loads = fixtures::fixa_loads();
  const ScreeningResult a = screen(inst, loads, ScreeningMethod::single());
  ScreeningResult b = a;
  b.verdicts.erase(b.verdicts.begin());
  CHECK_THROWS_AS(compare_results(a, b), UniverseMismatchError);
}

TEST_CASE("ground-truth screening verdicts from the solved commitment") {
  const UCInstance inst = fixtures::make_fixa();
  const LoadProfile loads = fixtures::fixa_loads();
  UCProblem prob = build_uc(inst, loads, inst.horizon);
  const MIPSolution s = solve_mip(prob.mip);
  REQUIRE(s.status == MIPStatus::OPTIMAL);
  const CommitmentSchedule truth = extract_schedule(s, prob.layout);

  const ScreeningResult exact =
      screen(inst, loads, ScreeningMethod::multi_truth(truth));
  const ScreeningResult aware =
      screen(inst, loads, ScreeningMethod::multi_aware());
  // Everything the relaxation removed the exact model removes too.
  CHECK(compare_results(aware, exact).a_subset_of_b);
}

TEST_CASE("verdict table lists targets in sweep order") {
  const UCInstance inst = fixtures::make_fixa();
  const LoadProfile loads = fixtures::fixa_loads();
  const ScreeningResult res = screen(inst, loads, ScreeningMethod::single());
  const std::string table = verdict_table(res);
  CHECK(table.rfind("timestep line sense", 0) == 0);
  // First data row is step 1, line 0; all step-1 rows precede step-2 rows.
  const auto first_t2 = table.find("\n2 ");
  const auto last_t1 = table.rfind("\n1 ");
  REQUIRE(first_t2 != std::string::npos);
  REQUIRE(last_t1 != std::string::npos);
  CHECK(last_t1 < first_t2);
}

TEST_CASE("verdicts round-trip through JSON") {
  const UCInstance inst = fixtures::make_fixa();
  const LoadProfile loads = fixtures::fixa_loads();
  const ScreeningResult res = screen(inst, loads, ScreeningMethod::multi_aware());
  const ScreeningResult back = verdicts_from_json(verdicts_to_json(res));
  REQUIRE(back.verdicts.size() == res.verdicts.size());
  CHECK(back.method == res.method);
  for (const auto& [t, v] : res.verdicts) {
    const Verdict& w = back.verdicts.at(t);
    CHECK(w.verdict == v.verdict);
    CHECK(w.bound == v.bound);
    if (std::isfinite(v.s_star)) CHECK(w.s_star == Catch::Approx(v.s_star));
  }

  nlohmann::json bad = verdicts_to_json(res);
  bad["schema_version"] = 999;
  CHECK_THROWS_AS(verdicts_from_json(bad), SchemaError);
}

TEST_CASE("infeasible loads produce conservative verdicts, not aborts") {
  const UCInstance inst = fixtures::make_fixa();
  LoadProfile loads = fixtures::fixa_loads();
  loads.values(2, 0) = 500.0;  // far beyond total capacity
  loads.values(2, 1) = 500.0;
  const ScreeningResult res = screen(inst, loads, ScreeningMethod::multi_aware());
  REQUIRE(res.verdicts.size() == 12);
  CHECK(res.eliminated_count() == 0);
  int infeasible_notes = 0;
  for (const auto& [t, v] : res.verdicts)
    if (v.note == "infeasible") ++infeasible_notes;
  CHECK(infeasible_notes > 0);
}

TEST_CASE("step-1 verdicts do not depend on later loads") {
  const UCInstance inst = fixtures::make_fixa();
  const LoadProfile loads = fixtures::fixa_loads();
  LoadProfile other = loads;
  other.values(2, 1) = 20.0;  // change only step 2

  for (const ScreeningMethod& m :
       {ScreeningMethod::single(), ScreeningMethod::multi_aware()}) {
    const ScreeningResult a = screen(inst, loads, m);
    const ScreeningResult b = screen(inst, other, m);
    for (const auto& [t, v] : a.verdicts) {
      if (t.timestep != 1) continue;
      INFO("line " << t.line << " sense " << to_string(t.sense));
      const Verdict& w = b.verdicts.at(t);
      CHECK(w.verdict == v.verdict);
      CHECK(w.s_star == Catch::Approx(v.s_star).margin(1e-9));
    }
  }
}

TEST_CASE("region screening keeps at least as much as the sample screen") {
  const UCInstance inst = fixtures::make_fixa();
  const LoadProfile loads = fixtures::fixa_loads();
  const ScreeningResult nominal =
      screen(inst, loads, ScreeningMethod::multi_aware());
  const ScreeningResult region =
      screen(inst, loads, ScreeningMethod::region(0.3));
  CHECK(region.region_r == Catch::Approx(0.3));
  // region eliminations must be valid for the nominal sample too.
  CHECK(compare_results(region, nominal).a_subset_of_b);
}
