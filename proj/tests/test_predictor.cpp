#include <catch2/catch_amalgamated.hpp>

#include "ucs/caseio.hpp"
#include "ucs/fixtures.hpp"
#include "ucs/predictor.hpp"

using namespace ucs;

namespace {

LoadProfile make_loads(int nb, int T, double base) {
  LoadProfile l;
  l.values = Matrix(nb, T);
  for (int b = 0; b < nb; ++b)
    for (int t = 0; t < T; ++t) l.values(b, t) = base + b + 0.1 * t;
  return l;
}

CommitmentSchedule make_schedule(int ng, int T, bool on) {
  CommitmentSchedule s;
  s.u = Matrix(ng, T);
  for (int i = 0; i < ng; ++i)
    for (int t = 0; t < T; ++t) s.u(i, t) = on ? 1.0 : 0.0;
  return s;
}

TrainingSet two_cluster_set() {
  // Low-load samples run one pattern, high-load samples the other.
  TrainingSet ts;
  ts.fingerprint = 42;
  for (int s = 0; s < 4; ++s) {
    ts.loads.push_back(make_loads(2, 3, 10.0 + 0.2 * s));
    ts.schedules.push_back(make_schedule(2, 3, false));
  }
  for (int s = 0; s < 4; ++s) {
    ts.loads.push_back(make_loads(2, 3, 50.0 + 0.2 * s));
    ts.schedules.push_back(make_schedule(2, 3, true));
  }
  return ts;
}

}  // namespace

TEST_CASE("nearest neighbors recover clustered schedules") {
  const TrainingSet ts = two_cluster_set();
  const KNNModel model = train(ts, 3);
  CHECK(model.fingerprint == 42);
  CHECK(predict(model, make_loads(2, 3, 11.0)).u == make_schedule(2, 3, false).u);
  CHECK(predict(model, make_loads(2, 3, 49.0)).u == make_schedule(2, 3, true).u);
}

TEST_CASE("K of one gives exact recall on training points") {
  const TrainingSet ts = two_cluster_set();
  const KNNModel model = train(ts, 1);
  for (int s = 0; s < ts.size(); ++s)
    CHECK(predict(model, ts.loads[s]).u == ts.schedules[s].u);
}

TEST_CASE("split votes commit the unit") {
  TrainingSet ts;
  ts.loads = {make_loads(2, 1, 10.0), make_loads(2, 1, 10.0)};
  ts.schedules = {make_schedule(2, 1, true), make_schedule(2, 1, false)};
  const KNNModel model = train(ts, 2);
  CHECK(predict(model, make_loads(2, 1, 10.0)).u == make_schedule(2, 1, true).u);
}

TEST_CASE("equidistant neighbors break ties toward lower sample index") {
  TrainingSet ts;
  ts.loads = {make_loads(2, 1, 9.0), make_loads(2, 1, 11.0)};
  ts.schedules = {make_schedule(2, 1, false), make_schedule(2, 1, true)};
  const KNNModel model = train(ts, 1);
  // The query sits exactly between the two samples; index 0 wins.
  CHECK(predict(model, make_loads(2, 1, 10.0)).u == ts.schedules[0].u);
}

TEST_CASE("training rejects bad inputs") {
  const TrainingSet ts = two_cluster_set();
  CHECK_THROWS_AS(train(ts, 0), ValidationError);
  CHECK_THROWS_AS(train(TrainingSet{}, 1), EmptyTrainingError);
  CHECK_THROWS_AS(train(ts, ts.size() + 1), EmptyTrainingError);

  TrainingSet bad = ts;
  bad.schedules[2] = make_schedule(3, 3, true);
  CHECK_THROWS_AS(train(bad, 2), DimensionMismatchError);

  TrainingSet uneven = ts;
  uneven.schedules.pop_back();
  CHECK_THROWS_AS(train(uneven, 2), DimensionMismatchError);
}

TEST_CASE("prediction rejects mismatched query dimensions") {
  const KNNModel model = train(two_cluster_set(), 2);
  CHECK_THROWS_AS(predict(model, make_loads(3, 3, 10.0)), DimensionMismatchError);
  CHECK_THROWS_AS(predict(model, make_loads(2, 2, 10.0)), DimensionMismatchError);
}

TEST_CASE("insertion grid selects every interval-th step") {
  const CommitmentSchedule full = make_schedule(2, 24, true);

  SECTION("interval four") {
    const PartialSchedule p = partial_schedule(full, 4);
    CHECK(p.steps == std::vector<int>{4, 8, 12, 16, 20, 24});
    CHECK(p.schedule.provenance == Provenance::PARTIAL);
  }
  SECTION("interval one covers everything") {
    CHECK(partial_schedule(full, 1).steps.size() == 24);
  }
  SECTION("interval past the horizon covers nothing") {
    CHECK(partial_schedule(full, 25).steps.empty());
  }
  SECTION("non-positive interval rejected") {
    CHECK_THROWS_AS(partial_schedule(full, 0), InvalidRangeError);
  }
}

TEST_CASE("instance fingerprints are stable and discriminating") {
  const std::string a = serialize_case(fixtures::make_fixa());
  const std::string b = serialize_case(fixtures::make_fix6());
  CHECK(instance_fingerprint(a) == instance_fingerprint(a));
  CHECK(instance_fingerprint(a) != instance_fingerprint(b));
}

TEST_CASE("models round-trip through JSON") {
  const KNNModel model = train(two_cluster_set(), 3);
  const KNNModel back = model_from_json(model_to_json(model));
  CHECK(back.k == model.k);
  CHECK(back.fingerprint == model.fingerprint);
  CHECK(back.mean == model.mean);
  CHECK(back.stddev == model.stddev);
  CHECK(back.features == model.features);
  REQUIRE(back.labels.size() == model.labels.size());
  CHECK(predict(back, make_loads(2, 3, 11.0)).u ==
        predict(model, make_loads(2, 3, 11.0)).u);

  nlohmann::json bad = model_to_json(model);
  bad["schema_version"] = 0;
  CHECK_THROWS_AS(model_from_json(bad), SchemaError);
}
