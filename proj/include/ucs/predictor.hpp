#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucs/errors.hpp"
#include "ucs/model.hpp"
#include "ucs/schedule.hpp"

namespace ucs {

// FNV-1a over the serialized case document; ties a trained model to the
// instance it was generated from.
inline std::uint64_t instance_fingerprint(const std::string& serialized_case) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialized_case) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct TrainingSet {
  std::vector<LoadProfile> loads;
  std::vector<CommitmentSchedule> schedules;
  std::uint64_t fingerprint = 0;

  int size() const { return static_cast<int>(loads.size()); }
};

// KNN over flattened nb x T load matrices, features standardized by the
// training mean/std per coordinate. Votes are taken independently per
// (generator, timestep) entry; ties commit the unit.
struct KNNModel {
  int k = 5;
  int nb = 0, horizon = 0, ng = 0;
  std::uint64_t fingerprint = 0;
  std::vector<std::vector<double>> features;  // standardized, one per sample
  std::vector<CommitmentSchedule> labels;
  std::vector<double> mean, stddev;

  std::vector<double> standardize(const LoadProfile& loads) const {
    std::vector<double> f(static_cast<std::size_t>(nb) * horizon);
    std::size_t idx = 0;
    for (int b = 0; b < nb; ++b)
      for (int t = 1; t <= horizon; ++t, ++idx)
        f[idx] = (loads.at(b, t) - mean[idx]) / stddev[idx];
    return f;
  }
};

inline KNNModel train(const TrainingSet& samples, int k) {
  if (k < 1) throw ValidationError("K must be >= 1");
  if (samples.size() == 0) throw EmptyTrainingError("empty training set");
  if (samples.size() < k)
    throw EmptyTrainingError("need at least K training samples");
  if (samples.loads.size() != samples.schedules.size())
    throw DimensionMismatchError("loads/schedules count mismatch");

  KNNModel model;
  model.k = k;
  model.nb = samples.loads[0].nb();
  model.horizon = samples.loads[0].horizon();
  model.ng = samples.schedules[0].ng();
  model.fingerprint = samples.fingerprint;
  const std::size_t dim = static_cast<std::size_t>(model.nb) * model.horizon;

  for (int s = 0; s < samples.size(); ++s) {
    if (samples.loads[s].nb() != model.nb ||
        samples.loads[s].horizon() != model.horizon ||
        samples.schedules[s].ng() != model.ng ||
        samples.schedules[s].horizon() != model.horizon)
      throw DimensionMismatchError("training sample " + std::to_string(s) +
                                   " has mismatched dimensions");
  }

  model.mean.assign(dim, 0.0);
  model.stddev.assign(dim, 0.0);
  for (const auto& l : samples.loads) {
    std::size_t idx = 0;
    for (int b = 0; b < model.nb; ++b)
      for (int t = 1; t <= model.horizon; ++t, ++idx) model.mean[idx] += l.at(b, t);
  }
  for (double& m : model.mean) m /= samples.size();
  for (const auto& l : samples.loads) {
    std::size_t idx = 0;
    for (int b = 0; b < model.nb; ++b)
      for (int t = 1; t <= model.horizon; ++t, ++idx) {
        const double d = l.at(b, t) - model.mean[idx];
        model.stddev[idx] += d * d;
      }
  }
  for (double& s : model.stddev) {
    s = std::sqrt(s / samples.size());
    if (s < 1e-12) s = 1.0;  // constant feature
  }

  model.features.reserve(samples.size());
  for (const auto& l : samples.loads) model.features.push_back(model.standardize(l));
  model.labels = samples.schedules;
  return model;
}

inline CommitmentSchedule predict(const KNNModel& model, const LoadProfile& loads) {
  if (loads.nb() != model.nb || loads.horizon() != model.horizon)
    throw DimensionMismatchError("query load dimensions do not match the model");
  const std::vector<double> q = model.standardize(loads);

  // Nearest K by squared distance, ties by sample index for determinism.
  std::vector<std::pair<double, int>> dist(model.features.size());
  for (std::size_t s = 0; s < model.features.size(); ++s) {
    double d = 0.0;
    const auto& f = model.features[s];
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double diff = f[i] - q[i];
      d += diff * diff;
    }
    dist[s] = {d, static_cast<int>(s)};
  }
  std::partial_sort(dist.begin(), dist.begin() + model.k, dist.end());

  CommitmentSchedule out;
  out.provenance = Provenance::PREDICTED;
  out.u = Matrix(model.ng, model.horizon);
  for (int i = 0; i < model.ng; ++i)
    for (int t = 0; t < model.horizon; ++t) {
      int votes_on = 0;
      for (int n = 0; n < model.k; ++n)
        if (model.labels[dist[n].second].u(i, t) > 0.5) ++votes_on;
      out.u(i, t) = (2 * votes_on >= model.k) ? 1.0 : 0.0;  // tie -> ON
    }
  return out;
}

// Keeps predictions only on the insertion grid {interval, 2*interval, ...}.
inline PartialSchedule partial_schedule(const CommitmentSchedule& full, int interval) {
  if (interval < 1) throw InvalidRangeError("insertion interval must be >= 1");
  PartialSchedule p;
  p.schedule = full;
  p.schedule.provenance = Provenance::PARTIAL;
  for (int t = interval; t <= full.horizon(); t += interval) p.steps.push_back(t);
  return p;
}

inline constexpr int kModelSchemaVersion = 1;

inline nlohmann::json model_to_json(const KNNModel& m) {
  nlohmann::json doc;
  doc["schema_version"] = kModelSchemaVersion;
  doc["k"] = m.k;
  doc["nb"] = m.nb;
  doc["horizon"] = m.horizon;
  doc["ng"] = m.ng;
  doc["fingerprint"] = m.fingerprint;
  doc["mean"] = m.mean;
  doc["stddev"] = m.stddev;
  doc["features"] = m.features;
  auto labels = nlohmann::json::array();
  for (const auto& s : m.labels) {
    std::vector<int> flat;
    flat.reserve(static_cast<std::size_t>(s.ng()) * s.horizon());
    for (int i = 0; i < s.ng(); ++i)
      for (int t = 0; t < s.horizon(); ++t) flat.push_back(s.u(i, t) > 0.5 ? 1 : 0);
    labels.push_back(flat);
  }
  doc["labels"] = labels;
  return doc;
}

inline KNNModel model_from_json(const nlohmann::json& doc) {
  if (doc.value("schema_version", 0) != kModelSchemaVersion)
    throw SchemaError("unsupported model schema version");
  KNNModel m;
  m.k = doc.at("k").get<int>();
  m.nb = doc.at("nb").get<int>();
  m.horizon = doc.at("horizon").get<int>();
  m.ng = doc.at("ng").get<int>();
  m.fingerprint = doc.at("fingerprint").get<std::uint64_t>();
  m.mean = doc.at("mean").get<std::vector<double>>();
  m.stddev = doc.at("stddev").get<std::vector<double>>();
  m.features = doc.at("features").get<std::vector<std::vector<double>>>();
  for (const auto& flat : doc.at("labels")) {
    CommitmentSchedule s;
    s.u = Matrix(m.ng, m.horizon);
    auto v = flat.get<std::vector<int>>();
    std::size_t idx = 0;
    for (int i = 0; i < m.ng; ++i)
      for (int t = 0; t < m.horizon; ++t) s.u(i, t) = v[idx++];
    m.labels.push_back(std::move(s));
  }
  return m;
}

}  // namespace ucs
