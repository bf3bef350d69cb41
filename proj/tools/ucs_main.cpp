// Command-line front end: solve UC problems, screen line bounds, run batch
// experiments, generate samples, and train/apply the commitment predictor.
//
// Exit codes: 0 success, 1 domain error (infeasible problem, failed
// certification, ...), 2 usage/input error.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ucs/caseio.hpp"
#include "ucs/errors.hpp"
#include "ucs/formulation.hpp"
#include "ucs/harness.hpp"
#include "ucs/lp.hpp"
#include "ucs/mip.hpp"
#include "ucs/model.hpp"
#include "ucs/predictor.hpp"
#include "ucs/rng.hpp"
#include "ucs/schedule.hpp"
#include "ucs/screening.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;
constexpr int kSolutionSchemaVersion = 1;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ucs::Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ucs::Error("cannot write file: " + path);
  out << content;
}

nlohmann::json schedule_to_json(const ucs::CommitmentSchedule& s) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  auto rows = nlohmann::json::array();
  for (int i = 0; i < s.ng(); ++i) {
    std::vector<int> row;
    for (int t = 1; t <= s.horizon(); ++t) row.push_back(s.on(i, t) ? 1 : 0);
    rows.push_back(row);
  }
  doc["u"] = rows;
  return doc;
}

ucs::CommitmentSchedule schedule_from_json(const nlohmann::json& doc) {
  if (doc.value("schema_version", 0) != 1)
    throw ucs::SchemaError("unsupported schedule schema version");
  const auto& rows = doc.at("u");
  ucs::CommitmentSchedule s;
  const int ng = static_cast<int>(rows.size());
  if (ng == 0) throw ucs::SchemaError("schedule: empty u matrix");
  const int T = static_cast<int>(rows[0].size());
  s.u = ucs::Matrix(ng, T);
  for (int i = 0; i < ng; ++i) {
    if (static_cast<int>(rows[i].size()) != T)
      throw ucs::SchemaError("schedule: ragged u matrix");
    for (int t = 0; t < T; ++t) s.u(i, t) = rows[i][t].get<double>();
  }
  return s;
}

// Names the first balance-style impossibility to make infeasibility
// actionable; falls back to a generic message.
std::string infeasibility_diagnostic(const ucs::UCInstance& inst,
                                     const ucs::LoadProfile& loads) {
  for (int t = 1; t <= inst.horizon; ++t) {
    if (loads.total(t) > inst.total_pmax() + 1e-9) {
      std::ostringstream msg;
      msg << "nodal balance at timestep " << t << " cannot be met: total load "
          << loads.total(t) << " MW exceeds total generation capacity "
          << inst.total_pmax() << " MW";
      return msg.str();
    }
  }
  return "problem is infeasible (network limits or ramping exclude every "
         "commitment)";
}

struct CommonInputs {
  std::string case_path;
  std::string loads_path;
};

int cmd_solve(const CommonInputs& in, const std::string& reduced_from,
              const std::string& out_path, const std::string& schedule_out) {
  const ucs::UCInstance inst = ucs::parse_case(read_file(in.case_path));
  const ucs::LoadProfile loads = ucs::parse_loads(read_file(in.loads_path), inst);

  ucs::UCProblem prob;
  if (reduced_from.empty()) {
    prob = ucs::build_uc(inst, loads, inst.horizon);
  } else {
    const ucs::ScreeningResult verdicts =
        ucs::verdicts_from_json(nlohmann::json::parse(read_file(reduced_from)));
    prob = ucs::build_reduced_uc(ucs::reduce(inst, verdicts), loads);
  }

  ucs::MIPOptions opt;
  const ucs::MIPSolution sol = ucs::solve_mip(prob.mip, opt);
  if (sol.status == ucs::MIPStatus::INFEASIBLE) {
    std::cerr << "infeasible: " << infeasibility_diagnostic(inst, loads) << "\n";
    return kExitDomain;
  }
  if (sol.status == ucs::MIPStatus::GAP_LIMIT) {
    std::cerr << "node limit reached with relative gap " << sol.gap << "\n";
    return kExitDomain;
  }

  const ucs::CommitmentSchedule sched = ucs::extract_schedule(sol, prob.layout);
  const ucs::FlowModel fm = ucs::build_flow_model(inst);

  nlohmann::json doc;
  doc["schema_version"] = kSolutionSchemaVersion;
  doc["objective"] = sol.objective_value;
  doc["nodes"] = sol.nodes;
  doc["schedule"] = schedule_to_json(sched);
  auto dispatch = nlohmann::json::array();
  auto flows = nlohmann::json::array();
  for (int t = 1; t <= prob.layout.k; ++t) {
    std::vector<double> xs;
    for (int i = 0; i < inst.ng(); ++i)
      xs.push_back(sol.primal[prob.layout.x_col(i, t)]);
    dispatch.push_back(xs);
    std::vector<double> fr;
    for (int j = 0; j < inst.nl(); ++j) {
      double f = 0.0;
      for (int c = 0; c < prob.layout.nf; ++c)
        f += fm.K(j, c) * sol.primal[prob.layout.f_col(c, t)];
      fr.push_back(f);
    }
    flows.push_back(fr);
  }
  doc["dispatch"] = dispatch;  // [timestep][generator], MW
  doc["flows"] = flows;        // [timestep][line], MW

  std::cout << "objective " << std::setprecision(12) << sol.objective_value
            << "\n";
  if (!out_path.empty()) write_file(out_path, doc.dump(2) + "\n");
  if (!schedule_out.empty())
    write_file(schedule_out, schedule_to_json(sched).dump(2) + "\n");
  return kExitOk;
}

int cmd_screen(const CommonInputs& in, const std::string& method_name,
               double range_r, bool have_range, const std::string& schedule_path,
               int interval, const std::string& out_path,
               const std::string& table_path) {
  const ucs::UCInstance inst = ucs::parse_case(read_file(in.case_path));
  const ucs::LoadProfile loads = ucs::parse_loads(read_file(in.loads_path), inst);

  ucs::ScreeningMethod method;
  if (method_name == "single") {
    method = ucs::ScreeningMethod::single();
  } else if (method_name == "multi") {
    method = ucs::ScreeningMethod::multi_aware();
  } else if (method_name == "truth") {
    if (schedule_path.empty()) {
      std::cerr << "--method truth requires --schedule\n";
      return kExitUsage;
    }
    method = ucs::ScreeningMethod::multi_truth(
        schedule_from_json(nlohmann::json::parse(read_file(schedule_path))));
  } else if (method_name == "partial") {
    if (schedule_path.empty()) {
      std::cerr << "--method partial requires --schedule\n";
      return kExitUsage;
    }
    const ucs::CommitmentSchedule s =
        schedule_from_json(nlohmann::json::parse(read_file(schedule_path)));
    method = ucs::ScreeningMethod::multi_partial(ucs::partial_schedule(s, interval));
  } else if (method_name == "region") {
    if (!have_range) {
      std::cerr << "--method region requires --range\n";
      return kExitUsage;
    }
    method = ucs::ScreeningMethod::region(range_r);
  } else {
    std::cerr << "unknown method '" << method_name
              << "' (single|multi|truth|partial|region)\n";
    return kExitUsage;
  }

  const ucs::ScreeningResult res = ucs::screen(inst, loads, method);
  std::cout << "eliminated " << res.eliminated_count() << "\n"
            << "remaining " << res.kept_count() << "\n";
  if (!out_path.empty())
    write_file(out_path, ucs::verdicts_to_json(res).dump(2) + "\n");
  if (!table_path.empty()) write_file(table_path, ucs::verdict_table(res));
  return kExitOk;
}

int cmd_bench(const std::string& config_path, const std::string& out_path,
              const std::string& table_path) {
  nlohmann::json cfg_doc;
  try {
    cfg_doc = nlohmann::json::parse(read_file(config_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ucs::SchemaError(std::string("config is not valid JSON: ") + e.what());
  }

  // Relative data paths resolve against the config file's directory.
  const auto resolve = [&](std::string p) {
    if (!p.empty() && p[0] != '/') {
      const auto slash = config_path.find_last_of('/');
      if (slash != std::string::npos) p = config_path.substr(0, slash + 1) + p;
    }
    return p;
  };

  ucs::ExperimentConfig cfg;
  cfg.instance =
      ucs::parse_case(read_file(resolve(cfg_doc.at("case").get<std::string>())));
  cfg.nominal = ucs::parse_loads(
      read_file(resolve(cfg_doc.at("nominal_loads").get<std::string>())),
      cfg.instance);
  cfg.r_values = cfg_doc.value("r_values", std::vector<double>{0.5});
  cfg.sample_count = cfg_doc.value("samples", 10);
  cfg.seed = cfg_doc.value("seed", 1ULL);
  cfg.oracle_enabled = cfg_doc.value("oracle", false);
  cfg.methods.clear();
  for (const auto& m : cfg_doc.value("methods", std::vector<std::string>{
                                                    "single", "multi"})) {
    if (m == "single") cfg.methods.push_back(ucs::MethodKind::SINGLE);
    else if (m == "multi") cfg.methods.push_back(ucs::MethodKind::MULTI_AWARE);
    else if (m == "partial") cfg.methods.push_back(ucs::MethodKind::MULTI_PARTIAL);
    else if (m == "region") cfg.methods.push_back(ucs::MethodKind::REGION);
    else throw ucs::SchemaError("config: unknown method '" + m + "'");
  }
  if (cfg_doc.contains("knn")) {
    const auto& k = cfg_doc["knn"];
    cfg.knn_k = k.value("k", 5);
    cfg.knn_interval = k.value("interval", 4);
    cfg.knn_training_samples = k.value("training_samples", 0);
  }

  const ucs::MetricsReport rep = ucs::run_experiment(cfg);
  std::cout << ucs::report_table(rep);
  if (!out_path.empty())
    write_file(out_path, ucs::report_to_json(rep).dump(2) + "\n");
  if (!table_path.empty()) write_file(table_path, ucs::report_table(rep));

  int oracle_failures = 0;
  for (const auto& m : rep.methods) oracle_failures += m.oracle_failures;
  if (oracle_failures > 0) {
    std::cerr << "oracle certification failed for " << oracle_failures
              << " eliminated targets\n";
    return kExitDomain;
  }
  return kExitOk;
}

int cmd_gen_samples(const CommonInputs& in, double range_r, int count,
                    std::uint64_t seed, const std::string& out_prefix) {
  const ucs::UCInstance inst = ucs::parse_case(read_file(in.case_path));
  const ucs::LoadProfile nominal =
      ucs::parse_loads(read_file(in.loads_path), inst);
  const auto samples = ucs::gen_samples(nominal, range_r, count, seed);
  for (int s = 0; s < count; ++s)
    write_file(out_prefix + std::to_string(s) + ".loads",
               ucs::serialize_loads(samples[s]));
  std::cout << "wrote " << count << " samples\n";
  return kExitOk;
}

int cmd_train_knn(const CommonInputs& in, double range_r, int count, int k,
                  std::uint64_t seed, const std::string& out_path) {
  const std::string case_text = read_file(in.case_path);
  const ucs::UCInstance inst = ucs::parse_case(case_text);
  const ucs::LoadProfile nominal = ucs::parse_loads(read_file(in.loads_path), inst);

  const auto samples = ucs::gen_samples(nominal, range_r, count, seed);
  ucs::TrainingSet ts;
  ts.fingerprint = ucs::instance_fingerprint(ucs::serialize_case(inst));
  const ucs::FlowModel fm = ucs::build_flow_model(inst);
  int skipped = 0;
  for (const auto& l : samples) {
    ucs::UCProblem prob = ucs::build_uc(inst, l, inst.horizon, nullptr, &fm);
    const ucs::MIPSolution sol = ucs::solve_mip(prob.mip);
    if (sol.status != ucs::MIPStatus::OPTIMAL) {
      ++skipped;
      continue;
    }
    ts.loads.push_back(l);
    ts.schedules.push_back(ucs::extract_schedule(sol, prob.layout));
  }
  const ucs::KNNModel model = ucs::train(ts, k);
  write_file(out_path, ucs::model_to_json(model).dump() + "\n");
  std::cout << "trained on " << ts.size() << " samples (" << skipped
            << " skipped)\n";
  return kExitOk;
}

int cmd_predict(const CommonInputs& in, const std::string& model_path,
                const std::string& out_path) {
  const ucs::UCInstance inst = ucs::parse_case(read_file(in.case_path));
  const ucs::LoadProfile loads = ucs::parse_loads(read_file(in.loads_path), inst);
  const ucs::KNNModel model =
      ucs::model_from_json(nlohmann::json::parse(read_file(model_path)));
  const std::uint64_t fp = ucs::instance_fingerprint(ucs::serialize_case(inst));
  if (model.fingerprint != 0 && model.fingerprint != fp) {
    std::cerr << "model was trained on a different instance (fingerprint "
                 "mismatch)\n";
    return kExitDomain;
  }
  const ucs::CommitmentSchedule pred = ucs::predict(model, loads);
  write_file(out_path, schedule_to_json(pred).dump(2) + "\n");
  std::cout << "prediction written to " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transmission-constraint screening for unit commitment"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  int jobs = 1;
  app.add_option("--seed", seed, "seed for all randomness");
  app.add_option("--jobs", jobs, "maximum concurrent workers")
      ->check(CLI::PositiveNumber);

  CommonInputs in;

  auto* solve = app.add_subcommand("solve", "solve the full or reduced UC MILP");
  std::string reduced_from, solve_out, schedule_out;
  solve->add_option("--case", in.case_path, "case file")->required();
  solve->add_option("--loads", in.loads_path, "load table")->required();
  solve->add_option("--reduced-from", reduced_from,
                    "verdict document; eliminated bounds are dropped");
  solve->add_option("--out", solve_out, "solution document path");
  solve->add_option("--schedule-out", schedule_out, "schedule document path");

  auto* screen = app.add_subcommand("screen", "screen line bounds");
  std::string method = "multi", schedule_path, screen_out, table_out;
  double range_r = 0.0;
  int interval = 4;
  screen->add_option("--case", in.case_path, "case file")->required();
  screen->add_option("--loads", in.loads_path,
                     "load table (nominal loads for --method region)")
      ->required();
  screen->add_option("--method", method, "single|multi|truth|partial|region");
  auto* range_opt =
      screen->add_option("--range", range_r, "load box half-width r in [0,1)");
  screen->add_option("--schedule", schedule_path,
                     "schedule document (truth/partial)");
  screen->add_option("--interval", interval, "prediction insertion interval");
  screen->add_option("--out", screen_out, "verdict document path");
  screen->add_option("--table", table_out, "verdict table path");

  auto* bench = app.add_subcommand("bench", "run a batch experiment");
  std::string config_path, bench_out, bench_table;
  bench->add_option("--config", config_path, "experiment config")->required();
  bench->add_option("--out", bench_out, "report document path");
  bench->add_option("--table", bench_table, "report table path");

  auto* gen = app.add_subcommand("gen-samples", "draw load samples");
  double gen_r = 0.5;
  int gen_count = 10;
  std::string gen_prefix = "sample_";
  gen->add_option("--case", in.case_path, "case file")->required();
  gen->add_option("--loads", in.loads_path, "nominal load table")->required();
  gen->add_option("--range", gen_r, "load box half-width r in [0,1)");
  gen->add_option("--count", gen_count, "number of samples");
  gen->add_option("--out-prefix", gen_prefix, "output path prefix");

  auto* train = app.add_subcommand("train-knn", "train the commitment predictor");
  double train_r = 0.5;
  int train_count = 100, train_k = 5;
  std::string model_out = "model.json";
  train->add_option("--case", in.case_path, "case file")->required();
  train->add_option("--loads", in.loads_path, "nominal load table")->required();
  train->add_option("--range", train_r, "training load box half-width");
  train->add_option("--samples", train_count, "training sample count");
  train->add_option("--k", train_k, "neighbor count");
  train->add_option("--out", model_out, "model document path")->required();

  auto* predict = app.add_subcommand("predict", "predict a commitment schedule");
  std::string model_path, predict_out;
  predict->add_option("--case", in.case_path, "case file")->required();
  predict->add_option("--loads", in.loads_path, "query load table")->required();
  predict->add_option("--model", model_path, "model document")->required();
  predict->add_option("--out", predict_out, "schedule document path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help goes to stdout with exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve->parsed())
      return cmd_solve(in, reduced_from, solve_out, schedule_out);
    if (screen->parsed())
      return cmd_screen(in, method, range_r, range_opt->count() > 0,
                        schedule_path, interval, screen_out, table_out);
    if (bench->parsed()) return cmd_bench(config_path, bench_out, bench_table);
    if (gen->parsed())
      return cmd_gen_samples(in, gen_r, gen_count, seed, gen_prefix);
    if (train->parsed())
      return cmd_train_knn(in, train_r, train_count, train_k, seed, model_out);
    if (predict->parsed()) return cmd_predict(in, model_path, predict_out);
  } catch (const ucs::SchemaError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ucs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
