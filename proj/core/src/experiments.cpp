#include "mco/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace mco {

ObjectiveSpec ExperimentConfig::make_objective() const {
  ObjectiveSpec obj = get_objective(objective, params.n);
  obj.eval_cost_us = eval_cost_us;
  return obj;
}

TopologySchedule ExperimentConfig::make_schedule() const {
  return TopologySchedule::fixed(build_graph(topology, params.q, er_p, topology_seed));
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::map<std::string, std::string> m;
  m["algorithm"] = params.algorithm == Algorithm::kMco ? "mco" : "pso";
  m["objective"] = objective;
  m["n"] = std::to_string(params.n);
  m["q"] = std::to_string(params.q);
  m["iters"] = std::to_string(params.max_iters);
  m["h"] = fmt(params.h);
  m["topology"] = to_string(topology);
  m["coeff-mode"] = params.coeff_mode == CoeffMode::kSharedPerIteration ? "shared" : "per-agent";
  m["p-update"] = params.p_update == PUpdateMode::kAlgorithm1 ? "algorithm1" : "eq5";
  m["clamp-velocity"] = params.clamp_velocity ? "true" : "false";
  m["clamp-position"] = params.clamp_position ? "true" : "false";
  m["eval-cost-us"] = fmt(eval_cost_us);
  if (!params.omega.empty()) {
    std::string o;
    for (std::size_t i = 0; i < params.omega.size(); ++i) {
      if (i) o += ";";
      o += fmt(params.omega[i].eta) + "," + fmt(params.omega[i].mu) + "," +
           fmt(params.omega[i].kappa);
    }
    m["omega"] = o;
  }
  return m;
}

ExperimentConfig table1_config(const std::string& objective, Algorithm algorithm) {
  ExperimentConfig cfg;
  cfg.objective = objective;
  cfg.params.algorithm = algorithm;
  cfg.params.q = 30;
  cfg.params.n = 30;
  cfg.params.max_iters = 1000;
  // run the full budget; the default stagnation window stops on transient
  // plateaus that the collapse later escapes
  cfg.params.stagnation_window = cfg.params.max_iters + 1;
  cfg.topology = GraphKind::kComplete;
  if (algorithm == Algorithm::kMco) {
    cfg.params.h = 0.5;
    cfg.params.omega = {CoeffSample{0.002, 0.002, 0.9, 0.5}};
    cfg.params.p_update = PUpdateMode::kEq5;
  }
  return cfg;
}

StatsSummary run_trials(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                        WorkerPool* pool) {
  if (seeds.empty()) throw std::invalid_argument("run_trials: need at least one seed");
  ObjectiveSpec obj = config.make_objective();
  TopologySchedule schedule = config.make_schedule();

  StatsSummary s;
  s.objective = config.objective;
  s.algorithm = config.params.algorithm == Algorithm::kMco ? "mco" : "pso";
  s.runs = static_cast<int>(seeds.size());
  s.seeds = seeds;
  s.config = config.echo();
  for (std::uint64_t seed : seeds) {
    RunRecord rec = run(config.params, obj, schedule, seed, pool);
    s.values.push_back(rec.final_best);
  }
  std::vector<double> sorted = s.values;
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  const std::size_t m = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
  double sum = 0.0;
  for (double v : sorted) sum += v;
  s.average = sum / static_cast<double>(sorted.size());
  return s;
}

TimingReport timing_compare(const ExperimentConfig& config, std::uint64_t seed, int workers) {
  if (workers < 1) throw std::invalid_argument("timing_compare: workers must be >= 1");
  ObjectiveSpec obj = config.make_objective();
  TopologySchedule schedule = config.make_schedule();

  WorkerPool serial(1);
  RunRecord r1 = run(config.params, obj, schedule, seed, &serial);
  WorkerPool par(workers);
  RunRecord rn = run(config.params, obj, schedule, seed, &par);
  if (r1.final_best != rn.final_best)
    throw std::runtime_error("timing_compare: determinism violated across worker counts");

  TimingReport t;
  t.t_serial = r1.duration_seconds;
  t.t_parallel = rn.duration_seconds;
  t.saved_pct = (t.t_serial - t.t_parallel) / t.t_serial * 100.0;
  t.speedup = t.t_serial / t.t_parallel;
  t.workers = workers;
  t.eval_cost_us = config.eval_cost_us;
  return t;
}

std::vector<TimingReport> scalability_sweep(const ExperimentConfig& config, std::uint64_t seed,
                                            const std::vector<int>& worker_list) {
  if (worker_list.empty()) throw std::invalid_argument("scalability_sweep: empty worker list");
  std::vector<TimingReport> out;
  for (int w : worker_list) out.push_back(timing_compare(config, seed, w));
  return out;
}

namespace {
std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

std::string stats_to_csv(const StatsSummary& s) {
  std::string out = "objective,algorithm,runs,min,max,median,average\n";
  out += s.objective + "," + s.algorithm + "," + std::to_string(s.runs) + "," + fmt17(s.min) +
         "," + fmt17(s.max) + "," + fmt17(s.median) + "," + fmt17(s.average) + "\n";
  return out;
}

std::string stats_to_json(const StatsSummary& s) {
  nlohmann::json j;
  j["objective"] = s.objective;
  j["algorithm"] = s.algorithm;
  j["runs"] = s.runs;
  j["min"] = s.min;
  j["max"] = s.max;
  j["median"] = s.median;
  j["average"] = s.average;
  j["seeds"] = s.seeds;
  j["values"] = s.values;
  j["config"] = s.config;
  return j.dump(2);
}

StatsSummary stats_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  StatsSummary s;
  s.objective = j.at("objective").get<std::string>();
  s.algorithm = j.at("algorithm").get<std::string>();
  s.runs = j.at("runs").get<int>();
  s.min = j.at("min").get<double>();
  s.max = j.at("max").get<double>();
  s.median = j.at("median").get<double>();
  s.average = j.at("average").get<double>();
  s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  s.values = j.at("values").get<std::vector<double>>();
  s.config = j.at("config").get<std::map<std::string, std::string>>();
  return s;
}

std::string timing_to_csv(const std::vector<TimingReport>& reports) {
  std::string out = "workers,t_serial,t_parallel,saved_pct,speedup,eval_cost_us\n";
  for (const TimingReport& r : reports)
    out += std::to_string(r.workers) + "," + fmt17(r.t_serial) + "," + fmt17(r.t_parallel) +
           "," + fmt17(r.saved_pct) + "," + fmt17(r.speedup) + "," + fmt17(r.eval_cost_us) +
           "\n";
  return out;
}

std::string timing_to_json(const TimingReport& r) {
  nlohmann::json j;
  j["workers"] = r.workers;
  j["t_serial"] = r.t_serial;
  j["t_parallel"] = r.t_parallel;
  j["saved_pct"] = r.saved_pct;
  j["speedup"] = r.speedup;
  j["eval_cost_us"] = r.eval_cost_us;
  return j.dump(2);
}

TimingReport timing_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  TimingReport r;
  r.workers = j.at("workers").get<int>();
  r.t_serial = j.at("t_serial").get<double>();
  r.t_parallel = j.at("t_parallel").get<double>();
  r.saved_pct = j.at("saved_pct").get<double>();
  r.speedup = j.at("speedup").get<double>();
  r.eval_cost_us = j.at("eval_cost_us").get<double>();
  // recompute and cross-check the derived fields
  double saved = (r.t_serial - r.t_parallel) / r.t_serial * 100.0;
  double speedup = r.t_serial / r.t_parallel;
  if (std::abs(saved - r.saved_pct) > 1e-12 * std::max(1.0, std::abs(saved)) ||
      std::abs(speedup - r.speedup) > 1e-12 * std::max(1.0, std::abs(speedup)))
    throw std::runtime_error("timing_from_json: stored ratios disagree with raw times");
  return r;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("rename failed for: " + path + " (" + ec.message() + ")");
}

}  // namespace mco
