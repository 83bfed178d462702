#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mco/graph.hpp"
#include "mco/objectives.hpp"
#include "mco/swarm.hpp"

namespace mco {

// A complete experiment description: swarm parameters plus the objective and
// topology they run against.
struct ExperimentConfig {
  SwarmParams params;
  std::string objective = "sphere";
  double eval_cost_us = 0.0;
  GraphKind topology = GraphKind::kComplete;
  double er_p = 0.5;
  std::uint64_t topology_seed = 0;

  ObjectiveSpec make_objective() const;
  TopologySchedule make_schedule() const;
  std::map<std::string, std::string> echo() const;
};

// The benchmark configuration used for Table-1-shaped statistics runs:
// q = n = 30, 1000 iterations, complete graph, finite coefficient set
// {eta = mu = 0.002, kappa = 0.9}, h = 0.5, eq5 p-update.
ExperimentConfig table1_config(const std::string& objective, Algorithm algorithm);

struct StatsSummary {
  std::string objective;
  std::string algorithm;
  int runs = 0;
  double min = 0.0, max = 0.0, median = 0.0, average = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> values;  // final best per seed, in seed order
  std::map<std::string, std::string> config;
};

struct TimingReport {
  double t_serial = 0.0;    // seconds
  double t_parallel = 0.0;  // seconds
  double saved_pct = 0.0;   // (t_serial - t_parallel) / t_serial * 100
  double speedup = 0.0;     // t_serial / t_parallel
  int workers = 0;
  double eval_cost_us = 0.0;
};

// Runs one seeded optimization per seed and aggregates the final best values.
// Median of an even count is the midpoint of the two central order statistics.
StatsSummary run_trials(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                        WorkerPool* pool = nullptr);

// Same seeded workload at 1 worker and at `workers`; the optimization result
// is identical by the determinism contract, only the wall clock differs.
TimingReport timing_compare(const ExperimentConfig& config, std::uint64_t seed, int workers);

std::vector<TimingReport> scalability_sweep(const ExperimentConfig& config, std::uint64_t seed,
                                            const std::vector<int>& worker_list);

// Serialization. CSV columns:
//   StatsSummary:  objective,algorithm,runs,min,max,median,average
//   TimingReport:  workers,t_serial,t_parallel,saved_pct,speedup,eval_cost_us
std::string stats_to_csv(const StatsSummary& s);
std::string stats_to_json(const StatsSummary& s);
StatsSummary stats_from_json(const std::string& text);
std::string timing_to_csv(const std::vector<TimingReport>& reports);
std::string timing_to_json(const TimingReport& r);
TimingReport timing_from_json(const std::string& text);

// Atomic file write: write to <path>.tmp then rename. Throws std::runtime_error
// naming the path on failure.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace mco
