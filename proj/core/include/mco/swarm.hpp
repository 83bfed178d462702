#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mco/graph.hpp"
#include "mco/objectives.hpp"
#include "mco/parallel.hpp"

namespace mco {

enum class Algorithm { kMco, kPso };
enum class CoeffMode { kSharedPerIteration, kPerAgent };

// Which rule moves the network best p.
//
// kAlgorithm1: p is touched only on the improving-agent path -- the smoothing
//   p += kappa (p_i - p) followed by the conditional overwrite. This is the
//   executable listing, but it leaves the swarm's mean position/velocity pair
//   undamped between improvements (that 2x2 map has determinant 1), so as an
//   optimizer it floors early.
// kEq5: p moves every iteration toward the currently best agent position and
//   is overwritten by it when better. This matches the switched linear model
//   the analysis module simulates, damps the swarm center, and is what the
//   benchmark configurations use.
enum class PUpdateMode { kAlgorithm1, kEq5 };

struct CoeffSample {
  double eta = 0.0;
  double mu = 0.0;
  double kappa = 0.0;
  double h = 1.0;
};

// One iteration's coefficient draws: a single sample shared by all agents, or
// one per agent. The shared sample also drives the eq5 p-update.
struct IterationCoeffs {
  CoeffSample shared;
  std::vector<CoeffSample> per_agent;  // empty in shared mode
  const CoeffSample& for_agent(std::size_t i) const {
    return per_agent.empty() ? shared : per_agent[i];
  }
};

struct SwarmParams {
  int q = 30;
  int n = 30;
  Algorithm algorithm = Algorithm::kMco;
  CoeffMode coeff_mode = CoeffMode::kSharedPerIteration;
  PUpdateMode p_update = PUpdateMode::kAlgorithm1;
  // Coefficient distribution: uniform [0,1]^3 unless a finite set is given.
  std::vector<CoeffSample> omega;  // h member of entries is ignored; params.h rules
  double h = 1.0;
  int max_iters = 1000;
  int stagnation_window = 100;
  double stagnation_tol = 1e-12;
  bool clamp_velocity = false;
  bool clamp_position = false;
  // Velocity init bounds; falls back to the objective's position bounds.
  std::optional<double> v_init_lo, v_init_hi;
  // Reproduce the +L sign of the printed listing instead of the consensus -L.
  bool raw_alg1_sign = false;
  // Standard PSO constants.
  double pso_w = 0.7298;
  double pso_c1 = 1.49618;
  double pso_c2 = 1.49618;

  void validate() const;
};

struct SwarmState {
  std::uint64_t seed = 0;
  int t = 0;
  int q = 0, n = 0;
  std::vector<double> x;   // q*n, agent-major
  std::vector<double> v;   // q*n
  std::vector<double> fx;  // f at current x
  std::vector<double> pbest;    // q*n personal bests
  std::vector<double> fp;       // f at personal bests
  std::vector<double> p;        // network best position, size n
  double fp_val = 0.0;          // f(p)
  double best_val = 0.0;        // running minimum ever observed
  std::vector<double> best_pos;
  // init bounds, captured for the optional clamps
  std::vector<double> x_lo, x_hi, v_lo, v_hi;

  double* agent_x(int i) { return x.data() + static_cast<std::size_t>(i) * n; }
  double* agent_v(int i) { return v.data() + static_cast<std::size_t>(i) * n; }
  const double* agent_x(int i) const { return x.data() + static_cast<std::size_t>(i) * n; }
  const double* agent_v(int i) const { return v.data() + static_cast<std::size_t>(i) * n; }
};

struct RunRecord {
  std::string algorithm;
  std::string objective;
  int n = 0, q = 0;
  std::uint64_t seed = 0;
  int iterations_run = 0;
  std::vector<double> trace;  // running best per iteration; trace[0] is the initial best
  double final_best = 0.0;
  std::vector<double> final_position;
  double duration_seconds = 0.0;  // exported to the sidecar, not the primary artifact
  std::map<std::string, std::string> config;
};

SwarmState init_swarm(const SwarmParams& params, const ObjectiveSpec& obj,
                      std::uint64_t seed, WorkerPool* pool = nullptr);

IterationCoeffs sample_coeffs(const SwarmParams& params, std::uint64_t seed, int iter);

// One MCO velocity/position update over a frozen snapshot of the swarm.
// Agents are independent given the snapshot, so execution may be split across
// any number of workers with bit-identical results.
void mco_step(SwarmState& state, const IterationCoeffs& coeffs, const Digraph& g,
              const SwarmParams& params, WorkerPool* pool = nullptr);

// Best-tracking after positions advanced. prev_x/prev_fx are the snapshot the
// step consumed (the eq5 rule reads the network best from that snapshot).
// Evaluations run in parallel; the reduction is sequential in agent index.
void update_bests(SwarmState& state, const IterationCoeffs& coeffs, const ObjectiveSpec& obj,
                  const SwarmParams& params, const std::vector<double>& prev_x,
                  const std::vector<double>& prev_fx, WorkerPool* pool = nullptr);

void pso_step(SwarmState& state, const ObjectiveSpec& obj, const SwarmParams& params,
              WorkerPool* pool = nullptr);

RunRecord run(const SwarmParams& params, const ObjectiveSpec& obj,
              const TopologySchedule& schedule, std::uint64_t seed,
              WorkerPool* pool = nullptr);

// Serialization of run records. JSON is byte-stable for a fixed record
// (timestamps and durations go to the sidecar, see run_record_sidecar_json).
std::string run_record_to_json(const RunRecord& rec);
std::string run_record_sidecar_json(const RunRecord& rec);
std::string run_record_to_csv(const RunRecord& rec);  // columns: iter,best_value

}  // namespace mco
