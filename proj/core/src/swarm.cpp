#include "mco/swarm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mco/rng.hpp"

namespace mco {

namespace {

double clampd(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

void eval_all(const ObjectiveSpec& obj, const std::vector<double>& x, int q, int n,
              std::vector<double>& out, WorkerPool* pool) {
  out.resize(q);
  auto body = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      out[i] = evaluate(obj, std::span<const double>(x.data() + i * n, n));
  };
  if (pool)
    pool->parallel_for(static_cast<std::size_t>(q), body);
  else
    body(0, static_cast<std::size_t>(q));
}

CoeffSample draw_sample(const SwarmParams& params, std::uint64_t seed, int iter,
                        std::uint64_t lane) {
  CoeffSample c;
  c.h = params.h;
  const auto t = static_cast<std::uint64_t>(iter);
  if (params.omega.empty()) {
    c.eta = rng::uniform(seed, rng::Stream::kCoeffs, t, lane, 0);
    c.mu = rng::uniform(seed, rng::Stream::kCoeffs, t, lane, 1);
    c.kappa = rng::uniform(seed, rng::Stream::kCoeffs, t, lane, 2);
  } else {
    std::uint64_t k = rng::below(params.omega.size(), seed, rng::Stream::kCoeffs, t, lane, 0);
    c = params.omega[k];
    c.h = params.h;
  }
  return c;
}

}  // namespace

void SwarmParams::validate() const {
  if (q < 2) throw std::invalid_argument("SwarmParams: q must be >= 2");
  if (n < 1) throw std::invalid_argument("SwarmParams: n must be >= 1");
  if (!(h > 0.0)) throw std::invalid_argument("SwarmParams: h must be > 0");
  if (stagnation_window < 1) throw std::invalid_argument("SwarmParams: stagnation window must be >= 1");
  if (max_iters < 0) throw std::invalid_argument("SwarmParams: max_iters must be >= 0");
  for (const CoeffSample& c : omega)
    if (c.eta < 0 || c.mu < 0 || c.kappa < 0 || !std::isfinite(c.eta + c.mu + c.kappa))
      throw std::invalid_argument("SwarmParams: omega entries must be finite and nonnegative");
}

SwarmState init_swarm(const SwarmParams& params, const ObjectiveSpec& obj,
                      std::uint64_t seed, WorkerPool* pool) {
  params.validate();
  if (obj.n != params.n) throw std::invalid_argument("init_swarm: objective dimension mismatch");

  SwarmState s;
  s.seed = seed;
  s.q = params.q;
  s.n = params.n;
  s.x.resize(static_cast<std::size_t>(s.q) * s.n);
  s.v.resize(s.x.size());
  s.x_lo = obj.lower;
  s.x_hi = obj.upper;
  s.v_lo.resize(s.n);
  s.v_hi.resize(s.n);
  for (int d = 0; d < s.n; ++d) {
    s.v_lo[d] = params.v_init_lo.value_or(obj.lower[d]);
    s.v_hi[d] = params.v_init_hi.value_or(obj.upper[d]);
  }

  for (int i = 0; i < s.q; ++i) {
    for (int d = 0; d < s.n; ++d) {
      auto lane = static_cast<std::uint64_t>(i);
      s.agent_x(i)[d] = rng::uniform_in(obj.lower[d], obj.upper[d], seed, rng::Stream::kInit,
                                        0, lane, static_cast<std::uint64_t>(d));
      s.agent_v(i)[d] = rng::uniform_in(s.v_lo[d], s.v_hi[d], seed, rng::Stream::kInit, 0, lane,
                                        static_cast<std::uint64_t>(s.n + d));
    }
  }

  eval_all(obj, s.x, s.q, s.n, s.fx, pool);
  s.pbest = s.x;
  s.fp = s.fx;
  int arg = 0;
  for (int i = 1; i < s.q; ++i)
    if (s.fp[i] < s.fp[arg]) arg = i;
  s.p.assign(s.agent_x(arg), s.agent_x(arg) + s.n);
  s.fp_val = s.fp[arg];
  s.best_val = s.fp_val;
  s.best_pos = s.p;
  return s;
}

IterationCoeffs sample_coeffs(const SwarmParams& params, std::uint64_t seed, int iter) {
  IterationCoeffs out;
  out.shared = draw_sample(params, seed, iter, 0);
  if (params.coeff_mode == CoeffMode::kPerAgent) {
    out.per_agent.resize(params.q);
    for (int i = 0; i < params.q; ++i)
      out.per_agent[i] = draw_sample(params, seed, iter, static_cast<std::uint64_t>(i) + 1);
  }
  return out;
}

void mco_step(SwarmState& state, const IterationCoeffs& coeffs, const Digraph& g,
              const SwarmParams& params, WorkerPool* pool) {
  if (g.q() != state.q) throw std::invalid_argument("mco_step: graph size mismatch");
  const int n = state.n;
  const double sign = params.raw_alg1_sign ? -1.0 : 1.0;

  // frozen snapshots C (positions), D (velocities)
  const std::vector<double> C = state.x;
  const std::vector<double> D = state.v;

  auto body = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const CoeffSample& c = coeffs.for_agent(i);
      const double* ci = C.data() + i * n;
      const double* di = D.data() + i * n;
      double* vi = state.agent_v(static_cast<int>(i));
      double* xi = state.agent_x(static_cast<int>(i));
      for (int d = 0; d < n; ++d) {
        double sum_v = 0.0, sum_x = 0.0;
        for (int j : g.out_neighbors(static_cast<int>(i))) {
          sum_v += D[static_cast<std::size_t>(j) * n + d] - di[d];
          sum_x += C[static_cast<std::size_t>(j) * n + d] - ci[d];
        }
        double nv = di[d] + c.h * (sign * (c.eta * sum_v + c.mu * sum_x) +
                                   c.kappa * (state.p[d] - ci[d]));
        if (params.clamp_velocity) nv = clampd(nv, state.v_lo[d], state.v_hi[d]);
        vi[d] = nv;
        xi[d] = ci[d] + c.h * nv;
      }
    }
  };
  if (pool)
    pool->parallel_for(static_cast<std::size_t>(state.q), body);
  else
    body(0, static_cast<std::size_t>(state.q));
  ++state.t;
}

void update_bests(SwarmState& state, const IterationCoeffs& coeffs, const ObjectiveSpec& obj,
                  const SwarmParams& params, const std::vector<double>& prev_x,
                  const std::vector<double>& prev_fx, WorkerPool* pool) {
  const int q = state.q, n = state.n;
  if (params.clamp_position) {
    for (int i = 0; i < q; ++i)
      for (int d = 0; d < n; ++d)
        state.agent_x(i)[d] = clampd(state.agent_x(i)[d], state.x_lo[d], state.x_hi[d]);
  }
  eval_all(obj, state.x, q, n, state.fx, pool);

  if (params.algorithm == Algorithm::kPso) {
    // plain overwrite bookkeeping
    for (int i = 0; i < q; ++i) {
      if (state.fx[i] < state.fp[i]) {
        state.fp[i] = state.fx[i];
        std::copy(state.agent_x(i), state.agent_x(i) + n, state.pbest.begin() + static_cast<std::size_t>(i) * n);
        if (state.fp[i] < state.fp_val) {
          state.fp_val = state.fp[i];
          state.p.assign(state.agent_x(i), state.agent_x(i) + n);
        }
      }
    }
  } else if (params.p_update == PUpdateMode::kAlgorithm1) {
    // smoothing toward the improving agent, then the conditional overwrite
    for (int i = 0; i < q; ++i) {
      if (!(state.fx[i] < state.fp[i])) continue;
      state.fp[i] = state.fx[i];
      std::copy(state.agent_x(i), state.agent_x(i) + n, state.pbest.begin() + static_cast<std::size_t>(i) * n);
      const double kap = coeffs.for_agent(static_cast<std::size_t>(i)).kappa;
      const double* pb = state.pbest.data() + static_cast<std::size_t>(i) * n;
      for (int d = 0; d < n; ++d) state.p[d] += kap * (pb[d] - state.p[d]);
      state.fp_val = evaluate(obj, state.p);
      if (state.fp[i] < state.fp_val) {
        state.p.assign(pb, pb + n);
        state.fp_val = state.fp[i];
      }
    }
  } else {
    // eq5: the network best follows the best snapshot position every iteration
    int jmin = 0;
    for (int i = 1; i < q; ++i)
      if (prev_fx[i] < prev_fx[jmin]) jmin = i;
    const double* xj = prev_x.data() + static_cast<std::size_t>(jmin) * n;
    if (prev_fx[jmin] < state.fp_val) {
      state.p.assign(xj, xj + n);
      state.fp_val = prev_fx[jmin];
    } else {
      const double hk = coeffs.shared.h * coeffs.shared.kappa;
      for (int d = 0; d < n; ++d) state.p[d] += hk * (xj[d] - state.p[d]);
      state.fp_val = evaluate(obj, state.p);
    }
    for (int i = 0; i < q; ++i) {
      if (state.fx[i] < state.fp[i]) {
        state.fp[i] = state.fx[i];
        std::copy(state.agent_x(i), state.agent_x(i) + n, state.pbest.begin() + static_cast<std::size_t>(i) * n);
      }
    }
  }

  double iter_best = state.fp_val;
  int arg = -1;
  for (int i = 0; i < q; ++i)
    if (state.fp[i] < iter_best) {
      iter_best = state.fp[i];
      arg = i;
    }
  if (iter_best < state.best_val) {
    state.best_val = iter_best;
    if (arg >= 0)
      state.best_pos.assign(state.pbest.begin() + static_cast<std::size_t>(arg) * n,
                            state.pbest.begin() + static_cast<std::size_t>(arg + 1) * n);
    else
      state.best_pos = state.p;
  }
}

void pso_step(SwarmState& state, const ObjectiveSpec&, const SwarmParams& params,
              WorkerPool* pool) {
  const int n = state.n;
  const std::vector<double> C = state.x;
  const std::vector<double> D = state.v;
  const auto t = static_cast<std::uint64_t>(state.t + 1);

  auto body = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double* ci = C.data() + i * n;
      const double* di = D.data() + i * n;
      const double* pb = state.pbest.data() + i * n;
      double* vi = state.agent_v(static_cast<int>(i));
      double* xi = state.agent_x(static_cast<int>(i));
      for (int d = 0; d < n; ++d) {
        double r1 = rng::uniform(state.seed, rng::Stream::kPso, t, i, 2 * static_cast<std::uint64_t>(d));
        double r2 = rng::uniform(state.seed, rng::Stream::kPso, t, i, 2 * static_cast<std::uint64_t>(d) + 1);
        double nv = params.pso_w * di[d] + params.pso_c1 * r1 * (pb[d] - ci[d]) +
                    params.pso_c2 * r2 * (state.p[d] - ci[d]);
        if (params.clamp_velocity) nv = clampd(nv, state.v_lo[d], state.v_hi[d]);
        vi[d] = nv;
        xi[d] = ci[d] + nv;
      }
    }
  };
  if (pool)
    pool->parallel_for(static_cast<std::size_t>(state.q), body);
  else
    body(0, static_cast<std::size_t>(state.q));
  ++state.t;
}

RunRecord run(const SwarmParams& params, const ObjectiveSpec& obj,
              const TopologySchedule& schedule, std::uint64_t seed, WorkerPool* pool) {
  params.validate();
  if (params.algorithm == Algorithm::kMco && schedule.q() != params.q)
    throw std::invalid_argument("run: topology size does not match q");

  auto t0 = std::chrono::steady_clock::now();
  SwarmState s = init_swarm(params, obj, seed, pool);

  RunRecord rec;
  rec.algorithm = params.algorithm == Algorithm::kMco ? "mco" : "pso";
  rec.objective = obj.name;
  rec.n = params.n;
  rec.q = params.q;
  rec.seed = seed;
  rec.trace.push_back(s.best_val);

  std::vector<double> prev_x, prev_fx;
  for (int t = 1; t <= params.max_iters; ++t) {
    IterationCoeffs coeffs = sample_coeffs(params, seed, t);
    prev_x = s.x;
    prev_fx = s.fx;
    if (params.algorithm == Algorithm::kMco) {
      Digraph g = schedule.topology_at(t - 1);
      mco_step(s, coeffs, g, params, pool);
    } else {
      pso_step(s, obj, params, pool);
    }
    update_bests(s, coeffs, obj, params, prev_x, prev_fx, pool);
    rec.trace.push_back(std::min(rec.trace.back(), s.best_val));

    int W = params.stagnation_window;
    if (t >= W) {
      double cur = rec.trace.back();
      double old = rec.trace[rec.trace.size() - 1 - static_cast<std::size_t>(W)];
      if (std::abs(cur - old) <= params.stagnation_tol * std::max(1.0, std::abs(cur))) break;
    }
  }

  rec.iterations_run = s.t;
  rec.final_best = rec.trace.back();
  rec.final_position = s.best_pos;
  rec.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::string run_record_to_json(const RunRecord& rec) {
  nlohmann::json j;
  j["algorithm"] = rec.algorithm;
  j["objective"] = rec.objective;
  j["n"] = rec.n;
  j["q"] = rec.q;
  j["seed"] = rec.seed;
  j["iterations_run"] = rec.iterations_run;
  j["final_best"] = rec.final_best;
  j["final_position"] = rec.final_position;
  j["trace"] = rec.trace;
  j["config"] = rec.config;
  return j.dump(2);
}

std::string run_record_sidecar_json(const RunRecord& rec) {
  nlohmann::json j;
  j["duration_seconds"] = rec.duration_seconds;
  return j.dump(2);
}

std::string run_record_to_csv(const RunRecord& rec) {
  std::string out = "iter,best_value\n";
  char buf[64];
  for (std::size_t i = 0; i < rec.trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, rec.trace[i]);
    out += buf;
  }
  return out;
}

}  // namespace mco
