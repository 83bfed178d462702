// Command-line front end: run / bench / analyze / compare / list-objectives.
//
// Machine-readable results go to --output (stdout with `--output -`);
// progress and diagnostics go to stderr. Exit codes: 0 success, 1 runtime
// error, 2 usage error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mco/analysis.hpp"
#include "mco/config.hpp"
#include "mco/experiments.hpp"
#include "mco/graph.hpp"
#include "mco/objectives.hpp"
#include "mco/swarm.hpp"

namespace {

struct CommonOpts {
  std::string objective = "sphere";
  int n = 30;
  int q = 30;
  std::string topology = "complete";
  double er_p = 0.5;
  std::uint64_t topology_seed = 0;
  std::string topology_file;
  std::uint64_t seed = 1;
  int iters = 1000;
  std::string algo = "mco";
  int workers = 0;  // 0: SWARM_OPT_WORKERS or hardware concurrency
  double h = 1.0;
  std::string coeff_mode = "shared";
  std::string omega;
  std::string p_update = "algorithm1";
  bool clamp_velocity = false;
  bool clamp_position = false;
  bool raw_alg1_sign = false;
  double eval_cost_us = 0.0;
  int stagnation_window = 100;
  double stagnation_tol = 1e-12;
  std::string output = "-";
  std::string format = "json";
  std::string config_file;
};

std::vector<mco::CoeffSample> parse_omega(const std::string& text) {
  std::vector<mco::CoeffSample> out;
  if (text.empty()) return out;
  std::istringstream tuples(text);
  std::string tuple;
  while (std::getline(tuples, tuple, ';')) {
    std::istringstream fields(tuple);
    std::string f;
    std::vector<double> v;
    while (std::getline(fields, f, ',')) v.push_back(std::stod(f));
    if (v.size() != 3)
      throw CLI::ValidationError("--omega", "each tuple must be eta,mu,kappa");
    out.push_back({v[0], v[1], v[2], 1.0});
  }
  return out;
}

void add_common_flags(CLI::App* cmd, CommonOpts& o, bool with_algo = true) {
  cmd->set_help_flag("--help", "Print help");
  cmd->add_option("--objective", o.objective, "Objective name (see list-objectives)")
      ->capture_default_str();
  cmd->add_option("--n", o.n, "Problem dimension")->capture_default_str();
  cmd->add_option("--q", o.q, "Number of agents")->capture_default_str();
  cmd->add_option("--topology", o.topology, "complete|ring|star|erdos-renyi")
      ->capture_default_str();
  cmd->add_option("--er-p", o.er_p, "Edge probability for erdos-renyi")->capture_default_str();
  cmd->add_option("--topology-seed", o.topology_seed, "Seed for random topologies")
      ->capture_default_str();
  cmd->add_option("--topology-file", o.topology_file,
                  "JSON graph file {\"q\":..,\"directed\":..,\"edges\":[[i,j],..]} "
                  "(overrides --topology)");
  cmd->add_option("--seed", o.seed, "Run seed")->capture_default_str();
  cmd->add_option("--iters", o.iters, "Maximum iterations")->capture_default_str();
  if (with_algo)
    cmd->add_option("--algo,--algorithm", o.algo, "mco|pso")->capture_default_str();
  cmd->add_option("--workers", o.workers,
                  "Worker threads (0: $SWARM_OPT_WORKERS or hardware)")
      ->capture_default_str();
  cmd->add_option("--h", o.h, "Step size")->capture_default_str();
  cmd->add_option("--coeff-mode", o.coeff_mode, "shared|per-agent")->capture_default_str();
  cmd->add_option("--omega", o.omega,
                  "Finite coefficient set 'eta,mu,kappa[;eta,mu,kappa...]' "
                  "(default: uniform [0,1] draws)");
  cmd->add_option("--p-update", o.p_update, "algorithm1|eq5 network-best rule")
      ->capture_default_str();
  cmd->add_flag("--clamp-velocity", o.clamp_velocity, "Clamp velocities to init bounds");
  cmd->add_flag("--clamp-position", o.clamp_position, "Clamp positions to init bounds");
  cmd->add_flag("--raw-alg1-sign", o.raw_alg1_sign,
                "Use the printed listing's +L sign instead of the consensus -L");
  cmd->add_option("--eval-cost-us", o.eval_cost_us,
                  "Injected busy-wait per objective evaluation, microseconds")
      ->capture_default_str();
  cmd->add_option("--stagnation-window", o.stagnation_window, "Stagnation window W")
      ->capture_default_str();
  cmd->add_option("--stagnation-tol", o.stagnation_tol, "Stagnation relative tolerance")
      ->capture_default_str();
  cmd->add_option("--output", o.output, "Output path, or - for stdout")->capture_default_str();
  cmd->add_option("--format", o.format, "json|csv")->capture_default_str();
  cmd->add_option("--config", o.config_file,
                  "Flat key-value config file; command-line flags override its values");
}

mco::ExperimentConfig to_config(const CommonOpts& o) {
  mco::ExperimentConfig cfg;
  cfg.objective = o.objective;
  cfg.eval_cost_us = o.eval_cost_us;
  cfg.topology = mco::graph_kind_from_string(o.topology);
  cfg.er_p = o.er_p;
  cfg.topology_seed = o.topology_seed;
  auto& p = cfg.params;
  p.q = o.q;
  p.n = o.n;
  p.algorithm = o.algo == "pso" ? mco::Algorithm::kPso : mco::Algorithm::kMco;
  if (o.algo != "pso" && o.algo != "mco")
    throw CLI::ValidationError("--algo", "must be mco or pso");
  p.coeff_mode = o.coeff_mode == "per-agent" ? mco::CoeffMode::kPerAgent
                                             : mco::CoeffMode::kSharedPerIteration;
  if (o.coeff_mode != "shared" && o.coeff_mode != "per-agent")
    throw CLI::ValidationError("--coeff-mode", "must be shared or per-agent");
  p.p_update = o.p_update == "eq5" ? mco::PUpdateMode::kEq5 : mco::PUpdateMode::kAlgorithm1;
  if (o.p_update != "algorithm1" && o.p_update != "eq5")
    throw CLI::ValidationError("--p-update", "must be algorithm1 or eq5");
  p.omega = parse_omega(o.omega);
  p.h = o.h;
  p.max_iters = o.iters;
  p.stagnation_window = o.stagnation_window;
  p.stagnation_tol = o.stagnation_tol;
  p.clamp_velocity = o.clamp_velocity;
  p.clamp_position = o.clamp_position;
  p.raw_alg1_sign = o.raw_alg1_sign;
  return cfg;
}

mco::TopologySchedule make_schedule(const CommonOpts& o) {
  if (!o.topology_file.empty()) {
    std::ifstream in(o.topology_file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open topology file: " + o.topology_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    mco::Digraph g = mco::digraph_from_json(ss.str());
    if (g.q() != o.q)
      throw std::runtime_error("topology file has q=" + std::to_string(g.q()) +
                               " but --q is " + std::to_string(o.q));
    return mco::TopologySchedule::fixed(std::move(g));
  }
  return mco::TopologySchedule::fixed(
      mco::build_graph(mco::graph_kind_from_string(o.topology), o.q, o.er_p, o.topology_seed));
}

int resolve_workers(int requested) {
  return requested > 0 ? requested : mco::WorkerPool::default_workers();
}

// Writes the primary artifact (atomically for real paths) plus a sidecar with
// the wall-clock metadata, keeping the primary byte-stable for a fixed seed.
void emit(const std::string& output, const std::string& primary, const std::string& sidecar) {
  if (output == "-") {
    std::cout << primary;
    if (primary.empty() || primary.back() != '\n') std::cout << "\n";
    return;
  }
  mco::write_file_atomic(output, primary);
  if (!sidecar.empty()) mco::write_file_atomic(output + ".meta.json", sidecar);
  std::cerr << "wrote " << output << "\n";
}

std::string timestamp_now() {
  char buf[32];
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json complex_list(const std::vector<std::complex<double>>& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : v) arr.push_back({{"re", c.real()}, {"im", c.imag()}});
  return arr;
}

std::string matrix_csv(const Eigen::MatrixXd& M) {
  std::string out;
  char buf[64];
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", M(r, c));
      out += buf;
      out += c + 1 == M.cols() ? '\n' : ',';
    }
  }
  return out;
}

int cmd_run(const CommonOpts& o) {
  mco::ExperimentConfig cfg = to_config(o);
  mco::ObjectiveSpec obj = mco::get_objective(cfg.objective, cfg.params.n);
  obj.eval_cost_us = cfg.eval_cost_us;
  mco::TopologySchedule schedule = make_schedule(o);
  mco::WorkerPool pool(resolve_workers(o.workers));
  std::cerr << "run: " << cfg.objective << " n=" << cfg.params.n << " q=" << cfg.params.q
            << " algo=" << o.algo << " seed=" << o.seed << " workers=" << pool.workers()
            << "\n";
  mco::RunRecord rec = mco::run(cfg.params, obj, schedule, o.seed, &pool);
  rec.config = cfg.echo();
  std::cerr << "final best " << rec.final_best << " after " << rec.iterations_run
            << " iterations (" << rec.duration_seconds << " s)\n";

  nlohmann::json sidecar;
  sidecar["duration_seconds"] = rec.duration_seconds;
  sidecar["timestamp"] = timestamp_now();
  sidecar["workers"] = pool.workers();
  std::string primary =
      o.format == "csv" ? mco::run_record_to_csv(rec) : mco::run_record_to_json(rec);
  emit(o.output, primary, sidecar.dump(2));
  return 0;
}

int cmd_bench(const CommonOpts& o, int runs, std::uint64_t seeds_from,
              const std::string& sweep_workers) {
  mco::ExperimentConfig cfg = to_config(o);
  if (!sweep_workers.empty()) {
    std::vector<int> ws;
    std::istringstream ss(sweep_workers);
    std::string tok;
    while (std::getline(ss, tok, ',')) ws.push_back(std::stoi(tok));
    std::cerr << "scalability sweep over " << ws.size() << " worker counts\n";
    auto reports = mco::scalability_sweep(cfg, seeds_from, ws);
    if (o.format == "json") {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : reports) arr.push_back(nlohmann::json::parse(mco::timing_to_json(r)));
      emit(o.output, arr.dump(2), "");
    } else {
      emit(o.output, mco::timing_to_csv(reports), "");
    }
    return 0;
  }

  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < runs; ++i) seeds.push_back(seeds_from + static_cast<std::uint64_t>(i));
  mco::WorkerPool pool(resolve_workers(o.workers));
  std::cerr << "bench: " << cfg.objective << " x" << runs << " seeds from " << seeds_from
            << "\n";
  mco::StatsSummary s = mco::run_trials(cfg, seeds, &pool);
  std::cerr << "min " << s.min << " median " << s.median << " max " << s.max << "\n";
  emit(o.output, o.format == "csv" ? mco::stats_to_csv(s) : mco::stats_to_json(s), "");
  return 0;
}

int cmd_compare(const CommonOpts& o, int runs, std::uint64_t seeds_from) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < runs; ++i) seeds.push_back(seeds_from + static_cast<std::uint64_t>(i));
  mco::WorkerPool pool(resolve_workers(o.workers));

  CommonOpts om = o;
  om.algo = "mco";
  CommonOpts op = o;
  op.algo = "pso";
  mco::StatsSummary sm = mco::run_trials(to_config(om), seeds, &pool);
  mco::StatsSummary sp = mco::run_trials(to_config(op), seeds, &pool);

  if (o.format == "csv") {
    std::string csv = mco::stats_to_csv(sm);
    std::string second = mco::stats_to_csv(sp);
    csv += second.substr(second.find('\n') + 1);  // drop repeated header
    emit(o.output, csv, "");
  } else {
    nlohmann::json j;
    j["mco"] = nlohmann::json::parse(mco::stats_to_json(sm));
    j["pso"] = nlohmann::json::parse(mco::stats_to_json(sp));
    emit(o.output, j.dump(2), "");
  }
  std::cerr << "mco median " << sm.median << " vs pso median " << sp.median << "\n";
  return 0;
}

struct AnalyzeOpts {
  double mu = 0.3, eta = 0.2, kappa = 0.5, h = 0.1;
  int n = 1, q = 2, j = 1;
  std::string topology = "complete";
  double er_p = 0.5;
  std::uint64_t topology_seed = 0;
  std::string topology_file;
  double tol = 1e-8;
  std::string output = "-";
  std::string dump_prefix;
};

int cmd_analyze(const AnalyzeOpts& a) {
  Eigen::MatrixXd L;
  if (!a.topology_file.empty()) {
    std::ifstream in(a.topology_file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open topology file: " + a.topology_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    L = mco::digraph_from_json(ss.str()).laplacian();
  } else {
    L = mco::build_graph(mco::graph_kind_from_string(a.topology), a.q, a.er_p, a.topology_seed)
            .laplacian();
  }
  mco::CoeffSample c{a.eta, a.mu, a.kappa, a.h};
  mco::SystemMatrices sm = mco::build_system(c, L, a.n, a.j);
  Eigen::MatrixXd MA = sm.A + c.h * sm.Ac;
  Eigen::MatrixXd MB = sm.B + c.h * c.h * sm.Ac;

  mco::SpectralReport ra = mco::spectral_report(MA, a.tol);
  mco::SpectralReport rb = mco::spectral_report(MB, a.tol);
  mco::RankLemmaVerdict rank = mco::check_rank_lemma(sm);
  mco::TheoremVerdict v = mco::check_theorem_hypotheses(c, L, a.n, a.j, a.tol);

  auto report_json = [](const mco::SpectralReport& r) {
    nlohmann::json j;
    j["eigenvalues"] = complex_list(r.eigenvalues);
    j["rank"] = r.rank;
    j["kernel_dim"] = r.kernel_dim;
    j["has_zero_eigenvalue"] = r.has_zero_eigenvalue;
    j["zero_semisimple"] = r.zero_semisimple;
    j["tolerance"] = r.tolerance;
    return j;
  };

  nlohmann::json out;
  out["inputs"] = {{"mu", a.mu},   {"eta", a.eta}, {"kappa", a.kappa}, {"h", a.h},
                   {"n", a.n},     {"q", a.q},     {"j", a.j},         {"tol", a.tol}};
  out["spectral_report_A"] = report_json(ra);
  out["spectral_report_B"] = report_json(rb);
  out["rank_lemma"] = {{"case", rank.case_id},
                       {"expected_rank", rank.expected_rank},
                       {"rank", rank.rank_A},
                       {"rank_matches", rank.rank_matches},
                       {"kernel_residual", rank.kernel_residual},
                       {"kernels_match", rank.kernels_match},
                       {"kernel_structure_ok", rank.kernel_structure_ok}};
  out["theorem"] = {{"h1", v.h1},
                    {"h2", v.h2},
                    {"h3", v.h3},
                    {"h4", v.h4},
                    {"zero_semisimple_a", v.zero_semisimple_a},
                    {"zero_semisimple_b", v.zero_semisimple_b},
                    {"overall", v.overall()},
                    {"h_dagger_a", v.h_dagger_a},
                    {"h_dagger_b", v.h_dagger_b},
                    {"norm_step_a", v.norm_step_a},
                    {"norm_step_b", v.norm_step_b},
                    {"offenders_h1", complex_list(v.offenders_h1)},
                    {"offenders_h2", complex_list(v.offenders_h2)},
                    {"spurious_candidates_a", complex_list(v.spurious_a)},
                    {"spurious_candidates_b", complex_list(v.spurious_b)}};
  emit(a.output, out.dump(2), "");

  if (!a.dump_prefix.empty()) {
    mco::write_file_atomic(a.dump_prefix + "A.csv", matrix_csv(sm.A));
    mco::write_file_atomic(a.dump_prefix + "Ac.csv", matrix_csv(sm.Ac));
    mco::write_file_atomic(a.dump_prefix + "B.csv", matrix_csv(sm.B));
    std::cerr << "dumped matrices to " << a.dump_prefix << "{A,Ac,B}.csv\n";
  }
  return 0;
}

int cmd_list_objectives(const std::string& output) {
  std::string out = "name,default_n,lower,upper,best_value\n";
  for (const auto& e : mco::list_objectives()) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s,%d,%g,%g,%g\n", e.name.c_str(), e.default_n, e.lower,
                  e.upper, e.best_value.value_or(0.0));
    out += buf;
  }
  emit(output, out, "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiagent coordination optimization: swarm runs, benchmark statistics, "
               "and switched-system convergence analysis"};
  app.set_help_flag("--help", "Print help");
  app.require_subcommand(1);

  CommonOpts run_o;
  CLI::App* runc = app.add_subcommand("run", "One optimization run, RunRecord out");
  add_common_flags(runc, run_o);

  CommonOpts bench_o;
  int bench_runs = 20;
  std::uint64_t bench_from = 1;
  std::string sweep_workers;
  CLI::App* benchc = app.add_subcommand("bench", "Multi-seed statistics or timing sweeps");
  add_common_flags(benchc, bench_o);
  benchc->add_option("--runs", bench_runs, "Number of seeded runs")->capture_default_str();
  benchc->add_option("--seeds-from", bench_from, "First seed")->capture_default_str();
  benchc->add_option("--sweep-workers", sweep_workers,
                     "Comma list of worker counts: emit a timing report per count "
                     "instead of statistics");

  CommonOpts cmp_o;
  int cmp_runs = 20;
  std::uint64_t cmp_from = 1;
  CLI::App* cmpc = app.add_subcommand("compare", "Side-by-side MCO vs PSO statistics");
  add_common_flags(cmpc, cmp_o, /*with_algo=*/false);
  cmpc->add_option("--runs", cmp_runs, "Number of seeded runs")->capture_default_str();
  cmpc->add_option("--seeds-from", cmp_from, "First seed")->capture_default_str();

  AnalyzeOpts an;
  CLI::App* anc = app.add_subcommand(
      "analyze", "Spectral report and convergence-hypothesis verdict for one instance");
  anc->set_help_flag("--help", "Print help");
  anc->add_option("--mu", an.mu, "Position consensus gain")->capture_default_str();
  anc->add_option("--eta", an.eta, "Velocity consensus gain")->capture_default_str();
  anc->add_option("--kappa", an.kappa, "Network-best attraction gain")->capture_default_str();
  anc->add_option("--h", an.h, "Step size")->capture_default_str();
  anc->add_option("--n", an.n, "Dimension")->capture_default_str();
  anc->add_option("--q", an.q, "Agents")->capture_default_str();
  anc->add_option("--j", an.j, "Leader index, 1-based")->capture_default_str();
  anc->add_option("--topology", an.topology, "complete|ring|star|erdos-renyi")
      ->capture_default_str();
  anc->add_option("--er-p", an.er_p, "Edge probability for erdos-renyi")->capture_default_str();
  anc->add_option("--topology-seed", an.topology_seed, "Seed for random topologies")
      ->capture_default_str();
  anc->add_option("--topology-file", an.topology_file, "JSON graph file");
  anc->add_option("--tol", an.tol, "Numeric tolerance")->capture_default_str();
  anc->add_option("--output", an.output, "Output path, or - for stdout")->capture_default_str();
  anc->add_option("--dump-matrices", an.dump_prefix, "Prefix for A/Ac/B CSV dumps");

  std::string list_output = "-";
  CLI::App* listc = app.add_subcommand("list-objectives", "Objective registry table");
  listc->set_help_flag("--help", "Print help");
  listc->add_option("--output", list_output, "Output path, or - for stdout")
      ->capture_default_str();

  // Merge a --config file by appending its pairs as flags that were not
  // already given, so explicit flags keep precedence.
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!config_path.empty()) {
      mco::KeyValueConfig file = mco::KeyValueConfig::load(config_path);
      for (const auto& [key, value] : file.values()) {
        if (key == "config") continue;
        std::string flag = "--" + key;
        bool given = false;
        for (const std::string& a : args)
          if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        if (!given) args.push_back(flag + "=" + value);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (runc->parsed()) return cmd_run(run_o);
    if (benchc->parsed()) return cmd_bench(bench_o, bench_runs, bench_from, sweep_workers);
    if (cmpc->parsed()) return cmd_compare(cmp_o, cmp_runs, cmp_from);
    if (anc->parsed()) return cmd_analyze(an);
    if (listc->parsed()) return cmd_list_objectives(list_output);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
