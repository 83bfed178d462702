#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  fs::path out = fs::temp_directory_path() / "mco_cli_out.txt";
  std::string cmd = std::string(MCO_CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
                    out.string() + ".err";
  int rc = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WEXITSTATUS(rc);
  r.out = slurp(out);
  return r;
}

}  // namespace

TEST_CASE("list-objectives prints the registry table") {
  CliResult r = run_cli("list-objectives");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("name,default_n,lower,upper,best_value") == 0);
  CHECK(r.out.find("sphere,") != std::string::npos);
  CHECK(r.out.find("levy-standard,") != std::string::npos);
}

TEST_CASE("run smoke: json record on stdout, byte-identical across invocations") {
  std::string args =
      "run --objective sphere --n 4 --q 6 --iters 60 --seed 7 --algo mco --topology complete";
  CliResult a = run_cli(args + " --workers 2");
  REQUIRE(a.exit_code == 0);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["algorithm"] == "mco");
  CHECK(j["objective"] == "sphere");
  CHECK(j["seed"] == 7);
  CHECK(j["trace"].is_array());
  CHECK(j.count("duration_seconds") == 0);

  CliResult b = run_cli(args + " --workers 1");
  CHECK(a.out == b.out);
}

TEST_CASE("run writes artifact plus metadata sidecar") {
  fs::path dir = fs::temp_directory_path() / "mco_cli_case";
  fs::create_directories(dir);
  fs::path rec = dir / "rec.json";
  CliResult r = run_cli("run --objective sphere --n 2 --q 4 --iters 10 --seed 3 --output " +
                        rec.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(rec));
  CHECK(fs::exists(dir / "rec.json.meta.json"));
  auto meta = nlohmann::json::parse(slurp(dir / "rec.json.meta.json"));
  CHECK(meta.count("duration_seconds") == 1);
  fs::remove_all(dir);
}

TEST_CASE("bench emits the documented csv schema") {
  CliResult r = run_cli(
      "bench --objective sphere --n 2 --q 5 --iters 30 --runs 4 --seeds-from 1 --format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("objective,algorithm,runs,min,max,median,average\n") == 0);
  CHECK(r.out.find("sphere,mco,4,") != std::string::npos);
}

TEST_CASE("compare runs both algorithms") {
  CliResult r =
      run_cli("compare --objective sphere --n 2 --q 5 --iters 30 --runs 3 --seeds-from 1");
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["mco"]["runs"] == 3);
  CHECK(j["pso"]["runs"] == 3);
  CHECK(j["mco"]["config"]["algorithm"] == "mco");
  CHECK(j["pso"]["config"]["algorithm"] == "pso");
}

TEST_CASE("analyze reports the hypothesis verdict") {
  CliResult r = run_cli(
      "analyze --mu 0.3 --eta 0.2 --kappa 0.5 --h 0.1 --n 1 --q 2 --topology complete --j 1");
  CHECK(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["theorem"]["h1"] == true);
  CHECK(j["theorem"].count("h2") == 1);
  CHECK(j["theorem"].count("h3") == 1);
  CHECK(j["theorem"].count("h4") == 1);
  CHECK(j["spectral_report_A"]["rank"] == 4);
  CHECK(j["rank_lemma"]["rank_matches"] == true);
}

TEST_CASE("topology file flag") {
  fs::path g = fs::temp_directory_path() / "mco_graph.json";
  std::ofstream(g) << R"({"q": 4, "directed": false, "edges": [[0,1],[1,2],[2,3],[3,0]]})";
  CliResult r = run_cli("run --objective sphere --n 2 --q 4 --iters 5 --seed 1 --topology-file " +
                        g.string());
  CHECK(r.exit_code == 0);
  // mismatched q is a runtime error
  CliResult bad = run_cli("run --objective sphere --n 2 --q 5 --iters 5 --seed 1 --topology-file " +
                          g.string());
  CHECK(bad.exit_code == 1);
  fs::remove(g);
}

TEST_CASE("config file feeds defaults, flags override") {
  fs::path cfg = fs::temp_directory_path() / "mco_case.conf";
  std::ofstream(cfg) << "objective = sphere\nn = 3\nq = 5\niters = 12\nseed = 9\n";
  CliResult r = run_cli("run --config " + cfg.string() + " --seed 11");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["n"] == 3);
  CHECK(j["seed"] == 11);  // flag beats the file
  fs::remove(cfg);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli("run --no-such-flag").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  // bad combination: rosenbrock needs n >= 2
  CHECK(run_cli("run --objective rosenbrock --n 1 --q 4 --iters 5").exit_code == 2);
  CHECK(run_cli("run --objective unknown --n 2 --q 4 --iters 5").exit_code == 2);
}

TEST_CASE("every subcommand documents its flags") {
  for (const char* sub : {"run", "bench", "compare", "analyze", "list-objectives"}) {
    CliResult r = run_cli(std::string(sub) + " --help");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("--output") != std::string::npos);
  }
  CliResult r = run_cli("run --help");
  for (const char* flag : {"--objective", "--n", "--q", "--topology", "--seed", "--iters",
                           "--algo", "--workers", "--h", "--coeff-mode", "--omega",
                           "--p-update", "--config", "--format", "--eval-cost-us"}) {
    CHECK(r.out.find(flag) != std::string::npos);
  }
}

TEST_CASE("csv run export and matrix dumps") {
  CliResult r = run_cli("run --objective sphere --n 2 --q 4 --iters 8 --seed 2 --format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("iter,best_value\n") == 0);

  fs::path dir = fs::temp_directory_path() / "mco_dump";
  fs::create_directories(dir);
  std::string prefix = (dir / "m_").string();
  CliResult a = run_cli("analyze --mu 0.2 --eta 0.1 --kappa 0.4 --h 0.5 --n 1 --q 2 "
                        "--dump-matrices " + prefix + " --output " + (dir / "rep.json").string());
  CHECK(a.exit_code == 0);
  CHECK(fs::exists(dir / "m_A.csv"));
  CHECK(fs::exists(dir / "m_Ac.csv"));
  CHECK(fs::exists(dir / "m_B.csv"));
  // 5x5 matrix: five comma-separated entries per line, five lines
  std::string csv = slurp(dir / "m_A.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  fs::remove_all(dir);
}

TEST_CASE("worker sweep emits one timing row per count") {
  CliResult r = run_cli(
      "bench --objective sphere --n 2 --q 6 --iters 20 --seeds-from 3 --sweep-workers 1,2 "
      "--format csv");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("workers,t_serial,t_parallel,saved_pct,speedup,eval_cost_us\n") == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);
}

TEST_CASE("worker count env variable is honored") {
  fs::path out = fs::temp_directory_path() / "mco_env_out.txt";
  std::string cmd = std::string("SWARM_OPT_WORKERS=5 ") + MCO_CLI_PATH +
                    " run --objective sphere --n 2 --q 4 --iters 3 --seed 1 > " + out.string() +
                    " 2> " + out.string() + ".err";
  REQUIRE(std::system(cmd.c_str()) == 0);
  std::string err = slurp(out.string() + ".err");
  CHECK(err.find("workers=5") != std::string::npos);
}

TEST_CASE("algorithm alias flag matches the config schema key") {
  CliResult r = run_cli("run --objective sphere --n 2 --q 4 --iters 5 --seed 1 --algorithm pso");
  REQUIRE(r.exit_code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["algorithm"] == "pso");
}
