// End-to-end checks of the installed CLI binary: exit codes, output files,
// and byte-level determinism. The binary path comes from the build system.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const fs::path kScratch = fs::path("cli_scratch");

int run_cli(const std::string& args, const std::string& log_name = "log") {
  const std::string cmd = std::string(AOILQ_CLI_PATH) + " " + args + " >" +
                          (kScratch / (log_name + ".out")).string() + " 2>" +
                          (kScratch / (log_name + ".err")).string();
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

std::string scalar_config(const std::string& extra_sections = "") {
  return R"({
  "game": {
    "A": [[0.5]], "B1": [[1.0]], "B2": [[0.5]],
    "Q": [[4.0]], "R1": [[1.0]], "R2": [[0.5]]
  },
  "sensing": {"b": 0.4, "h": 0.1},
  "sim": {"horizon_T": 20.0, "dt": 0.01, "seed": 3})" +
         extra_sections + "\n}\n";
}

struct ScratchReset {
  ScratchReset() {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
  }
};

}  // namespace

TEST_CASE("solve writes the scalar solution") {
  ScratchReset reset;
  const fs::path cfg = kScratch / "config.json";
  write_file(cfg, scalar_config());

  const int rc = run_cli("solve --config " + cfg.string() + " --output " +
                         (kScratch / "out").string());
  CHECK(rc == 0);
  const ordered_json sol =
      ordered_json::parse(slurp(kScratch / "out" / "solution.json"));
  CHECK(sol["P"][0][0].get<double>() == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(sol["J_star"].get<double>() == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(sol["residual_norm"].get<double>() <= 1e-9);
}

TEST_CASE("config errors exit 1 with a diagnostic") {
  ScratchReset reset;

  SUBCASE("malformed json") {
    const fs::path cfg = kScratch / "broken.json";
    write_file(cfg, "{ not json");
    CHECK(run_cli("solve --config " + cfg.string(), "broken") == 1);
    CHECK(slurp(kScratch / "broken.err").find("parse error") !=
          std::string::npos);
  }

  SUBCASE("R1 not positive definite") {
    const fs::path cfg = kScratch / "bad_r1.json";
    std::string body = scalar_config();
    body.replace(body.find("\"R1\": [[1.0]]"), 13, "\"R1\": [[-1.0]]");
    write_file(cfg, body);
    CHECK(run_cli("solve --config " + cfg.string(), "bad_r1") == 1);
    CHECK(slurp(kScratch / "bad_r1.err").find("R1 must be positive definite") !=
          std::string::npos);
  }

  SUBCASE("unknown key") {
    const fs::path cfg = kScratch / "unknown.json";
    write_file(cfg, R"({"game": {"A": [[0.5]], "B1": [[1.0]], "B2": [[0.5]],
      "Q": [[4.0]], "R1": [[1.0]], "R2": [[0.5]], "typo_key": 1}})");
    CHECK(run_cli("solve --config " + cfg.string(), "unknown") == 1);
    CHECK(slurp(kScratch / "unknown.err").find("typo_key") !=
          std::string::npos);
  }

  SUBCASE("missing config file") {
    CHECK(run_cli("solve --config does_not_exist.json", "missing") == 1);
  }
}

TEST_CASE("ill-posed game exits 2") {
  ScratchReset reset;
  const fs::path cfg = kScratch / "illposed.json";
  write_file(cfg, R"({"game": {"A": [[0.5]], "B1": [[0.0]], "B2": [[1.0]],
    "Q": [[1.0]], "R1": [[1.0]], "R2": [[1.0]]}})");
  CHECK(run_cli("solve --config " + cfg.string(), "illposed") == 2);
}

TEST_CASE("policy emits the bracket and optional dumps") {
  ScratchReset reset;
  const fs::path cfg = kScratch / "config.json";
  write_file(cfg, scalar_config());

  const int rc = run_cli("policy --config " + cfg.string() + " --output " +
                         (kScratch / "pol").string() +
                         " --dump-age-costs --dump-vi");
  CHECK(rc == 0);
  const ordered_json policy =
      ordered_json::parse(slurp(kScratch / "pol" / "policy.json"));
  CHECK(policy["b_2"].get<double>() <= 0.4 + 1e-12);
  CHECK(policy["b_1"].get<double>() >= 0.4 - 1e-12);
  CHECK(policy["mode"].get<std::string>() == "deterministic");
  CHECK(policy["eta_1"].get<int>() == 25);
  for (const char* key :
       {"lambda_star", "eta_1", "eta_2", "vartheta", "b_1", "b_2", "V_bar",
        "mode"}) {
    CHECK(policy.contains(key));
  }

  const std::string ages = slurp(kScratch / "pol" / "age_costs.csv");
  CHECK(ages.rfind("delta,u\n0,0\n", 0) == 0);
  const std::string vi = slurp(kScratch / "pol" / "value_iteration.csv");
  CHECK(vi.rfind("delta,value,action\n", 0) == 0);
}

TEST_CASE("bisection tolerance does not move the integer thresholds") {
  ScratchReset reset;
  const fs::path coarse_cfg = kScratch / "coarse.json";
  const fs::path fine_cfg = kScratch / "fine.json";
  // Fractional 1/(b h) so the policy actually randomizes.
  const std::string base = R"({
  "game": {
    "A": [[0.5]], "B1": [[1.0]], "B2": [[0.5]],
    "Q": [[4.0]], "R1": [[1.0]], "R2": [[0.5]]
  },
  "sensing": {"b": 0.3, "h": 0.1},
  "mdp": {"bisection_tol": %TOL%}
})";
  std::string coarse = base, fine = base;
  coarse.replace(coarse.find("%TOL%"), 5, "1e-4");
  fine.replace(fine.find("%TOL%"), 5, "1e-6");
  write_file(coarse_cfg, coarse);
  write_file(fine_cfg, fine);

  CHECK(run_cli("policy --config " + coarse_cfg.string() + " --output " +
                (kScratch / "coarse_out").string()) == 0);
  CHECK(run_cli("policy --config " + fine_cfg.string() + " --output " +
                (kScratch / "fine_out").string()) == 0);
  const ordered_json a =
      ordered_json::parse(slurp(kScratch / "coarse_out" / "policy.json"));
  const ordered_json b =
      ordered_json::parse(slurp(kScratch / "fine_out" / "policy.json"));
  CHECK(a["eta_1"] == b["eta_1"]);
  CHECK(a["eta_2"] == b["eta_2"]);
  CHECK(a["mode"] == b["mode"]);
  CHECK(a["vartheta"].get<double>() ==
        doctest::Approx(b["vartheta"].get<double>()).epsilon(1e-12));
}

TEST_CASE("simulate reruns are byte-identical and seeds matter") {
  ScratchReset reset;
  const fs::path cfg = kScratch / "config.json";
  write_file(cfg, scalar_config());

  CHECK(run_cli("simulate --config " + cfg.string() + " --output " +
                (kScratch / "a").string()) == 0);
  CHECK(run_cli("simulate --config " + cfg.string() + " --output " +
                (kScratch / "b").string()) == 0);
  CHECK(slurp(kScratch / "a" / "trajectory.csv") ==
        slurp(kScratch / "b" / "trajectory.csv"));
  CHECK(slurp(kScratch / "a" / "summary.json") ==
        slurp(kScratch / "b" / "summary.json"));

  CHECK(run_cli("simulate --config " + cfg.string() + " --seed 99 --output " +
                (kScratch / "c").string()) == 0);
  CHECK(slurp(kScratch / "a" / "trajectory.csv") !=
        slurp(kScratch / "c" / "trajectory.csv"));

  // The input config is never mutated.
  CHECK(slurp(cfg) == scalar_config());
}

TEST_CASE("sweep writes one row per axis value plus a manifest") {
  ScratchReset reset;
  const fs::path cfg = kScratch / "config.json";
  write_file(cfg, scalar_config(R"(,
  "sweep": {"h_values": [0.5, 0.25], "seeds_per_point": 2, "horizon_T": 20.0})"));

  CHECK(run_cli("sweep --axis h --config " + cfg.string() + " --output " +
                (kScratch / "sw").string()) == 0);
  const std::string csv = slurp(kScratch / "sw" / "sweep_h.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
  CHECK(csv.rfind("axis_value,mean_cost,stderr,n_seeds,J_star\n", 0) == 0);
  const ordered_json manifest =
      ordered_json::parse(slurp(kScratch / "sw" / "sweep_h_manifest.json"));
  CHECK(manifest["axis"].get<std::string>() == "h");
  CHECK(manifest["game"].contains("Sigma0"));
}

TEST_CASE("unwritable output directory exits 1") {
  ScratchReset reset;
  const fs::path cfg = kScratch / "config.json";
  write_file(cfg, scalar_config());
  const fs::path blocker = kScratch / "blocker";
  write_file(blocker, "plain file\n");

  const int rc = run_cli("solve --config " + cfg.string() + " --output " +
                         (blocker / "nested").string(), "unwritable");
  CHECK(rc == 1);
}
