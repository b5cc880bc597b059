#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() { return RANDGAS_CLI_PATH; }

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "randgas_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Runs the CLI with the given argument string; stdout/stderr land next to
// the outputs so tests can inspect them. Returns the process exit code.
int run_cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = "\"" + cli_path() + "\" " + args + " > \"" +
                          (dir / "stdout.txt").string() + "\" 2> \"" +
                          (dir / "stderr.txt").string() + "\"";
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE_MESSAGE(in.good(), "missing file: ", p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

int count_lines_starting(const std::string& text, char c) {
  int n = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] == c) ++n;
  return n;
}

int count_data_lines(const std::string& text) {
  int n = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++n;
  return n;
}

} // namespace

TEST_CASE("usage errors map to the documented exit codes") {
  const fs::path dir = fresh_dir("usage");
  CHECK(run_cli("--help", dir) == 0);
  CHECK(run_cli("", dir) == 2);                      // subcommand required
  CHECK(run_cli("frobnicate", dir) == 2);            // unknown subcommand
  CHECK(run_cli("simulate --output \"" + dir.string() + "\"", dir) == 2);
  CHECK(run_cli("simulate --preset no-such-preset --output \"" +
                    dir.string() + "\"",
                dir) == 2);
  CHECK(run_cli("simulate --config \"" + (dir / "absent.json").string() +
                    "\" --output \"" + dir.string() + "\"",
                dir) == 2);
  const std::string err = read_file(dir / "stderr.txt");
  CHECK(err.find("absent.json") != std::string::npos);
}

TEST_CASE("simulation reruns are byte-identical and seed-sensitive") {
  const fs::path a = fresh_dir("rerun_a");
  const fs::path b = fresh_dir("rerun_b");
  const fs::path c = fresh_dir("rerun_c");
  const fs::path d = fresh_dir("rerun_d");
  REQUIRE(run_cli("simulate --preset smoke --threads 1 --output \"" +
                      a.string() + "\"",
                  a) == 0);
  REQUIRE(run_cli("simulate --preset smoke --threads 1 --output \"" +
                      b.string() + "\"",
                  b) == 0);
  REQUIRE(run_cli("simulate --preset smoke --threads 4 --output \"" +
                      c.string() + "\"",
                  c) == 0);
  REQUIRE(run_cli("simulate --preset smoke --threads 1 --seed 99 --output \"" +
                      d.string() + "\"",
                  d) == 0);

  const std::string states_a = read_file(a / "states.txt");
  CHECK(states_a == read_file(b / "states.txt"));
  CHECK(read_file(a / "summary.txt") == read_file(b / "summary.txt"));
  CHECK(read_file(a / "events.txt") == read_file(b / "events.txt"));
  // thread count must not change any output byte
  CHECK(states_a == read_file(c / "states.txt"));
  CHECK(read_file(a / "events.txt") == read_file(c / "events.txt"));
  // a different seed must
  CHECK(states_a != read_file(d / "states.txt"));

  const json man_a = json::parse(read_file(a / "manifest.json"));
  const json man_b = json::parse(read_file(b / "manifest.json"));
  CHECK(man_a.at("config_digest") == man_b.at("config_digest"));
  CHECK(man_a.at("command") == "simulate");
  CHECK(man_a.at("outputs").size() == 3);
}

TEST_CASE("zero collision rate yields an event-free run") {
  const fs::path dir = fresh_dir("lambda_zero");
  REQUIRE(run_cli("simulate --preset lambda-zero --output \"" + dir.string() +
                      "\"",
                  dir) == 0);
  CHECK(count_data_lines(read_file(dir / "events.txt")) == 0);
  const std::string summary = read_file(dir / "summary.txt");
  CHECK(summary.find("total_events 0") != std::string::npos);
}

TEST_CASE("analysis consumes simulation output end to end") {
  const fs::path sim = fresh_dir("pipe_sim");
  REQUIRE(run_cli("simulate --preset smoke --output \"" + sim.string() + "\"",
                  sim) == 0);

  const fs::path ana = fresh_dir("pipe_ana");
  write_file(ana / "analyze.json",
             "{\"states\": \"" + (sim / "states.txt").string() +
                 "\", \"sigma\": 1.0, \"alpha\": 0.1, \"g_bins\": 12}");
  REQUIRE(run_cli("analyze --config \"" + (ana / "analyze.json").string() +
                      "\" --output \"" + ana.string() + "\"",
                  ana) == 0);
  const std::string rows = read_file(ana / "analysis.txt");
  CHECK(rows.find("\noverlap ") != std::string::npos);
  CHECK(rows.find("\nrelax ") != std::string::npos);
  int g_rows = 0;
  std::istringstream in(rows);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("gr ", 0) == 0) ++g_rows;
  CHECK(g_rows == 12);
}

TEST_CASE("analysis rejects missing or malformed state files") {
  const fs::path dir = fresh_dir("bad_states");
  write_file(dir / "missing.json",
             "{\"states\": \"" + (dir / "nope.txt").string() + "\"}");
  CHECK(run_cli("analyze --config \"" + (dir / "missing.json").string() +
                    "\" --output \"" + dir.string() + "\"",
                dir) == 2);

  // a states file without the box header is rejected
  write_file(dir / "noheader.txt",
             "0 0 0.0 0 1 1 1 0.1 0.2 0.3\n0 0 0.0 1 2 2 2 -0.1 -0.2 -0.3\n");
  write_file(dir / "noheader.json",
             "{\"states\": \"" + (dir / "noheader.txt").string() + "\"}");
  CHECK(run_cli("analyze --config \"" + (dir / "noheader.json").string() +
                    "\" --output \"" + dir.string() + "\"",
                dir) == 2);
}

TEST_CASE("moment verification passes honestly and fails when sabotaged") {
  const fs::path ok = fresh_dir("moments_ok");
  // zero-gradient points make every identity exactly zero on both sides,
  // so a small sample count suffices for the plumbing check
  write_file(ok / "cfg.json",
             "{\"point_mode\": \"zero_gradient\", \"n_samples\": 20000,"
             " \"n_points\": 2}");
  REQUIRE(run_cli("verify-moments --config \"" + (ok / "cfg.json").string() +
                      "\" --output \"" + ok.string() + "\"",
                  ok) == 0);
  const std::string rows = read_file(ok / "moment_reports.jsonl");
  CHECK(count_lines_starting(rows, '{') == 16); // 8 identities x 2 points
  std::istringstream in(rows);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] != '{') continue;
    const json row = json::parse(line);
    CHECK(row.at("pass") == true);
    CHECK(row.at("n_samples") == 20000);
    CHECK(row.at("identity").get<std::string>().rfind("MI", 0) == 0);
    break;
  }

  // the negative control perturbs the reference values by 2%; with a 0.5%
  // gate the run must report failure
  const fs::path bad = fresh_dir("moments_bad");
  write_file(bad / "cfg.json",
             "{\"n_samples\": 200000, \"n_points\": 1, \"seed\": 77,"
             " \"tolerance\": 0.005, \"corrupt_closed_form\": true}");
  CHECK(run_cli("verify-moments --config \"" + (bad / "cfg.json").string() +
                    "\" --output \"" + bad.string() + "\"",
                bad) == 1);
}

TEST_CASE("hydro subcommand writes snapshots and error metrics") {
  const fs::path uni = fresh_dir("hydro_uniform");
  REQUIRE(run_cli("hydro --preset uniform --output \"" + uni.string() + "\"",
                  uni) == 0);
  const std::string snap = read_file(uni / "snapshot_000.txt");
  int n_rows = 0;
  std::istringstream in(snap);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++n_rows;
    std::istringstream ls(line);
    double x, rho, u, theta, p;
    REQUIRE((ls >> x >> rho >> u >> theta >> p));
    // a uniform periodic state is an exact fixed point
    CHECK(rho == 1.0);
    CHECK(u == 0.3);
    CHECK(theta == 1.0);
    CHECK(p == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(n_rows == 64);

  const fs::path sod = fresh_dir("hydro_sod");
  REQUIRE(run_cli("hydro --preset sod-dilute --output \"" + sod.string() +
                      "\"",
                  sod) == 0);
  const std::string l1_text = read_file(sod / "l1_error.txt");
  const auto pos = l1_text.find("l1_rho ");
  REQUIRE(pos != std::string::npos);
  const double l1 = std::stod(l1_text.substr(pos + 7));
  CHECK(l1 < 0.02);
  CHECK(read_file(sod / "stdout.txt").find("sod-dilute L1(rho)") !=
        std::string::npos);
}
