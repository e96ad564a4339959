#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() /
                     ("mussel_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the CLI with the given arguments; stdout and stderr land in the output dir.
int run(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string("\"") + MUSSEL_TH_BIN + "\" " + args + " --out \"" +
                          out.string() + "\" > \"" + (out / "stdout.txt").string() + "\" 2> \"" +
                          (out / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("th-point prints the critical values") {
  const fs::path out = scratch("th");
  REQUIRE(run("th-point", out) == 0);
  const std::string s = slurp(out / "stdout.txt");
  CHECK(s.find("7.084102") != std::string::npos);
  CHECK(s.find("0.0531255") != std::string::npos);
  const json j = json::parse(slurp(out / "th_point.json"));
  CHECK(j["th_point"]["n2"] == 6);
  CHECK(j["config"]["model"]["r"] == 1.1);
  CHECK(fs::exists(out / "run.log"));
}

TEST_CASE("classify names the region, including the origin") {
  const fs::path out = scratch("classify");
  REQUIRE(run("classify --tau-eps 0 --d-eps 0", out) == 0);
  CHECK(slurp(out / "stdout.txt") == "origin / Turing–Hopf point\n");
  const std::pair<const char*, const char*> pts[] = {
      {"--tau-eps -0.5 --d-eps 0.01", "D1"},   {"--tau-eps 0.5 --d-eps 0.002", "D2"},
      {"--tau-eps 0.5 --d-eps -0.0005", "D3"}, {"--tau-eps 0.5 --d-eps -0.0009", "D4"},
      {"--tau-eps 0.5 --d-eps -0.002", "D5"},  {"--tau-eps -0.5 --d-eps -0.002", "D6"}};
  for (const auto& [args, label] : pts) {
    REQUIRE(run(std::string("classify ") + args, out) == 0);
    CHECK(slurp(out / "stdout.txt") == std::string(label) + "\n");
    const json j = json::parse(slurp(out / "classify.json"));
    CHECK(j["region"] == label);
    CHECK(j["unfolding_case"] == "Ia");
  }
}

TEST_CASE("sweep is reproducible and labels every grid point") {
  const fs::path a = scratch("sweep_a"), b = scratch("sweep_b");
  const std::string args =
      "sweep --sweep.tau_eps_steps 9 --sweep.d_eps_steps 17 --sweep.threads 3";
  REQUIRE(run(args, a) == 0);
  REQUIRE(run(args + " --sweep.threads=1", b) == 0);
  const std::string sa = slurp(a / "sweep.csv"), sb = slurp(b / "sweep.csv");
  CHECK(sa.rfind("# config: ", 0) == 0);
  std::istringstream in(sa);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "tau_eps,d_eps,region");
  int rows = 0;
  std::set<std::string> labels;
  while (std::getline(in, line)) {
    ++rows;
    labels.insert(line.substr(line.rfind(',') + 1));
  }
  CHECK(rows == 9 * 17);
  for (const char* l : {"D1", "D2", "D3", "D4", "D5", "D6"}) CHECK(labels.count(l) == 1);
  // Only the thread count differs between the two runs.
  CHECK(sa.substr(sa.find('\n')) == sb.substr(sb.find('\n')));
}

TEST_CASE("reruns are byte-identical") {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  REQUIRE(run("normal-form", a) == 0);
  REQUIRE(run("normal-form", b) == 0);
  CHECK(slurp(a / "normal_form.json") == slurp(b / "normal_form.json"));
  const json j = json::parse(slurp(a / "normal_form.json"));
  CHECK(j.contains("config"));
}

TEST_CASE("exit codes") {
  const fs::path out = scratch("codes");
  CHECK(run("th-point --model.r '\"x\"'", out) == 2);
  CHECK(slurp(out / "stderr.txt").find("config.model.r") != std::string::npos);
  CHECK(run("th-point --model.bogus 1", out) == 2);
  CHECK(run("nonsense", out) == 2);
  CHECK(run("th-point --config /nonexistent.json", out) == 2);
  CHECK(run("th-point --model.gamma 1000", out) == 3);
  CHECK(run("analyze --model.gamma 1000", out) == 0);
}

TEST_CASE("short simulation from the shipped config") {
  const fs::path out = scratch("sim");
  REQUIRE(run(std::string("simulate --config \"") + MUSSEL_CONFIG_DIR +
                  "/reference.json\" --simulate.horizon 40 --simulate.grid_points 32 "
                  "--simulate.csv_stride 1",
              out) == 0);
  const json j = json::parse(slurp(out / "summary.json"));
  CHECK(j["amplitude_prediction"]["region"] == "D5");
  const std::string csv = slurp(out / "trajectory.csv");
  CHECK(csv.rfind("# config: ", 0) == 0);
  CHECK(csv.find("t,x,m,a\n") != std::string::npos);
}
