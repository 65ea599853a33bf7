#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("sppc_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

// Runs the CLI with stderr captured to a file and returns the exit status.
int run(const std::string& args, const fs::path& err) {
  const std::string cmd =
      std::string("\"") + SPPC_CLI_PATH + "\" " + args + " >/dev/null 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Drops the trailing design_time_us column, which is wall-clock data.
std::string without_timing(const std::string& csv) {
  std::string out;
  for (const auto& l : lines(csv)) out += l.substr(0, l.rfind(',')) + "\n";
  return out;
}

const std::string kScalar = std::string(SPPC_CONFIG_DIR) + "/scalar.json";

}  // namespace

TEST_CASE("synthesize writes a manifest for the scalar plant") {
  TempDir dir("syn");
  CHECK(run("synthesize --config \"" + kScalar + "\" --out \"" + dir.path.string() + "\"",
            dir.path / "err.txt") == 0);
  const std::string manifest = slurp(dir.path / "manifest.json");
  CHECK(manifest.find("\"ok\": true") != std::string::npos);
  CHECK(manifest.find("\"rho\": 0.0") != std::string::npos);
}

TEST_CASE("unreachable plant exits with the config code") {
  TempDir dir("unreach");
  write(dir.path / "cfg.json", R"({"plant": {"A": [[1, 0], [0, 2]], "B": [1, 0]}})");
  CHECK(run("synthesize --config \"" + (dir.path / "cfg.json").string() + "\" --out \"" +
                dir.path.string() + "\"",
            dir.path / "err.txt") == 1);
  const std::string err = slurp(dir.path / "err.txt");
  CHECK(err.find("\"exit_code\": 1") != std::string::npos);
  CHECK(err.find("plant not reachable") != std::string::npos);
}

TEST_CASE("malformed input and usage errors exit 1") {
  TempDir dir("bad");
  write(dir.path / "cfg.json", "{\"plant\": ");
  CHECK(run("simulate --config \"" + (dir.path / "cfg.json").string() + "\" --out \"" +
                dir.path.string() + "\"",
            dir.path / "err.txt") == 1);
  CHECK(slurp(dir.path / "err.txt").find("not valid JSON") != std::string::npos);
  CHECK(run("simulate", dir.path / "err.txt") == 1);
  CHECK(run("frobnicate --config x", dir.path / "err.txt") == 1);
  CHECK(run("montecarlo --config \"" + kScalar + "\" --threads 0", dir.path / "err.txt") == 1);
  CHECK(run("simulate --config /nonexistent.json", dir.path / "err.txt") == 1);
}

TEST_CASE("simulate with zero steps writes the header and the initial row") {
  TempDir dir("zero");
  write(dir.path / "cfg.json",
        R"({"plant": {"A": [[2.0]], "B": [1.0]}, "N": 2, "x0": [3.0], "steps": 0})");
  CHECK(run("simulate --config \"" + (dir.path / "cfg.json").string() + "\" --out \"" +
                dir.path.string() + "\"",
            dir.path / "err.txt") == 0);
  const auto rows = lines(slurp(dir.path / "trace.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "k,norm_x,l0_u,dropped,input,design_time_us");
  CHECK(rows[1] == "0,3,0,0,0,0");
}

TEST_CASE("simulate is deterministic and honours overrides") {
  TempDir a("det_a"), b("det_b"), c("det_c");
  const std::string cfg = std::string(SPPC_CONFIG_DIR) + "/unstable4_n10.json";
  CHECK(run("simulate --config \"" + cfg + "\" --out \"" + a.path.string() + "\"", a.path / "e") == 0);
  CHECK(run("simulate --config \"" + cfg + "\" --out \"" + b.path.string() + "\"", b.path / "e") == 0);
  CHECK(run("simulate --config \"" + cfg + "\" --seed 2 --solver omp --out \"" + c.path.string() + "\"",
            c.path / "e") == 0);
  const std::string ta = slurp(a.path / "trace.csv");
  CHECK(lines(ta).size() == 102);
  CHECK(without_timing(ta) == without_timing(slurp(b.path / "trace.csv")));
  CHECK(without_timing(slurp(a.path / "trace_l1.csv")) == without_timing(slurp(b.path / "trace_l1.csv")));
  CHECK(without_timing(ta) != without_timing(slurp(c.path / "trace.csv")));
  CHECK_FALSE(fs::exists(c.path / "trace_l1.csv"));
}

TEST_CASE("montecarlo with one trial") {
  TempDir dir("mc");
  CHECK(run("montecarlo --config \"" + kScalar + "\" --trials 1 --out \"" + dir.path.string() + "\"",
            dir.path / "err.txt") == 0);
  const auto rows = lines(slurp(dir.path / "aggregate.csv"));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == "k,mean_norm_x_omp,mean_l0_omp");
  CHECK(rows[1] == "0,1,1");
  const std::string summary = slurp(dir.path / "summary.json");
  CHECK(summary.find("\"trials\": 1") != std::string::npos);
  CHECK(summary.find("\"base_seed\": 7") != std::string::npos);
}
