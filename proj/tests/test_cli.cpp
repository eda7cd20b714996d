#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

std::string binary() {
  const char* env = std::getenv("ASH_BIN");
  REQUIRE_MESSAGE(env != nullptr, "ASH_BIN must point at the CLI binary");
  return env;
}

int run(const std::string& args) {
  const std::string cmd = binary() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ash-cli-test-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::size_t line_count(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
  CHECK(run("generate --users 0") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("sweep --axis users") == 1);  // no values
}

TEST_CASE("generate: row count, determinism, config file override") {
  TempDir dir;
  const std::string base = "generate --users 20 --days 2 --towers 400 --world 4000 --seed 3";
  CHECK(run(base + " --out-trajectories " + dir.file("a.csv") +
            " --out-towers " + dir.file("ta.csv")) == 0);
  // header + 20 users x 96 slots
  CHECK(line_count(dir.file("a.csv")) == 1 + 20 * 96);

  CHECK(run(base + " --out-trajectories " + dir.file("b.csv") +
            " --out-towers " + dir.file("tb.csv")) == 0);
  CHECK(testsupport::read_file(dir.file("a.csv")) ==
        testsupport::read_file(dir.file("b.csv")));
  CHECK(testsupport::read_file(dir.file("ta.csv")) ==
        testsupport::read_file(dir.file("tb.csv")));

  // The same run driven by a config file, with one value overridden by a flag.
  {
    std::ofstream conf(dir.file("run.conf"));
    conf << "users = 20\ndays = 2\ntowers = 400\nworld = 4000\nseed = 1\n";
  }
  CHECK(run("generate --config " + dir.file("run.conf") + " --seed 3" +
            " --out-trajectories " + dir.file("c.csv") +
            " --out-towers " + dir.file("tc.csv")) == 0);
  CHECK(testsupport::read_file(dir.file("c.csv")) ==
        testsupport::read_file(dir.file("a.csv")));
}

TEST_CASE("pipeline: aggregate conserves users, recovery of one user is exact") {
  TempDir dir;
  REQUIRE(run("generate --users 1 --days 2 --towers 300 --world 4000 --seed 5"
              " --out-trajectories " + dir.file("truth.csv") +
              " --out-towers " + dir.file("towers.csv")) == 0);
  REQUIRE(run("aggregate --trajectories " + dir.file("truth.csv") +
              " --towers " + dir.file("towers.csv") +
              " --out " + dir.file("agg.csv")) == 0);
  REQUIRE(run("recover --aggregate " + dir.file("agg.csv") +
              " --towers " + dir.file("towers.csv") +
              " --out " + dir.file("rec.csv")) == 0);
  REQUIRE(run("evaluate --recovered " + dir.file("rec.csv") +
              " --truth " + dir.file("truth.csv") +
              " --towers " + dir.file("towers.csv") +
              " --out-metrics " + dir.file("metrics.csv") +
              " --out-cdf " + dir.file("cdf.csv")) == 0);

  // A single user's aggregate pins the whole trajectory: accuracy 1.
  std::ifstream metrics(dir.file("metrics.csv"));
  std::string line;
  bool found = false;
  while (std::getline(metrics, line))
    if (line.rfind("accuracy,full,", 0) == 0) {
      found = true;
      CHECK(line.substr(line.rfind(',') + 1) == "1");
    }
  CHECK(found);
}

TEST_CASE("aggregate: --perturb 0 is a no-op") {
  TempDir dir;
  REQUIRE(run("generate --users 15 --days 1 --towers 300 --world 4000 --seed 2"
              " --out-trajectories " + dir.file("t.csv") +
              " --out-towers " + dir.file("m.csv")) == 0);
  REQUIRE(run("aggregate --trajectories " + dir.file("t.csv") +
              " --towers " + dir.file("m.csv") +
              " --out " + dir.file("plain.csv")) == 0);
  REQUIRE(run("aggregate --trajectories " + dir.file("t.csv") +
              " --towers " + dir.file("m.csv") + " --perturb 0.0 --out " +
              dir.file("noisy.csv")) == 0);
  CHECK(testsupport::read_file(dir.file("plain.csv")) ==
        testsupport::read_file(dir.file("noisy.csv")));
}

TEST_CASE("data errors exit with code 2") {
  TempDir dir;
  {
    std::ofstream bad(dir.file("bad.csv"));
    bad << "user_id,slot,tower_id\n0,0,12345\n";
  }
  {
    std::ofstream towers(dir.file("towers.csv"));
    towers << "tower_id,x_m,y_m,base_station_id,district_id\n0,0,0,0,0\n";
  }
  CHECK(run("aggregate --trajectories " + dir.file("bad.csv") +
            " --towers " + dir.file("towers.csv") +
            " --out " + dir.file("out.csv")) == 2);
}
