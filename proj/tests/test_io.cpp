#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "ash/io.hpp"
#include "support.hpp"

using namespace ash;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ash-io-test-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("tower map round trip") {
  TempDir dir;
  const TowerMap map = testsupport::collinear_map();
  io::store_tower_map(map, dir.file("towers.csv"));
  const TowerMap back = io::load_tower_map(dir.file("towers.csv"));
  REQUIRE(back.size() == map.size());
  for (const Tower& t : map.towers()) {
    const Tower& b = back.tower(t.id);
    CHECK(b.x == t.x);
    CHECK(b.y == t.y);
    CHECK(b.base_station_id == t.base_station_id);
    CHECK(b.district_id == t.district_id);
  }
}

TEST_CASE("trajectory round trip: 2 users, 4 slots") {
  TempDir dir;
  TrajectorySet set;
  set.grid.slot_seconds = 21600;  // 4 slots per day
  set.grid.slots_per_day = 4;
  set.grid.num_days = 1;
  set.tower_map = testsupport::collinear_map();
  set.trajectories.push_back({0, {0, 0, 1, 2}});
  set.trajectories.push_back({1, {2, 2, 2, 2}});

  io::store_trajectories(set, dir.file("t.csv"));
  const TrajectorySet back =
      io::load_trajectories(dir.file("t.csv"), set.tower_map, 21600);
  REQUIRE(back.num_users() == 2);
  CHECK(back.trajectories[0] == set.trajectories[0]);
  CHECK(back.trajectories[1] == set.trajectories[1]);
}

TEST_CASE("trajectory loader validates input") {
  TempDir dir;
  const TowerMap map = testsupport::collinear_map();

  {
    std::ofstream out(dir.file("unknown.csv"));
    out << "user_id,slot,tower_id\n0,0,99\n";
  }
  CHECK_THROWS_WITH_AS(io::load_trajectories(dir.file("unknown.csv"), map),
                       doctest::Contains("99"), std::exception);

  {
    std::ofstream out(dir.file("empty.csv"));
    out << "user_id,slot,tower_id\n";
  }
  CHECK_THROWS_WITH_AS(io::load_trajectories(dir.file("empty.csv"), map),
                       doctest::Contains("zero trajectories"), std::exception);

  {
    std::ofstream out(dir.file("bad.csv"));
    out << "user_id,slot,tower_id\n0,0,0\nnot-a-row\n";
  }
  CHECK_THROWS_WITH_AS(io::load_trajectories(dir.file("bad.csv"), map),
                       doctest::Contains("3"), std::exception);  // row number
}

TEST_CASE("aggregate round trip") {
  TempDir dir;
  const TrajectorySet set = testsupport::stationary_population(3);
  const AggregateSeries agg = aggregate(set);
  io::store_aggregate(agg, dir.file("agg.csv"));
  const AggregateSeries back =
      io::load_aggregate(dir.file("agg.csv"), set.tower_map, set.grid.slot_seconds);
  CHECK(back.counts == agg.counts);
}

TEST_CASE("stores are byte-deterministic") {
  TempDir dir;
  const TrajectorySet set = testsupport::stationary_population(4, 2);
  io::store_trajectories(set, dir.file("a.csv"));
  io::store_trajectories(set, dir.file("b.csv"));
  CHECK(testsupport::read_file(dir.file("a.csv")) ==
        testsupport::read_file(dir.file("b.csv")));

  const AggregateSeries agg = aggregate(set);
  io::store_aggregate(agg, dir.file("c.csv"));
  io::store_aggregate(agg, dir.file("d.csv"));
  CHECK(testsupport::read_file(dir.file("c.csv")) ==
        testsupport::read_file(dir.file("d.csv")));
}

TEST_CASE("flat key = value config files") {
  TempDir dir;
  {
    std::ofstream out(dir.file("run.conf"));
    out << "# comment line\n"
        << "users = 250\n"
        << "world =  16000\n"
        << "\n"
        << "seed=9   # trailing comment\n";
  }
  const auto entries = io::load_config(dir.file("run.conf"));
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].first == "users");
  CHECK(entries[0].second == "250");
  CHECK(entries[1].first == "world");
  CHECK(entries[1].second == "16000");
  CHECK(entries[2].first == "seed");
  CHECK(entries[2].second == "9");
}
