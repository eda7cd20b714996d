#include <doctest.h>

#include <map>
#include <vector>

#include "ash/aggregation.hpp"
#include "support.hpp"

using namespace ash;

namespace {

TimeGrid tiny_grid(int slots_per_day, int num_days = 1) {
  TimeGrid g;
  g.slot_seconds = 86400 / slots_per_day;
  g.slots_per_day = slots_per_day;
  g.num_days = num_days;
  return g;
}

}  // namespace

TEST_CASE("discretize picks the modal tower, ties to the smaller id") {
  const TowerMap map = testsupport::collinear_map();
  const TimeGrid grid = tiny_grid(4);

  RawUserRecords majority{0, {{0, 0}, {0, 0}, {0, 2}}};
  TrajectorySet a = discretize({majority}, grid, map);
  CHECK(a.trajectories[0].locations[0] == 0);

  // Tie {A, B}: both event orders give the smaller id.
  RawUserRecords tie_ab{0, {{1, 0}, {1, 1}}};
  RawUserRecords tie_ba{0, {{1, 1}, {1, 0}}};
  CHECK(discretize({tie_ab}, grid, map).trajectories[0].locations[1] == 0);
  CHECK(discretize({tie_ba}, grid, map).trajectories[0].locations[1] == 0);

  // Slot without records holds the sentinel.
  CHECK(a.trajectories[0].locations[3] == kNoRecord);
}

TEST_CASE("interpolate fills gaps") {
  const TowerMap map = testsupport::collinear_map();
  const TimeGrid grid = tiny_grid(3);

  Trajectory aa{0, {0, kNoRecord, 0}};
  CHECK(interpolate(aa, grid, map).locations == std::vector<TowerId>{0, 0, 0});

  Trajectory edges{0, {kNoRecord, 1, kNoRecord}};
  CHECK(interpolate(edges, grid, map).locations == std::vector<TowerId>{1, 1, 1});

  // Tower 1 sits exactly at the midpoint of towers 0 and 2.
  Trajectory mid{0, {0, kNoRecord, 2}};
  CHECK(interpolate(mid, grid, map).locations == std::vector<TowerId>{0, 1, 2});

  Trajectory empty{0, {kNoRecord, kNoRecord, kNoRecord}};
  CHECK_THROWS(interpolate(empty, grid, map));
}

TEST_CASE("aggregate counts users per tower and conserves N") {
  TrajectorySet set = testsupport::stationary_population(2);
  // Put both users on tower 0.
  set.trajectories[1].locations.assign(set.grid.total_slots(), 0);
  const AggregateSeries agg = aggregate(set);
  for (const auto& slot : agg.counts) {
    REQUIRE(slot.size() == 1);
    CHECK(slot.at(0) == 2);
  }

  TrajectorySet two = testsupport::stationary_population(2);
  const AggregateSeries agg2 = aggregate(two);
  for (const auto& slot : agg2.counts) {
    CHECK(slot.at(0) == 1);
    CHECK(slot.at(1) == 1);
  }
}

TEST_CASE("default population aggregate sums to N at every slot") {
  const AggregateSeries& agg = testsupport::default_aggregate();
  const int n = static_cast<int>(testsupport::default_population().num_users());
  for (const auto& slot : agg.counts) {
    int sum = 0;
    for (const auto& [id, c] : slot) sum += c;
    REQUIRE(sum == n);
  }
}

TEST_CASE("derive_records expands counts in canonical order and round-trips") {
  TrajectorySet set = testsupport::stationary_population(3);
  set.trajectories[1].locations.assign(set.grid.total_slots(), 0);  // {0:2, 2:1}
  const AggregateSeries agg = aggregate(set);
  const RecordMultiset rec = derive_records(agg, 0);
  CHECK(rec.records == std::vector<TowerId>{0, 0, 2});

  std::map<TowerId, int> counted;
  for (TowerId id : rec.records) ++counted[id];
  CHECK(counted == agg.counts[0]);
}

TEST_CASE("coarsen_spatial sums counts by group") {
  // Towers 0 and 1 share a base station; 3 users split 1 + 2 across them.
  std::vector<Tower> towers{{0, 0.0, 0.0, 0, 0},
                            {1, 100.0, 0.0, 0, 0},
                            {2, 9000.0, 0.0, 1, 1}};
  TrajectorySet set;
  set.grid = tiny_grid(4);
  set.tower_map = TowerMap(std::move(towers));
  for (int u = 0; u < 3; ++u) {
    Trajectory t;
    t.user_id = u;
    t.locations.assign(set.grid.total_slots(), u == 0 ? 0 : (u == 1 ? 1 : 1));
    set.trajectories.push_back(std::move(t));
  }
  const AggregateSeries agg = aggregate(set);
  const AggregateSeries bs = coarsen_spatial(agg, Level::BaseStation);
  CHECK(bs.counts[0].at(0) == 3);  // towers 0 and 1 merged into group 0

  // Sector level is the identity.
  const AggregateSeries same = coarsen_spatial(agg, Level::Sector);
  CHECK(same.counts == agg.counts);
}

TEST_CASE("district-level series has at most #districts keys per slot") {
  const AggregateSeries district =
      coarsen_spatial(testsupport::default_aggregate(), Level::District);
  const std::size_t groups =
      testsupport::default_population().tower_map.group_count(Level::District);
  for (const auto& slot : district.counts) CHECK(slot.size() <= groups);
}

TEST_CASE("coarsen_temporal re-discretizes by majority") {
  const TrajectorySet& pop = testsupport::default_population();

  // Factor 1 is the identity.
  const TrajectorySet same = coarsen_temporal(pop, 1);
  CHECK(same.trajectories == pop.trajectories);

  // A stationary population is unchanged per coarse slot.
  TrajectorySet stat = testsupport::stationary_population(3);
  const TrajectorySet coarse = coarsen_temporal(stat, 6);
  for (std::size_t u = 0; u < 3; ++u)
    for (TowerId id : coarse.trajectories[u].locations)
      CHECK(id == static_cast<TowerId>(u));

  // [A, A, B] coarsened by 3 -> A.
  TrajectorySet tri;
  tri.grid = tiny_grid(3);
  tri.tower_map = testsupport::collinear_map();
  Trajectory t{0, {0, 0, 2}};
  tri.trajectories.push_back(t);
  CHECK(coarsen_temporal(tri, 3).trajectories[0].locations ==
        std::vector<TowerId>{0});
}

TEST_CASE("perturb: p = 0 is the identity, 1-tower maps cannot move") {
  const AggregateSeries& agg = testsupport::default_aggregate();
  const AggregateSeries same = perturb(agg, PerturbConfig{0.0, 1});
  CHECK(same.counts == agg.counts);

  std::vector<Tower> one{{0, 0.0, 0.0, 0, 0}};
  TrajectorySet set;
  set.grid = tiny_grid(4);
  set.tower_map = TowerMap(std::move(one));
  Trajectory t{0, std::vector<TowerId>(set.grid.total_slots(), 0)};
  set.trajectories.push_back(t);
  const AggregateSeries base = aggregate(set);
  const AggregateSeries moved = perturb(base, PerturbConfig{1.0, 1});
  CHECK(moved.counts == base.counts);
}

TEST_CASE("perturb: p = 0.3 displaces about 30% of records") {
  const AggregateSeries& agg = testsupport::default_aggregate();
  const AggregateSeries noisy = perturb(agg, PerturbConfig{0.3, 7});
  noisy.validate();  // conservation survives the noise

  // Count moved records as half the L1 distance between the count maps.
  long moved = 0, total = 0;
  for (std::size_t t = 0; t < agg.counts.size(); ++t) {
    std::map<TowerId, int> diff = agg.counts[t];
    for (const auto& [id, c] : noisy.counts[t]) diff[id] -= c;
    long l1 = 0;
    for (const auto& [id, d] : diff) l1 += std::abs(d);
    moved += l1 / 2;
    for (const auto& [id, c] : agg.counts[t]) total += c;
  }
  const double fraction = static_cast<double>(moved) / static_cast<double>(total);
  CHECK(fraction > 0.27);
  CHECK(fraction < 0.33);
}

TEST_CASE("conservation survives all published transformations") {
  const AggregateSeries& agg = testsupport::default_aggregate();
  coarsen_spatial(agg, Level::BaseStation).validate();
  coarsen_spatial(agg, Level::District).validate();
  aggregate(coarsen_temporal(testsupport::default_population(), 3)).validate();
  perturb(agg, PerturbConfig{0.5, 3}).validate();
}
