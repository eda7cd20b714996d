#pragma once

// Shared helpers for the unit and acceptance tests: a fully separable
// benchmark population, random cost matrices, small hand-built worlds and
// expensive fixtures computed once per process.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ash/aggregation.hpp"
#include "ash/assignment.hpp"
#include "ash/core.hpp"
#include "ash/evaluation.hpp"
#include "ash/generator.hpp"
#include "ash/recovery.hpp"

namespace testsupport {

// Population where every user commutes between a private home tower and a
// private work tower, with all users separated by tens of kilometers: every
// stage of the attack must recover it exactly.
inline ash::TrajectorySet separable_population(int n_users, int num_days = 7) {
  using namespace ash;
  std::vector<Tower> towers;
  const double spacing = 50000.0;
  for (int i = 0; i < n_users; ++i) {
    towers.push_back({static_cast<TowerId>(2 * i), i * spacing, 0.0, 2 * i, i});
    towers.push_back(
        {static_cast<TowerId>(2 * i + 1), i * spacing, 1000.0, 2 * i + 1, i});
  }
  TrajectorySet set;
  set.grid.num_days = num_days;
  set.tower_map = TowerMap(std::move(towers));
  set.trajectories.reserve(n_users);
  for (int u = 0; u < n_users; ++u) {
    Trajectory t;
    t.user_id = u;
    t.locations.reserve(set.grid.total_slots());
    for (int d = 0; d < num_days; ++d)
      for (int s = 0; s < set.grid.slots_per_day; ++s)
        t.locations.push_back(s >= 18 && s < 36 ? static_cast<TowerId>(2 * u + 1)
                                                : static_cast<TowerId>(2 * u));
    set.trajectories.push_back(std::move(t));
  }
  return set;
}

inline ash::CostMatrix random_int_matrix(std::size_t n, std::mt19937_64& rng,
                                         int lo = 0, int hi = 100) {
  std::uniform_int_distribution<int> dist(lo, hi);
  ash::CostMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c.at(i, j) = dist(rng);
  return c;
}

// Three collinear towers A(0,0), B(500,0), C(1000,0), one base station and
// district each.
inline ash::TowerMap collinear_map() {
  std::vector<ash::Tower> towers{{0, 0.0, 0.0, 0, 0},
                                 {1, 500.0, 0.0, 1, 0},
                                 {2, 1000.0, 0.0, 2, 0}};
  return ash::TowerMap(std::move(towers));
}

// Stationary population: user u sits at tower u for all slots.
inline ash::TrajectorySet stationary_population(int n_users, int num_days = 1) {
  using namespace ash;
  std::vector<Tower> towers;
  for (int i = 0; i < n_users; ++i)
    towers.push_back({static_cast<TowerId>(i), i * 10000.0, 0.0, i, 0});
  TrajectorySet set;
  set.grid.num_days = num_days;
  set.tower_map = TowerMap(std::move(towers));
  for (int u = 0; u < n_users; ++u) {
    Trajectory t;
    t.user_id = u;
    t.locations.assign(set.grid.total_slots(), static_cast<TowerId>(u));
    set.trajectories.push_back(std::move(t));
  }
  return set;
}

// Expensive fixtures shared across test cases (computed once per process).
inline const ash::TrajectorySet& default_population() {
  static const ash::TrajectorySet set = [] {
    ash::GeneratorConfig cfg;  // defaults: 1000 users, 7 days, seed 1
    return ash::generate_population(cfg);
  }();
  return set;
}

inline const ash::AggregateSeries& default_aggregate() {
  static const ash::AggregateSeries agg = ash::aggregate(default_population());
  return agg;
}

inline const ash::RecoveryResult& default_recovery() {
  static const ash::RecoveryResult res =
      ash::recover(default_aggregate(), ash::RecoveryConfig{});
  return res;
}

// Rows of a stage snapshot expanded to the full horizon, sentinel-padded on
// slots the stage does not cover. For per-day stages each day keeps its own
// row indexing, which is what per-day pairing expects.
inline std::vector<std::vector<ash::TowerId>> day_rows(
    const ash::RecoveredTrajectorySet& snap, int day) {
  return snap.days[static_cast<std::size_t>(day)];
}

// Checks the re-partition invariant: at every covered slot the recovered
// multiset equals the published one.
inline bool repartition_holds(const ash::RecoveredTrajectorySet& snap,
                              const ash::AggregateSeries& agg) {
  const int spd = snap.grid.slots_per_day;
  for (int d = 0; d < snap.grid.num_days; ++d) {
    for (int s = 0; s < spd; ++s) {
      std::map<ash::TowerId, int> got;
      bool covered = false;
      for (const auto& row : snap.days[static_cast<std::size_t>(d)]) {
        const ash::TowerId id = row[static_cast<std::size_t>(s)];
        if (id == ash::kNoRecord) continue;
        covered = true;
        ++got[id];
      }
      if (!covered) continue;  // slot outside this stage's coverage
      const auto& want = agg.counts[static_cast<std::size_t>(d * spd + s)];
      if (got != want) return false;
    }
  }
  return true;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace testsupport
