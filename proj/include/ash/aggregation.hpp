#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ash/core.hpp"

namespace ash {

// Per-slot tower occupancy counts: the published aggregate.
struct AggregateSeries {
  TimeGrid grid;
  TowerMap tower_map;
  // counts[t]: tower id -> user count, ordered by tower id, zeros omitted.
  std::vector<std::map<TowerId, int>> counts;

  int num_users() const;  // per-slot sum, constant across slots
  void validate() const;  // throws if any per-slot sum differs
};

// ID-removed records of one slot, canonical order (ascending tower id).
struct RecordMultiset {
  int slot = 0;
  std::vector<TowerId> records;
};

// Raw pre-slotted events for one user: possibly several records per slot.
struct RawUserRecords {
  UserId user_id = 0;
  std::vector<std::pair<int, TowerId>> events;  // (slot, tower)
};

struct PerturbConfig {
  double displace_prob = 0.0;  // per-record uniform displacement probability
  std::uint64_t seed = 0;
};

// Modal tower per slot; ties break to the smaller tower id; empty slots get
// the sentinel.
TrajectorySet discretize(const std::vector<RawUserRecords>& raw,
                         const TimeGrid& grid, const TowerMap& map);

// Fills sentinels: interior gaps take the tower nearest the linear
// interpolant between the bracketing known points; leading/trailing gaps
// copy the nearest known entry. Throws on an all-sentinel trajectory.
Trajectory interpolate(const Trajectory& t, const TimeGrid& grid, const TowerMap& map);
TrajectorySet interpolate(const TrajectorySet& set);

AggregateSeries aggregate(const TrajectorySet& set);

RecordMultiset derive_records(const AggregateSeries& agg, int slot);

// Counts summed by level group; output tower map holds group centroids.
AggregateSeries coarsen_spatial(const AggregateSeries& agg, Level level);

// Ground truth mapped to level group ids (for evaluating a coarsened run).
TrajectorySet map_to_level(const TrajectorySet& set, Level level);

// Re-discretizes each trajectory on a grid `factor` times coarser (modal
// tower per coarse slot, smaller-id tie-break). Coarsening counts directly
// would break the per-slot sum invariant, so this starts from trajectories.
TrajectorySet coarsen_temporal(const TrajectorySet& set, int factor);

// Each record independently displaced to a uniformly random tower with
// probability displace_prob before aggregation. Randomness derives from
// (seed, slot, record index), so slots are order-independent.
AggregateSeries perturb(const AggregateSeries& agg, const PerturbConfig& noise);

}  // namespace ash
