#pragma once

#include <string>
#include <vector>

#include "ash/aggregation.hpp"
#include "ash/core.hpp"
#include "ash/recovery.hpp"

namespace ash::io {

// Tower map CSV: header `tower_id,x_m,y_m,base_station_id,district_id`.
void store_tower_map(const TowerMap& map, const std::string& path);
TowerMap load_tower_map(const std::string& path);

// Trajectory CSV: header `user_id,slot,tower_id`, one row per (user, slot),
// sentinel tower id -1. The grid is inferred from the highest slot, assuming
// `slot_seconds` per slot and whole days.
void store_trajectories(const TrajectorySet& set, const std::string& path);
TrajectorySet load_trajectories(const std::string& path, const TowerMap& map,
                                int slot_seconds = 1800);

// Aggregate CSV: header `slot,tower_id,count`, rows sorted by
// (slot, tower_id), zero counts omitted.
void store_aggregate(const AggregateSeries& agg, const std::string& path);
AggregateSeries load_aggregate(const std::string& path, const TowerMap& map,
                               int slot_seconds = 1800);

// Stage snapshots serialize in trajectory format with synthetic ids; rows of
// per-day stages are day-concatenated without implying cross-day identity.
void store_recovered(const RecoveredTrajectorySet& set, const std::string& path);

// Metrics CSV: `metric,stage,param,value` rows.
struct MetricRow {
  std::string metric;
  std::string stage;
  std::string param;
  double value = 0.0;
};
void store_metrics(const std::vector<MetricRow>& rows, const std::string& path);

// Error CDF CSV: `meters,cum_fraction`.
void store_cdf(const std::vector<std::pair<double, double>>& points,
               const std::string& path);

// Flat `key = value` config file; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> load_config(const std::string& path);

}  // namespace ash::io
