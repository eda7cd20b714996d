#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ash {

using TowerId = std::int32_t;
using UserId = std::int64_t;

// Reserved "no record" marker; never a valid tower id.
inline constexpr TowerId kNoRecord = -1;

struct Tower {
  TowerId id = 0;
  double x = 0.0;  // meters, planar projection
  double y = 0.0;
  std::int32_t base_station_id = 0;
  std::int32_t district_id = 0;
};

enum class Level { Sector, BaseStation, District };

std::string level_name(Level level);
Level parse_level(const std::string& name);

// Towers plus the sector -> base station -> district coarsening hierarchy.
// Group centroids are arithmetic means of member coordinates.
class TowerMap {
 public:
  TowerMap() = default;
  explicit TowerMap(std::vector<Tower> towers);

  const std::vector<Tower>& towers() const { return towers_; }
  std::size_t size() const { return towers_.size(); }

  bool contains(TowerId id) const { return index_.count(id) > 0; }
  const Tower& tower(TowerId id) const;

  // Group id a tower belongs to at the given level (sector = the tower itself).
  std::int32_t group_of(TowerId id, Level level) const;
  // Centroid coordinates of a level group.
  void group_centroid(std::int32_t group, Level level, double& x, double& y) const;
  std::size_t group_count(Level level) const;

  // Collapses towers into their level groups: one tower per group, placed at
  // the group centroid, id = group id. Sector level returns a copy.
  TowerMap coarsened(Level level) const;

  // Coordinate arrays indexed like towers(), for the distance kernels.
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  std::size_t index_of(TowerId id) const;

 private:
  std::vector<Tower> towers_;
  std::unordered_map<TowerId, std::size_t> index_;
  std::vector<double> xs_, ys_;
  std::unordered_map<std::int32_t, std::pair<double, double>> bs_centroid_;
  std::unordered_map<std::int32_t, std::pair<double, double>> district_centroid_;
};

struct TimeGrid {
  std::int64_t start = 0;      // epoch seconds, local midnight
  int slot_seconds = 1800;
  int slots_per_day = 48;
  int num_days = 7;

  int total_slots() const { return slots_per_day * num_days; }
  int day_of(int slot) const { return slot / slots_per_day; }
  int slot_in_day(int slot) const { return slot % slots_per_day; }

  void validate() const;
};

// Half-open window of in-day slots, e.g. [00:00, 06:00).
struct NightWindow {
  int start_slot = 0;
  int end_slot = 12;

  bool contains(int slot_in_day) const {
    return slot_in_day >= start_slot && slot_in_day < end_slot;
  }
  int length() const { return end_slot - start_slot; }
};

struct Trajectory {
  UserId user_id = 0;
  std::vector<TowerId> locations;  // length T, kNoRecord marks a gap

  bool operator==(const Trajectory&) const = default;
};

struct TrajectorySet {
  TimeGrid grid;
  TowerMap tower_map;
  std::vector<Trajectory> trajectories;

  std::size_t num_users() const { return trajectories.size(); }
  void validate() const;  // throws on duplicate ids, bad lengths, unknown towers
};

}  // namespace ash
