#include "ash/core.hpp"

#include <cmath>
#include <unordered_set>

namespace ash {

std::string level_name(Level level) {
  switch (level) {
    case Level::Sector: return "sector";
    case Level::BaseStation: return "base_station";
    case Level::District: return "district";
  }
  return "?";
}

Level parse_level(const std::string& name) {
  if (name == "sector") return Level::Sector;
  if (name == "base_station") return Level::BaseStation;
  if (name == "district") return Level::District;
  throw std::invalid_argument("unknown coarsening level: " + name);
}

TowerMap::TowerMap(std::vector<Tower> towers) : towers_(std::move(towers)) {
  index_.reserve(towers_.size());
  xs_.reserve(towers_.size());
  ys_.reserve(towers_.size());

  std::unordered_map<std::int32_t, std::pair<std::pair<double, double>, int>> bs_acc;
  std::unordered_map<std::int32_t, std::pair<std::pair<double, double>, int>> dist_acc;

  for (std::size_t i = 0; i < towers_.size(); ++i) {
    const Tower& t = towers_[i];
    if (!std::isfinite(t.x) || !std::isfinite(t.y))
      throw std::invalid_argument("tower " + std::to_string(t.id) + " has non-finite coordinates");
    if (!index_.emplace(t.id, i).second)
      throw std::invalid_argument("duplicate tower id " + std::to_string(t.id));
    xs_.push_back(t.x);
    ys_.push_back(t.y);
    auto& b = bs_acc[t.base_station_id];
    b.first.first += t.x;
    b.first.second += t.y;
    b.second += 1;
    auto& d = dist_acc[t.district_id];
    d.first.first += t.x;
    d.first.second += t.y;
    d.second += 1;
  }
  for (const auto& [id, acc] : bs_acc)
    bs_centroid_[id] = {acc.first.first / acc.second, acc.first.second / acc.second};
  for (const auto& [id, acc] : dist_acc)
    district_centroid_[id] = {acc.first.first / acc.second, acc.first.second / acc.second};
}

const Tower& TowerMap::tower(TowerId id) const {
  auto it = index_.find(id);
  if (it == index_.end())
    throw std::out_of_range("unknown tower id " + std::to_string(id));
  return towers_[it->second];
}

std::size_t TowerMap::index_of(TowerId id) const {
  auto it = index_.find(id);
  if (it == index_.end())
    throw std::out_of_range("unknown tower id " + std::to_string(id));
  return it->second;
}

std::int32_t TowerMap::group_of(TowerId id, Level level) const {
  const Tower& t = tower(id);
  switch (level) {
    case Level::Sector: return t.id;
    case Level::BaseStation: return t.base_station_id;
    case Level::District: return t.district_id;
  }
  return t.id;
}

void TowerMap::group_centroid(std::int32_t group, Level level, double& x, double& y) const {
  if (level == Level::Sector) {
    const Tower& t = tower(group);
    x = t.x;
    y = t.y;
    return;
  }
  const auto& table = level == Level::BaseStation ? bs_centroid_ : district_centroid_;
  auto it = table.find(group);
  if (it == table.end())
    throw std::out_of_range("unknown group id " + std::to_string(group));
  x = it->second.first;
  y = it->second.second;
}

std::size_t TowerMap::group_count(Level level) const {
  switch (level) {
    case Level::Sector: return towers_.size();
    case Level::BaseStation: return bs_centroid_.size();
    case Level::District: return district_centroid_.size();
  }
  return towers_.size();
}

TowerMap TowerMap::coarsened(Level level) const {
  if (level == Level::Sector) return *this;
  std::unordered_set<std::int32_t> seen;
  std::vector<Tower> groups;
  for (const Tower& t : towers_) {
    std::int32_t g = level == Level::BaseStation ? t.base_station_id : t.district_id;
    if (!seen.insert(g).second) continue;
    Tower gt;
    gt.id = g;
    group_centroid(g, level, gt.x, gt.y);
    gt.base_station_id = g;
    gt.district_id = level == Level::District ? g : t.district_id;
    groups.push_back(gt);
  }
  return TowerMap(std::move(groups));
}

void TimeGrid::validate() const {
  if (slot_seconds <= 0 || 86400 % slot_seconds != 0)
    throw std::invalid_argument("slot_seconds must divide 86400");
  if (slots_per_day * slot_seconds != 86400)
    throw std::invalid_argument("slots_per_day * slot_seconds must equal 86400");
  if (num_days <= 0) throw std::invalid_argument("num_days must be positive");
}

void TrajectorySet::validate() const {
  grid.validate();
  const std::size_t t_total = static_cast<std::size_t>(grid.total_slots());
  std::unordered_set<UserId> ids;
  for (const Trajectory& tr : trajectories) {
    if (!ids.insert(tr.user_id).second)
      throw std::invalid_argument("duplicate user id " + std::to_string(tr.user_id));
    if (tr.locations.size() != t_total)
      throw std::invalid_argument("trajectory of user " + std::to_string(tr.user_id) +
                                  " has length " + std::to_string(tr.locations.size()) +
                                  ", expected " + std::to_string(t_total));
    for (TowerId id : tr.locations)
      if (id != kNoRecord && !tower_map.contains(id))
        throw std::invalid_argument("user " + std::to_string(tr.user_id) +
                                    " references unknown tower " + std::to_string(id));
  }
}

}  // namespace ash
