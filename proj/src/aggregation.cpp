#include "ash/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ash/simd/distance.hpp"

namespace ash {

int AggregateSeries::num_users() const {
  if (counts.empty()) return 0;
  int n = 0;
  for (const auto& [id, c] : counts.front()) n += c;
  return n;
}

void AggregateSeries::validate() const {
  grid.validate();
  const int n = num_users();
  for (std::size_t t = 0; t < counts.size(); ++t) {
    int sum = 0;
    for (const auto& [id, c] : counts[t]) {
      if (c < 0) throw std::invalid_argument("negative count at slot " + std::to_string(t));
      if (!tower_map.contains(id))
        throw std::invalid_argument("unknown tower " + std::to_string(id) +
                                    " at slot " + std::to_string(t));
      sum += c;
    }
    if (sum != n)
      throw std::invalid_argument("per-slot sum " + std::to_string(sum) + " at slot " +
                                  std::to_string(t) + " differs from " + std::to_string(n));
  }
}

TrajectorySet discretize(const std::vector<RawUserRecords>& raw,
                         const TimeGrid& grid, const TowerMap& map) {
  grid.validate();
  const int total = grid.total_slots();
  TrajectorySet set;
  set.grid = grid;
  set.tower_map = map;
  set.trajectories.reserve(raw.size());
  for (const RawUserRecords& user : raw) {
    Trajectory traj;
    traj.user_id = user.user_id;
    traj.locations.assign(total, kNoRecord);
    std::vector<std::map<TowerId, int>> per_slot(total);
    for (const auto& [slot, tower] : user.events) {
      if (slot < 0 || slot >= total)
        throw std::out_of_range("record slot " + std::to_string(slot) + " out of range");
      per_slot[slot][tower] += 1;
    }
    for (int s = 0; s < total; ++s) {
      if (per_slot[s].empty()) continue;
      // Modal tower; std::map iteration gives the smaller id on ties.
      TowerId best = per_slot[s].begin()->first;
      int best_count = per_slot[s].begin()->second;
      for (const auto& [id, c] : per_slot[s])
        if (c > best_count) { best = id; best_count = c; }
      traj.locations[s] = best;
    }
    set.trajectories.push_back(std::move(traj));
  }
  return set;
}

Trajectory interpolate(const Trajectory& t, const TimeGrid& grid, const TowerMap& map) {
  const int total = grid.total_slots();
  Trajectory out = t;
  int first = -1, last = -1;
  for (int s = 0; s < total; ++s)
    if (out.locations[s] != kNoRecord) {
      if (first < 0) first = s;
      last = s;
    }
  if (first < 0)
    throw std::invalid_argument("cannot interpolate all-sentinel trajectory of user " +
                                std::to_string(t.user_id));

  for (int s = 0; s < first; ++s) out.locations[s] = out.locations[first];
  for (int s = last + 1; s < total; ++s) out.locations[s] = out.locations[last];

  int prev = first;
  for (int s = first + 1; s <= last; ++s) {
    if (out.locations[s] == kNoRecord) continue;
    if (s > prev + 1) {
      const Tower& a = map.tower(out.locations[prev]);
      const Tower& b = map.tower(out.locations[s]);
      for (int g = prev + 1; g < s; ++g) {
        const double f = double(g - prev) / double(s - prev);
        const double px = a.x + (b.x - a.x) * f;
        const double py = a.y + (b.y - a.y) * f;
        const std::size_t k =
            simd::nearest_point(px, py, map.xs().data(), map.ys().data(), map.size());
        out.locations[g] = map.towers()[k].id;
      }
    }
    prev = s;
  }
  return out;
}

TrajectorySet interpolate(const TrajectorySet& set) {
  TrajectorySet out = set;
  for (Trajectory& t : out.trajectories) t = interpolate(t, set.grid, set.tower_map);
  return out;
}

AggregateSeries aggregate(const TrajectorySet& set) {
  const int total = set.grid.total_slots();
  AggregateSeries agg;
  agg.grid = set.grid;
  agg.tower_map = set.tower_map;
  agg.counts.resize(total);
  for (const Trajectory& t : set.trajectories) {
    if (static_cast<int>(t.locations.size()) != total)
      throw std::invalid_argument("trajectory length mismatch for user " +
                                  std::to_string(t.user_id));
    for (int s = 0; s < total; ++s) {
      if (t.locations[s] == kNoRecord)
        throw std::invalid_argument("sentinel at slot " + std::to_string(s) +
                                    " of user " + std::to_string(t.user_id) +
                                    "; interpolate first");
      agg.counts[s][t.locations[s]] += 1;
    }
  }
  return agg;
}

RecordMultiset derive_records(const AggregateSeries& agg, int slot) {
  if (slot < 0 || slot >= static_cast<int>(agg.counts.size()))
    throw std::out_of_range("slot " + std::to_string(slot) + " out of range");
  RecordMultiset out;
  out.slot = slot;
  for (const auto& [id, c] : agg.counts[slot])
    out.records.insert(out.records.end(), c, id);
  return out;
}

AggregateSeries coarsen_spatial(const AggregateSeries& agg, Level level) {
  AggregateSeries out;
  out.grid = agg.grid;
  out.tower_map = agg.tower_map.coarsened(level);
  out.counts.resize(agg.counts.size());
  for (std::size_t t = 0; t < agg.counts.size(); ++t)
    for (const auto& [id, c] : agg.counts[t])
      out.counts[t][agg.tower_map.group_of(id, level)] += c;
  return out;
}

TrajectorySet map_to_level(const TrajectorySet& set, Level level) {
  TrajectorySet out;
  out.grid = set.grid;
  out.tower_map = set.tower_map.coarsened(level);
  out.trajectories = set.trajectories;
  for (Trajectory& t : out.trajectories)
    for (TowerId& id : t.locations)
      if (id != kNoRecord) id = set.tower_map.group_of(id, level);
  return out;
}

TrajectorySet coarsen_temporal(const TrajectorySet& set, int factor) {
  if (factor <= 0 || set.grid.slots_per_day % factor != 0)
    throw std::invalid_argument("temporal factor " + std::to_string(factor) +
                                " does not divide slots_per_day");
  TrajectorySet out;
  out.grid = set.grid;
  out.grid.slot_seconds = set.grid.slot_seconds * factor;
  out.grid.slots_per_day = set.grid.slots_per_day / factor;
  const int total = out.grid.total_slots();
  out.tower_map = set.tower_map;
  out.trajectories.reserve(set.trajectories.size());
  for (const Trajectory& t : set.trajectories) {
    Trajectory ct;
    ct.user_id = t.user_id;
    ct.locations.assign(total, kNoRecord);
    for (int s = 0; s < total; ++s) {
      std::map<TowerId, int> freq;
      for (int k = 0; k < factor; ++k) {
        const TowerId id = t.locations[s * factor + k];
        if (id != kNoRecord) freq[id] += 1;
      }
      if (freq.empty()) continue;
      TowerId best = freq.begin()->first;
      int best_count = freq.begin()->second;
      for (const auto& [id, c] : freq)
        if (c > best_count) { best = id; best_count = c; }
      ct.locations[s] = best;
    }
    out.trajectories.push_back(std::move(ct));
  }
  return out;
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

AggregateSeries perturb(const AggregateSeries& agg, const PerturbConfig& noise) {
  if (noise.displace_prob < 0.0 || noise.displace_prob > 1.0)
    throw std::invalid_argument("perturb: probability outside [0,1]");
  AggregateSeries out;
  out.grid = agg.grid;
  out.tower_map = agg.tower_map;
  out.counts.resize(agg.counts.size());
  const std::size_t m = agg.tower_map.size();
  for (std::size_t t = 0; t < agg.counts.size(); ++t) {
    std::size_t rec = 0;
    for (const auto& [id, c] : agg.counts[t]) {
      for (int k = 0; k < c; ++k, ++rec) {
        TowerId target = id;
        if (m > 1) {
          std::mt19937_64 rng(mix64(noise.seed ^ mix64(t * 0x100000ULL + rec)));
          const double roll = (rng() >> 11) * 0x1.0p-53;
          if (roll < noise.displace_prob) {
            const std::size_t pick =
                static_cast<std::size_t>(((rng() >> 11) * 0x1.0p-53) * m);
            target = agg.tower_map.towers()[pick].id;
          }
        }
        out.counts[t][target] += 1;
      }
    }
  }
  return out;
}

}  // namespace ash
