#include "ash/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ash::io {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return in;
}

std::vector<std::string_view> split_csv(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_num(std::string_view s, const std::string& path, std::size_t line) {
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      value = static_cast<T>(std::stod(std::string(s)));
    } catch (const std::exception&) {
      fail(path, line, "not a number: '" + std::string(s) + "'");
    }
  } else {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
      fail(path, line, "not an integer: '" + std::string(s) + "'");
  }
  return value;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

void store_tower_map(const TowerMap& map, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "tower_id,x_m,y_m,base_station_id,district_id\n";
  char buf[160];
  for (const Tower& t : map.towers()) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%d,%d\n", t.id, t.x, t.y,
                  t.base_station_id, t.district_id);
    out << buf;
  }
}

TowerMap load_tower_map(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  strip_cr(line);
  ++lineno;
  if (line != "tower_id,x_m,y_m,base_station_id,district_id")
    fail(path, lineno, "bad header '" + line + "'");
  std::vector<Tower> towers;
  std::vector<std::string_view> f;
  while (std::getline(in, line)) {
    strip_cr(line);
    ++lineno;
    if (line.empty()) continue;
    split_csv(line, f);
    if (f.size() != 5) fail(path, lineno, "expected 5 fields");
    Tower t;
    t.id = parse_num<TowerId>(f[0], path, lineno);
    t.x = parse_num<double>(f[1], path, lineno);
    t.y = parse_num<double>(f[2], path, lineno);
    t.base_station_id = parse_num<std::int32_t>(f[3], path, lineno);
    t.district_id = parse_num<std::int32_t>(f[4], path, lineno);
    towers.push_back(t);
  }
  if (towers.empty()) throw std::runtime_error(path + ": zero towers");
  return TowerMap(std::move(towers));
}

void store_trajectories(const TrajectorySet& set, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "user_id,slot,tower_id\n";
  char buf[96];
  for (const Trajectory& t : set.trajectories)
    for (std::size_t s = 0; s < t.locations.size(); ++s) {
      std::snprintf(buf, sizeof(buf), "%lld,%zu,%d\n",
                    static_cast<long long>(t.user_id), s, t.locations[s]);
      out << buf;
    }
}

TrajectorySet load_trajectories(const std::string& path, const TowerMap& map,
                                int slot_seconds) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  strip_cr(line);
  ++lineno;
  if (line != "user_id,slot,tower_id") fail(path, lineno, "bad header '" + line + "'");

  std::vector<std::string_view> f;
  std::vector<UserId> order;
  std::unordered_map<UserId, std::vector<std::pair<int, TowerId>>> rows;
  int max_slot = -1;
  while (std::getline(in, line)) {
    strip_cr(line);
    ++lineno;
    if (line.empty()) continue;
    split_csv(line, f);
    if (f.size() != 3) fail(path, lineno, "expected 3 fields");
    // Recovered snapshots carry synthetic ids r0..r(N-1).
    std::string_view id_field = f[0];
    if (!id_field.empty() && id_field.front() == 'r') id_field.remove_prefix(1);
    const UserId user = parse_num<UserId>(id_field, path, lineno);
    const int slot = parse_num<int>(f[1], path, lineno);
    const TowerId tower = parse_num<TowerId>(f[2], path, lineno);
    if (slot < 0) fail(path, lineno, "negative slot");
    if (tower != kNoRecord && !map.contains(tower))
      fail(path, lineno, "unknown tower id " + std::to_string(tower));
    auto [it, inserted] = rows.try_emplace(user);
    if (inserted) order.push_back(user);
    it->second.emplace_back(slot, tower);
    max_slot = std::max(max_slot, slot);
  }
  if (order.empty()) throw std::runtime_error(path + ": zero trajectories");

  const int total = max_slot + 1;
  const int spd = 86400 / slot_seconds;
  if (total % spd != 0)
    throw std::runtime_error(path + ": " + std::to_string(total) +
                             " slots do not form whole days of " +
                             std::to_string(spd) + " slots");
  TrajectorySet set;
  set.grid.slot_seconds = slot_seconds;
  set.grid.slots_per_day = spd;
  set.grid.num_days = total / spd;
  set.tower_map = map;
  for (UserId user : order) {
    Trajectory t;
    t.user_id = user;
    t.locations.assign(total, kNoRecord);
    std::vector<char> seen(total, 0);
    for (const auto& [slot, tower] : rows[user]) {
      if (seen[slot])
        throw std::runtime_error(path + ": duplicate slot " + std::to_string(slot) +
                                 " for user " + std::to_string(user));
      seen[slot] = 1;
      t.locations[slot] = tower;
    }
    for (int s = 0; s < total; ++s)
      if (!seen[s])
        throw std::runtime_error(path + ": user " + std::to_string(user) +
                                 " is missing slot " + std::to_string(s) +
                                 " (length != " + std::to_string(total) + ")");
    set.trajectories.push_back(std::move(t));
  }
  return set;
}

void store_aggregate(const AggregateSeries& agg, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "slot,tower_id,count\n";
  char buf[96];
  for (std::size_t s = 0; s < agg.counts.size(); ++s)
    for (const auto& [id, c] : agg.counts[s]) {
      if (c == 0) continue;
      std::snprintf(buf, sizeof(buf), "%zu,%d,%d\n", s, id, c);
      out << buf;
    }
}

AggregateSeries load_aggregate(const std::string& path, const TowerMap& map,
                               int slot_seconds) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  strip_cr(line);
  ++lineno;
  if (line != "slot,tower_id,count") fail(path, lineno, "bad header '" + line + "'");
  std::vector<std::string_view> f;
  std::vector<std::map<TowerId, int>> counts;
  while (std::getline(in, line)) {
    strip_cr(line);
    ++lineno;
    if (line.empty()) continue;
    split_csv(line, f);
    if (f.size() != 3) fail(path, lineno, "expected 3 fields");
    const int slot = parse_num<int>(f[0], path, lineno);
    const TowerId tower = parse_num<TowerId>(f[1], path, lineno);
    const int count = parse_num<int>(f[2], path, lineno);
    if (slot < 0) fail(path, lineno, "negative slot");
    if (!map.contains(tower)) fail(path, lineno, "unknown tower id " + std::to_string(tower));
    if (count < 0) fail(path, lineno, "negative count");
    if (static_cast<int>(counts.size()) <= slot) counts.resize(slot + 1);
    counts[slot][tower] += count;
  }
  if (counts.empty()) throw std::runtime_error(path + ": zero slots");

  const int total = static_cast<int>(counts.size());
  const int spd = 86400 / slot_seconds;
  if (total % spd != 0)
    throw std::runtime_error(path + ": " + std::to_string(total) +
                             " slots do not form whole days");
  AggregateSeries agg;
  agg.grid.slot_seconds = slot_seconds;
  agg.grid.slots_per_day = spd;
  agg.grid.num_days = total / spd;
  agg.tower_map = map;
  agg.counts = std::move(counts);
  agg.validate();
  return agg;
}

void store_recovered(const RecoveredTrajectorySet& set, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "user_id,slot,tower_id\n";
  char buf[96];
  const int spd = set.grid.slots_per_day;
  for (std::size_t j = 0; j < set.num_rows(); ++j)
    for (std::size_t d = 0; d < set.days.size(); ++d)
      for (int s = 0; s < spd; ++s) {
        std::snprintf(buf, sizeof(buf), "r%zu,%zu,%d\n", j, d * spd + s,
                      set.days[d][j][s]);
        out << buf;
      }
}

void store_metrics(const std::vector<MetricRow>& rows, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "metric,stage,param,value\n";
  char buf[256];
  for (const MetricRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.9g\n", r.metric.c_str(),
                  r.stage.c_str(), r.param.c_str(), r.value);
    out << buf;
  }
}

void store_cdf(const std::vector<std::pair<double, double>>& points,
               const std::string& path) {
  std::ofstream out = open_out(path);
  out << "meters,cum_fraction\n";
  char buf[96];
  for (const auto& [m, frac] : points) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.9f\n", m, frac);
    out << buf;
  }
}

std::vector<std::pair<std::string, std::string>> load_config(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    strip_cr(line);
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t") != std::string::npos)
        fail(path, lineno, "expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      const std::size_t a = s.find_first_not_of(" \t");
      const std::size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

}  // namespace ash::io
