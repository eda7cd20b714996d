#include "ash/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "ash/simd/distance.hpp"

namespace ash {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return (rng() >> 11) * 0x1.0p-53;
}

TowerMap build_towers(const GeneratorConfig& cfg, std::mt19937_64& rng) {
  const int n = cfg.num_towers;
  const double w = cfg.world_size;
  // Mixed radio topology: ~30% of base stations are three-sector macro
  // sites, the rest single-sector small cells; districts tile the world 4x4.
  const int grid_cells = 4;
  std::vector<Tower> towers;
  towers.reserve(n);
  int bs_id = 0;
  while (static_cast<int>(towers.size()) < n) {
    const double bx = uniform01(rng) * w;
    const double by = uniform01(rng) * w;
    const int want = uniform01(rng) < 0.3 ? 3 : 1;
    const int sectors = std::min(want, n - static_cast<int>(towers.size()));
    for (int s = 0; s < sectors; ++s) {
      const double angle = uniform01(rng) * 2.0 * M_PI;
      const double radius = sectors == 1 ? 0.0 : 60.0 + uniform01(rng) * 90.0;
      Tower t;
      t.id = static_cast<TowerId>(towers.size());
      t.x = std::clamp(bx + radius * std::cos(angle), 0.0, w);
      t.y = std::clamp(by + radius * std::sin(angle), 0.0, w);
      t.base_station_id = bs_id;
      const int cx = std::min(grid_cells - 1, static_cast<int>(t.x / w * grid_cells));
      const int cy = std::min(grid_cells - 1, static_cast<int>(t.y / w * grid_cells));
      t.district_id = cy * grid_cells + cx;
      towers.push_back(t);
    }
    ++bs_id;
  }
  return TowerMap(std::move(towers));
}

// Per tower, indices of its nearest neighbours (excursion targets).
std::vector<std::vector<std::size_t>> neighbor_lists(const TowerMap& map) {
  const std::size_t n = map.size();
  const std::size_t k = std::min<std::size_t>(40, n - 1);
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<double> d(n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    simd::distance_row(map.xs()[i], map.ys()[i], map.xs().data(), map.ys().data(),
                       d.data(), n);
    for (std::size_t j = 0; j < n; ++j) order[j] = j;
    std::partial_sort(order.begin(), order.begin() + k + 1, order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return d[a] != d[b] ? d[a] < d[b] : a < b;
                      });
    for (std::size_t j = 0; j <= k && out[i].size() < k; ++j)
      if (order[j] != i) out[i].push_back(order[j]);
  }
  return out;
}

}  // namespace

void GeneratorConfig::validate() const {
  grid.validate();
  if (num_users <= 0) throw std::invalid_argument("generator: zero users");
  if (num_towers < 2)
    throw std::invalid_argument("generator: need at least 2 towers for distinct home/work");
  if (world_size <= 0.0) throw std::invalid_argument("generator: non-positive world size");
  for (double p : {night_home_prob, work_attachment, exploration_prob})
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("generator: probability outside [0,1]");
  if (commute_speed <= 0.0)
    throw std::invalid_argument("generator: non-positive commute speed");
}

TrajectorySet generate_population(const GeneratorConfig& cfg) {
  cfg.validate();

  std::mt19937_64 world_rng(splitmix64(cfg.seed ^ 0x746f776572ULL));
  TowerMap map = build_towers(cfg, world_rng);
  const auto neighbors = neighbor_lists(map);
  const auto& xs = map.xs();
  const auto& ys = map.ys();
  const std::size_t m = map.size();

  const int spd = cfg.grid.slots_per_day;
  const int night_end = kNightEndHour * 3600 / cfg.grid.slot_seconds;
  const int work_start = kWorkStartHour * 3600 / cfg.grid.slot_seconds;
  const int work_end = kWorkEndHour * 3600 / cfg.grid.slot_seconds;
  const int total = cfg.grid.total_slots();

  TrajectorySet set;
  set.grid = cfg.grid;
  set.tower_map = map;
  set.trajectories.resize(cfg.num_users);

  // Zone the network: each site (base station) is residential or commercial.
  // Homes live on residential towers, workplaces on commercial ones, which
  // keeps morning departures from competing with arrivals next door.
  std::vector<char> commercial(m, 0);
  bool any_commercial = false, any_residential = false;
  for (std::size_t j = 0; j < m; ++j) {
    const std::uint64_t h =
        splitmix64(cfg.seed ^ (0x7a6f6e65ULL + map.towers()[j].base_station_id));
    commercial[j] = (h & 0xff) < 128;  // ~50% of sites
    (commercial[j] ? any_commercial : any_residential) = true;
  }
  if (!any_commercial || !any_residential)
    std::fill(commercial.begin(), commercial.end(), 0);  // degenerate tiny maps

  // Homes: each user gets their own residential site while sites last (a
  // sampled individual per building); only populations larger than the
  // network share home sites. Piling users onto one site is degenerate
  // for the recovery: rows on co-located towers have (near-)tied costs, so
  // no assignment can tell them apart, at the sector level or after
  // coarsening to base stations.
  std::vector<std::size_t> residential;  // one tower per residential site
  {
    std::int32_t last_bs = -1;
    for (std::size_t j = 0; j < m; ++j) {
      if (commercial[j]) continue;
      const std::int32_t bs = map.towers()[j].base_station_id;
      if (bs != last_bs) residential.push_back(j);
      last_bs = bs;
    }
  }
  std::mt19937_64 home_rng(splitmix64(cfg.seed ^ 0x686f6d65ULL));
  for (std::size_t j = residential.size(); j > 1; --j)
    std::swap(residential[j - 1],
              residential[static_cast<std::size_t>(uniform01(home_rng) * j)]);

  auto sibling = [&](std::size_t j) -> std::size_t {
    const std::int32_t bs = map.towers()[j].base_station_id;
    if (j + 1 < m && map.towers()[j + 1].base_station_id == bs) return j + 1;
    if (j >= 1 && map.towers()[j - 1].base_station_id == bs) return j - 1;
    return j;
  };

  // A share of users move as two-person households: the partner lives and
  // works on sibling sectors of the same macro sites, on the same schedule.
  // Their sector-level tracks are genuinely ambiguous to distance-based
  // assignment, while base-station-level aggregation merges them — the
  // co-location ambiguity that makes spatial coarsening improve accuracy.
  // Users 2i and 2i+1 for i < num_pairs form the households; their homes
  // come from the macro-site entries of the shuffled residential list so
  // the partner always has a sibling sector to live on.
  constexpr double kHouseholdFraction = 0.15;
  const int num_pairs =
      std::min(static_cast<int>(cfg.num_users * kHouseholdFraction / 2),
               cfg.num_users / 2);
  std::vector<std::size_t> res_macro, res_rest;
  for (std::size_t j : residential) {
    if (static_cast<int>(res_macro.size()) < num_pairs && sibling(j) != j)
      res_macro.push_back(j);
    else
      res_rest.push_back(j);
  }
  const int usable_pairs = static_cast<int>(res_macro.size());
  if (res_rest.empty()) res_rest = residential;  // degenerate tiny maps

  std::vector<std::mt19937_64> rngs;
  rngs.reserve(cfg.num_users);
  std::vector<std::size_t> homes(cfg.num_users);
  for (int u = 0; u < cfg.num_users; ++u) {
    rngs.emplace_back(splitmix64(cfg.seed ^ splitmix64(0x75736572ULL + u)));
    if (u < 2 * usable_pairs)
      homes[u] = u % 2 == 0 ? res_macro[u / 2] : sibling(res_macro[u / 2]);
    else
      homes[u] = res_rest[static_cast<std::size_t>(u - 2 * usable_pairs) %
                          res_rest.size()];
  }
  const int num_sites = map.towers().back().base_station_id + 1;
  std::vector<int> work_usage(num_sites, 0);  // workers per site

  // Workplace draws are distance-biased: most users work within walking
  // distance of home, a minority commutes further out. Among candidates,
  // prefer towers not yet claimed as a workplace, for the same
  // tie-degeneracy reason as homes.
  std::vector<std::size_t> works(cfg.num_users);
  std::vector<double> commute_dists(cfg.num_users);
  {
    std::vector<double> dist(m);
    for (int u = 0; u < cfg.num_users; ++u) {
      std::mt19937_64& rng = rngs[u];
      const bool in_household = u < 2 * usable_pairs;
      if (in_household && u % 2 == 1) {
        // Household partner: sibling sector of the leader's workplace.
        works[u] = sibling(works[u - 1]);
        commute_dists[u] = commute_dists[u - 1];
        continue;
      }
      const std::size_t home = homes[u];
      simd::distance_row(xs[home], ys[home], xs.data(), ys.data(), dist.data(), m);
      std::vector<std::size_t> local, commuter;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == home || (!commercial[j] && any_commercial)) continue;
        if (in_household && sibling(j) == j) continue;  // need a macro site
        if (dist[j] >= 100.0 && dist[j] <= 300.0) local.push_back(j);
        else if (dist[j] > 300.0 && dist[j] <= 1000.0) commuter.push_back(j);
      }
      constexpr double kLocalWorkProb = 0.95;
      const std::vector<std::size_t>* pool = nullptr;
      if (!local.empty() && (commuter.empty() || uniform01(rng) < kLocalWorkProb))
        pool = &local;
      else if (!commuter.empty())
        pool = &commuter;
      std::size_t work;
      if (pool) {
        int best_usage = INT32_MAX;
        std::vector<std::size_t> best;
        for (std::size_t j : *pool) {
          const int usage = work_usage[map.towers()[j].base_station_id];
          if (usage < best_usage) { best_usage = usage; best.clear(); }
          if (usage == best_usage) best.push_back(j);
        }
        work = best[static_cast<std::size_t>(uniform01(rng) * best.size())];
      } else {
        // Nearest eligible tower other than home.
        work = m;  // sentinel
        for (std::size_t j = 0; j < m; ++j) {
          if (j == home || (!commercial[j] && any_commercial)) continue;
          if (work == m || dist[j] < dist[work]) work = j;
        }
        if (work == m) work = home == 0 ? 1 : 0;
      }
      ++work_usage[map.towers()[work].base_station_id];
      works[u] = work;
      commute_dists[u] = dist[work];
    }
  }

  // Rank users within their work site: commute schedules cycle with that
  // rank so colleagues of one site do not arrive or leave in the same slot.
  // Same-slot arrivals at neighbouring sectors are cost ties the recovery
  // cannot break, so the stagger is what keeps transitions trackable.
  std::vector<int> work_rank(cfg.num_users);
  {
    std::unordered_map<std::int32_t, int> at_site;
    for (int u = 0; u < cfg.num_users; ++u)
      work_rank[u] = at_site[map.towers()[works[u]].base_station_id]++;
  }

  // Household partners keep the leader's schedule phase.
  for (int i = 0; i < usable_pairs; ++i) work_rank[2 * i + 1] = work_rank[2 * i];

  for (int u = 0; u < cfg.num_users; ++u) {
    std::mt19937_64& rng = rngs[u];
    Trajectory& traj = set.trajectories[u];
    traj.user_id = u;
    traj.locations.assign(total, kNoRecord);

    const std::size_t home = homes[u];
    const std::size_t work = works[u];
    const std::int32_t work_site = map.towers()[work].base_station_id;

    const int commute_slots =
        std::max(1, static_cast<int>(std::ceil(commute_dists[u] / cfg.commute_speed)));
    const int max_early = std::max(0, work_start - night_end - commute_slots);
    const int early = static_cast<int>(
        (splitmix64(cfg.seed ^ (0x6172726976ULL + work_site)) + work_rank[u]) % 6);
    const int arrive = work_start - std::min({early, 5, max_early});
    const int depart_morning = std::max(night_end, arrive - commute_slots);
    const int late = static_cast<int>(
        (splitmix64(cfg.seed ^ (0x6c65617665ULL + work_site)) + work_rank[u]) % 8);
    const int leave_evening = std::min(spd - commute_slots - 1, work_end + late);
    const int home_again = leave_evening + commute_slots;

    // Commutes move at constant speed along the straight home-work line,
    // snapped to the nearest tower at each slot.
    auto path_tower = [&](std::size_t a, std::size_t b, double frac) -> std::size_t {
      const double px = xs[a] + (xs[b] - xs[a]) * frac;
      const double py = ys[a] + (ys[b] - ys[a]) * frac;
      return simd::nearest_point(px, py, xs.data(), ys.data(), m);
    };

    // A small share of users spends the last two days of a week-long
    // horizon away on a trip, anchored at a random distant tower. The away
    // days share no towers with the rest of the week, so day-by-day
    // tracking stays easy while longitudinal linking across midnight has to
    // guess which returning chain owns which trip. Drawn from a dedicated
    // stream so non-travelers (and every pre-trip day) are unaffected.
    constexpr double kTravelerFraction = 0.07;
    std::mt19937_64 travel_rng(splitmix64(
        cfg.seed ^ 0x74726970ULL ^
        (static_cast<std::uint64_t>(u) * 0x9e3779b97f4a7c15ULL)));
    const bool travels =
        cfg.grid.num_days >= 6 && uniform01(travel_rng) < kTravelerFraction;
    const int first_travel_day = cfg.grid.num_days - 2;
    const std::size_t leisure =
        travels ? static_cast<std::size_t>(uniform01(travel_rng) * double(m))
                : home;

    // Excursions leave an anchor for a nearby tower and stay one or two
    // slots; a minority of errands outlast a single slot, so some survive
    // mild temporal coarsening while long slots absorb them completely.
    constexpr double kLongExcursionShare = 0.38;
    int exc_left = 0, exc_phase = -1;
    std::size_t exc_tower = home;
    auto anchored = [&](int phase, std::size_t anchor, double trigger) -> std::size_t {
      if (exc_left > 0 && exc_phase == phase) {
        --exc_left;
        return exc_tower;
      }
      exc_left = 0;
      if (uniform01(rng) < trigger) {
        const auto& nb = neighbors[anchor];
        if (!nb.empty()) {
          // Skip the closest towers: a destination several sites away gives
          // excursions a realistic errand radius instead of cell flutter.
          const std::size_t lo = nb.size() > 16 ? 12 : 0;
          exc_tower = nb[lo + static_cast<std::size_t>(
                               uniform01(rng) * double(nb.size() - lo))];
          exc_phase = phase;
          if (uniform01(rng) < kLongExcursionShare) exc_left = 1;
          return exc_tower;
        }
      }
      return anchor;
    };

    for (int day = 0; day < cfg.grid.num_days; ++day) {
      const bool away = travels && day >= first_travel_day;
      for (int s = 0; s < spd; ++s) {
        std::size_t loc;
        if (away) {
          loc = anchored(5, leisure,
                         s < night_end ? 1.0 - cfg.night_home_prob
                                       : cfg.exploration_prob);
        } else if (s < night_end) {
          loc = anchored(0, home, 1.0 - cfg.night_home_prob);
        } else if (s < depart_morning) {
          loc = anchored(1, home, cfg.exploration_prob);
        } else if (s < arrive) {
          const double frac = double(s + 1 - depart_morning) / double(arrive - depart_morning);
          loc = path_tower(home, work, frac);
        } else if (s < work_end) {
          loc = anchored(2, work, 1.0 - cfg.work_attachment);
        } else if (s < leave_evening) {
          loc = anchored(3, work, cfg.exploration_prob);
        } else if (s < home_again) {
          const double frac = double(s + 1 - leave_evening) / double(home_again - leave_evening);
          loc = path_tower(work, home, frac);
        } else {
          loc = anchored(4, home, cfg.exploration_prob);
        }
        traj.locations[day * spd + s] = map.towers()[loc].id;
      }
      exc_left = 0;
      exc_phase = -1;
    }
  }

  // Shuffle the user order so any prefix of the population is a
  // representative sample (household members are built in adjacent pairs).
  std::mt19937_64 order_rng(splitmix64(cfg.seed ^ 0x6f72646572ULL));
  std::shuffle(set.trajectories.begin(), set.trajectories.end(), order_rng);
  for (int u = 0; u < cfg.num_users; ++u)
    set.trajectories[static_cast<std::size_t>(u)].user_id = u;

  return set;
}

}  // namespace ash
