#include "ash/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace ash {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<int> all_slots(int total) {
  std::vector<int> s(total);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

// Per slot: tower -> users located there (ascending user index).
using SlotIndex = std::vector<std::unordered_map<TowerId, std::vector<int>>>;

SlotIndex build_index(const TrajectorySet& truth) {
  SlotIndex index(truth.grid.total_slots());
  for (int u = 0; u < static_cast<int>(truth.trajectories.size()); ++u) {
    const auto& loc = truth.trajectories[u].locations;
    for (std::size_t s = 0; s < loc.size(); ++s)
      if (loc[s] != kNoRecord) index[s][loc[s]].push_back(u);
  }
  return index;
}

}  // namespace

Pairing pair_greedy(const std::vector<std::vector<TowerId>>& recovered,
                    const TrajectorySet& truth, const std::vector<int>& slots) {
  const std::size_t n = recovered.size();
  if (n != truth.trajectories.size())
    throw std::invalid_argument("pair_greedy: size mismatch");
  const std::vector<int> compare =
      slots.empty() ? all_slots(truth.grid.total_slots()) : slots;

  const SlotIndex index = build_index(truth);

  Pairing pairing(n);
  std::vector<char> paired(n, 0);
  std::vector<int> sim(n, 0);
  std::vector<int> touched;
  for (std::size_t i = 0; i < n; ++i) {
    touched.clear();
    for (int s : compare) {
      const TowerId q = recovered[i][s];
      if (q == kNoRecord) continue;
      auto it = index[s].find(q);
      if (it == index[s].end()) continue;
      for (int u : it->second) {
        if (sim[u] == 0) touched.push_back(u);
        sim[u] += 1;
      }
    }
    // Most similar unpaired truth trajectory, ties to the smallest index.
    int best = -1, best_sim = -1;
    std::sort(touched.begin(), touched.end());
    for (int u : touched)
      if (!paired[u] && sim[u] > best_sim) { best = u; best_sim = sim[u]; }
    if (best_sim <= 0) {
      for (std::size_t u = 0; u < n; ++u)
        if (!paired[u]) { best = static_cast<int>(u); break; }
    }
    pairing[i] = static_cast<std::size_t>(best);
    paired[best] = 1;
    for (int u : touched) sim[u] = 0;
  }
  return pairing;
}

double accuracy(const std::vector<std::vector<TowerId>>& recovered,
                const TrajectorySet& truth, const Pairing& pairing,
                const std::vector<int>& slots) {
  const std::size_t n = recovered.size();
  if (n != pairing.size() || n != truth.trajectories.size())
    throw std::invalid_argument("accuracy: size mismatch");
  if (n == 0) return 0.0;
  const std::vector<int> compare =
      slots.empty() ? all_slots(truth.grid.total_slots()) : slots;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& y = truth.trajectories[pairing[i]].locations;
    int hits = 0;
    for (int s : compare)
      if (recovered[i][s] != kNoRecord && recovered[i][s] == y[s]) ++hits;
    sum += double(hits) / double(compare.size());
  }
  return sum / double(n);
}

ErrorCdf recovery_error(const std::vector<std::vector<TowerId>>& recovered,
                        const TrajectorySet& truth, const Pairing& pairing,
                        const std::vector<int>& slots) {
  const std::vector<int> compare =
      slots.empty() ? all_slots(truth.grid.total_slots()) : slots;
  ErrorCdf out;
  out.errors.reserve(recovered.size() * compare.size());
  const TowerMap& map = truth.tower_map;
  for (std::size_t i = 0; i < recovered.size(); ++i) {
    const auto& y = truth.trajectories[pairing[i]].locations;
    for (int s : compare) {
      if (recovered[i][s] == kNoRecord || y[s] == kNoRecord) continue;
      const Tower& a = map.tower(recovered[i][s]);
      const Tower& b = map.tower(y[s]);
      const double dx = a.x - b.x, dy = a.y - b.y;
      out.errors.push_back(std::sqrt(dx * dx + dy * dy));
    }
  }
  std::vector<double> sorted = out.errors;
  std::sort(sorted.begin(), sorted.end());
  auto cum_at = [&](double m) {
    return sorted.empty()
               ? 1.0
               : double(std::upper_bound(sorted.begin(), sorted.end(), m) -
                        sorted.begin()) /
                     double(sorted.size());
  };
  for (double m : {0.0, 100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0})
    out.points.emplace_back(m, cum_at(m));
  for (int d = 1; d <= 10 && !sorted.empty(); ++d) {
    const std::size_t idx =
        std::min(sorted.size() - 1, sorted.size() * d / 10);
    out.points.emplace_back(sorted[idx], cum_at(sorted[idx]));
  }
  std::sort(out.points.begin(), out.points.end());
  out.points.erase(std::unique(out.points.begin(), out.points.end()),
                   out.points.end());
  return out;
}

UniquenessStrategy parse_strategy(const std::string& name) {
  if (name == "topk") return UniquenessStrategy::TopK;
  if (name == "randk") return UniquenessStrategy::RandK;
  if (name == "contk") return UniquenessStrategy::ContK;
  throw std::invalid_argument("unknown uniqueness strategy: " + name);
}

namespace {

std::vector<TowerId> topk_key(const std::vector<TowerId>& traj, int k) {
  std::unordered_map<TowerId, int> freq;
  for (TowerId id : traj)
    if (id != kNoRecord) freq[id] += 1;
  std::vector<std::pair<TowerId, int>> items(freq.begin(), freq.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<TowerId> key;
  for (int i = 0; i < k; ++i)
    key.push_back(i < static_cast<int>(items.size()) ? items[i].first : kNoRecord);
  std::sort(key.begin(), key.end());  // multiset semantics
  return key;
}

double sampled_uniqueness(const std::vector<std::vector<TowerId>>& trajs, int k,
                          bool contiguous, std::uint64_t seed) {
  const std::size_t n = trajs.size();
  if (n == 0) return 0.0;
  const int total = static_cast<int>(trajs.front().size());
  constexpr int kRounds = 10;

  // (slot, tower) -> users consistent with that point.
  std::vector<std::unordered_map<TowerId, std::vector<std::size_t>>> index(total);
  for (std::size_t u = 0; u < n; ++u)
    for (int s = 0; s < total; ++s)
      if (trajs[u][s] != kNoRecord) index[s][trajs[u][s]].push_back(u);

  double fraction_sum = 0.0;
  for (int round = 0; round < kRounds; ++round) {
    std::size_t unique_users = 0;
    for (std::size_t u = 0; u < n; ++u) {
      std::mt19937_64 rng(mix64(seed ^ mix64(round * 1000003ULL + u)));
      std::vector<int> slots;
      if (contiguous) {
        const int span = std::min(k, total);
        const int start = static_cast<int>(rng() % std::max(1, total - span + 1));
        for (int s = start; s < start + span; ++s) slots.push_back(s);
      } else {
        for (int i = 0; i < k; ++i) slots.push_back(static_cast<int>(rng() % total));
      }
      // Count trajectories consistent with every sampled point.
      std::size_t consistent = 0;
      bool first = true;
      std::vector<std::size_t> candidates;
      for (int s : slots) {
        const TowerId q = trajs[u][s];
        auto it = index[s].find(q);
        std::vector<std::size_t> here =
            it == index[s].end() ? std::vector<std::size_t>{} : it->second;
        if (first) {
          candidates = here;
          first = false;
        } else {
          std::vector<std::size_t> kept;
          std::set_intersection(candidates.begin(), candidates.end(),
                                here.begin(), here.end(), std::back_inserter(kept));
          candidates = std::move(kept);
        }
        if (candidates.empty()) break;
      }
      consistent = candidates.size();
      if (consistent == 1) ++unique_users;
    }
    fraction_sum += double(unique_users) / double(n);
  }
  return fraction_sum / kRounds;
}

}  // namespace

double uniqueness(const std::vector<std::vector<TowerId>>& trajectories, int k,
                  UniquenessStrategy strategy, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("uniqueness: K must be >= 1");
  const std::size_t n = trajectories.size();
  if (n == 0) return 0.0;
  if (strategy == UniquenessStrategy::TopK) {
    std::map<std::vector<TowerId>, int> key_count;
    std::vector<std::vector<TowerId>> keys(n);
    for (std::size_t u = 0; u < n; ++u) {
      keys[u] = topk_key(trajectories[u], k);
      key_count[keys[u]] += 1;
    }
    std::size_t unique_users = 0;
    for (std::size_t u = 0; u < n; ++u)
      if (key_count[keys[u]] == 1) ++unique_users;
    return double(unique_users) / double(n);
  }
  return sampled_uniqueness(trajectories, k,
                            strategy == UniquenessStrategy::ContK, seed);
}

double stage_accuracy(const RecoveredTrajectorySet& snapshot,
                      const TrajectorySet& truth) {
  if (snapshot.stage == Stage::Full) {
    const auto rows = snapshot.concatenated();
    return accuracy(rows, truth, pair_greedy(rows, truth));
  }
  // Per-day pairing over the covered slots.
  const int spd = snapshot.grid.slots_per_day;
  double sum = 0.0;
  int days = 0;
  for (std::size_t d = 0; d < snapshot.days.size(); ++d) {
    std::vector<int> slots;
    for (int s = 0; s < spd; ++s)
      if (snapshot.days[d].front()[s] != kNoRecord)
        slots.push_back(static_cast<int>(d) * spd + s);
    std::vector<std::vector<TowerId>> rows(snapshot.num_rows());
    for (std::size_t j = 0; j < rows.size(); ++j) {
      rows[j].assign(truth.grid.total_slots(), kNoRecord);
      for (int s = 0; s < spd; ++s)
        rows[j][d * spd + s] = snapshot.days[d][j][s];
    }
    const Pairing p = pair_greedy(rows, truth, slots);
    sum += accuracy(rows, truth, p, slots);
    ++days;
  }
  return days == 0 ? 0.0 : sum / days;
}

RegularityReport regularity_stats(const TrajectorySet& set,
                                  const NightWindow& night, std::uint64_t seed) {
  RegularityReport report;
  const std::size_t n = set.trajectories.size();
  const int total = set.grid.total_slots();
  const int spd = set.grid.slots_per_day;
  const TowerMap& map = set.tower_map;

  report.topk_fraction.assign(5, 0.0);
  std::size_t single_night = 0;
  double dwell_sum = 0.0;

  for (const Trajectory& tr : set.trajectories) {
    std::unordered_map<TowerId, int> freq;
    int records = 0;
    for (TowerId id : tr.locations)
      if (id != kNoRecord) { freq[id] += 1; ++records; }
    std::vector<int> counts;
    for (const auto& [id, c] : freq) counts.push_back(c);
    std::sort(counts.rbegin(), counts.rend());
    int cum = 0;
    for (int k = 0; k < 5; ++k) {
      if (k < static_cast<int>(counts.size())) cum += counts[k];
      report.topk_fraction[k] += records ? double(cum) / records : 0.0;
    }

    std::unordered_map<TowerId, int> night_freq;
    int night_records = 0;
    for (int d = 0; d < set.grid.num_days; ++d)
      for (int s = night.start_slot; s < night.end_slot; ++s) {
        const TowerId id = tr.locations[d * spd + s];
        if (id != kNoRecord) { night_freq[id] += 1; ++night_records; }
      }
    if (night_freq.size() == 1) ++single_night;
    int top = 0;
    for (const auto& [id, c] : night_freq) top = std::max(top, c);
    if (night_records) dwell_sum += double(top) / night_records;

    // Velocity extrapolation error against the actual next location.
    for (int t = 1; t + 1 < total; ++t) {
      const TowerId a = tr.locations[t - 1], b = tr.locations[t], c = tr.locations[t + 1];
      if (a == kNoRecord || b == kNoRecord || c == kNoRecord) continue;
      const Tower& ta = map.tower(a);
      const Tower& tb = map.tower(b);
      const Tower& tc = map.tower(c);
      const double px = tb.x + (tb.x - ta.x);
      const double py = tb.y + (tb.y - ta.y);
      const double dx = px - tc.x, dy = py - tc.y;
      report.velocity_errors.push_back(std::sqrt(dx * dx + dy * dy));
    }
  }
  for (double& f : report.topk_fraction) f /= n ? n : 1;
  report.single_night_location_fraction = n ? double(single_night) / n : 0.0;
  report.mean_night_top_dwell = n ? dwell_sum / n : 0.0;

  // Same-user vs different-user cross-day information gains.
  std::vector<std::vector<FrequencyHistogram>> hist(n);
  for (std::size_t u = 0; u < n; ++u) {
    hist[u].resize(set.grid.num_days);
    for (int d = 0; d < set.grid.num_days; ++d)
      hist[u][d] = histogram_of(std::span<const TowerId>(
          set.trajectories[u].locations.data() + d * spd, spd));
  }
  std::mt19937_64 rng(mix64(seed ^ 0x67616e73ULL));
  for (std::size_t u = 0; u < n; ++u)
    for (int d = 0; d + 1 < set.grid.num_days; ++d) {
      report.same_user_gains.push_back(info_gain(hist[u][d], hist[u][d + 1]));
      if (n > 1) {
        std::size_t v = rng() % n;
        if (v == u) v = (v + 1) % n;
        report.diff_user_gains.push_back(info_gain(hist[u][d], hist[v][d + 1]));
      }
    }
  return report;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : (values[m - 1] + values[m]) / 2.0;
}

}  // namespace ash
