#include "ash/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ash/simd/distance.hpp"

namespace ash {

std::string stage_name(Stage stage) {
  switch (stage) {
    case Stage::Night: return "night";
    case Stage::Day: return "day";
    case Stage::Full: return "full";
  }
  return "?";
}

void RecoveryConfig::validate(const TimeGrid& grid) const {
  if (night_window.start_slot < 0 || night_window.end_slot > grid.slots_per_day ||
      night_window.length() < 1)
    throw std::invalid_argument("night window outside the day");
  if (prelink_night < 0.0 || prelink_day < 0.0 || crossday_link_threshold < 0.0)
    throw std::invalid_argument("negative pre-link threshold");
}

std::vector<std::vector<TowerId>> RecoveredTrajectorySet::concatenated() const {
  std::vector<std::vector<TowerId>> out(num_rows());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j].reserve(static_cast<std::size_t>(grid.total_slots()));
    for (const auto& day : days)
      out[j].insert(out[j].end(), day[j].begin(), day[j].end());
  }
  return out;
}

// --- cost builders ---------------------------------------------------------

CostMatrix night_cost(const std::vector<TowerId>& current,
                      const RecordMultiset& next, const TowerMap& map) {
  const std::size_t n = current.size();
  if (n != next.records.size())
    throw std::invalid_argument("night_cost: size mismatch");
  std::vector<double> rx(n), ry(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Tower& t = map.tower(next.records[j]);
    rx[j] = t.x;
    ry[j] = t.y;
  }
  CostMatrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Tower& t = map.tower(current[i]);
    simd::distance_row(t.x, t.y, rx.data(), ry.data(), c.row(i), n);
  }
  return c;
}

CostMatrix day_cost(const std::vector<TowerId>& prev,
                    const std::vector<TowerId>& current,
                    const RecordMultiset& next, const TowerMap& map) {
  const std::size_t n = current.size();
  if (n != prev.size() || n != next.records.size())
    throw std::invalid_argument("day_cost: size mismatch");
  std::vector<double> rx(n), ry(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Tower& t = map.tower(next.records[j]);
    rx[j] = t.x;
    ry[j] = t.y;
  }
  CostMatrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Tower& cur = map.tower(current[i]);
    const Tower& pre = map.tower(prev[i]);
    // Velocity extrapolation; the estimate stays an arbitrary point.
    const double ex = cur.x + (cur.x - pre.x);
    const double ey = cur.y + (cur.y - pre.y);
    simd::distance_row(ex, ey, rx.data(), ry.data(), c.row(i), n);
  }
  return c;
}

// --- entropy / information gain ---------------------------------------------

namespace {

double xlogx(std::int64_t c) {
  static const std::vector<double> table = [] {
    std::vector<double> t(4096, 0.0);
    for (std::size_t i = 2; i < t.size(); ++i)
      t[i] = double(i) * std::log(double(i));
    return t;
  }();
  if (c < static_cast<std::int64_t>(table.size())) return table[c];
  return double(c) * std::log(double(c));
}

double sum_xlogx(const FrequencyHistogram& h) {
  double s = 0.0;
  for (const auto& [id, c] : h.counts) s += xlogx(c);
  return s;
}

bool same_distribution(const FrequencyHistogram& a, const FrequencyHistogram& b) {
  if (a.counts.size() != b.counts.size()) return false;
  const std::int64_t sa = a.total(), sb = b.total();
  for (std::size_t k = 0; k < a.counts.size(); ++k) {
    if (a.counts[k].first != b.counts[k].first) return false;
    if (static_cast<std::int64_t>(a.counts[k].second) * sb !=
        static_cast<std::int64_t>(b.counts[k].second) * sa)
      return false;
  }
  return true;
}

}  // namespace

int FrequencyHistogram::total() const {
  int s = 0;
  for (const auto& [id, c] : counts) s += c;
  return s;
}

FrequencyHistogram histogram_of(std::span<const TowerId> locations) {
  std::vector<TowerId> sorted;
  sorted.reserve(locations.size());
  for (TowerId id : locations)
    if (id != kNoRecord) sorted.push_back(id);
  std::sort(sorted.begin(), sorted.end());
  FrequencyHistogram h;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    h.counts.emplace_back(sorted[i], static_cast<int>(j - i));
    i = j;
  }
  return h;
}

FrequencyHistogram merge(const FrequencyHistogram& a, const FrequencyHistogram& b) {
  FrequencyHistogram out;
  out.counts.reserve(a.counts.size() + b.counts.size());
  std::size_t i = 0, j = 0;
  while (i < a.counts.size() || j < b.counts.size()) {
    if (j == b.counts.size() ||
        (i < a.counts.size() && a.counts[i].first < b.counts[j].first)) {
      out.counts.push_back(a.counts[i++]);
    } else if (i == a.counts.size() || b.counts[j].first < a.counts[i].first) {
      out.counts.push_back(b.counts[j++]);
    } else {
      out.counts.emplace_back(a.counts[i].first,
                              a.counts[i].second + b.counts[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

double entropy(const FrequencyHistogram& h) {
  if (h.counts.empty()) throw std::invalid_argument("entropy: empty histogram");
  const double s = h.total();
  return std::log(s) - sum_xlogx(h) / s;
}

double info_gain(const FrequencyHistogram& a, const FrequencyHistogram& b) {
  if (a.counts.empty() || b.counts.empty())
    throw std::invalid_argument("info_gain: empty histogram");
  if (same_distribution(a, b)) return 0.0;
  const FrequencyHistogram m = merge(a, b);
  return entropy(m) - (entropy(a) + entropy(b)) / 2.0;
}

CostMatrix crossday_cost(const std::vector<FrequencyHistogram>& day_d,
                         const std::vector<FrequencyHistogram>& day_d1) {
  if (day_d.size() != day_d1.size())
    throw std::invalid_argument("crossday_cost: size mismatch");
  const std::size_t n = day_d.size();
  CostMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      c.at(i, j) = info_gain(day_d[i], day_d1[j]);
  return c;
}

// --- per-slot linking --------------------------------------------------------

namespace {

// Cached stats for fast pairwise information gain.
struct HistStats {
  double sxx = 0.0;
  double total = 0.0;
  double h = 0.0;
};

HistStats stats_of(const FrequencyHistogram& h) {
  HistStats s;
  s.sxx = sum_xlogx(h);
  s.total = h.total();
  s.h = std::log(s.total) - s.sxx / s.total;
  return s;
}

double fast_info_gain(const FrequencyHistogram& a, const HistStats& sa,
                      const FrequencyHistogram& b, const HistStats& sb) {
  if (same_distribution(a, b)) return 0.0;
  double sxx = sa.sxx + sb.sxx;
  std::size_t i = 0, j = 0;
  while (i < a.counts.size() && j < b.counts.size()) {
    if (a.counts[i].first < b.counts[j].first) {
      ++i;
    } else if (b.counts[j].first < a.counts[i].first) {
      ++j;
    } else {
      const int fa = a.counts[i].second, fb = b.counts[j].second;
      sxx += xlogx(fa + fb) - xlogx(fa) - xlogx(fb);
      ++i;
      ++j;
    }
  }
  const double s = sa.total + sb.total;
  const double hm = std::log(s) - sxx / s;
  return hm - (sa.h + sb.h) / 2.0;
}

// Links every row (a next-location estimate) to one record of the slot:
// greedy pre-link first, exact LSAP on the remainder. Returns the record
// index assigned to each row.
std::vector<std::size_t> link_step(const std::vector<double>& ex,
                                   const std::vector<double>& ey,
                                   const RecordMultiset& records,
                                   const TowerMap& map, double threshold) {
  const std::size_t n = ex.size();
  if (n != records.records.size())
    throw std::invalid_argument("link_step: size mismatch");

  std::vector<double> cx(n), cy(n);
  std::vector<int> ckey(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Tower& t = map.tower(records.records[j]);
    cx[j] = t.x;
    cy[j] = t.y;
    ckey[j] = records.records[j];
  }

  PrelinkResult pre = prelink(ex, ey, cx, cy, ckey, threshold);
  std::vector<std::size_t> assign(n);
  for (const auto& [row, col] : pre.links) assign[row] = col;

  if (!pre.rows_left.empty()) {
    const std::size_t m = pre.rows_left.size();
    std::vector<double> rx(m), ry(m);
    for (std::size_t j = 0; j < m; ++j) {
      rx[j] = cx[pre.cols_left[j]];
      ry[j] = cy[pre.cols_left[j]];
    }
    CostMatrix c(m);
    for (std::size_t i = 0; i < m; ++i)
      simd::distance_row(ex[pre.rows_left[i]], ey[pre.rows_left[i]], rx.data(),
                         ry.data(), c.row(i), m);
    const Assignment sol = solve_lsap(c);
    for (std::size_t i = 0; i < m; ++i)
      assign[pre.rows_left[i]] = pre.cols_left[sol.perm[i]];
  }
  return assign;
}

}  // namespace

// --- stages -------------------------------------------------------------------

RecoveredTrajectorySet recover_night(const AggregateSeries& agg,
                                     const RecoveryConfig& cfg) {
  cfg.validate(agg.grid);
  const int n = agg.num_users();
  if (n == 0) throw std::invalid_argument("recover_night: empty aggregate");
  const int spd = agg.grid.slots_per_day;
  const NightWindow& w = cfg.night_window;

  RecoveredTrajectorySet out;
  out.grid = agg.grid;
  out.tower_map = agg.tower_map;
  out.stage = Stage::Night;
  out.days.assign(agg.grid.num_days,
                  std::vector<std::vector<TowerId>>(
                      n, std::vector<TowerId>(spd, kNoRecord)));

  std::vector<double> ex(n), ey(n);
  for (int d = 0; d < agg.grid.num_days; ++d) {
    auto& rows = out.days[d];
    // Seed from the first night slot's canonical record order.
    const RecordMultiset seed = derive_records(agg, d * spd + w.start_slot);
    std::vector<TowerId> current = seed.records;
    for (int j = 0; j < n; ++j) rows[j][w.start_slot] = current[j];

    for (int s = w.start_slot; s + 1 < w.end_slot; ++s) {
      const RecordMultiset next = derive_records(agg, d * spd + s + 1);
      for (int j = 0; j < n; ++j) {
        const Tower& t = agg.tower_map.tower(current[j]);
        ex[j] = t.x;
        ey[j] = t.y;
      }
      const auto assign = link_step(ex, ey, next, agg.tower_map, cfg.prelink_night);
      for (int j = 0; j < n; ++j) {
        current[j] = next.records[assign[j]];
        rows[j][s + 1] = current[j];
      }
    }
  }
  return out;
}

RecoveredTrajectorySet recover_day(const AggregateSeries& agg,
                                   const RecoveredTrajectorySet& night,
                                   const RecoveryConfig& cfg) {
  cfg.validate(agg.grid);
  if (night.stage != Stage::Night)
    throw std::invalid_argument("recover_day: expects a night-stage input");
  const int n = static_cast<int>(night.num_rows());
  const int spd = agg.grid.slots_per_day;
  const NightWindow& w = cfg.night_window;

  RecoveredTrajectorySet out = night;
  out.stage = Stage::Day;

  std::vector<double> ex(n), ey(n);
  auto extrapolate = [&](const std::vector<std::vector<TowerId>>& rows, int from,
                         int anchor) {
    for (int j = 0; j < n; ++j) {
      const Tower& cur = agg.tower_map.tower(rows[j][from]);
      const TowerId prev_id =
          (anchor >= 0 && anchor < spd && rows[j][anchor] != kNoRecord)
              ? rows[j][anchor]
              : rows[j][from];
      const Tower& prev = agg.tower_map.tower(prev_id);
      ex[j] = cur.x + (cur.x - prev.x);
      ey[j] = cur.y + (cur.y - prev.y);
    }
  };

  for (int d = 0; d < agg.grid.num_days; ++d) {
    auto& rows = out.days[d];
    // Forward: end of the night window to the end of the day.
    for (int s = w.end_slot - 1; s + 1 < spd; ++s) {
      extrapolate(rows, s, s - 1);
      const RecordMultiset next = derive_records(agg, d * spd + s + 1);
      const auto assign = link_step(ex, ey, next, agg.tower_map, cfg.prelink_day);
      for (int j = 0; j < n; ++j) rows[j][s + 1] = next.records[assign[j]];
    }
    // Backward: start of the night window to 00:00, mirrored velocity.
    for (int s = w.start_slot; s > 0; --s) {
      extrapolate(rows, s, s + 1);
      const RecordMultiset prev = derive_records(agg, d * spd + s - 1);
      const auto assign = link_step(ex, ey, prev, agg.tower_map, cfg.prelink_day);
      for (int j = 0; j < n; ++j) rows[j][s - 1] = prev.records[assign[j]];
    }
  }
  return out;
}

RecoveredTrajectorySet link_days(const RecoveredTrajectorySet& day_stage,
                                 const RecoveryConfig& cfg) {
  if (day_stage.stage != Stage::Day)
    throw std::invalid_argument("link_days: expects a day-stage input");
  const std::size_t n = day_stage.num_rows();
  const std::size_t num_days = day_stage.days.size();

  RecoveredTrajectorySet out;
  out.grid = day_stage.grid;
  out.tower_map = day_stage.tower_map;
  out.stage = Stage::Full;
  out.days.resize(num_days);
  out.days[0] = day_stage.days[0];

  std::vector<FrequencyHistogram> left(n);
  std::vector<HistStats> left_stats(n);
  for (std::size_t j = 0; j < n; ++j) {
    left[j] = histogram_of(day_stage.days[0][j]);
    left_stats[j] = stats_of(left[j]);
  }

  for (std::size_t d = 0; d + 1 < num_days; ++d) {
    std::vector<FrequencyHistogram> right(n);
    std::vector<HistStats> right_stats(n);
    for (std::size_t j = 0; j < n; ++j) {
      right[j] = histogram_of(day_stage.days[d + 1][j]);
      right_stats[j] = stats_of(right[j]);
    }

    std::vector<std::size_t> match(n);
    if (cfg.crossday_link_threshold > 0.0) {
      // Mutual nearest neighbours below the threshold link directly;
      // the exact solve runs only on the remainder.
      constexpr double kInf = std::numeric_limits<double>::infinity();
      std::vector<double> row_min(n, kInf), col_min(n, kInf);
      std::vector<std::size_t> row_arg(n, 0), col_arg(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double g = fast_info_gain(left[i], left_stats[i], right[j], right_stats[j]);
          if (g < row_min[i]) { row_min[i] = g; row_arg[i] = j; }
          if (g < col_min[j]) { col_min[j] = g; col_arg[j] = i; }
        }
      }
      std::vector<char> row_done(n, 0), col_done(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = row_arg[i];
        if (col_arg[j] == i && row_min[i] <= cfg.crossday_link_threshold) {
          match[i] = j;
          row_done[i] = col_done[j] = 1;
        }
      }
      std::vector<std::size_t> rows_left, cols_left;
      for (std::size_t i = 0; i < n; ++i) if (!row_done[i]) rows_left.push_back(i);
      for (std::size_t j = 0; j < n; ++j) if (!col_done[j]) cols_left.push_back(j);
      if (!rows_left.empty()) {
        CostMatrix c(rows_left.size());
        for (std::size_t a = 0; a < rows_left.size(); ++a)
          for (std::size_t b = 0; b < cols_left.size(); ++b)
            c.at(a, b) = fast_info_gain(left[rows_left[a]], left_stats[rows_left[a]],
                                        right[cols_left[b]], right_stats[cols_left[b]]);
        const Assignment sol = solve_lsap(c);
        for (std::size_t a = 0; a < rows_left.size(); ++a)
          match[rows_left[a]] = cols_left[sol.perm[a]];
      }
    } else {
      CostMatrix c(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          c.at(i, j) = fast_info_gain(left[i], left_stats[i], right[j], right_stats[j]);
      const Assignment sol = solve_lsap(c);
      match = sol.perm;
    }

    out.days[d + 1].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.days[d + 1][i] = day_stage.days[d + 1][match[i]];
      if (cfg.accumulate_history) {
        left[i] = merge(left[i], right[match[i]]);
      } else {
        left[i] = right[match[i]];
      }
      left_stats[i] = stats_of(left[i]);
    }
  }
  return out;
}

RecoveryResult recover(const AggregateSeries& agg, const RecoveryConfig& cfg) {
  RecoveryResult result;
  result.night = recover_night(agg, cfg);
  result.day = recover_day(agg, result.night, cfg);
  result.full = link_days(result.day, cfg);
  return result;
}

}  // namespace ash
