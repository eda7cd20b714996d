#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ash/aggregation.hpp"
#include "ash/assignment.hpp"
#include "ash/core.hpp"

namespace ash {

enum class Stage { Night, Day, Full };

std::string stage_name(Stage stage);

struct RecoveryConfig {
  NightWindow night_window{0, 12};   // [00:00, 06:00) at 30-minute slots
  double prelink_night = 0.0;        // meters; 0 = exact tower match only
  double prelink_day = 0.0;          // meters
  double crossday_link_threshold = 0.0;  // nats; > 0 enables mutual-NN linking
  bool accumulate_history = true;    // cross-day left side spans all prior days
  std::uint64_t seed = 0;

  void validate(const TimeGrid& grid) const;
};

// Recovered locations per day and row. Until stage Full, row indices carry
// no meaning across days; after linking, row j of every day belongs to the
// same recovered user. Sentinel entries mark slots a stage does not cover.
struct RecoveredTrajectorySet {
  TimeGrid grid;
  TowerMap tower_map;
  Stage stage = Stage::Night;
  // days[d][row][slot_in_day]
  std::vector<std::vector<std::vector<TowerId>>> days;

  std::size_t num_rows() const { return days.empty() ? 0 : days.front().size(); }
  // Concatenation across days, row-aligned (meaningful for stage Full).
  std::vector<std::vector<TowerId>> concatenated() const;
};

struct RecoveryResult {
  RecoveredTrajectorySet night;
  RecoveredTrajectorySet day;
  RecoveredTrajectorySet full;
};

// --- cost builders -------------------------------------------------------

// Nighttime: the next location estimate is the trajectory's current tower;
// cost = Euclidean meters to each record.
CostMatrix night_cost(const std::vector<TowerId>& current,
                      const RecordMultiset& next, const TowerMap& map);

// Daytime: velocity extrapolation, estimate = q_t + (q_t - q_prev) in
// coordinate space (not snapped to a tower).
CostMatrix day_cost(const std::vector<TowerId>& prev,
                    const std::vector<TowerId>& current,
                    const RecordMultiset& next, const TowerMap& map);

// --- entropy / information gain ------------------------------------------

// Tower visit counts of a sub-trajectory, ascending tower id, counts > 0.
struct FrequencyHistogram {
  std::vector<std::pair<TowerId, int>> counts;
  int total() const;
};

FrequencyHistogram histogram_of(std::span<const TowerId> locations);
FrequencyHistogram merge(const FrequencyHistogram& a, const FrequencyHistogram& b);

// Shannon entropy in nats. Throws on an empty histogram.
double entropy(const FrequencyHistogram& h);

// H(merged) - (H(a) + H(b)) / 2; zero iff the two distributions coincide.
double info_gain(const FrequencyHistogram& a, const FrequencyHistogram& b);

CostMatrix crossday_cost(const std::vector<FrequencyHistogram>& day_d,
                         const std::vector<FrequencyHistogram>& day_d1);

// --- stages ----------------------------------------------------------------

RecoveredTrajectorySet recover_night(const AggregateSeries& agg, const RecoveryConfig& cfg);
RecoveredTrajectorySet recover_day(const AggregateSeries& agg,
                                   const RecoveredTrajectorySet& night,
                                   const RecoveryConfig& cfg);
RecoveredTrajectorySet link_days(const RecoveredTrajectorySet& day_stage,
                                 const RecoveryConfig& cfg);

RecoveryResult recover(const AggregateSeries& agg, const RecoveryConfig& cfg);

}  // namespace ash
