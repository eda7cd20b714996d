#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ash/core.hpp"
#include "ash/recovery.hpp"

namespace ash {

// recovered index -> ground-truth index, bijective.
using Pairing = std::vector<std::size_t>;

// Greedy pairing: recovered trajectories in ascending index, each taking the
// unpaired truth trajectory with the most identical (slot, tower) points,
// ties to the smallest truth index. `slots` restricts the comparison (empty
// = all slots); sentinels never match.
Pairing pair_greedy(const std::vector<std::vector<TowerId>>& recovered,
                    const TrajectorySet& truth,
                    const std::vector<int>& slots = {});

// Mean fraction of compared slots where the paired trajectories agree.
double accuracy(const std::vector<std::vector<TowerId>>& recovered,
                const TrajectorySet& truth, const Pairing& pairing,
                const std::vector<int>& slots = {});

struct ErrorCdf {
  std::vector<double> errors;                       // meters, one per (i, t)
  std::vector<std::pair<double, double>> points;    // (meters, cum fraction)
};

// Euclidean recovery error per point, plus a CDF sampled on the fixed grid
// {0, 100, 200, 500, 1000, 2000, 5000} and at deciles.
ErrorCdf recovery_error(const std::vector<std::vector<TowerId>>& recovered,
                        const TrajectorySet& truth, const Pairing& pairing,
                        const std::vector<int>& slots = {});

enum class UniquenessStrategy { TopK, RandK, ContK };

UniquenessStrategy parse_strategy(const std::string& name);

// Fraction of users uniquely distinguished by K selected points. Top-K keys
// are the multiset of the K most frequent towers (count ties to the smaller
// id, short histograms padded with the sentinel). Rand-K / Cont-K sample
// K (slot, tower) points (10 rounds, averaged) and ask whether any other
// trajectory is consistent with all of them.
double uniqueness(const std::vector<std::vector<TowerId>>& trajectories,
                  int k, UniquenessStrategy strategy, std::uint64_t seed = 0);

// Per-stage recovery accuracy. Night and day snapshots pair per day over the
// slots they cover; full snapshots pair once over the whole horizon.
double stage_accuracy(const RecoveredTrajectorySet& snapshot,
                      const TrajectorySet& truth);

struct RegularityReport {
  // Mean fraction of records in each user's top-k towers, k = 1..5.
  std::vector<double> topk_fraction;
  // Distribution of distinct night towers: fraction of users with exactly 1.
  double single_night_location_fraction = 0.0;
  double mean_night_top_dwell = 0.0;  // night share of the modal night tower
  std::vector<double> velocity_errors;  // extrapolation error, meters
  std::vector<double> same_user_gains;  // consecutive-day info gains
  std::vector<double> diff_user_gains;  // sampled cross-user info gains
};

RegularityReport regularity_stats(const TrajectorySet& set,
                                  const NightWindow& night = {0, 12},
                                  std::uint64_t seed = 0);

double median(std::vector<double> values);

}  // namespace ash
