#pragma once

#include <cstdint>

#include "ash/core.hpp"

namespace ash {

// Parametric home/work anchor population. Defaults are calibrated so that
// the population shows the regularity and uniqueness the attack relies on:
// a dominant home tower at night, a dominant work tower during working
// hours, short constant-speed commutes, and one-to-two-slot excursions to
// nearby towers. The three probabilities below are per-slot excursion
// triggers, so the realized dwell share at an anchor is a little lower than
// the stated probability (an excursion can outlast one slot).
struct GeneratorConfig {
  int num_users = 1000;
  int num_towers = 36000;
  double world_size = 32000.0;     // meters, square world
  double night_home_prob = 0.93;  // nighttime slot at home
  double work_attachment = 0.97;  // working-hour slot at work
  double exploration_prob = 0.07; // off-anchor excursion elsewhere
  double commute_speed = 200.0;    // meters per slot
  std::uint64_t seed = 1;

  TimeGrid grid;  // 30-minute slots, 7 days by default

  void validate() const;
};

// Working hours are fixed at 09:00-18:00; the night window at 00:00-06:00.
inline constexpr int kNightEndHour = 6;
inline constexpr int kWorkStartHour = 9;
inline constexpr int kWorkEndHour = 18;

TrajectorySet generate_population(const GeneratorConfig& config);

}  // namespace ash
