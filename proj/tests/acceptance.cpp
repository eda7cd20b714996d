// Acceptance harness: runs the twelve release criteria end to end and prints
// one PASS/FAIL line per criterion. Exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ash/aggregation.hpp"
#include "ash/assignment.hpp"
#include "ash/evaluation.hpp"
#include "ash/generator.hpp"
#include "ash/io.hpp"
#include "ash/recovery.hpp"
#include "support.hpp"

using namespace ash;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what) {
  std::printf("criterion %2d: %s  %s\n", criterion, ok ? "PASS" : "FAIL",
              what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::vector<TowerId>> rows_of(const TrajectorySet& set) {
  std::vector<std::vector<TowerId>> rows;
  for (const Trajectory& t : set.trajectories) rows.push_back(t.locations);
  return rows;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// Full pipeline on a truth set: aggregate (optionally perturbed), recover,
// pair, return full-stage accuracy.
double pipeline_accuracy(const TrajectorySet& truth, double perturb_prob = -1.0,
                         const RecoveryConfig& cfg = RecoveryConfig{}) {
  AggregateSeries agg = aggregate(truth);
  if (perturb_prob >= 0.0) agg = perturb(agg, PerturbConfig{perturb_prob, 1});
  const RecoveryResult res = recover(agg, cfg);
  return stage_accuracy(res.full, truth);
}

// --- criteria ---------------------------------------------------------------

void criterion_1_lsap_oracle() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::mt19937_64 rng(1);
  for (std::size_t n = 2; n <= 7 && ok; ++n)
    for (int rep = 0; rep < 1000; ++rep) {
      const CostMatrix c = testsupport::random_int_matrix(n, rng);
      if (solve_lsap(c).total_cost != brute_force_lsap(c).total_cost) {
        ok = false;
        break;
      }
    }
  const double dt = seconds_since(t0);
  report(1, ok && dt < 10.0,
         "solver equals brute force on 6000 random matrices (" + fmt(dt) + " s)");
}

void criterion_2_lsap_scale() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> dist(0.0, 1e6);
  CostMatrix c(2000);
  for (std::size_t i = 0; i < 2000; ++i)
    for (std::size_t j = 0; j < 2000; ++j) c.at(i, j) = dist(rng);
  const auto t0 = Clock::now();
  const Assignment a = solve_lsap(c);
  const double dt = seconds_since(t0);
  std::vector<char> seen(2000, 0);
  bool bijection = true;
  for (std::size_t j : a.perm) {
    if (j >= 2000 || seen[j]) bijection = false;
    else seen[j] = 1;
  }
  report(2, bijection && dt < 60.0,
         "dense 2000x2000 solve in " + fmt(dt) + " s");
}

void criterion_3_closed_forms() {
  FrequencyHistogram skew{{{0, 3}, {1, 1}}};
  const double want = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
  const bool e_ok = std::abs(entropy(skew) - want) < 1e-9 &&
                    std::abs(want - 0.5623) < 5e-5;

  FrequencyHistogram a{{{0, 24}}}, b{{{1, 24}}};
  const bool gain_ok = std::abs(info_gain(a, b) - std::log(2.0)) < 1e-9;

  FrequencyHistogram u{{{0, 5}, {1, 2}, {2, 1}}};
  const bool self_ok = info_gain(u, u) == 0.0;

  report(3, e_ok && gain_ok && self_ok,
         "entropy({3,1}), disjoint info gain = ln 2, self gain = 0");
}

void criterion_4_separable() {
  const auto t0 = Clock::now();
  const TrajectorySet truth = testsupport::separable_population(500, 7);
  const AggregateSeries agg = aggregate(truth);
  const RecoveryResult res = recover(agg, RecoveryConfig{});
  const auto rows = res.full.concatenated();
  const Pairing pairing = pair_greedy(rows, truth);
  const double acc = accuracy(rows, truth, pairing);
  const ErrorCdf cdf = recovery_error(rows, truth, pairing);
  bool zero_cdf = true;
  for (double e : cdf.errors)
    if (e != 0.0) zero_cdf = false;
  const double dt = seconds_since(t0);
  report(4, acc == 1.0 && zero_cdf && dt < 60.0,
         "separable benchmark exact at N=500 (" + fmt(dt) + " s)");
}

void criterion_5_repartition() {
  GeneratorConfig cfg;
  cfg.num_users = 200;
  cfg.grid.num_days = 2;
  const TrajectorySet set = generate_population(cfg);

  bool ok = true;
  for (double p : {-1.0, 0.3}) {  // plain and perturbed inputs
    AggregateSeries agg = aggregate(set);
    if (p >= 0.0) agg = perturb(agg, PerturbConfig{p, 5});
    const RecoveryResult res = recover(agg, RecoveryConfig{});
    ok = ok && testsupport::repartition_holds(res.night, agg) &&
         testsupport::repartition_holds(res.day, agg) &&
         testsupport::repartition_holds(res.full, agg);
  }
  report(5, ok, "per-slot recovered multiset equals the published multiset");
}

void criterion_6_stage_monotonicity() {
  const TrajectorySet& set = testsupport::default_population();
  const RecoveryResult& res = testsupport::default_recovery();
  const double night = stage_accuracy(res.night, set);
  const double day = stage_accuracy(res.day, set);
  const double full = stage_accuracy(res.full, set);
  report(6, night >= day && day >= full && full >= 0.7,
         "stages " + fmt(night) + " >= " + fmt(day) + " >= " + fmt(full) +
             " >= 0.7");
}

void criterion_7_scale_trend() {
  GeneratorConfig cfg;
  cfg.num_users = 10000;
  const TrajectorySet world = generate_population(cfg);

  auto subset_accuracy = [&](std::size_t n, double* dt_out) {
    TrajectorySet truth = world;
    truth.trajectories.resize(n);
    const auto t0 = Clock::now();
    RecoveryConfig rc;
    rc.crossday_link_threshold = 0.05;  // mutual-NN pre-linking across days
    const double acc = pipeline_accuracy(truth, -1.0, rc);
    if (dt_out) *dt_out = seconds_since(t0);
    return acc;
  };

  double dt10k = 0.0;
  const double a100 = subset_accuracy(100, nullptr);
  const double a2000 = subset_accuracy(2000, nullptr);
  const double a10000 = subset_accuracy(10000, &dt10k);
  report(7, a100 > a2000 && a2000 > a10000 && dt10k < 1800.0,
         "accuracy " + fmt(a100) + " > " + fmt(a2000) + " > " + fmt(a10000) +
             ", N=10000 in " + fmt(dt10k) + " s");
}

void criterion_8_spatial_trend() {
  const TrajectorySet& base = testsupport::default_population();
  std::vector<double> acc, uniq;
  for (Level level : {Level::Sector, Level::BaseStation, Level::District}) {
    const TrajectorySet truth = map_to_level(base, level);
    const AggregateSeries agg = aggregate(truth);
    const RecoveryResult res = recover(agg, RecoveryConfig{});
    acc.push_back(stage_accuracy(res.full, truth));
    uniq.push_back(uniqueness(res.full.concatenated(), 2,
                              UniquenessStrategy::TopK));
  }
  const bool acc_ok = acc[0] <= acc[1] && acc[1] <= acc[2];
  const bool uniq_ok = uniq[0] >= uniq[1] && uniq[1] >= uniq[2];
  report(8, acc_ok && uniq_ok,
         "accuracy " + fmt(acc[0]) + " <= " + fmt(acc[1]) + " <= " + fmt(acc[2]) +
             "; uniqueness@2 " + fmt(uniq[0]) + " >= " + fmt(uniq[1]) +
             " >= " + fmt(uniq[2]));
}

void criterion_9_temporal_trend() {
  const TrajectorySet& base = testsupport::default_population();
  std::vector<double> acc;
  for (int factor : {1, 3, 6}) {  // 30, 90, 180 minutes
    const TrajectorySet truth = coarsen_temporal(base, factor);
    RecoveryConfig cfg;
    cfg.night_window =
        NightWindow{0, 6 * 3600 / truth.grid.slot_seconds};
    const AggregateSeries agg = aggregate(truth);
    const RecoveryResult res = recover(agg, cfg);
    acc.push_back(stage_accuracy(res.full, truth));
  }
  report(9, acc[0] <= acc[1] && acc[1] <= acc[2],
         "accuracy 30m " + fmt(acc[0]) + " <= 90m " + fmt(acc[1]) +
             " <= 180m " + fmt(acc[2]));
}

void criterion_10_uniqueness_sanity() {
  const auto rows = rows_of(testsupport::default_population());
  bool monotone = true;
  double prev = 0.0;
  for (int k = 1; k <= 5; ++k) {
    const double u = uniqueness(rows, k, UniquenessStrategy::TopK);
    if (u < prev) monotone = false;
    prev = u;
  }

  TrajectorySet same = testsupport::stationary_population(10);
  for (auto& t : same.trajectories) t.locations.assign(same.grid.total_slots(), 0);
  const bool identical_zero =
      uniqueness(rows_of(same), 2, UniquenessStrategy::TopK) == 0.0;

  const bool distinct_one =
      uniqueness(rows_of(testsupport::stationary_population(10)), 1,
                 UniquenessStrategy::TopK) == 1.0;

  report(10, monotone && identical_zero && distinct_one,
         "Top-K monotone; identical population 0; distinct stationary 1");
}

void criterion_11_perturbation() {
  const TrajectorySet& base = testsupport::default_population();
  std::vector<double> acc;
  for (double p : {0.0, 0.1, 0.3, 0.5}) acc.push_back(pipeline_accuracy(base, p));
  const bool ok =
      acc[0] >= acc[1] && acc[1] >= acc[2] && acc[2] >= acc[3];
  report(11, ok,
         "accuracy " + fmt(acc[0]) + " >= " + fmt(acc[1]) + " >= " +
             fmt(acc[2]) + " >= " + fmt(acc[3]) + " for p in {0,0.1,0.3,0.5}");
}

void criterion_12_determinism() {
  GeneratorConfig cfg;
  cfg.num_users = 200;
  cfg.grid.num_days = 2;

  auto run_once = [&] {
    std::ostringstream bytes;
    const TrajectorySet set = generate_population(cfg);
    const AggregateSeries agg = aggregate(set);
    const RecoveryResult res = recover(agg, RecoveryConfig{});

    const std::string dir = "/tmp/ash-acceptance-det";
    std::filesystem::create_directories(dir);
    io::store_trajectories(set, dir + "/t.csv");
    io::store_tower_map(set.tower_map, dir + "/m.csv");
    io::store_aggregate(agg, dir + "/a.csv");
    io::store_recovered(res.night, dir + "/s1.csv");
    io::store_recovered(res.day, dir + "/s2.csv");
    io::store_recovered(res.full, dir + "/s3.csv");
    for (const char* f : {"/t.csv", "/m.csv", "/a.csv", "/s1.csv", "/s2.csv",
                          "/s3.csv"})
      bytes << testsupport::read_file(dir + f);
    return bytes.str();
  };

  report(12, run_once() == run_once(),
         "generate/aggregate/recover byte-identical across repeated runs");
}

}  // namespace

int main() {
  criterion_1_lsap_oracle();
  criterion_2_lsap_scale();
  criterion_3_closed_forms();
  criterion_4_separable();
  criterion_5_repartition();
  criterion_6_stage_monotonicity();
  criterion_7_scale_trend();
  criterion_8_spatial_trend();
  criterion_9_temporal_trend();
  criterion_10_uniqueness_sanity();
  criterion_11_perturbation();
  criterion_12_determinism();

  if (failures == 0)
    std::printf("all 12 acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
