// Command-line harness: generation, aggregation, trajectory recovery,
// evaluation and factor sweeps, all reproducible from flags plus a seed.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ash/aggregation.hpp"
#include "ash/evaluation.hpp"
#include "ash/generator.hpp"
#include "ash/io.hpp"
#include "ash/recovery.hpp"

namespace {

using namespace ash;

int night_end_slot(int slot_seconds) { return 6 * 3600 / slot_seconds; }

RecoveryConfig make_recovery_config(int slot_seconds, double prelink_night,
                                    double prelink_day, double crossday,
                                    bool per_day_history) {
  RecoveryConfig cfg;
  cfg.night_window = NightWindow{0, night_end_slot(slot_seconds)};
  cfg.prelink_night = prelink_night;
  cfg.prelink_day = prelink_day;
  cfg.crossday_link_threshold = crossday;
  cfg.accumulate_history = !per_day_history;
  return cfg;
}

RecoveredTrajectorySet snapshot_from_set(const TrajectorySet& set, Stage stage) {
  RecoveredTrajectorySet snap;
  snap.grid = set.grid;
  snap.tower_map = set.tower_map;
  snap.stage = stage;
  const int spd = set.grid.slots_per_day;
  snap.days.assign(set.grid.num_days,
                   std::vector<std::vector<TowerId>>(set.trajectories.size()));
  for (std::size_t j = 0; j < set.trajectories.size(); ++j)
    for (int d = 0; d < set.grid.num_days; ++d)
      snap.days[d][j].assign(set.trajectories[j].locations.begin() + d * spd,
                             set.trajectories[j].locations.begin() + (d + 1) * spd);
  return snap;
}

struct EvalOutput {
  std::vector<io::MetricRow> metrics;
  ErrorCdf cdf;
};

EvalOutput evaluate_full(const std::vector<std::vector<TowerId>>& rows,
                         const TrajectorySet& truth, std::uint64_t seed) {
  EvalOutput out;
  const Pairing pairing = pair_greedy(rows, truth);
  out.metrics.push_back({"accuracy", "full", "", accuracy(rows, truth, pairing)});
  out.cdf = recovery_error(rows, truth, pairing);
  for (int k = 1; k <= 5; ++k)
    out.metrics.push_back({"uniqueness", "full", "top" + std::to_string(k),
                           uniqueness(rows, k, UniquenessStrategy::TopK, seed)});
  return out;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  GeneratorConfig cfg;
  int slot_minutes = 30;
  std::string out_trajectories = "trajectories.csv";
  std::string out_towers = "towers.csv";
};

int run_generate(const GenerateArgs& a) {
  GeneratorConfig cfg = a.cfg;
  cfg.grid.slot_seconds = a.slot_minutes * 60;
  cfg.grid.slots_per_day = 86400 / cfg.grid.slot_seconds;
  const TrajectorySet set = generate_population(cfg);
  io::store_tower_map(set.tower_map, a.out_towers);
  io::store_trajectories(set, a.out_trajectories);
  std::printf("users=%zu slots=%d towers=%zu\n", set.num_users(),
              set.grid.total_slots(), set.tower_map.size());
  return 0;
}

struct AggregateArgs {
  std::string trajectories;
  std::string towers;
  int slot_minutes = 30;
  std::string spatial;     // sector | base_station | district
  int temporal_minutes = 0;  // 0 = keep input resolution
  double perturb_prob = -1.0;
  std::uint64_t perturb_seed = 0;
  std::string out = "aggregate.csv";
  std::string out_truth;    // transformed ground truth, for later evaluation
  std::string out_towers;   // coarsened tower map
};

int run_aggregate(const AggregateArgs& a) {
  const TowerMap map = io::load_tower_map(a.towers);
  TrajectorySet truth = io::load_trajectories(a.trajectories, map, a.slot_minutes * 60);
  truth = interpolate(truth);

  if (a.temporal_minutes > 0) {
    if (a.temporal_minutes % a.slot_minutes != 0)
      throw std::invalid_argument("temporal resolution must be a multiple of the slot size");
    truth = coarsen_temporal(truth, a.temporal_minutes / a.slot_minutes);
  }
  if (!a.spatial.empty()) truth = map_to_level(truth, parse_level(a.spatial));

  AggregateSeries agg = aggregate(truth);
  if (a.perturb_prob >= 0.0)
    agg = perturb(agg, PerturbConfig{a.perturb_prob, a.perturb_seed});

  io::store_aggregate(agg, a.out);
  if (!a.out_truth.empty()) io::store_trajectories(truth, a.out_truth);
  if (!a.out_towers.empty()) io::store_tower_map(truth.tower_map, a.out_towers);
  std::printf("slots=%zu users=%d towers=%zu\n", agg.counts.size(),
              agg.num_users(), agg.tower_map.size());
  return 0;
}

struct RecoverArgs {
  std::string aggregate;
  std::string towers;
  int slot_minutes = 30;
  double prelink_night = 0.0;
  double prelink_day = 0.0;
  double crossday_threshold = 0.0;
  bool per_day_history = false;
  std::string out = "recovered.csv";
};

int run_recover(const RecoverArgs& a) {
  const TowerMap map = io::load_tower_map(a.towers);
  const AggregateSeries agg = io::load_aggregate(a.aggregate, map, a.slot_minutes * 60);
  const RecoveryConfig cfg =
      make_recovery_config(agg.grid.slot_seconds, a.prelink_night, a.prelink_day,
                           a.crossday_threshold, a.per_day_history);
  const RecoveryResult result = recover(agg, cfg);
  io::store_recovered(result.night, a.out + ".stage1");
  io::store_recovered(result.day, a.out + ".stage2");
  io::store_recovered(result.full, a.out + ".stage3");
  io::store_recovered(result.full, a.out);
  std::printf("recovered=%zu slots=%d\n", result.full.num_rows(),
              agg.grid.total_slots());
  return 0;
}

struct EvaluateArgs {
  std::string recovered;
  std::string truth;
  std::string towers;
  int slot_minutes = 30;
  std::string stage1, stage2;
  std::uint64_t seed = 0;
  std::string out_metrics = "metrics.csv";
  std::string out_cdf = "error_cdf.csv";
  std::string plot_prefix;
};

int run_evaluate(const EvaluateArgs& a) {
  const TowerMap map = io::load_tower_map(a.towers);
  const TrajectorySet truth = io::load_trajectories(a.truth, map, a.slot_minutes * 60);
  const TrajectorySet recovered =
      io::load_trajectories(a.recovered, map, a.slot_minutes * 60);
  if (recovered.num_users() != truth.num_users())
    throw std::runtime_error("recovered/truth user counts differ");

  std::vector<std::vector<TowerId>> rows;
  rows.reserve(recovered.num_users());
  for (const Trajectory& t : recovered.trajectories) rows.push_back(t.locations);

  EvalOutput out = evaluate_full(rows, truth, a.seed);
  if (!a.stage1.empty()) {
    const TrajectorySet s1 = io::load_trajectories(a.stage1, map, a.slot_minutes * 60);
    out.metrics.push_back({"accuracy", "night", "",
                           stage_accuracy(snapshot_from_set(s1, Stage::Night), truth)});
  }
  if (!a.stage2.empty()) {
    const TrajectorySet s2 = io::load_trajectories(a.stage2, map, a.slot_minutes * 60);
    out.metrics.push_back({"accuracy", "day", "",
                           stage_accuracy(snapshot_from_set(s2, Stage::Day), truth)});
  }
  io::store_metrics(out.metrics, a.out_metrics);
  io::store_cdf(out.cdf.points, a.out_cdf);

  if (!a.plot_prefix.empty()) {
    const RegularityReport rep =
        regularity_stats(truth, NightWindow{0, night_end_slot(truth.grid.slot_seconds)},
                         a.seed);
    std::vector<io::MetricRow> reg;
    for (int k = 0; k < 5; ++k)
      reg.push_back({"topk_fraction", "truth", "top" + std::to_string(k + 1),
                     rep.topk_fraction[k]});
    reg.push_back({"single_night_location", "truth", "", rep.single_night_location_fraction});
    reg.push_back({"night_top_dwell", "truth", "", rep.mean_night_top_dwell});
    reg.push_back({"same_user_gain_median", "truth", "", median(rep.same_user_gains)});
    reg.push_back({"diff_user_gain_median", "truth", "", median(rep.diff_user_gains)});
    for (int k = 1; k <= 5; ++k) {
      std::vector<std::vector<TowerId>> truth_rows;
      for (const Trajectory& t : truth.trajectories) truth_rows.push_back(t.locations);
      reg.push_back({"uniqueness", "truth", "top" + std::to_string(k),
                     uniqueness(truth_rows, k, UniquenessStrategy::TopK, a.seed)});
      reg.push_back({"uniqueness", "truth", "rand" + std::to_string(k),
                     uniqueness(truth_rows, k, UniquenessStrategy::RandK, a.seed)});
      reg.push_back({"uniqueness", "truth", "cont" + std::to_string(k),
                     uniqueness(truth_rows, k, UniquenessStrategy::ContK, a.seed)});
    }
    io::store_metrics(reg, a.plot_prefix + "_regularity.csv");

    std::vector<double> sorted = rep.velocity_errors;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> vel;
    for (double m : {0.0, 100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0}) {
      const double frac =
          sorted.empty() ? 1.0
                         : double(std::upper_bound(sorted.begin(), sorted.end(), m) -
                                  sorted.begin()) / sorted.size();
      vel.emplace_back(m, frac);
    }
    io::store_cdf(vel, a.plot_prefix + "_velocity_cdf.csv");
  }

  for (const io::MetricRow& r : out.metrics)
    std::printf("%s %s %s %.6f\n", r.metric.c_str(), r.stage.c_str(),
                r.param.c_str(), r.value);
  return 0;
}

struct SweepArgs {
  GeneratorConfig base;
  int slot_minutes = 30;
  std::string axis = "users";
  std::vector<std::string> values;
  double prelink_night = 0.0;
  double prelink_day = 0.0;
  double crossday_threshold = 0.0;
  std::string out_dir = "sweep";
  int jobs = 1;
};

struct SweepPoint {
  std::string label;
  std::vector<io::MetricRow> metrics;
};

SweepPoint run_sweep_point(const SweepArgs& a, const TrajectorySet& base_truth,
                           const std::string& value) {
  TrajectorySet truth = base_truth;
  int slot_seconds = base_truth.grid.slot_seconds;

  if (a.axis == "users") {
    const std::size_t n = std::stoul(value);
    if (n == 0 || n > truth.trajectories.size())
      throw std::invalid_argument("users sweep value out of range: " + value);
    truth.trajectories.resize(n);
  } else if (a.axis == "spatial") {
    truth = map_to_level(truth, parse_level(value));
  } else if (a.axis == "temporal") {
    const int minutes = std::stoi(value);
    if (minutes % a.slot_minutes != 0)
      throw std::invalid_argument("temporal sweep value must be a multiple of the slot size");
    truth = coarsen_temporal(truth, minutes / a.slot_minutes);
    slot_seconds = minutes * 60;
  } else if (a.axis == "perturb") {
    // handled below, after aggregation
  } else {
    throw std::invalid_argument("unknown sweep axis: " + a.axis);
  }

  AggregateSeries agg = aggregate(truth);
  if (a.axis == "perturb")
    agg = perturb(agg, PerturbConfig{std::stod(value), a.base.seed});

  const RecoveryConfig cfg = make_recovery_config(
      slot_seconds, a.prelink_night, a.prelink_day, a.crossday_threshold, false);
  const RecoveryResult result = recover(agg, cfg);

  SweepPoint point;
  point.label = value;
  const auto rows = result.full.concatenated();
  const Pairing pairing = pair_greedy(rows, truth);
  point.metrics.push_back({"accuracy", "night", value, stage_accuracy(result.night, truth)});
  point.metrics.push_back({"accuracy", "day", value, stage_accuracy(result.day, truth)});
  point.metrics.push_back({"accuracy", "full", value, accuracy(rows, truth, pairing)});
  for (int k = 1; k <= 3; ++k)
    point.metrics.push_back({"uniqueness", "full", value + ":top" + std::to_string(k),
                             uniqueness(rows, k, UniquenessStrategy::TopK, a.base.seed)});
  return point;
}

int run_sweep(SweepArgs a) {
  if (a.values.empty()) throw std::invalid_argument("sweep: no values given");
  a.base.grid.slot_seconds = a.slot_minutes * 60;
  a.base.grid.slots_per_day = 86400 / a.base.grid.slot_seconds;

  // One base population per seed; sweep points only transform it.
  GeneratorConfig gen = a.base;
  if (a.axis == "users") {
    std::size_t max_users = 0;
    for (const std::string& v : a.values)
      max_users = std::max(max_users, static_cast<std::size_t>(std::stoul(v)));
    gen.num_users = static_cast<int>(max_users);
  }
  const TrajectorySet base_truth = generate_population(gen);

  std::filesystem::create_directories(a.out_dir);
  std::vector<SweepPoint> points(a.values.size());
  if (a.jobs > 1) {
    std::vector<std::future<SweepPoint>> futures;
    for (const std::string& v : a.values)
      futures.push_back(std::async(std::launch::async, run_sweep_point,
                                   std::cref(a), std::cref(base_truth), v));
    for (std::size_t i = 0; i < futures.size(); ++i) points[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < a.values.size(); ++i)
      points[i] = run_sweep_point(a, base_truth, a.values[i]);
  }

  std::vector<io::MetricRow> summary;
  for (const SweepPoint& p : points) {
    io::store_metrics(p.metrics, a.out_dir + "/point_" + p.label + ".csv");
    summary.insert(summary.end(), p.metrics.begin(), p.metrics.end());
    for (const io::MetricRow& r : p.metrics)
      std::printf("%s %s %s %.6f\n", r.metric.c_str(), r.stage.c_str(),
                  r.param.c_str(), r.value);
  }
  io::store_metrics(summary, a.out_dir + "/summary.csv");
  return 0;
}

// Expand `--config file` into its key=value pairs ahead of the real flags so
// command-line flags win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] != "--config") continue;
    if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a file");
    const auto entries = ash::io::load_config(args[i + 1]);
    std::vector<std::string> expanded;
    expanded.insert(expanded.end(), args.begin(), args.begin() + i);
    for (const auto& [key, value] : entries) expanded.push_back("--" + key + "=" + value);
    expanded.insert(expanded.end(), args.begin() + i + 2, args.end());
    return expanded;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajectory recovery toolkit for aggregated mobility data"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "generate a synthetic population");
  cmd_gen->add_option("--users", gen.cfg.num_users);
  cmd_gen->add_option("--towers", gen.cfg.num_towers);
  cmd_gen->add_option("--days", gen.cfg.grid.num_days);
  cmd_gen->add_option("--slot-minutes", gen.slot_minutes);
  cmd_gen->add_option("--world", gen.cfg.world_size);
  cmd_gen->add_option("--night-home-prob", gen.cfg.night_home_prob);
  cmd_gen->add_option("--work-attachment", gen.cfg.work_attachment);
  cmd_gen->add_option("--exploration", gen.cfg.exploration_prob);
  cmd_gen->add_option("--commute-speed", gen.cfg.commute_speed);
  cmd_gen->add_option("--seed", gen.cfg.seed);
  cmd_gen->add_option("--out-trajectories", gen.out_trajectories);
  cmd_gen->add_option("--out-towers", gen.out_towers);

  AggregateArgs agg;
  auto* cmd_agg = app.add_subcommand("aggregate", "publish per-slot tower counts");
  cmd_agg->add_option("--trajectories", agg.trajectories)->required();
  cmd_agg->add_option("--towers", agg.towers)->required();
  cmd_agg->add_option("--slot-minutes", agg.slot_minutes);
  cmd_agg->add_option("--spatial", agg.spatial);
  cmd_agg->add_option("--temporal", agg.temporal_minutes);
  cmd_agg->add_option("--perturb", agg.perturb_prob);
  cmd_agg->add_option("--perturb-seed", agg.perturb_seed);
  cmd_agg->add_option("--out", agg.out);
  cmd_agg->add_option("--out-truth", agg.out_truth);
  cmd_agg->add_option("--out-towers", agg.out_towers);

  RecoverArgs rec;
  auto* cmd_rec = app.add_subcommand("recover", "recover trajectories from an aggregate");
  cmd_rec->add_option("--aggregate", rec.aggregate)->required();
  cmd_rec->add_option("--towers", rec.towers)->required();
  cmd_rec->add_option("--slot-minutes", rec.slot_minutes);
  cmd_rec->add_option("--prelink-night", rec.prelink_night);
  cmd_rec->add_option("--prelink-day", rec.prelink_day);
  cmd_rec->add_option("--crossday-threshold", rec.crossday_threshold);
  cmd_rec->add_flag("--per-day-history", rec.per_day_history);
  cmd_rec->add_option("--out", rec.out);

  EvaluateArgs ev;
  auto* cmd_ev = app.add_subcommand("evaluate", "score a recovery against ground truth");
  cmd_ev->add_option("--recovered", ev.recovered)->required();
  cmd_ev->add_option("--truth", ev.truth)->required();
  cmd_ev->add_option("--towers", ev.towers)->required();
  cmd_ev->add_option("--slot-minutes", ev.slot_minutes);
  cmd_ev->add_option("--stage1", ev.stage1);
  cmd_ev->add_option("--stage2", ev.stage2);
  cmd_ev->add_option("--seed", ev.seed);
  cmd_ev->add_option("--out-metrics", ev.out_metrics);
  cmd_ev->add_option("--out-cdf", ev.out_cdf);
  cmd_ev->add_option("--plot-data", ev.plot_prefix);

  SweepArgs sw;
  auto* cmd_sw = app.add_subcommand("sweep", "factor sweep over a shared population");
  cmd_sw->add_option("--axis", sw.axis);
  cmd_sw->add_option("--values", sw.values)->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  cmd_sw->add_option("--users", sw.base.num_users);
  cmd_sw->add_option("--towers", sw.base.num_towers);
  cmd_sw->add_option("--days", sw.base.grid.num_days);
  cmd_sw->add_option("--slot-minutes", sw.slot_minutes);
  cmd_sw->add_option("--world", sw.base.world_size);
  cmd_sw->add_option("--seed", sw.base.seed);
  cmd_sw->add_option("--prelink-night", sw.prelink_night);
  cmd_sw->add_option("--prelink-day", sw.prelink_day);
  cmd_sw->add_option("--crossday-threshold", sw.crossday_threshold);
  cmd_sw->add_option("--out-dir", sw.out_dir);
  cmd_sw->add_option("--jobs", sw.jobs);

  try {
    const std::vector<std::string> args = expand_config(argc, argv);
    std::vector<const char*> argp;
    argp.push_back(argv[0]);
    for (const std::string& s : args) argp.push_back(s.c_str());
    app.parse(static_cast<int>(argp.size()), argp.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (cmd_gen->parsed()) return run_generate(gen);
    if (cmd_agg->parsed()) return run_aggregate(agg);
    if (cmd_rec->parsed()) return run_recover(rec);
    if (cmd_ev->parsed()) return run_evaluate(ev);
    if (cmd_sw->parsed()) return run_sweep(sw);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
