#pragma once

#include "tcmdp/value_dp.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tcmdp {

struct ExperimentConfig
{
  std::vector<int> task_counts{2, 3, 4, 5};
  int agents = 2;
  std::vector<double> sigmas{0.1};
  int instances = 100;
  /// 0 skips rollout validation (actual_* columns are left empty).
  int rollouts = 100;
  std::vector<std::string> methods{"auction", "cbba", "robust-cbba"};
  SolverOptions solver;
  int robust_samples = 1000;
  bool wrapping = true;
  std::string topology = "complete";
  int max_rounds = 500;
  std::uint64_t seed = 1;
  /// 0 uses worker_count().
  int threads = 0;
  /// Each coordination is repeated this often; the fastest run is reported.
  int timing_repeats = 1;
};

struct ExperimentRow
{
  int n_tasks = 0;
  int n_agents = 0;
  double sigma_sq = 0.0;
  int instance = 0;
  std::uint64_t instance_seed = 0;
  std::string method;
  double expected_reward = 0.0;
  double actual_reward = 0.0;
  double actual_std = 0.0;
  double finish_rate = 0.0;
  long served = 0;
  long failed = 0;
  long unassigned = 0;
  int rounds = 0;
  bool converged = false;
  std::uint64_t score_evaluations = 0;
  double wall_time_ms = 0.0;   ///< coordination only (robust sampling included)
  double precompute_ms = 0.0;  ///< value tables built before coordination
  bool validated = false;
  std::string error;           ///< non-empty when the instance failed
};

/// Seed of instance `index` with `n` tasks and `m` agents. Independent of the
/// speed variance, so a sweep over variances reuses the same geometry.
std::uint64_t instance_seed(std::uint64_t seed, int n, int m, int index);

/// Rows ordered by (task count, variance, instance, method) regardless of
/// thread count. A failing instance yields rows with `error` set.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

void write_rows_csv(std::ostream& out, std::span<const ExperimentRow> rows);

struct SummaryRow
{
  int n_tasks = 0;
  int n_agents = 0;
  double sigma_sq = 0.0;
  std::string method;
  int instances = 0;
  int errors = 0;
  double expected_reward = 0.0;  ///< mean over instances
  double actual_reward = 0.0;    ///< mean over instances
  double gap = 0.0;              ///< |expected - actual| of the means
  double mean_abs_gap = 0.0;     ///< mean of per-instance |expected - actual|
  double finish_rate = 0.0;      ///< pooled over instances and rollouts
  double score_evaluations = 0.0;  ///< mean per instance
  double wall_time_ms = 0.0;     ///< total
  double precompute_ms = 0.0;    ///< total
};

/// Groups by (task count, agents, variance, method), in first-seen order.
std::vector<SummaryRow> summarize(std::span<const ExperimentRow> rows);

/// Pools every task count into one row per (variance, method).
std::vector<SummaryRow> summarize_pooled(std::span<const ExperimentRow> rows);

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

}  // namespace tcmdp
