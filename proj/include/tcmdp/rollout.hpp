#pragma once

#include "tcmdp/auction.hpp"
#include "tcmdp/baselines.hpp"
#include "tcmdp/scenario.hpp"
#include "tcmdp/value_dp.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace tcmdp {

/// How agents execute their allocation.
struct ExecutionPolicy
{
  enum class Kind { mdp_policy, fixed_path };

  Kind kind = Kind::fixed_path;
  /// mdp_policy: one table per agent covering its assigned set.
  std::vector<std::shared_ptr<const ValueTable>> tables;
  /// fixed_path: visiting order per agent.
  std::vector<std::vector<int>> paths;

  static ExecutionPolicy mdp(std::vector<std::shared_ptr<const ValueTable>> tables);
  static ExecutionPolicy fixed(std::vector<std::vector<int>> paths);
};

struct ExecutionOutcome
{
  double reward = 0.0;  ///< prices served minus penalty on failed and unassigned
  int served = 0;
  int failed = 0;
  int unassigned = 0;
  std::vector<TaskOutcome> per_task;
};

/// Runs every agent from time 0 at the depot under one speed scenario.
///
/// mdp_policy agents keep their clock on the value grid: each release time is
/// rounded up to the next grid point before the policy is queried, so the
/// executed dynamics match the planner's model exactly when speeds equal the
/// quadrature nodes. fixed_path agents run in continuous time.
ExecutionOutcome execute(const MissionInstance& instance, const std::vector<std::vector<int>>& assignment,
                         const ExecutionPolicy& policy, const Scenario& scenario);

struct MethodPlan
{
  std::string method;
  AllocationResult allocation;
  ExecutionPolicy policy;
};

struct RolloutReport
{
  std::uint64_t instance_id = 0;
  std::string method;
  double expected_reward = 0.0;
  double actual_reward_mean = 0.0;
  double actual_reward_std = 0.0;
  double finish_rate = 0.0;  ///< served / (tasks * rollouts)
  long served = 0;
  long failed = 0;
  long unassigned = 0;
  std::vector<long> task_served;
  std::vector<long> task_failed;
  std::vector<long> task_unassigned;
  int rollout_count = 0;
};

/// Seed of rollout round `round` in a study seeded with `seed`.
std::uint64_t rollout_seed(std::uint64_t seed, int round);

/// Paired validation: round r uses the same scenario for every method.
std::vector<RolloutReport> validate(const MissionInstance& instance, std::span<const MethodPlan> plans, int rounds,
                                    std::uint64_t seed);

/// One structured text row: key=value pairs separated by spaces.
std::string format_report(const RolloutReport& report);

/// Neumaier-compensated running sum.
class CompensatedSum
{
public:
  void add(double x);
  double value() const { return sum_ + carry_; }

private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

/// Execution plan for a coordinator's result: value tables for the auction,
/// frozen paths for the CBBA variants.
MethodPlan plan_for(const AllocationResult& allocation, std::span<ValueOracle> oracles);
MethodPlan plan_for(const AllocationResult& allocation);

}  // namespace tcmdp
