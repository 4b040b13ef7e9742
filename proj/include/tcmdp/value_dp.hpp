#pragma once

#include "tcmdp/instance.hpp"
#include "tcmdp/quadrature.hpp"
#include "tcmdp/scenario.hpp"

#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace tcmdp {

/// Set of global task ids (bit j = task j).
using TaskMask = std::uint64_t;

inline constexpr int kMaxMaskTasks = 64;

inline TaskMask task_bit(int task)
{
  return TaskMask{1} << task;
}

inline bool contains(TaskMask set, int task)
{
  return (set >> task) & 1U;
}

inline int set_size(TaskMask set)
{
  return std::popcount(set);
}

std::vector<int> set_tasks(TaskMask set);
TaskMask make_set(std::span<const int> tasks);

/// time in minutes; `at` is a location index (0 = depot, j + 1 = task j).
struct AgentState
{
  double time = 0.0;
  int at = 0;
  TaskMask remaining = 0;
};

struct Action
{
  enum class Kind : std::uint8_t { serve, skip, finish };

  Kind kind = Kind::finish;
  int task = -1;

  static Action serve(int task) { return {Kind::serve, task}; }
  static Action skip(int task) { return {Kind::skip, task}; }
  static Action finish() { return {Kind::finish, -1}; }

  friend bool operator==(const Action&, const Action&) = default;
};

struct SolverOptions
{
  int quadrature_nodes = 8;
  double grid_step = 1.0;
  int subset_cap = 12;
};

/// Backward-induction solution of one agent's task-constrained MDP over
/// (remaining subset, location, time bin). Immutable once built.
///
/// Serving task j from time bin b at location l: for each quadrature node the
/// arrival is b*step + dist(l, j)/speed. The service succeeds when the arrival
/// is no later than min(t_d, H); it then starts at max(arrival, t_r) and the
/// agent is released after the service duration. A late arrival earns nothing
/// and releases the agent on arrival. Release times are rounded up to the
/// grid; bins past the horizon are terminal with value zero.
class ValueTable
{
public:
  const AgentSpec& agent() const { return agent_; }
  TaskMask allocated() const { return allocated_; }
  /// Allocated task ids in ascending order; local task index k is tasks()[k].
  const std::vector<int>& tasks() const { return tasks_; }
  double grid_step() const { return step_; }
  int last_bin() const { return last_bin_; }
  int location_count() const { return static_cast<int>(tasks_.size()) + 1; }

  /// V(state). Throws std::out_of_range for states outside the table.
  double value_of(const AgentState& state) const;
  /// Stored argmax action. Throws std::out_of_range like value_of.
  Action next_action(const AgentState& state) const;

  std::uint32_t local_mask(TaskMask set) const;
  int local_location(int location_index) const;
  /// Grid bin of a time, rounding up.
  int bin_of(double time) const;

  double value_at(std::uint32_t local_mask, int local_loc, int bin) const;
  Action action_at(std::uint32_t local_mask, int local_loc, int bin) const;

  /// Expected value of taking `action` at a stored state, evaluated from the
  /// stored successor values with the solver's own arithmetic.
  double action_value(std::uint32_t local_mask, int local_loc, int bin, Action action) const;

  /// Expected number of allocated tasks in `state.remaining` that the stored
  /// policy leaves unserved (late, skipped, or cut off by the horizon).
  double expected_failures(const AgentState& state) const;

  std::size_t state_count() const { return values_.size(); }

private:
  friend ValueTable solve_value(const MissionInstance&, const AgentSpec&, const AgentState&, TaskMask,
                                const QuadratureRule&, double, int);

  struct Transition
  {
    bool served;
    int next_bin;
  };

  std::size_t index(std::uint32_t mask, int loc, int bin) const
  {
    return (static_cast<std::size_t>(mask) * static_cast<std::size_t>(location_count()) + static_cast<std::size_t>(loc))
             * static_cast<std::size_t>(last_bin_ + 1)
           + static_cast<std::size_t>(bin);
  }

  Transition transition(int loc, int task, int node, int bin) const;
  double child_value(std::uint32_t mask, int loc, int bin) const;
  double serve_value(std::uint32_t mask, int loc, int bin, int task) const;
  Action decode(std::uint8_t code) const;
  void check_state(const AgentState& state, std::uint32_t& mask, int& loc, int& bin) const;

  AgentSpec agent_;
  TaskMask allocated_ = 0;
  std::vector<int> tasks_;
  int start_location_ = 0;
  double horizon_ = 0.0;
  double step_ = 1.0;
  int last_bin_ = 0;

  std::vector<double> price_;
  std::vector<double> ready_;
  std::vector<double> due_;
  std::vector<double> service_;
  std::vector<double> weights_;
  std::vector<double> travel_;  // [(loc * k + task) * Q + node]

  std::vector<double> values_;
  std::vector<std::uint8_t> policy_;  // 0 finish, 1 + k serve, 1 + K + k skip
};

/// Throws std::invalid_argument for a non-positive grid step or a subset
/// larger than `subset_cap`.
ValueTable solve_value(const MissionInstance& instance, const AgentSpec& agent, const AgentState& start,
                       TaskMask allocated, const QuadratureRule& quadrature, double grid_step,
                       int subset_cap = 12);

/// Free-function forms of the table queries.
double value_of(const ValueTable& table, const AgentState& state);
Action next_action(const ValueTable& table, const AgentState& state);

/// Optimal reward of the same serve/skip/finish recursion with travel times
/// fixed by `scenario`, in continuous time (no quadrature, no grid).
double deterministic_route_reward(const MissionInstance& instance, const AgentSpec& agent, const AgentState& start,
                                  TaskMask allocated, const Scenario& scenario, int subset_cap = 12);

/// Set-indexed score function V(s0; set) for one agent, evaluated from the
/// mission start (time 0 at the depot). Results are cached per set; after
/// precompute(universe) every subset of the universe is a table lookup.
/// Not thread-safe; use one oracle per agent.
class ValueOracle
{
public:
  ValueOracle(const MissionInstance& instance, int agent, SolverOptions options = {});

  double value(TaskMask set);
  std::shared_ptr<const ValueTable> table(TaskMask set);
  void precompute(TaskMask universe);

  const MissionInstance& instance() const { return *instance_; }
  const AgentSpec& agent() const { return instance_->agents[static_cast<std::size_t>(agent_)]; }
  const QuadratureRule& quadrature() const { return quadrature_; }
  const SolverOptions& options() const { return options_; }
  AgentState start_state(TaskMask set) const { return {0.0, 0, set}; }

  /// Number of solve_value runs performed so far.
  std::size_t solve_count() const { return solves_; }

private:
  const MissionInstance* instance_;
  int agent_;
  SolverOptions options_;
  QuadratureRule quadrature_;
  std::shared_ptr<const ValueTable> universe_;
  std::map<TaskMask, double> values_;
  std::size_t solves_ = 0;
};

}  // namespace tcmdp
