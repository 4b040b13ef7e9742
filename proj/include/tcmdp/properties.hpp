#pragma once

#include "tcmdp/auction.hpp"
#include "tcmdp/value_dp.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tcmdp {

struct PropertyReport
{
  std::string property;
  long trials = 0;
  long violations = 0;
  double worst_violation = 0.0;
  std::vector<std::string> witnesses;

  void record(bool violated, double magnitude, const std::string& witness);
  void merge(const PropertyReport& other);
};

std::string format_property(const PropertyReport& report);

struct SubmodularityCheck
{
  /// Deterministic reward R(.; theta) is submodular for every enumerated
  /// combination of quadrature-node speeds over the arcs of the task set.
  bool reward_submodular = true;
  long scenarios = 0;
  PropertyReport value;  ///< diminishing returns of V over all subset pairs
};

/// Checks V(A + j) - V(A) >= V(B + j) - V(B) - 1e-9 for all A <= B, j not in
/// B, over the oracle's agent and all tasks of the instance, and classifies
/// the instance by scenario-wise submodularity of R. Throws
/// std::invalid_argument when there are more than `max_set` tasks or more than
/// `max_scenarios` node combinations.
SubmodularityCheck check_submodularity_V(const MissionInstance& instance, ValueOracle& oracle, int max_set = 5,
                                         long max_scenarios = 1L << 17);

/// Checks V(B) >= V(A) for all A <= B over every task of the instance.
PropertyReport check_monotonicity_V(const MissionInstance& instance, ValueOracle& oracle, int max_set = 5);

struct OptimumResult
{
  /// max over assignments of sum_i V_i(G_i) - penalty * |unassigned|.
  double opt_value = 0.0;
  std::vector<std::vector<int>> opt_assignment;
  /// max over assignments of sum_i V_i(G_i) (the monotone welfare).
  double opt_welfare = 0.0;
};

/// Exhaustive search over task -> agent-or-unassigned maps that respect
/// capacities. Limited to 4 tasks and 3 agents.
OptimumResult brute_force_opt(const MissionInstance& instance, std::span<ValueOracle> oracles);

/// Sum of V_i over an assignment.
double welfare(std::span<ValueOracle> oracles, const std::vector<std::vector<int>>& assignment);

// Randomized suites shared by the CLI `check` command and the tests.

struct SubmodularitySuite
{
  PropertyReport on_submodular_reward;  ///< the population the claim covers
  PropertyReport on_other;              ///< informational
  long instances_examined = 0;
  long submodular_instances = 0;
};

/// Draws instances (3 or 4 tasks, sigma^2 cycling over {0, .05, .1, .2})
/// until `trials` scenario-wise R-submodular ones have been checked.
SubmodularitySuite submodularity_suite(int trials, std::uint64_t seed, double grid_step = 1.0);

/// All subset pairs of `instances` random instances with up to five tasks.
PropertyReport monotonicity_suite(int instances, std::uint64_t seed, const SolverOptions& solver);

struct OptimalitySuite
{
  PropertyReport report;         ///< violations of welfare >= opt / 2
  std::vector<double> ratios;    ///< auction welfare / optimal welfare (opt > 0)
  long auction_matches_opt = 0;
};

OptimalitySuite optimality_suite(int instances, std::uint64_t seed, const SolverOptions& solver,
                                 const CoordinationOptions& options);

/// Samples stored states of random tables and checks that each stored value
/// equals the best action value and that the stored action attains it.
PropertyReport bellman_suite(int states, std::uint64_t seed, const SolverOptions& solver);

}  // namespace tcmdp
