#pragma once

#include "tcmdp/instance.hpp"
#include "tcmdp/network.hpp"
#include "tcmdp/value_dp.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tcmdp {

inline constexpr int kNoAgent = -1;

/// One agent's view of the auction.
struct BundleState
{
  int agent_id = 0;
  std::vector<int> bundle;             ///< insertion order
  std::vector<int> path;               ///< execution order
  std::vector<double> winning_bids;    ///< y, per task
  std::vector<int> winners;            ///< z, per task (kNoAgent when unclaimed)
  std::vector<int> timestamps;         ///< per agent, round of latest information

  static BundleState empty(int agent_id, int task_count, int agent_count);

  /// Standing bids of the bundle entries, in insertion order.
  std::vector<double> bundle_bids() const;
  bool holds(int task) const;
};

struct Bid
{
  int agent_id = 0;
  int task_id = 0;
  double value = 0.0;          ///< marginal gain c_ij
  double wrapped_value = 0.0;  ///< shared bid c'_ij
  bool eligible = false;       ///< outbids the standing winner
};

/// min(raw, every standing bundle bid); raw when the bundle is empty.
double wrap_bid(double raw, std::span<const double> bundle_bids);

/// Marginal expected gain V(b + j) - V(b) for every task outside the bundle,
/// evaluated at the mission start state. Adds one evaluation per candidate.
std::vector<Bid> compute_bids(ValueOracle& oracle, const BundleState& state, bool wrapping,
                              std::uint64_t& evaluations);

/// Greedy bundle growth. Stops when the bundle is full, no bid is eligible,
/// or the best eligible bid is not positive. Returns whether anything changed.
bool build_bundle(ValueOracle& oracle, BundleState& state, bool wrapping, std::uint64_t& evaluations);

struct ConsensusOutcome
{
  bool changed = false;
  std::vector<int> winner_changes;       ///< tasks whose winner entry moved
  std::vector<std::string> dropped;      ///< malformed messages
};

/// Merge neighbour snapshots (applied in the given order) with the CBBA
/// update/reset/leave rules, then drop every bundle entry from the first
/// lost task onward. Higher bids win; equal bids go to the lower agent id.
ConsensusOutcome consensus_round(BundleState& self, std::span<const BundleState> inbox, int now);

/// Strategy used by the consensus engine to grow one agent's bundle.
class BundleBuilder
{
public:
  virtual ~BundleBuilder() = default;
  virtual bool build(BundleState& state) = 0;
  virtual std::uint64_t evaluations() const = 0;
};

class AuctionBuilder final : public BundleBuilder
{
public:
  AuctionBuilder(ValueOracle& oracle, bool wrapping) : oracle_(&oracle), wrapping_(wrapping) {}

  bool build(BundleState& state) override { return build_bundle(*oracle_, state, wrapping_, evaluations_); }
  std::uint64_t evaluations() const override { return evaluations_; }

private:
  ValueOracle* oracle_;
  bool wrapping_;
  std::uint64_t evaluations_ = 0;
};

struct CoordinationOptions
{
  bool wrapping = true;
  int max_rounds = 500;
  /// Run build phases on worker threads; results are identical either way.
  bool parallel = false;
  /// Per-round message log ("msg v1 ...") when set.
  std::ostream* trace = nullptr;
};

struct CoordinationRun
{
  std::vector<BundleState> states;
  int rounds_to_converge = 0;  ///< last round in which any agent changed
  int rounds_run = 0;
  bool converged = false;
  std::vector<int> oscillating_tasks;
  double elapsed_ms = 0.0;
  std::vector<std::string> diagnostics;
};

/// Alternate build and synchronous consensus phases until no agent changes
/// for max(1, diameter) consecutive rounds or `max_rounds` is reached.
CoordinationRun coordinate(const MissionInstance& instance, const Network& network,
                           std::span<BundleBuilder* const> builders, const CoordinationOptions& options);

struct AllocationResult
{
  std::string method;
  std::vector<std::vector<int>> assignment;  ///< per agent, insertion order
  std::vector<std::vector<int>> paths;       ///< per agent, execution order
  std::vector<int> unassigned;
  std::vector<double> per_agent_value;       ///< planner's value of each bundle
  /// Planner's predicted global reward: expected prices collected minus the
  /// penalty on expected failures and on unassigned tasks.
  double expected_reward = 0.0;
  int rounds_to_converge = 0;
  int rounds_run = 0;
  bool converged = false;
  std::vector<int> oscillating_tasks;
  std::uint64_t score_evaluations = 0;
  double coordination_ms = 0.0;  ///< wall time of the bidding/consensus loop
  std::vector<std::string> diagnostics;
};

/// Builds assignment/paths/unassigned from final states. Conflicting claims
/// (only possible without convergence) go to the highest own bid.
void collect_assignment(const MissionInstance& instance, const CoordinationRun& run, AllocationResult& result);

/// True when every task has at most one owner and no bundle exceeds capacity.
bool is_conflict_free(const MissionInstance& instance, const AllocationResult& result);

/// Value-function auction with one oracle per agent.
AllocationResult run_auction(const MissionInstance& instance, const Network& network,
                             std::span<ValueOracle> oracles, const CoordinationOptions& options);

/// Convenience form that builds the oracles (precomputing full tables for
/// up to eight tasks).
AllocationResult run_auction(const MissionInstance& instance, const Network& network,
                             const SolverOptions& solver, const CoordinationOptions& options);

std::vector<ValueOracle> make_oracles(const MissionInstance& instance, const SolverOptions& solver);

}  // namespace tcmdp
