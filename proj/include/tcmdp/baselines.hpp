#pragma once

#include "tcmdp/auction.hpp"
#include "tcmdp/scenario.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tcmdp {

enum class TaskOutcome : std::uint8_t { served, failed, unassigned };

/// Result of flying a fixed path: tasks are attempted strictly in order, a
/// late arrival is passed through at zero reward.
struct PathOutcome
{
  double reward = 0.0;  ///< prices collected
  int served = 0;
  int failed = 0;
  std::vector<TaskOutcome> per_task;  ///< aligned with the path
};

PathOutcome simulate_path(const MissionInstance& instance, const AgentSpec& agent, std::span<const int> path,
                          const Scenario& scenario);

/// Score S of a path under `scenario`.
double path_reward(const MissionInstance& instance, const AgentSpec& agent, std::span<const int> path,
                   const Scenario& scenario);
/// Score S of a path at mean speeds.
double path_reward(const MissionInstance& instance, const AgentSpec& agent, std::span<const int> path);

struct InsertionBid
{
  double bid = 0.0;
  int position = 0;
};

/// Best marginal score over all |path| + 1 insertion positions of `task` at
/// mean speeds; `base_score` is S(path). Adds |path| + 1 to `evaluations`.
/// Ties go to the earliest position.
InsertionBid cbba_insertion_bid(const MissionInstance& instance, const AgentSpec& agent, std::span<const int> path,
                                int task, double base_score, std::uint64_t& evaluations);

struct RobustConfig
{
  int sample_count = 1000;
  std::uint64_t seed = 0;
};

/// The N scenarios a RobustConfig denotes.
std::vector<Scenario> draw_scenarios(const MissionInstance& instance, const RobustConfig& cfg);

/// Sample-average marginal score for the best insertion position of `task`.
/// `base_scores[s]` is S(path; scenarios[s]). Adds N * (|path| + 1) to
/// `evaluations`. The returned bid is unwrapped.
InsertionBid robust_insertion_bid(const MissionInstance& instance, const AgentSpec& agent, std::span<const int> path,
                                  int task, std::span<const Scenario> scenarios, std::span<const double> base_scores,
                                  std::uint64_t& evaluations);

/// Convenience form drawing the sample set from `cfg`.
InsertionBid robust_insertion_bid(const MissionInstance& instance, const AgentSpec& agent, std::span<const int> path,
                                  int task, const RobustConfig& cfg, std::uint64_t& evaluations);

enum class CbbaVariant { deterministic, robust };

/// Path-insertion bundle builder (deterministic or sampled scores).
class CbbaBuilder final : public BundleBuilder
{
public:
  /// Sampled scores when `robust` is set: every bid draws its own N scenarios.
  CbbaBuilder(const MissionInstance& instance, int agent, bool wrapping, std::optional<RobustConfig> robust = {});

  bool build(BundleState& state) override;
  std::uint64_t evaluations() const override { return evaluations_; }

private:
  const MissionInstance* instance_;
  int agent_;
  bool wrapping_;
  std::optional<RobustConfig> robust_;
  std::uint64_t calls_ = 0;
  std::uint64_t evaluations_ = 0;

  InsertionBid bid(const std::vector<int>& path, int task, double base);
};

struct CbbaOptions
{
  CbbaVariant variant = CbbaVariant::deterministic;
  RobustConfig robust;
};

AllocationResult run_cbba(const MissionInstance& instance, const Network& network, const CbbaOptions& cbba,
                          const CoordinationOptions& options);

}  // namespace tcmdp
