#include "tcmdp/baselines.hpp"

#include "tcmdp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tcmdp {

PathOutcome simulate_path(const MissionInstance& instance, const AgentSpec& agent, std::span<const int> path,
                          const Scenario& scenario)
{
  PathOutcome out;
  double now = 0.0;
  int at = 0;
  Location here = agent.start;
  for (int j : path)
  {
    const Task& task = instance.tasks[static_cast<std::size_t>(j)];
    const double arrival = now + distance(here, task.location) / scenario.speed(at, j + 1);
    if (arrival <= instance.effective_due(j))
    {
      out.reward += task.price;
      ++out.served;
      out.per_task.push_back(TaskOutcome::served);
      now = std::max(arrival, task.ready_time) + task.service_duration;
    }
    else
    {
      ++out.failed;
      out.per_task.push_back(TaskOutcome::failed);
      now = arrival;
    }
    at = j + 1;
    here = task.location;
  }
  return out;
}

double path_reward(const MissionInstance& instance, const AgentSpec& agent, std::span<const int> path,
                   const Scenario& scenario)
{
  return simulate_path(instance, agent, path, scenario).reward;
}

double path_reward(const MissionInstance& instance, const AgentSpec& agent, std::span<const int> path)
{
  return path_reward(instance, agent, path, mean_scenario(instance));
}

namespace {

std::vector<int> inserted(std::span<const int> path, int task, int position)
{
  std::vector<int> out(path.begin(), path.end());
  out.insert(out.begin() + position, task);
  return out;
}

}  // namespace

InsertionBid cbba_insertion_bid(const MissionInstance& instance, const AgentSpec& agent, std::span<const int> path,
                                int task, double base_score, std::uint64_t& evaluations)
{
  const Scenario mean = mean_scenario(instance);
  InsertionBid best{-std::numeric_limits<double>::infinity(), 0};
  for (int pos = 0; pos <= static_cast<int>(path.size()); ++pos)
  {
    const double gain = path_reward(instance, agent, inserted(path, task, pos), mean) - base_score;
    ++evaluations;
    if (gain > best.bid)
      best = {gain, pos};
  }
  return best;
}

std::vector<Scenario> draw_scenarios(const MissionInstance& instance, const RobustConfig& cfg)
{
  if (cfg.sample_count < 1)
    throw std::invalid_argument("robust sample count must be at least 1");
  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(cfg.sample_count));
  for (int s = 0; s < cfg.sample_count; ++s)
    out.push_back(sample_scenario(instance, derive_seed(cfg.seed, {0x5A4D91EULL, static_cast<std::uint64_t>(s)})));
  return out;
}

InsertionBid robust_insertion_bid(const MissionInstance& instance, const AgentSpec& agent, std::span<const int> path,
                                  int task, std::span<const Scenario> scenarios, std::span<const double> base_scores,
                                  std::uint64_t& evaluations)
{
  if (scenarios.empty() || scenarios.size() != base_scores.size())
    throw std::invalid_argument("robust bid needs one base score per scenario");
  InsertionBid best{-std::numeric_limits<double>::infinity(), 0};
  for (int pos = 0; pos <= static_cast<int>(path.size()); ++pos)
  {
    const std::vector<int> candidate = inserted(path, task, pos);
    // Running mean is exact for constant samples.
    double mean = 0.0;
    for (std::size_t s = 0; s < scenarios.size(); ++s)
    {
      const double gain = path_reward(instance, agent, candidate, scenarios[s]) - base_scores[s];
      mean += (gain - mean) / static_cast<double>(s + 1);
      ++evaluations;
    }
    if (mean > best.bid)
      best = {mean, pos};
  }
  return best;
}

InsertionBid robust_insertion_bid(const MissionInstance& instance, const AgentSpec& agent, std::span<const int> path,
                                  int task, const RobustConfig& cfg, std::uint64_t& evaluations)
{
  const std::vector<Scenario> scenarios = draw_scenarios(instance, cfg);
  std::vector<double> base;
  base.reserve(scenarios.size());
  for (const auto& s : scenarios)
    base.push_back(path_reward(instance, agent, path, s));
  return robust_insertion_bid(instance, agent, path, task, scenarios, base, evaluations);
}

CbbaBuilder::CbbaBuilder(const MissionInstance& instance, int agent, bool wrapping,
                         std::optional<RobustConfig> robust)
  : instance_(&instance)
  , agent_(agent)
  , wrapping_(wrapping)
  , robust_(robust)
{
  if (robust_ && robust_->sample_count < 1)
    throw std::invalid_argument("robust sample count must be at least 1");
}

InsertionBid CbbaBuilder::bid(const std::vector<int>& path, int task, double base)
{
  const AgentSpec& agent = instance_->agents[static_cast<std::size_t>(agent_)];
  if (!robust_)
    return cbba_insertion_bid(*instance_, agent, path, task, base, evaluations_);
  // Fresh sample set per bid, shared by its insertion positions.
  RobustConfig cfg = *robust_;
  cfg.seed = derive_seed(robust_->seed, {0xB1D, static_cast<std::uint64_t>(agent_), calls_++});
  const std::vector<Scenario> scenarios = draw_scenarios(*instance_, cfg);
  std::vector<double> base_scores;
  base_scores.reserve(scenarios.size());
  for (const auto& s : scenarios)
    base_scores.push_back(path_reward(*instance_, agent, path, s));
  return robust_insertion_bid(*instance_, agent, path, task, scenarios, base_scores, evaluations_);
}

bool CbbaBuilder::build(BundleState& state)
{
  const AgentSpec& agent = instance_->agents[static_cast<std::size_t>(agent_)];
  const int n = instance_->task_count();
  bool changed = false;
  while (static_cast<int>(state.bundle.size()) < agent.capacity)
  {
    const double base = robust_ ? 0.0 : path_reward(*instance_, agent, state.path);
    const std::vector<double> standing = state.bundle_bids();

    int best_task = -1;
    InsertionBid best{};
    double best_wrapped = 0.0;
    for (int j = 0; j < n; ++j)
    {
      if (state.holds(j))
        continue;
      const InsertionBid b = bid(state.path, j, base);
      const double wrapped = wrapping_ ? wrap_bid(b.bid, standing) : b.bid;
      if (!(wrapped > state.winning_bids[static_cast<std::size_t>(j)]))
        continue;
      if (best_task < 0 || wrapped > best_wrapped)
      {
        best_task = j;
        best = b;
        best_wrapped = wrapped;
      }
    }
    if (best_task < 0 || best_wrapped <= 0.0)
      break;
    state.bundle.push_back(best_task);
    state.path.insert(state.path.begin() + best.position, best_task);
    state.winning_bids[static_cast<std::size_t>(best_task)] = best_wrapped;
    state.winners[static_cast<std::size_t>(best_task)] = state.agent_id;
    changed = true;
  }
  return changed;
}

AllocationResult run_cbba(const MissionInstance& instance, const Network& network, const CbbaOptions& cbba,
                          const CoordinationOptions& options)
{
  std::optional<RobustConfig> robust;
  if (cbba.variant == CbbaVariant::robust)
    robust = cbba.robust;

  std::vector<CbbaBuilder> owned;
  owned.reserve(instance.agents.size());
  for (int i = 0; i < instance.agent_count(); ++i)
    owned.emplace_back(instance, i, options.wrapping, robust);
  std::vector<BundleBuilder*> builders;
  for (auto& b : owned)
    builders.push_back(&b);

  const CoordinationRun run = coordinate(instance, network, builders, options);
  AllocationResult result;
  result.method = cbba.variant == CbbaVariant::robust ? "robust-cbba" : "cbba";
  collect_assignment(instance, run, result);

  // Planner's score of the final paths: mean speeds, or a separate sample set.
  std::vector<Scenario> scenarios;
  if (robust)
  {
    RobustConfig final_cfg = *robust;
    final_cfg.seed = derive_seed(robust->seed, {0xF1A1});
    scenarios = draw_scenarios(instance, final_cfg);
  }
  const Scenario mean = mean_scenario(instance);
  double expected = 0.0;
  for (int i = 0; i < instance.agent_count(); ++i)
  {
    const AgentSpec& agent = instance.agents[static_cast<std::size_t>(i)];
    const auto& path = result.paths[static_cast<std::size_t>(i)];
    double score = 0.0;
    double planned = 0.0;
    if (scenarios.empty())
    {
      const PathOutcome o = simulate_path(instance, agent, path, mean);
      score = o.reward;
      planned = o.reward - instance.penalty * o.failed;
    }
    else
    {
      for (std::size_t s = 0; s < scenarios.size(); ++s)
      {
        const PathOutcome o = simulate_path(instance, agent, path, scenarios[s]);
        score += (o.reward - score) / static_cast<double>(s + 1);
        planned += (o.reward - instance.penalty * o.failed - planned) / static_cast<double>(s + 1);
      }
    }
    result.per_agent_value.push_back(score);
    expected += planned;
    result.score_evaluations += owned[static_cast<std::size_t>(i)].evaluations();
  }
  result.expected_reward = expected - instance.penalty * static_cast<double>(result.unassigned.size());
  return result;
}

}  // namespace tcmdp
