#include "tcmdp/rollout.hpp"

#include "tcmdp/rng.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace tcmdp {

ExecutionPolicy ExecutionPolicy::mdp(std::vector<std::shared_ptr<const ValueTable>> tables)
{
  ExecutionPolicy p;
  p.kind = Kind::mdp_policy;
  p.tables = std::move(tables);
  return p;
}

ExecutionPolicy ExecutionPolicy::fixed(std::vector<std::vector<int>> paths)
{
  ExecutionPolicy p;
  p.kind = Kind::fixed_path;
  p.paths = std::move(paths);
  return p;
}

void CompensatedSum::add(double x)
{
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    carry_ += (sum_ - t) + x;
  else
    carry_ += (x - t) + sum_;
  sum_ = t;
}

namespace {

// Runs the stored policy of one agent; marks outcomes for its tasks.
void run_mdp_agent(const MissionInstance& instance, const ValueTable& table, TaskMask assigned,
                   const Scenario& scenario, std::vector<TaskOutcome>& outcome)
{
  std::uint32_t mask = table.local_mask(assigned);
  int loc = 0;
  int at = 0;
  int bin = 0;
  const double step = table.grid_step();
  while (mask != 0 && bin <= table.last_bin())
  {
    const Action a = table.action_at(mask, loc, bin);
    if (a.kind == Action::Kind::finish)
      break;
    const int j = a.task;
    const int local = table.local_location(j + 1);
    mask &= ~(1U << (local - 1));
    if (a.kind == Action::Kind::skip)
      continue;
    const Task& task = instance.tasks[static_cast<std::size_t>(j)];
    const Location here = at == 0 ? table.agent().start : instance.position(at);
    const double arrival = bin * step + distance(here, task.location) / scenario.speed(at, j + 1);
    double release = arrival;
    if (arrival <= instance.effective_due(j))
    {
      outcome[static_cast<std::size_t>(j)] = TaskOutcome::served;
      release = std::max(arrival, task.ready_time) + task.service_duration;
    }
    at = j + 1;
    loc = local;
    bin = table.bin_of(release);
  }
}

}  // namespace

ExecutionOutcome execute(const MissionInstance& instance, const std::vector<std::vector<int>>& assignment,
                         const ExecutionPolicy& policy, const Scenario& scenario)
{
  const int n = instance.task_count();
  std::vector<TaskOutcome> outcome(static_cast<std::size_t>(n), TaskOutcome::unassigned);
  for (const auto& tasks : assignment)
    for (int j : tasks)
      outcome[static_cast<std::size_t>(j)] = TaskOutcome::failed;

  for (std::size_t i = 0; i < assignment.size(); ++i)
  {
    if (assignment[i].empty())
      continue;
    if (policy.kind == ExecutionPolicy::Kind::mdp_policy)
    {
      if (i >= policy.tables.size() || !policy.tables[i])
        throw std::invalid_argument("mdp execution requires a value table per agent");
      run_mdp_agent(instance, *policy.tables[i], make_set(assignment[i]), scenario, outcome);
    }
    else
    {
      if (i >= policy.paths.size())
        throw std::invalid_argument("fixed-path execution requires a path per agent");
      const auto& path = policy.paths[i];
      const PathOutcome o = simulate_path(instance, instance.agents[i], path, scenario);
      for (std::size_t k = 0; k < path.size(); ++k)
        outcome[static_cast<std::size_t>(path[k])] = o.per_task[k];
    }
  }

  ExecutionOutcome out;
  out.per_task = std::move(outcome);
  for (int j = 0; j < n; ++j)
  {
    switch (out.per_task[static_cast<std::size_t>(j)])
    {
      case TaskOutcome::served:
        ++out.served;
        out.reward += instance.tasks[static_cast<std::size_t>(j)].price;
        break;
      case TaskOutcome::failed:
        ++out.failed;
        out.reward -= instance.penalty;
        break;
      case TaskOutcome::unassigned:
        ++out.unassigned;
        out.reward -= instance.penalty;
        break;
    }
  }
  return out;
}

std::uint64_t rollout_seed(std::uint64_t seed, int round)
{
  return derive_seed(seed, {0x2011007ULL, static_cast<std::uint64_t>(round)});
}

std::vector<RolloutReport> validate(const MissionInstance& instance, std::span<const MethodPlan> plans, int rounds,
                                    std::uint64_t seed)
{
  if (rounds < 1)
    throw std::invalid_argument("validation needs at least one round");
  const auto n = static_cast<std::size_t>(instance.task_count());

  std::vector<RolloutReport> reports(plans.size());
  std::vector<CompensatedSum> sums(plans.size());
  std::vector<CompensatedSum> squares(plans.size());
  for (std::size_t p = 0; p < plans.size(); ++p)
  {
    RolloutReport& r = reports[p];
    r.instance_id = instance.seed;
    r.method = plans[p].method;
    r.expected_reward = plans[p].allocation.expected_reward;
    r.rollout_count = rounds;
    r.task_served.assign(n, 0);
    r.task_failed.assign(n, 0);
    r.task_unassigned.assign(n, 0);
  }

  for (int round = 0; round < rounds; ++round)
  {
    const Scenario scenario = sample_scenario(instance, rollout_seed(seed, round));
    for (std::size_t p = 0; p < plans.size(); ++p)
    {
      const ExecutionOutcome o = execute(instance, plans[p].allocation.assignment, plans[p].policy, scenario);
      RolloutReport& r = reports[p];
      sums[p].add(o.reward);
      squares[p].add(o.reward * o.reward);
      r.served += o.served;
      r.failed += o.failed;
      r.unassigned += o.unassigned;
      for (std::size_t j = 0; j < n; ++j)
      {
        switch (o.per_task[j])
        {
          case TaskOutcome::served: ++r.task_served[j]; break;
          case TaskOutcome::failed: ++r.task_failed[j]; break;
          case TaskOutcome::unassigned: ++r.task_unassigned[j]; break;
        }
      }
    }
  }

  for (std::size_t p = 0; p < plans.size(); ++p)
  {
    RolloutReport& r = reports[p];
    const double mean = sums[p].value() / rounds;
    const double var = std::max(0.0, squares[p].value() / rounds - mean * mean);
    r.actual_reward_mean = mean;
    r.actual_reward_std = std::sqrt(var);
    r.finish_rate = n == 0 ? 1.0 : static_cast<double>(r.served) / (static_cast<double>(n) * rounds);
  }
  return reports;
}

std::string format_report(const RolloutReport& r)
{
  std::ostringstream os;
  os << std::setprecision(17) << "instance=" << r.instance_id << " method=" << r.method
     << " expected_reward=" << r.expected_reward << " actual_reward=" << r.actual_reward_mean
     << " actual_std=" << r.actual_reward_std << " finish_rate=" << r.finish_rate << " served=" << r.served
     << " failed=" << r.failed << " unassigned=" << r.unassigned << " rollouts=" << r.rollout_count;
  return os.str();
}

MethodPlan plan_for(const AllocationResult& allocation, std::span<ValueOracle> oracles)
{
  std::vector<std::shared_ptr<const ValueTable>> tables;
  for (std::size_t i = 0; i < allocation.assignment.size(); ++i)
    tables.push_back(oracles[i].table(make_set(allocation.assignment[i])));
  return {allocation.method, allocation, ExecutionPolicy::mdp(std::move(tables))};
}

MethodPlan plan_for(const AllocationResult& allocation)
{
  return {allocation.method, allocation, ExecutionPolicy::fixed(allocation.paths)};
}

}  // namespace tcmdp
