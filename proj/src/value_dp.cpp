#include "tcmdp/value_dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>

namespace tcmdp {

std::vector<int> set_tasks(TaskMask set)
{
  std::vector<int> out;
  while (set != 0)
  {
    out.push_back(std::countr_zero(set));
    set &= set - 1;
  }
  return out;
}

TaskMask make_set(std::span<const int> tasks)
{
  TaskMask m = 0;
  for (int t : tasks)
    m |= task_bit(t);
  return m;
}

namespace {

constexpr double kGridEps = 1e-9;

int ceil_bin(double time, double step, int limit)
{
  const double b = std::ceil(time / step - kGridEps);
  if (b > limit)
    return limit + 1;
  return b < 0.0 ? 0 : static_cast<int>(b);
}

void check_allocated(const MissionInstance& instance, TaskMask allocated, int cap)
{
  if (instance.task_count() < kMaxMaskTasks && (allocated >> instance.task_count()) != 0)
    throw std::invalid_argument("allocated set references unknown tasks");
  if (set_size(allocated) > cap)
    throw std::invalid_argument("allocated set of " + std::to_string(set_size(allocated))
                                + " tasks exceeds the subset cap of " + std::to_string(cap));
}

}  // namespace

ValueTable solve_value(const MissionInstance& instance, const AgentSpec& agent, const AgentState& start,
                       TaskMask allocated, const QuadratureRule& quadrature, double grid_step, int subset_cap)
{
  if (!(grid_step > 0.0) || !std::isfinite(grid_step))
    throw std::invalid_argument("grid step must be positive");
  if (subset_cap > 24)
    throw std::invalid_argument("subset cap above 24 is not supported");
  check_allocated(instance, allocated, subset_cap);
  if (quadrature.nodes.empty())
    throw std::invalid_argument("quadrature rule has no nodes");

  ValueTable t;
  t.agent_ = agent;
  t.allocated_ = allocated;
  t.tasks_ = set_tasks(allocated);
  t.start_location_ = start.at;
  t.horizon_ = instance.horizon;
  t.step_ = grid_step;
  t.last_bin_ = static_cast<int>(std::floor(instance.horizon / grid_step + kGridEps));

  const int k = static_cast<int>(t.tasks_.size());
  const int q = quadrature.node_count();
  for (int task : t.tasks_)
  {
    const Task& spec = instance.tasks[static_cast<std::size_t>(task)];
    t.price_.push_back(spec.price);
    t.ready_.push_back(spec.ready_time);
    t.due_.push_back(instance.effective_due(task));
    t.service_.push_back(spec.service_duration);
  }
  for (const auto& node : quadrature.nodes)
    t.weights_.push_back(node.weight);

  const Location origin = start.at == 0 ? agent.start : instance.position(start.at);
  t.travel_.assign(static_cast<std::size_t>((k + 1) * k * q), 0.0);
  for (int loc = 0; loc <= k; ++loc)
  {
    const Location from = loc == 0 ? origin : instance.tasks[static_cast<std::size_t>(t.tasks_[loc - 1])].location;
    for (int j = 0; j < k; ++j)
    {
      const double d = distance(from, instance.tasks[static_cast<std::size_t>(t.tasks_[j])].location);
      for (int n = 0; n < q; ++n)
        t.travel_[static_cast<std::size_t>((loc * k + j) * q + n)] = d / quadrature.nodes[static_cast<std::size_t>(n)].speed;
    }
  }

  const std::uint32_t masks = 1U << k;
  const std::size_t total = static_cast<std::size_t>(masks) * static_cast<std::size_t>(k + 1)
                            * static_cast<std::size_t>(t.last_bin_ + 1);
  t.values_.assign(total, 0.0);
  t.policy_.assign(total, 0);

  // Successor masks are numerically smaller, so ascending order is a valid
  // backward-induction schedule.
  for (std::uint32_t mask = 1; mask < masks; ++mask)
  {
    for (int loc = 0; loc <= k; ++loc)
    {
      for (int bin = 0; bin <= t.last_bin_; ++bin)
      {
        double best = -std::numeric_limits<double>::infinity();
        std::uint8_t code = 0;
        for (int j = 0; j < k; ++j)
        {
          if (!((mask >> j) & 1U))
            continue;
          const double v = t.serve_value(mask, loc, bin, j);
          if (v > best)
          {
            best = v;
            code = static_cast<std::uint8_t>(1 + j);
          }
        }
        for (int j = 0; j < k; ++j)
        {
          if (!((mask >> j) & 1U))
            continue;
          const double v = t.values_[t.index(mask & ~(1U << j), loc, bin)];
          if (v > best)
          {
            best = v;
            code = static_cast<std::uint8_t>(1 + k + j);
          }
        }
        if (0.0 > best)
        {
          best = 0.0;
          code = 0;
        }
        const std::size_t idx = t.index(mask, loc, bin);
        t.values_[idx] = best;
        t.policy_[idx] = code;
      }
    }
  }
  return t;
}

ValueTable::Transition ValueTable::transition(int loc, int task, int node, int bin) const
{
  const int k = static_cast<int>(tasks_.size());
  const int q = static_cast<int>(weights_.size());
  const double now = bin * step_;
  const double arrival = now + travel_[static_cast<std::size_t>((loc * k + task) * q + node)];
  const auto j = static_cast<std::size_t>(task);
  if (arrival <= due_[j])
    return {true, ceil_bin(std::max(arrival, ready_[j]) + service_[j], step_, last_bin_)};
  return {false, ceil_bin(arrival, step_, last_bin_)};
}

double ValueTable::child_value(std::uint32_t mask, int loc, int bin) const
{
  return bin > last_bin_ ? 0.0 : values_[index(mask, loc, bin)];
}

double ValueTable::serve_value(std::uint32_t mask, int loc, int bin, int task) const
{
  const std::uint32_t rest = mask & ~(1U << task);
  double acc = 0.0;
  for (std::size_t n = 0; n < weights_.size(); ++n)
  {
    const Transition tr = transition(loc, task, static_cast<int>(n), bin);
    const double gain = tr.served ? price_[static_cast<std::size_t>(task)] : 0.0;
    acc += weights_[n] * (gain + child_value(rest, task + 1, tr.next_bin));
  }
  return acc;
}

Action ValueTable::decode(std::uint8_t code) const
{
  const int k = static_cast<int>(tasks_.size());
  if (code == 0)
    return Action::finish();
  if (code <= k)
    return Action::serve(tasks_[static_cast<std::size_t>(code - 1)]);
  return Action::skip(tasks_[static_cast<std::size_t>(code - 1 - k)]);
}

std::uint32_t ValueTable::local_mask(TaskMask set) const
{
  if ((set & ~allocated_) != 0)
    throw std::out_of_range("task set is not a subset of the allocated tasks");
  std::uint32_t m = 0;
  for (std::size_t k = 0; k < tasks_.size(); ++k)
    if (contains(set, tasks_[k]))
      m |= 1U << k;
  return m;
}

int ValueTable::local_location(int location_index) const
{
  if (location_index == start_location_)
    return 0;
  for (std::size_t k = 0; k < tasks_.size(); ++k)
    if (tasks_[k] + 1 == location_index)
      return static_cast<int>(k) + 1;
  throw std::out_of_range("location " + std::to_string(location_index) + " is not covered by the table");
}

int ValueTable::bin_of(double time) const
{
  return ceil_bin(time, step_, last_bin_);
}

double ValueTable::value_at(std::uint32_t mask, int loc, int bin) const
{
  if (mask >= (1U << tasks_.size()) || loc < 0 || loc > static_cast<int>(tasks_.size()) || bin < 0)
    throw std::out_of_range("table index out of range");
  return child_value(mask, loc, bin);
}

Action ValueTable::action_at(std::uint32_t mask, int loc, int bin) const
{
  if (mask >= (1U << tasks_.size()) || loc < 0 || loc > static_cast<int>(tasks_.size()) || bin < 0)
    throw std::out_of_range("table index out of range");
  if (bin > last_bin_)
    return Action::finish();
  return decode(policy_[index(mask, loc, bin)]);
}

double ValueTable::action_value(std::uint32_t mask, int loc, int bin, Action action) const
{
  if (action.kind == Action::Kind::finish)
    return 0.0;
  const auto it = std::find(tasks_.begin(), tasks_.end(), action.task);
  if (it == tasks_.end() || !((mask >> (it - tasks_.begin())) & 1U))
    throw std::invalid_argument("action references a task outside the remaining set");
  const int j = static_cast<int>(it - tasks_.begin());
  if (action.kind == Action::Kind::skip)
    return child_value(mask & ~(1U << j), loc, bin);
  return serve_value(mask, loc, bin, j);
}

void ValueTable::check_state(const AgentState& state, std::uint32_t& mask, int& loc, int& bin) const
{
  if (!(state.time >= 0.0) || state.time > horizon_)
    throw std::out_of_range("state time outside [0, horizon]");
  mask = local_mask(state.remaining);
  loc = local_location(state.at);
  bin = bin_of(state.time);
}

double ValueTable::value_of(const AgentState& state) const
{
  std::uint32_t mask = 0;
  int loc = 0;
  int bin = 0;
  check_state(state, mask, loc, bin);
  return child_value(mask, loc, bin);
}

Action ValueTable::next_action(const AgentState& state) const
{
  std::uint32_t mask = 0;
  int loc = 0;
  int bin = 0;
  check_state(state, mask, loc, bin);
  return action_at(mask, loc, bin);
}

double ValueTable::expected_failures(const AgentState& state) const
{
  std::uint32_t mask0 = 0;
  int loc0 = 0;
  int bin0 = 0;
  check_state(state, mask0, loc0, bin0);

  std::unordered_map<std::size_t, double> memo;
  const auto recurse = [&](auto&& self, std::uint32_t mask, int loc, int bin) -> double {
    if (bin > last_bin_)
      return std::popcount(mask);
    const std::size_t idx = index(mask, loc, bin);
    if (auto it = memo.find(idx); it != memo.end())
      return it->second;
    const std::uint8_t code = policy_[idx];
    const int k = static_cast<int>(tasks_.size());
    double result = 0.0;
    if (code == 0)
    {
      result = std::popcount(mask);
    }
    else if (code <= k)
    {
      const int j = code - 1;
      const std::uint32_t rest = mask & ~(1U << j);
      for (std::size_t n = 0; n < weights_.size(); ++n)
      {
        const Transition tr = transition(loc, j, static_cast<int>(n), bin);
        result += weights_[n] * ((tr.served ? 0.0 : 1.0) + self(self, rest, j + 1, tr.next_bin));
      }
    }
    else
    {
      const int j = code - 1 - k;
      result = 1.0 + self(self, mask & ~(1U << j), loc, bin);
    }
    memo.emplace(idx, result);
    return result;
  };
  return recurse(recurse, mask0, loc0, bin0);
}

double value_of(const ValueTable& table, const AgentState& state)
{
  return table.value_of(state);
}

Action next_action(const ValueTable& table, const AgentState& state)
{
  return table.next_action(state);
}

double deterministic_route_reward(const MissionInstance& instance, const AgentSpec& agent, const AgentState& start,
                                  TaskMask allocated, const Scenario& scenario, int subset_cap)
{
  check_allocated(instance, allocated, subset_cap);
  if (scenario.locations() < instance.task_count() + 1)
    throw std::invalid_argument("scenario does not cover every location");

  const auto coords = [&](int location_index) {
    return location_index == 0 ? agent.start : instance.position(location_index);
  };

  // Plain enumeration is cheaper than the memo for short routes.
  const bool use_memo = set_size(allocated) > 6;
  std::map<std::tuple<TaskMask, int, double>, double> memo;
  const auto best = [&](auto&& self, TaskMask remaining, int at, double now) -> double {
    if (remaining == 0 || now > instance.horizon)
      return 0.0;
    const auto key = std::make_tuple(remaining, at, now);
    if (use_memo)
      if (auto it = memo.find(key); it != memo.end())
        return it->second;
    double result = 0.0;
    for (TaskMask r = remaining; r != 0; r &= r - 1)
    {
      const int j = std::countr_zero(r);
      const Task& task = instance.tasks[static_cast<std::size_t>(j)];
      const double arrival = now + distance(coords(at), task.location) / scenario.speed(at, j + 1);
      const TaskMask rest = remaining & ~task_bit(j);
      double v = 0.0;
      if (arrival <= instance.effective_due(j))
        v = task.price + self(self, rest, j + 1, std::max(arrival, task.ready_time) + task.service_duration);
      else
        v = self(self, rest, j + 1, arrival);
      result = std::max(result, v);
    }
    if (use_memo)
      memo.emplace(key, result);
    return result;
  };
  return best(best, allocated, start.at, start.time);
}

ValueOracle::ValueOracle(const MissionInstance& instance, int agent, SolverOptions options)
  : instance_(&instance)
  , agent_(agent)
  , options_(options)
  , quadrature_(build_quadrature(instance.agents.at(static_cast<std::size_t>(agent)).speed, options.quadrature_nodes))
{}

void ValueOracle::precompute(TaskMask universe)
{
  universe_ = std::make_shared<const ValueTable>(
    solve_value(*instance_, agent(), start_state(universe), universe, quadrature_, options_.grid_step,
                options_.subset_cap));
  ++solves_;
}

double ValueOracle::value(TaskMask set)
{
  if (universe_ && (set & ~universe_->allocated()) == 0)
    return universe_->value_at(universe_->local_mask(set), 0, 0);
  if (auto it = values_.find(set); it != values_.end())
    return it->second;
  const ValueTable t =
    solve_value(*instance_, agent(), start_state(set), set, quadrature_, options_.grid_step, options_.subset_cap);
  ++solves_;
  const double v = t.value_at(t.local_mask(set), 0, 0);
  values_.emplace(set, v);
  return v;
}

std::shared_ptr<const ValueTable> ValueOracle::table(TaskMask set)
{
  if (universe_ && (set & ~universe_->allocated()) == 0)
    return universe_;
  ++solves_;
  return std::make_shared<const ValueTable>(
    solve_value(*instance_, agent(), start_state(set), set, quadrature_, options_.grid_step, options_.subset_cap));
}

}  // namespace tcmdp
