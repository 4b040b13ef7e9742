#include "tcmdp/auction.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

namespace tcmdp {

BundleState BundleState::empty(int agent_id, int task_count, int agent_count)
{
  BundleState s;
  s.agent_id = agent_id;
  s.winning_bids.assign(static_cast<std::size_t>(task_count), 0.0);
  s.winners.assign(static_cast<std::size_t>(task_count), kNoAgent);
  s.timestamps.assign(static_cast<std::size_t>(agent_count), 0);
  return s;
}

std::vector<double> BundleState::bundle_bids() const
{
  std::vector<double> out;
  out.reserve(bundle.size());
  for (int j : bundle)
    out.push_back(winning_bids[static_cast<std::size_t>(j)]);
  return out;
}

bool BundleState::holds(int task) const
{
  return std::find(bundle.begin(), bundle.end(), task) != bundle.end();
}

double wrap_bid(double raw, std::span<const double> bundle_bids)
{
  double c = raw;
  for (double y : bundle_bids)
    c = std::min(c, y);
  return c;
}

std::vector<Bid> compute_bids(ValueOracle& oracle, const BundleState& state, bool wrapping,
                              std::uint64_t& evaluations)
{
  const TaskMask held = make_set(state.bundle);
  const double base = oracle.value(held);
  const std::vector<double> standing = state.bundle_bids();
  const int n = static_cast<int>(state.winners.size());

  std::vector<Bid> bids;
  for (int j = 0; j < n; ++j)
  {
    if (contains(held, j))
      continue;
    Bid b;
    b.agent_id = state.agent_id;
    b.task_id = j;
    b.value = oracle.value(held | task_bit(j)) - base;
    b.wrapped_value = wrapping ? wrap_bid(b.value, standing) : b.value;
    b.eligible = b.wrapped_value > state.winning_bids[static_cast<std::size_t>(j)];
    ++evaluations;
    bids.push_back(b);
  }
  return bids;
}

bool build_bundle(ValueOracle& oracle, BundleState& state, bool wrapping, std::uint64_t& evaluations)
{
  const int capacity = oracle.agent().capacity;
  bool changed = false;
  while (static_cast<int>(state.bundle.size()) < capacity)
  {
    const std::vector<Bid> bids = compute_bids(oracle, state, wrapping, evaluations);
    const Bid* best = nullptr;
    for (const Bid& b : bids)
      if (b.eligible && (best == nullptr || b.wrapped_value > best->wrapped_value))
        best = &b;
    if (best == nullptr || best->wrapped_value <= 0.0)
      break;
    const auto j = static_cast<std::size_t>(best->task_id);
    state.bundle.push_back(best->task_id);
    state.path.push_back(best->task_id);
    state.winning_bids[j] = best->wrapped_value;
    state.winners[j] = state.agent_id;
    changed = true;
  }
  return changed;
}

namespace {

enum class Decision { leave, update, reset };

Decision decide(const BundleState& self, const BundleState& msg, int j)
{
  const int i = self.agent_id;
  const int k = msg.agent_id;
  const auto ju = static_cast<std::size_t>(j);
  const int zk = msg.winners[ju];
  const int zi = self.winners[ju];
  const double yk = msg.winning_bids[ju];
  const double yi = self.winning_bids[ju];
  const auto sk = [&](int m) { return msg.timestamps[static_cast<std::size_t>(m)]; };
  const auto si = [&](int m) { return self.timestamps[static_cast<std::size_t>(m)]; };
  const bool beats = yk > yi || (yk == yi && zk != kNoAgent && (zi == kNoAgent || zk < zi));

  if (zk == k)
  {
    if (zi == i)
      return beats ? Decision::update : Decision::leave;
    if (zi == k || zi == kNoAgent)
      return Decision::update;
    return (sk(zi) > si(zi) || beats) ? Decision::update : Decision::leave;
  }
  if (zk == i)
  {
    if (zi == i || zi == kNoAgent)
      return Decision::leave;
    if (zi == k)
      return Decision::reset;
    return sk(zi) > si(zi) ? Decision::reset : Decision::leave;
  }
  if (zk != kNoAgent)
  {
    const int m = zk;
    if (zi == i)
      return (sk(m) > si(m) && beats) ? Decision::update : Decision::leave;
    if (zi == k)
      return sk(m) > si(k) ? Decision::update : Decision::reset;
    if (zi == m)
      return sk(m) > si(m) ? Decision::update : Decision::leave;
    if (zi == kNoAgent)
      return sk(m) > si(m) ? Decision::update : Decision::leave;
    const int n = zi;
    if (sk(m) > si(m) && sk(n) > si(n))
      return Decision::update;
    if (sk(m) > si(m) && beats)
      return Decision::update;
    if (sk(n) > si(n) && si(m) > sk(m))
      return Decision::reset;
    return Decision::leave;
  }
  if (zi == i || zi == kNoAgent)
    return Decision::leave;
  if (zi == k)
    return Decision::update;
  return sk(zi) > si(zi) ? Decision::update : Decision::leave;
}

std::string check_message(const BundleState& self, const BundleState& msg)
{
  if (msg.winners.size() != self.winners.size() || msg.winning_bids.size() != self.winning_bids.size())
    return "agent " + std::to_string(msg.agent_id) + ": task vector length mismatch";
  if (msg.timestamps.size() != self.timestamps.size())
    return "agent " + std::to_string(msg.agent_id) + ": timestamp vector length mismatch";
  if (msg.agent_id < 0 || msg.agent_id >= static_cast<int>(self.timestamps.size()) || msg.agent_id == self.agent_id)
    return "agent " + std::to_string(msg.agent_id) + ": invalid sender id";
  return {};
}

}  // namespace

ConsensusOutcome consensus_round(BundleState& self, std::span<const BundleState> inbox, int now)
{
  ConsensusOutcome out;
  const std::vector<int> winners_before = self.winners;
  const std::vector<double> bids_before = self.winning_bids;
  const std::vector<int> bundle_before = self.bundle;
  const int n = static_cast<int>(self.winners.size());

  for (const BundleState& msg : inbox)
  {
    if (std::string err = check_message(self, msg); !err.empty())
    {
      out.dropped.push_back(std::move(err));
      continue;
    }
    for (int j = 0; j < n; ++j)
    {
      const auto ju = static_cast<std::size_t>(j);
      switch (decide(self, msg, j))
      {
        case Decision::update:
          self.winners[ju] = msg.winners[ju];
          self.winning_bids[ju] = msg.winning_bids[ju];
          break;
        case Decision::reset:
          self.winners[ju] = kNoAgent;
          self.winning_bids[ju] = 0.0;
          break;
        case Decision::leave:
          break;
      }
    }
    for (std::size_t m = 0; m < self.timestamps.size(); ++m)
      if (static_cast<int>(m) != self.agent_id)
        self.timestamps[m] = std::max(self.timestamps[m], msg.timestamps[m]);
    self.timestamps[static_cast<std::size_t>(msg.agent_id)] = now;
  }

  const auto lost = std::find_if(self.bundle.begin(), self.bundle.end(), [&](int j) {
    return self.winners[static_cast<std::size_t>(j)] != self.agent_id;
  });
  if (lost != self.bundle.end())
  {
    for (auto it = lost + 1; it != self.bundle.end(); ++it)
    {
      self.winners[static_cast<std::size_t>(*it)] = kNoAgent;
      self.winning_bids[static_cast<std::size_t>(*it)] = 0.0;
    }
    self.bundle.erase(lost, self.bundle.end());
    std::erase_if(self.path, [&](int j) { return !self.holds(j); });
  }

  for (int j = 0; j < n; ++j)
    if (self.winners[static_cast<std::size_t>(j)] != winners_before[static_cast<std::size_t>(j)])
      out.winner_changes.push_back(j);
  out.changed = self.winners != winners_before || self.winning_bids != bids_before || self.bundle != bundle_before;
  return out;
}

namespace {

void trace_state(std::ostream& os, int round, const BundleState& s)
{
  os << "msg v1 round=" << round << " agent=" << s.agent_id << " bundle=[";
  for (std::size_t k = 0; k < s.bundle.size(); ++k)
    os << (k ? "," : "") << s.bundle[k];
  os << "] y=[";
  for (std::size_t k = 0; k < s.winning_bids.size(); ++k)
    os << (k ? "," : "") << s.winning_bids[k];
  os << "] z=[";
  for (std::size_t k = 0; k < s.winners.size(); ++k)
    os << (k ? "," : "") << s.winners[k];
  os << "] s=[";
  for (std::size_t k = 0; k < s.timestamps.size(); ++k)
    os << (k ? "," : "") << s.timestamps[k];
  os << "]\n";
}

}  // namespace

CoordinationRun coordinate(const MissionInstance& instance, const Network& network,
                           std::span<BundleBuilder* const> builders, const CoordinationOptions& options)
{
  const int m = instance.agent_count();
  const int n = instance.task_count();
  if (network.size() != m)
    throw std::invalid_argument("network size does not match the agent count");
  if (static_cast<int>(builders.size()) != m)
    throw std::invalid_argument("one bundle builder per agent is required");
  if (!network.connected())
    throw std::invalid_argument("communication network must be connected");
  if (n > kMaxMaskTasks)
    throw std::invalid_argument("at most 64 tasks are supported");

  const auto started = std::chrono::steady_clock::now();
  CoordinationRun run;
  for (int i = 0; i < m; ++i)
    run.states.push_back(BundleState::empty(i, n, m));

  const int quiet_needed = std::max(1, network.diameter());
  int quiet = 0;
  std::set<int> last_moves;
  for (int round = 1; round <= options.max_rounds; ++round)
  {
    std::vector<char> built(static_cast<std::size_t>(m), 0);
    for (auto& s : run.states)
      s.timestamps[static_cast<std::size_t>(s.agent_id)] = round;
    if (options.parallel && m > 1)
    {
      std::vector<std::thread> workers;
      for (int i = 0; i < m; ++i)
        workers.emplace_back([&, i] {
          built[static_cast<std::size_t>(i)] = builders[static_cast<std::size_t>(i)]->build(run.states[static_cast<std::size_t>(i)]);
        });
      for (auto& w : workers)
        w.join();
    }
    else
    {
      for (int i = 0; i < m; ++i)
        built[static_cast<std::size_t>(i)] = builders[static_cast<std::size_t>(i)]->build(run.states[static_cast<std::size_t>(i)]);
    }
    bool changed = std::any_of(built.begin(), built.end(), [](char c) { return c != 0; });

    const std::vector<BundleState> snapshot = run.states;
    if (options.trace)
      for (const auto& s : snapshot)
        trace_state(*options.trace, round, s);

    std::set<int> moves;
    for (int i = 0; i < m; ++i)
    {
      std::vector<BundleState> inbox;
      for (int k : network.neighbors(i))
        inbox.push_back(snapshot[static_cast<std::size_t>(k)]);
      ConsensusOutcome c = consensus_round(run.states[static_cast<std::size_t>(i)], inbox, round);
      changed = changed || c.changed;
      moves.insert(c.winner_changes.begin(), c.winner_changes.end());
      for (auto& d : c.dropped)
        run.diagnostics.push_back("round " + std::to_string(round) + ": dropped message from " + d);
    }

    run.rounds_run = round;
    if (changed)
    {
      run.rounds_to_converge = round;
      last_moves = std::move(moves);
      quiet = 0;
    }
    else if (++quiet >= quiet_needed)
    {
      run.converged = true;
      break;
    }
  }
  if (!run.converged)
    run.oscillating_tasks.assign(last_moves.begin(), last_moves.end());
  run.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return run;
}

void collect_assignment(const MissionInstance& instance, const CoordinationRun& run, AllocationResult& result)
{
  const int n = instance.task_count();
  const int m = instance.agent_count();
  std::vector<int> owner(static_cast<std::size_t>(n), kNoAgent);
  for (int j = 0; j < n; ++j)
  {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
    {
      const BundleState& s = run.states[static_cast<std::size_t>(i)];
      if (!s.holds(j))
        continue;
      const double y = s.winning_bids[static_cast<std::size_t>(j)];
      if (y > best)
      {
        best = y;
        owner[static_cast<std::size_t>(j)] = i;
      }
    }
  }
  result.assignment.assign(static_cast<std::size_t>(m), {});
  result.paths.assign(static_cast<std::size_t>(m), {});
  for (int i = 0; i < m; ++i)
  {
    const BundleState& s = run.states[static_cast<std::size_t>(i)];
    for (int j : s.bundle)
      if (owner[static_cast<std::size_t>(j)] == i)
        result.assignment[static_cast<std::size_t>(i)].push_back(j);
    for (int j : s.path)
      if (owner[static_cast<std::size_t>(j)] == i)
        result.paths[static_cast<std::size_t>(i)].push_back(j);
  }
  result.unassigned.clear();
  for (int j = 0; j < n; ++j)
    if (owner[static_cast<std::size_t>(j)] == kNoAgent)
      result.unassigned.push_back(j);
  result.rounds_to_converge = run.rounds_to_converge;
  result.rounds_run = run.rounds_run;
  result.converged = run.converged;
  result.oscillating_tasks = run.oscillating_tasks;
  result.coordination_ms = run.elapsed_ms;
  result.diagnostics = run.diagnostics;
}

bool is_conflict_free(const MissionInstance& instance, const AllocationResult& result)
{
  std::vector<int> count(static_cast<std::size_t>(instance.task_count()), 0);
  for (std::size_t i = 0; i < result.assignment.size(); ++i)
  {
    if (static_cast<int>(result.assignment[i].size()) > instance.agents[i].capacity)
      return false;
    for (int j : result.assignment[i])
      if (++count[static_cast<std::size_t>(j)] > 1)
        return false;
  }
  return true;
}

std::vector<ValueOracle> make_oracles(const MissionInstance& instance, const SolverOptions& solver)
{
  std::vector<ValueOracle> oracles;
  oracles.reserve(instance.agents.size());
  const TaskMask all = instance.task_count() >= kMaxMaskTasks ? ~TaskMask{0}
                                                              : (TaskMask{1} << instance.task_count()) - 1;
  for (int i = 0; i < instance.agent_count(); ++i)
  {
    oracles.emplace_back(instance, i, solver);
    if (instance.task_count() <= std::min(8, solver.subset_cap))
      oracles.back().precompute(all);
  }
  return oracles;
}

AllocationResult run_auction(const MissionInstance& instance, const Network& network,
                             std::span<ValueOracle> oracles, const CoordinationOptions& options)
{
  std::vector<AuctionBuilder> owned;
  owned.reserve(oracles.size());
  for (auto& o : oracles)
    owned.emplace_back(o, options.wrapping);
  std::vector<BundleBuilder*> builders;
  for (auto& b : owned)
    builders.push_back(&b);

  const CoordinationRun run = coordinate(instance, network, builders, options);
  AllocationResult result;
  result.method = "auction";
  collect_assignment(instance, run, result);

  double expected = 0.0;
  for (std::size_t i = 0; i < oracles.size(); ++i)
  {
    const TaskMask set = make_set(result.assignment[i]);
    const double v = oracles[i].value(set);
    result.per_agent_value.push_back(v);
    const auto table = oracles[i].table(set);
    const double failures = table->expected_failures(oracles[i].start_state(set));
    expected += v - instance.penalty * failures;
    result.score_evaluations += owned[i].evaluations();
  }
  result.expected_reward = expected - instance.penalty * static_cast<double>(result.unassigned.size());
  return result;
}

AllocationResult run_auction(const MissionInstance& instance, const Network& network,
                             const SolverOptions& solver, const CoordinationOptions& options)
{
  std::vector<ValueOracle> oracles = make_oracles(instance, solver);
  return run_auction(instance, network, oracles, options);
}

}  // namespace tcmdp
