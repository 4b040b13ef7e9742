#include "tcmdp/properties.hpp"

#include "tcmdp/network.hpp"
#include "tcmdp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tcmdp {

namespace {

constexpr double kTolerance = 1e-9;
constexpr std::size_t kMaxWitnesses = 5;

std::string mask_text(TaskMask set)
{
  std::string out = "{";
  bool first = true;
  for (int j : set_tasks(set))
  {
    if (!first)
      out += ",";
    out += std::to_string(j);
    first = false;
  }
  return out + "}";
}

TaskMask all_tasks(const MissionInstance& instance)
{
  return instance.task_count() >= 64 ? ~TaskMask{0} : task_bit(instance.task_count()) - 1;
}

void require_small(const MissionInstance& instance, int max_set)
{
  if (instance.task_count() > max_set)
    throw std::invalid_argument("property checks support at most " + std::to_string(max_set) + " tasks, got "
                                + std::to_string(instance.task_count()));
}

std::vector<double> all_values(ValueOracle& oracle, TaskMask universe)
{
  oracle.precompute(universe);
  std::vector<double> v(static_cast<std::size_t>(universe) + 1);
  for (TaskMask s = 0; s <= universe; ++s)
    v[s] = oracle.value(s);
  return v;
}

// Scenario-wise submodularity of the clairvoyant route reward, over every
// assignment of quadrature nodes to the arcs the agent can traverse.
bool reward_submodular(const MissionInstance& instance, const ValueOracle& oracle, long max_scenarios, long& scenarios)
{
  const int n = instance.task_count();
  const auto& nodes = oracle.quadrature().nodes;
  const int q = static_cast<int>(nodes.size());

  std::vector<std::pair<int, int>> arcs;
  for (int j = 0; j < n; ++j)
    arcs.emplace_back(0, j + 1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b)
        arcs.emplace_back(a + 1, b + 1);

  long combos = 1;
  for (std::size_t k = 0; k < arcs.size(); ++k)
  {
    combos *= q;
    if (combos > max_scenarios)
      throw std::invalid_argument("too many speed combinations for the scenario-wise reward check ("
                                  + std::to_string(q) + "^" + std::to_string(arcs.size()) + ")");
  }

  const TaskMask universe = all_tasks(instance);
  const AgentSpec& agent = oracle.agent();
  std::vector<int> digit(arcs.size(), 0);
  std::vector<double> reward(static_cast<std::size_t>(universe) + 1);
  Scenario scenario(n + 1, agent.speed.mean);
  scenarios = 0;
  for (long c = 0; c < combos; ++c)
  {
    for (std::size_t k = 0; k < arcs.size(); ++k)
      scenario.set_speed(arcs[k].first, arcs[k].second, nodes[static_cast<std::size_t>(digit[k])].speed);
    for (TaskMask s = 0; s <= universe; ++s)
      reward[s] = deterministic_route_reward(instance, agent, AgentState{0.0, 0, s}, s, scenario);
    ++scenarios;
    // Pairwise form: R(S+i) + R(S+j) >= R(S+i+j) + R(S) for all S, i, j not in S.
    for (TaskMask s = 0; s <= universe; ++s)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
        {
          if (contains(s, i) || contains(s, j))
            continue;
          const TaskMask si = s | task_bit(i);
          const TaskMask sj = s | task_bit(j);
          if (reward[si] + reward[sj] < reward[si | sj] + reward[s] - kTolerance)
            return false;
        }
    for (std::size_t k = 0; k < digit.size(); ++k)
    {
      if (++digit[k] < q)
        break;
      digit[k] = 0;
    }
  }
  return true;
}

}  // namespace

void PropertyReport::record(bool violated, double magnitude, const std::string& witness)
{
  ++trials;
  if (!violated)
    return;
  ++violations;
  worst_violation = std::max(worst_violation, magnitude);
  if (witnesses.size() < kMaxWitnesses)
    witnesses.push_back(witness);
}

void PropertyReport::merge(const PropertyReport& other)
{
  trials += other.trials;
  violations += other.violations;
  worst_violation = std::max(worst_violation, other.worst_violation);
  for (const auto& w : other.witnesses)
    if (witnesses.size() < kMaxWitnesses)
      witnesses.push_back(w);
}

std::string format_property(const PropertyReport& report)
{
  std::ostringstream out;
  out.precision(17);
  out << "property=" << report.property << " trials=" << report.trials << " violations=" << report.violations
      << " worst_violation=" << report.worst_violation;
  for (const auto& w : report.witnesses)
    out << "\n  witness " << w;
  return out.str();
}

SubmodularityCheck check_submodularity_V(const MissionInstance& instance, ValueOracle& oracle, int max_set,
                                         long max_scenarios)
{
  require_small(instance, max_set);
  SubmodularityCheck result;
  result.value.property = "submodularity";
  result.reward_submodular = reward_submodular(instance, oracle, max_scenarios, result.scenarios);

  const int n = instance.task_count();
  const TaskMask universe = all_tasks(instance);
  const auto v = all_values(oracle, universe);
  for (TaskMask b = 0; b <= universe; ++b)
    for (TaskMask a = b;; a = (a - 1) & b)  // every subset a of b
    {
      for (int j = 0; j < n; ++j)
      {
        if (contains(b, j))
          continue;
        const double small_gain = v[a | task_bit(j)] - v[a];
        const double large_gain = v[b | task_bit(j)] - v[b];
        const double excess = large_gain - small_gain;
        result.value.record(excess > kTolerance, excess,
                            "seed=" + std::to_string(instance.seed) + " A=" + mask_text(a) + " B=" + mask_text(b)
                              + " j=" + std::to_string(j));
      }
      if (a == 0)
        break;
    }
  return result;
}

PropertyReport check_monotonicity_V(const MissionInstance& instance, ValueOracle& oracle, int max_set)
{
  require_small(instance, max_set);
  PropertyReport report;
  report.property = "monotonicity";
  const TaskMask universe = all_tasks(instance);
  const auto v = all_values(oracle, universe);
  for (TaskMask b = 0; b <= universe; ++b)
    for (TaskMask a = b;; a = (a - 1) & b)
    {
      const double drop = v[a] - v[b];
      report.record(drop > 0.0, drop,
                    "seed=" + std::to_string(instance.seed) + " A=" + mask_text(a) + " B=" + mask_text(b));
      if (a == 0)
        break;
    }
  return report;
}

double welfare(std::span<ValueOracle> oracles, const std::vector<std::vector<int>>& assignment)
{
  double total = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i)
    total += oracles[i].value(make_set(assignment[i]));
  return total;
}

OptimumResult brute_force_opt(const MissionInstance& instance, std::span<ValueOracle> oracles)
{
  const int n = instance.task_count();
  const int m = instance.agent_count();
  if (n > 4 || m > 3)
    throw std::invalid_argument("brute force supports at most 4 tasks and 3 agents");
  if (static_cast<int>(oracles.size()) != m)
    throw std::invalid_argument("one value oracle per agent is required");

  OptimumResult best;
  best.opt_value = -std::numeric_limits<double>::infinity();
  best.opt_welfare = -std::numeric_limits<double>::infinity();
  long codes = 1;
  for (int j = 0; j < n; ++j)
    codes *= m + 1;
  std::vector<TaskMask> sets(static_cast<std::size_t>(m));
  for (long code = 0; code < codes; ++code)
  {
    std::fill(sets.begin(), sets.end(), TaskMask{0});
    int unassigned = 0;
    long c = code;
    for (int j = 0; j < n; ++j, c /= m + 1)
    {
      const int owner = static_cast<int>(c % (m + 1));
      if (owner == m)
        ++unassigned;
      else
        sets[static_cast<std::size_t>(owner)] |= task_bit(j);
    }
    bool feasible = true;
    double total = 0.0;
    for (int i = 0; i < m && feasible; ++i)
    {
      feasible = set_size(sets[static_cast<std::size_t>(i)]) <= instance.agents[static_cast<std::size_t>(i)].capacity;
      if (feasible)
        total += oracles[static_cast<std::size_t>(i)].value(sets[static_cast<std::size_t>(i)]);
    }
    if (!feasible)
      continue;
    best.opt_welfare = std::max(best.opt_welfare, total);
    const double penalized = total - instance.penalty * unassigned;
    if (penalized > best.opt_value)
    {
      best.opt_value = penalized;
      best.opt_assignment.assign(static_cast<std::size_t>(m), {});
      for (int i = 0; i < m; ++i)
        best.opt_assignment[static_cast<std::size_t>(i)] = set_tasks(sets[static_cast<std::size_t>(i)]);
    }
  }
  return best;
}

SubmodularitySuite submodularity_suite(int trials, std::uint64_t seed, double grid_step)
{
  static constexpr double kSigmas[] = {0.0, 0.05, 0.1, 0.2};
  SubmodularitySuite suite;
  suite.on_submodular_reward.property = "submodularity";
  suite.on_other.property = "submodularity-outside-claim";
  const long max_attempts = 50L * std::max(trials, 1);
  for (long k = 0; suite.submodular_instances < trials && k < max_attempts; ++k)
  {
    GenerationConfig cfg;
    cfg.n_tasks = 3 + static_cast<int>(k % 2);
    cfg.n_agents = 1;
    cfg.sigma_v_sq = kSigmas[(k / 2) % 4];
    cfg.seed = derive_seed(seed, {0x5B30D, static_cast<std::uint64_t>(k)});
    const MissionInstance instance = generate_instance(cfg);
    SolverOptions solver;
    solver.grid_step = grid_step;
    solver.quadrature_nodes = cfg.sigma_v_sq == 0.0 ? 1 : (cfg.n_tasks == 3 ? 3 : 2);
    ValueOracle oracle(instance, 0, solver);
    const auto check = check_submodularity_V(instance, oracle);
    ++suite.instances_examined;
    if (check.reward_submodular)
    {
      ++suite.submodular_instances;
      suite.on_submodular_reward.merge(check.value);
    }
    else
    {
      suite.on_other.merge(check.value);
    }
  }
  return suite;
}

PropertyReport monotonicity_suite(int instances, std::uint64_t seed, const SolverOptions& solver)
{
  static constexpr double kSigmas[] = {0.0, 0.05, 0.1, 0.2};
  PropertyReport report;
  report.property = "monotonicity";
  for (int k = 0; k < instances; ++k)
  {
    GenerationConfig cfg;
    cfg.n_tasks = 1 + k % 5;
    cfg.n_agents = 1;
    cfg.sigma_v_sq = kSigmas[k % 4];
    cfg.seed = derive_seed(seed, {0x3070, static_cast<std::uint64_t>(k)});
    const MissionInstance instance = generate_instance(cfg);
    ValueOracle oracle(instance, 0, solver);
    report.merge(check_monotonicity_V(instance, oracle));
  }
  return report;
}

OptimalitySuite optimality_suite(int instances, std::uint64_t seed, const SolverOptions& solver,
                                 const CoordinationOptions& options)
{
  static constexpr double kSigmas[] = {0.0, 0.05, 0.1, 0.2};
  OptimalitySuite suite;
  suite.report.property = "half-optimal";
  for (int k = 0; k < instances; ++k)
  {
    GenerationConfig cfg;
    cfg.n_tasks = 2 + k % 3;
    cfg.n_agents = 2;
    cfg.sigma_v_sq = kSigmas[k % 4];
    cfg.seed = derive_seed(seed, {0x0F7, static_cast<std::uint64_t>(k)});
    const MissionInstance instance = generate_instance(cfg);
    auto oracles = make_oracles(instance, solver);
    const Network network = Network::complete(instance.agent_count());
    const AllocationResult allocation = run_auction(instance, network, oracles, options);
    const OptimumResult opt = brute_force_opt(instance, oracles);
    const double achieved = welfare(oracles, allocation.assignment);
    if (opt.opt_welfare > 0.0)
      suite.ratios.push_back(achieved / opt.opt_welfare);
    if (achieved >= opt.opt_welfare - kTolerance)
      ++suite.auction_matches_opt;
    const double shortfall = 0.5 * opt.opt_welfare - achieved;
    std::ostringstream w;
    w.precision(17);
    w << "seed=" << cfg.seed << " n=" << cfg.n_tasks << " sigma_sq=" << cfg.sigma_v_sq << " auction=" << achieved
      << " opt=" << opt.opt_welfare;
    suite.report.record(shortfall > 0.0, shortfall, w.str());
  }
  return suite;
}

PropertyReport bellman_suite(int states, std::uint64_t seed, const SolverOptions& solver)
{
  PropertyReport report;
  report.property = "bellman";
  constexpr int kPerInstance = 100;
  Rng rng(derive_seed(seed, {0xBE11}));
  for (int k = 0; report.trials < states; ++k)
  {
    GenerationConfig cfg;
    cfg.n_tasks = 2 + k % 4;
    cfg.n_agents = 1;
    cfg.sigma_v_sq = 0.05 * (k % 5);
    cfg.seed = derive_seed(seed, {0xBE12, static_cast<std::uint64_t>(k)});
    const MissionInstance instance = generate_instance(cfg);
    const QuadratureRule rule = build_quadrature(instance.agents[0].speed, solver.quadrature_nodes);
    const TaskMask universe = all_tasks(instance);
    const ValueTable table = solve_value(instance, instance.agents[0], AgentState{0.0, 0, universe}, universe, rule,
                                         solver.grid_step, solver.subset_cap);
    const int kk = static_cast<int>(table.tasks().size());
    for (int s = 0; s < kPerInstance && report.trials < states; ++s)
    {
      const auto mask = static_cast<std::uint32_t>(rng.pick(1 << kk));
      const int loc = rng.pick(kk + 1);
      const int bin = rng.pick(table.last_bin() + 1);
      double best = 0.0;
      for (int j = 0; j < kk; ++j)
      {
        if (!((mask >> j) & 1U))
          continue;
        const int task = table.tasks()[static_cast<std::size_t>(j)];
        best = std::max(best, table.action_value(mask, loc, bin, Action::serve(task)));
        best = std::max(best, table.action_value(mask, loc, bin, Action::skip(task)));
      }
      const double stored = table.value_at(mask, loc, bin);
      const double chosen = table.action_value(mask, loc, bin, table.action_at(mask, loc, bin));
      const double gap = std::max(std::abs(stored - best), std::abs(stored - chosen));
      report.record(stored != best || chosen != stored, gap,
                    "seed=" + std::to_string(cfg.seed) + " mask=" + std::to_string(mask) + " loc=" + std::to_string(loc)
                      + " bin=" + std::to_string(bin));
    }
  }
  return report;
}

}  // namespace tcmdp
