#include "tcmdp/experiment.hpp"

#include "tcmdp/auction.hpp"
#include "tcmdp/baselines.hpp"
#include "tcmdp/instance.hpp"
#include "tcmdp/network.hpp"
#include "tcmdp/parallel.hpp"
#include "tcmdp/rng.hpp"
#include "tcmdp/rollout.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace tcmdp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since)
{
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

struct Job
{
  int n = 0;
  double sigma = 0.0;
  int index = 0;
};

std::vector<ExperimentRow> run_job(const ExperimentConfig& config, const Job& job)
{
  std::vector<ExperimentRow> rows;
  ExperimentRow base;
  base.n_tasks = job.n;
  base.n_agents = config.agents;
  base.sigma_sq = job.sigma;
  base.instance = job.index;
  base.instance_seed = instance_seed(config.seed, job.n, config.agents, job.index);
  try
  {
    GenerationConfig gen;
    gen.n_tasks = job.n;
    gen.n_agents = config.agents;
    gen.sigma_v_sq = job.sigma;
    gen.seed = base.instance_seed;
    const MissionInstance instance = generate_instance(gen);
    const Network network = make_network(config.topology, config.agents, derive_seed(base.instance_seed, {0x7E7}));

    CoordinationOptions coord;
    coord.wrapping = config.wrapping;
    coord.max_rounds = config.max_rounds;

    std::vector<MethodPlan> plans;
    std::vector<ExperimentRow> method_rows;
    std::vector<ValueOracle> oracles;
    for (const auto& method : config.methods)
    {
      ExperimentRow row = base;
      row.method = method;
      AllocationResult allocation;
      if (method == "auction")
      {
        const auto t0 = Clock::now();
        oracles = make_oracles(instance, config.solver);
        row.precompute_ms = elapsed_ms(t0);
        allocation = run_auction(instance, network, oracles, coord);
        for (int r = 1; r < config.timing_repeats; ++r)
          allocation.coordination_ms =
            std::min(allocation.coordination_ms, run_auction(instance, network, oracles, coord).coordination_ms);
        plans.push_back(plan_for(allocation, oracles));
      }
      else if (method == "cbba" || method == "robust-cbba")
      {
        CbbaOptions cbba;
        cbba.variant = method == "cbba" ? CbbaVariant::deterministic : CbbaVariant::robust;
        cbba.robust.sample_count = config.robust_samples;
        cbba.robust.seed = derive_seed(base.instance_seed, {0x40B});
        allocation = run_cbba(instance, network, cbba, coord);
        for (int r = 1; r < config.timing_repeats; ++r)
          allocation.coordination_ms =
            std::min(allocation.coordination_ms, run_cbba(instance, network, cbba, coord).coordination_ms);
        plans.push_back(plan_for(allocation));
      }
      else
      {
        throw std::invalid_argument("unknown method '" + method + "'");
      }
      row.wall_time_ms = allocation.coordination_ms;
      row.expected_reward = allocation.expected_reward;
      row.rounds = allocation.rounds_to_converge;
      row.converged = allocation.converged;
      row.score_evaluations = allocation.score_evaluations;
      method_rows.push_back(row);
    }
    if (config.rollouts > 0)
    {
      const auto reports = validate(instance, plans, config.rollouts, derive_seed(base.instance_seed, {0x7011}));
      for (std::size_t k = 0; k < reports.size(); ++k)
      {
        auto& row = method_rows[k];
        row.actual_reward = reports[k].actual_reward_mean;
        row.actual_std = reports[k].actual_reward_std;
        row.finish_rate = reports[k].finish_rate;
        row.served = reports[k].served;
        row.failed = reports[k].failed;
        row.unassigned = reports[k].unassigned;
        row.validated = true;
      }
    }
    rows = std::move(method_rows);
  }
  catch (const std::exception& e)
  {
    rows.clear();
    for (const auto& method : config.methods)
    {
      ExperimentRow row = base;
      row.method = method;
      row.error = e.what();
      rows.push_back(row);
    }
  }
  return rows;
}

std::string csv_field(const std::string& text)
{
  if (text.find_first_of(",\"\n") == std::string::npos)
    return text;
  std::string out = "\"";
  for (char c : text)
  {
    if (c == '"')
      out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

struct Accumulator
{
  SummaryRow row;
  double expected = 0.0;
  double actual = 0.0;
  double abs_gap = 0.0;
  double evaluations = 0.0;
  long served = 0;
  long attempts = 0;
  int validated = 0;
};

std::vector<SummaryRow> group(std::span<const ExperimentRow> rows, bool pooled)
{
  std::vector<Accumulator> groups;
  std::map<std::tuple<int, int, double, std::string>, std::size_t> where;
  for (const auto& r : rows)
  {
    const auto key = std::make_tuple(pooled ? 0 : r.n_tasks, r.n_agents, r.sigma_sq, r.method);
    auto it = where.find(key);
    if (it == where.end())
    {
      it = where.emplace(key, groups.size()).first;
      Accumulator a;
      a.row.n_tasks = pooled ? 0 : r.n_tasks;
      a.row.n_agents = r.n_agents;
      a.row.sigma_sq = r.sigma_sq;
      a.row.method = r.method;
      groups.push_back(a);
    }
    auto& a = groups[it->second];
    if (!r.error.empty())
    {
      ++a.row.errors;
      continue;
    }
    ++a.row.instances;
    a.expected += r.expected_reward;
    a.evaluations += static_cast<double>(r.score_evaluations);
    a.row.wall_time_ms += r.wall_time_ms;
    a.row.precompute_ms += r.precompute_ms;
    if (r.validated)
    {
      ++a.validated;
      a.actual += r.actual_reward;
      a.abs_gap += std::abs(r.expected_reward - r.actual_reward);
      a.served += r.served;
      a.attempts += r.served + r.failed + r.unassigned;
    }
  }
  std::vector<SummaryRow> out;
  for (auto& a : groups)
  {
    SummaryRow s = a.row;
    if (s.instances > 0)
    {
      s.expected_reward = a.expected / s.instances;
      s.score_evaluations = a.evaluations / s.instances;
    }
    if (a.validated > 0)
    {
      s.actual_reward = a.actual / a.validated;
      s.gap = std::abs(s.expected_reward - s.actual_reward);
      s.mean_abs_gap = a.abs_gap / a.validated;
      s.finish_rate = a.attempts > 0 ? static_cast<double>(a.served) / static_cast<double>(a.attempts) : 0.0;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

std::uint64_t instance_seed(std::uint64_t seed, int n, int m, int index)
{
  return derive_seed(seed, {0x1A57, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(m),
                            static_cast<std::uint64_t>(index)});
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config)
{
  if (config.instances < 0 || config.rollouts < 0 || config.agents < 1 || config.timing_repeats < 1)
    throw std::invalid_argument("instances and rollouts must be non-negative, agents and repeats positive");
  std::vector<Job> jobs;
  for (int n : config.task_counts)
    for (double sigma : config.sigmas)
      for (int k = 0; k < config.instances; ++k)
        jobs.push_back({n, sigma, k});
  std::vector<std::vector<ExperimentRow>> slots(jobs.size());
  parallel_for(
    jobs.size(), [&](std::size_t i) { slots[i] = run_job(config, jobs[i]); },
    config.threads > 0 ? config.threads : worker_count());
  std::vector<ExperimentRow> rows;
  for (auto& s : slots)
    for (auto& r : s)
      rows.push_back(std::move(r));
  return rows;
}

void write_rows_csv(std::ostream& out, std::span<const ExperimentRow> rows)
{
  out << "n_tasks,n_agents,sigma_sq,instance,instance_seed,method,expected_reward,actual_reward,actual_std,"
         "finish_rate,served,failed,unassigned,rounds,converged,score_evaluations,wall_time_ms,precompute_ms,error\n";
  const auto old = out.precision(17);
  for (const auto& r : rows)
  {
    out << r.n_tasks << ',' << r.n_agents << ',' << r.sigma_sq << ',' << r.instance << ',' << r.instance_seed << ','
        << r.method << ',';
    if (!r.error.empty())
    {
      out << ",,,,,,,,,,,," << csv_field(r.error) << '\n';
      continue;
    }
    out << r.expected_reward << ',';
    if (r.validated)
      out << r.actual_reward << ',' << r.actual_std << ',' << r.finish_rate << ',' << r.served << ',' << r.failed
          << ',' << r.unassigned << ',';
    else
      out << ",,,,,,";
    out << r.rounds << ',' << (r.converged ? 1 : 0) << ',' << r.score_evaluations << ',' << r.wall_time_ms << ','
        << r.precompute_ms << ",\n";
  }
  out.precision(old);
}

std::vector<SummaryRow> summarize(std::span<const ExperimentRow> rows)
{
  return group(rows, false);
}

std::vector<SummaryRow> summarize_pooled(std::span<const ExperimentRow> rows)
{
  return group(rows, true);
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows)
{
  out << "n_tasks,n_agents,sigma_sq,method,instances,errors,expected_reward,actual_reward,gap,mean_abs_gap,"
         "finish_rate,score_evaluations,wall_time_ms,precompute_ms\n";
  const auto old = out.precision(10);
  for (const auto& s : rows)
    out << s.n_tasks << ',' << s.n_agents << ',' << s.sigma_sq << ',' << s.method << ',' << s.instances << ','
        << s.errors << ',' << s.expected_reward << ',' << s.actual_reward << ',' << s.gap << ',' << s.mean_abs_gap
        << ',' << s.finish_rate << ',' << s.score_evaluations << ',' << s.wall_time_ms << ',' << s.precompute_ms
        << '\n';
  out.precision(old);
}

}  // namespace tcmdp
