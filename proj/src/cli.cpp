#include "tcmdp/cli.hpp"

#include "tcmdp/auction.hpp"
#include "tcmdp/baselines.hpp"
#include "tcmdp/experiment.hpp"
#include "tcmdp/instance.hpp"
#include "tcmdp/network.hpp"
#include "tcmdp/properties.hpp"
#include "tcmdp/rng.hpp"
#include "tcmdp/rollout.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace tcmdp {

namespace {

struct GlobalFlags
{
  std::uint64_t seed = 1;
  std::string method = "auction";
  double sigma = 0.1;
  double grid = 1.0;
  int quadrature = 8;
  int samples = 1000;
  bool wrap = true;
  std::string topology = "complete";
  std::string out;
};

class CheckFailed : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

std::string join(const std::vector<int>& values)
{
  std::string s;
  for (std::size_t k = 0; k < values.size(); ++k)
    s += (k ? "," : "") + std::to_string(values[k]);
  return s;
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes to --out when given, else to the command's stdout.
void emit(const GlobalFlags& g, std::ostream& out, const std::string& text)
{
  if (g.out.empty())
  {
    out << text;
    return;
  }
  std::ofstream file(g.out, std::ios::binary);
  if (!file)
    throw std::runtime_error("cannot write '" + g.out + "'");
  file << text;
}

SolverOptions solver_options(const GlobalFlags& g)
{
  SolverOptions s;
  s.quadrature_nodes = g.quadrature;
  s.grid_step = g.grid;
  return s;
}

CoordinationOptions coordination_options(const GlobalFlags& g)
{
  CoordinationOptions c;
  c.wrapping = g.wrap;
  return c;
}

void check_method(const std::string& method)
{
  if (method != "auction" && method != "cbba" && method != "robust-cbba")
    throw std::invalid_argument("unknown method '" + method + "'");
}

struct Solved
{
  AllocationResult allocation;
  std::vector<ValueOracle> oracles;
};

Solved solve_instance(const MissionInstance& instance, const GlobalFlags& g, const std::string& method,
                      std::ostream* trace)
{
  check_method(method);
  const Network network = make_network(g.topology, instance.agent_count(), derive_seed(g.seed, {0x7E7}));
  CoordinationOptions coord = coordination_options(g);
  coord.trace = trace;
  Solved s;
  if (method == "auction")
  {
    s.oracles = make_oracles(instance, solver_options(g));
    s.allocation = run_auction(instance, network, s.oracles, coord);
  }
  else
  {
    CbbaOptions cbba;
    cbba.variant = method == "cbba" ? CbbaVariant::deterministic : CbbaVariant::robust;
    cbba.robust.sample_count = g.samples;
    cbba.robust.seed = derive_seed(g.seed, {0x40B});
    s.allocation = run_cbba(instance, network, cbba, coord);
  }
  return s;
}

std::string cmd_gen(const GlobalFlags& g, int n, int m, double horizon, int capacity)
{
  GenerationConfig cfg;
  cfg.n_tasks = n;
  cfg.n_agents = m;
  cfg.sigma_v_sq = g.sigma;
  cfg.horizon = horizon;
  cfg.seed = g.seed;
  if (capacity > 0)
    cfg.capacity = capacity;
  return serialize_instance(generate_instance(cfg)) + "\n";
}

std::string cmd_solve(const GlobalFlags& g, const std::string& path, bool trace, std::ostream& err)
{
  const MissionInstance instance = parse_instance(read_file(path));
  Solved s = solve_instance(instance, g, g.method, trace ? &err : nullptr);
  const auto& a = s.allocation;
  std::ostringstream out;
  out.precision(17);
  out << "method=" << a.method << "\n";
  double total = 0.0;
  for (std::size_t i = 0; i < a.assignment.size(); ++i)
  {
    out << "agent=" << i << " tasks=" << join(a.assignment[i]) << " path=" << join(a.paths[i])
        << " value=" << a.per_agent_value[i] << "\n";
    total += a.per_agent_value[i];
  }
  out << "unassigned=" << join(a.unassigned) << "\n";
  out << "value_sum=" << total << "\n";
  out << "expected_reward=" << a.expected_reward << "\n";
  out << "rounds=" << a.rounds_to_converge << " converged=" << (a.converged ? 1 : 0)
      << " score_evaluations=" << a.score_evaluations << "\n";
  for (const auto& d : a.diagnostics)
    out << "diagnostic=" << d << "\n";
  return out.str();
}

std::vector<std::string> split_methods(const std::vector<std::string>& methods)
{
  for (const auto& m : methods)
    check_method(m);
  return methods;
}

std::string cmd_validate_file(const GlobalFlags& g, const std::string& path, const std::vector<std::string>& methods,
                              int rounds)
{
  const MissionInstance instance = parse_instance(read_file(path));
  std::vector<MethodPlan> plans;
  std::vector<std::vector<ValueOracle>> keep;
  for (const auto& m : split_methods(methods))
  {
    Solved s = solve_instance(instance, g, m, nullptr);
    keep.push_back(std::move(s.oracles));
    plans.push_back(m == "auction" ? plan_for(s.allocation, keep.back()) : plan_for(s.allocation));
  }
  std::string text;
  for (const auto& r : validate(instance, plans, rounds, g.seed))
    text += format_report(r) + "\n";
  return text;
}

ExperimentConfig sweep_config(const GlobalFlags& g, const std::vector<int>& dims, int agents, int instances,
                              int rounds, const std::vector<std::string>& methods)
{
  ExperimentConfig cfg;
  cfg.task_counts = dims;
  cfg.agents = agents;
  cfg.sigmas = {g.sigma};
  cfg.instances = instances;
  cfg.rollouts = rounds;
  cfg.methods = split_methods(methods);
  cfg.solver = solver_options(g);
  cfg.robust_samples = g.samples;
  cfg.wrapping = g.wrap;
  cfg.topology = g.topology;
  cfg.seed = g.seed;
  return cfg;
}

std::string quantile_line(std::vector<double> v)
{
  std::ostringstream out;
  out.precision(6);
  if (v.empty())
    return "ratios=none";
  std::sort(v.begin(), v.end());
  const auto at = [&](double q) { return v[static_cast<std::size_t>(q * static_cast<double>(v.size() - 1))]; };
  out << "ratio_count=" << v.size() << " min=" << v.front() << " p10=" << at(0.1) << " median=" << at(0.5)
      << " mean=" << std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()) << " max=" << v.back();
  return out.str();
}

std::string cmd_check(const GlobalFlags& g, const std::string& property, int trials, long& violations)
{
  const bool all = property == "all";
  if (!all && property != "submodularity" && property != "monotonicity" && property != "optimality"
      && property != "bellman")
    throw std::invalid_argument("unknown property '" + property + "'");
  std::ostringstream out;
  violations = 0;
  if (all || property == "submodularity")
  {
    const auto suite = submodularity_suite(trials, g.seed, g.grid);
    out << format_property(suite.on_submodular_reward) << "\n";
    out << "submodular_reward_instances=" << suite.submodular_instances
        << " instances_examined=" << suite.instances_examined << "\n";
    out << format_property(suite.on_other) << "\n";
    violations += suite.on_submodular_reward.violations;
    if (suite.submodular_instances < trials)
      throw CheckFailed("found only " + std::to_string(suite.submodular_instances)
                        + " instances with submodular reward");
  }
  if (all || property == "monotonicity")
  {
    const auto report = monotonicity_suite(trials, g.seed, solver_options(g));
    out << format_property(report) << "\n";
    violations += report.violations;
  }
  if (all || property == "optimality")
  {
    const auto suite = optimality_suite(trials, g.seed, solver_options(g), coordination_options(g));
    out << format_property(suite.report) << "\n" << quantile_line(suite.ratios) << "\n";
    out << "matches_optimum=" << suite.auction_matches_opt << "\n";
    violations += suite.report.violations;
  }
  if (all || property == "bellman")
  {
    const auto report = bellman_suite(trials, g.seed, solver_options(g));
    out << format_property(report) << "\n";
    violations += report.violations;
  }
  return out.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Auction-based coordination for task-constrained stochastic routing", "tcmdp"};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--method", g.method, "auction, cbba or robust-cbba");
  app.add_option("--sigma", g.sigma, "speed variance for generated instances")->check(CLI::NonNegativeNumber);
  app.add_option("--grid", g.grid, "value grid step (minutes)")->check(CLI::PositiveNumber);
  app.add_option("--quadrature", g.quadrature, "quadrature nodes per transition")->check(CLI::Range(1, 64));
  app.add_option("--samples", g.samples, "robust CBBA sample count")->check(CLI::PositiveNumber);
  app.add_flag("--wrap,!--no-wrap", g.wrap, "bid wrapping");
  app.add_option("--topology", g.topology, "complete, ring, line or random");
  app.add_option("--out", g.out, "output file");

  int n = 3;
  int m = 2;
  double horizon = 480.0;
  int capacity = 0;
  auto* gen = app.add_subcommand("gen", "write a generated instance");
  gen->add_option("--n", n, "tasks")->check(CLI::Range(1, 64));
  gen->add_option("--m", m, "agents")->check(CLI::Range(1, 64));
  gen->add_option("--horizon", horizon, "mission horizon (minutes)")->check(CLI::PositiveNumber);
  gen->add_option("--capacity", capacity, "per-agent capacity (default ceil(n/m)+1)");

  std::string instance_path;
  bool trace = false;
  auto* solve = app.add_subcommand("solve", "allocate one instance");
  solve->add_option("instance", instance_path, "instance file")->required();
  solve->add_flag("--trace", trace, "print consensus messages to stderr");

  std::vector<int> dims{2, 3, 4, 5};
  int agents = 2;
  int instances = 100;
  int rounds = 100;
  std::vector<std::string> methods{"auction", "cbba", "robust-cbba"};
  std::string summary_path;
  auto* val = app.add_subcommand("validate", "rollout study on one instance file or a generated sweep");
  val->add_option("instance", instance_path, "instance file (omit for a sweep)");
  val->add_option("--rounds", rounds, "rollouts per instance")->check(CLI::PositiveNumber);
  val->add_option("--dims", dims, "task counts")->delimiter(',');
  val->add_option("--agents", agents, "agents")->check(CLI::PositiveNumber);
  val->add_option("--instances", instances, "instances per task count")->check(CLI::PositiveNumber);
  val->add_option("--methods", methods, "methods")->delimiter(',');
  val->add_option("--summary", summary_path, "also write per-dimension summary CSV");

  int bench_instances = 10;
  int repeats = 3;
  auto* bench = app.add_subcommand("bench", "evaluation counts and wall time per method");
  bench->add_option("--dims", dims, "task counts")->delimiter(',');
  bench->add_option("--agents", agents, "agents")->check(CLI::PositiveNumber);
  bench->add_option("--instances", bench_instances, "instances per task count")->check(CLI::PositiveNumber);
  bench->add_option("--methods", methods, "methods")->delimiter(',');
  bench->add_option("--repeats", repeats, "timing repeats per coordination (fastest kept)")->check(CLI::PositiveNumber);

  std::string property = "all";
  int trials = 100;
  auto* check = app.add_subcommand("check", "property suites");
  check->add_option("--property", property, "submodularity, monotonicity, optimality, bellman or all");
  check->add_option("--trials", trials, "instances (states for bellman)")->check(CLI::PositiveNumber);

  std::vector<std::string> argv_store{"tcmdp"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store)
    argv.push_back(a.c_str());

  try
  {
    app.parse(static_cast<int>(argv.size()), argv.data());
  }
  catch (const CLI::CallForHelp&)
  {
    out << app.help();
    return 0;
  }
  catch (const CLI::ParseError& e)
  {
    err << "error: usage: " << e.what() << "\n" << app.help();
    return 2;
  }

  try
  {
    if (gen->parsed())
    {
      emit(g, out, cmd_gen(g, n, m, horizon, capacity));
    }
    else if (solve->parsed())
    {
      emit(g, out, cmd_solve(g, instance_path, trace, err));
    }
    else if (val->parsed())
    {
      if (!instance_path.empty())
      {
        emit(g, out, cmd_validate_file(g, instance_path, methods, rounds));
      }
      else
      {
        const auto rows = run_experiment(sweep_config(g, dims, agents, instances, rounds, methods));
        std::ostringstream csv;
        write_rows_csv(csv, rows);
        emit(g, out, csv.str());
        if (!summary_path.empty())
        {
          std::ofstream file(summary_path, std::ios::binary);
          if (!file)
            throw std::runtime_error("cannot write '" + summary_path + "'");
          write_summary_csv(file, summarize(rows));
        }
        for (const auto& r : rows)
          if (!r.error.empty())
            err << "warning: instance_seed=" << r.instance_seed << " method=" << r.method << ": " << r.error << "\n";
      }
    }
    else if (bench->parsed())
    {
      ExperimentConfig cfg = sweep_config(g, dims, agents, bench_instances, 0, methods);
      cfg.threads = 1;  // timings are per method, keep them free of contention
      cfg.timing_repeats = repeats;
      std::ostringstream csv;
      write_summary_csv(csv, summarize(run_experiment(cfg)));
      emit(g, out, csv.str());
    }
    else if (check->parsed())
    {
      long violations = 0;
      emit(g, out, cmd_check(g, property, trials, violations));
      if (violations > 0)
      {
        err << "error: check: " << violations << " violations\n";
        return 1;
      }
    }
  }
  catch (const InstanceError& e)
  {
    err << "error: instance: " << e.what() << "\n";
    return 1;
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace tcmdp
