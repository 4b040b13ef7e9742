#pragma once

#include "tcmdp/instance.hpp"

#include <vector>

namespace helpers {

struct TaskDef
{
  double x = 0.0;
  double y = 0.0;
  double ready = 0.0;
  double due = -1.0;  // < 0: unwindowed
  double service = 0.0;
};

/// Hand-built instance; every agent starts at the depot unless `starts` is given.
inline tcmdp::MissionInstance manual(const std::vector<TaskDef>& defs, int agents = 1, double variance = 0.0,
                                     int capacity = 8, double horizon = 480.0,
                                     std::vector<tcmdp::Location> starts = {})
{
  tcmdp::MissionInstance inst;
  inst.horizon = horizon;
  inst.depot = {0.0, 0.0};
  for (std::size_t j = 0; j < defs.size(); ++j)
  {
    const TaskDef& d = defs[j];
    tcmdp::Task t;
    t.id = static_cast<int>(j);
    t.location = {d.x, d.y};
    t.price = 1.0;
    t.windowed = d.due >= 0.0;
    t.ready_time = t.windowed ? d.ready : 0.0;
    t.due_time = t.windowed ? d.due : horizon;
    t.service_duration = d.service;
    inst.tasks.push_back(t);
  }
  for (int i = 0; i < agents; ++i)
  {
    const tcmdp::Location start = starts.empty() ? inst.depot : starts[static_cast<std::size_t>(i)];
    inst.agents.push_back({i, start, capacity, {1.0, variance, 0.1}});
  }
  tcmdp::validate_instance(inst);
  return inst;
}

inline tcmdp::MissionInstance generated(int n, int m, double variance, std::uint64_t seed)
{
  tcmdp::GenerationConfig cfg;
  cfg.n_tasks = n;
  cfg.n_agents = m;
  cfg.sigma_v_sq = variance;
  cfg.seed = seed;
  return tcmdp::generate_instance(cfg);
}

}  // namespace helpers
