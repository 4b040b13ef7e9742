#include "tcmdp/scenario.hpp"

namespace tcmdp {

Scenario::Scenario(int locations, double speed)
  : locations_(locations)
  , speeds_(static_cast<std::size_t>(locations) * static_cast<std::size_t>(locations), speed)
{}

double sample_speed(const SpeedModel& model, Rng& rng)
{
  const double sigma = model.stddev();
  if (sigma == 0.0)
    return model.mean;
  for (;;)
  {
    const double v = model.mean + sigma * rng.normal();
    if (v >= model.truncation_floor)
      return v;
  }
}

namespace {

SpeedModel fleet_speed(const MissionInstance& instance)
{
  return instance.agents.empty() ? SpeedModel{} : instance.agents.front().speed;
}

}  // namespace

Scenario mean_scenario(const MissionInstance& instance)
{
  return Scenario(instance.task_count() + 1, fleet_speed(instance).mean);
}

Scenario sample_scenario(const MissionInstance& instance, std::uint64_t seed)
{
  const SpeedModel model = fleet_speed(instance);
  const int n = instance.task_count() + 1;
  Scenario s(n, model.mean);
  Rng rng(seed);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b)
        s.set_speed(a, b, sample_speed(model, rng));
  return s;
}

}  // namespace tcmdp
