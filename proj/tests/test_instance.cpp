#include "helpers.hpp"

#include "tcmdp/instance.hpp"
#include "tcmdp/scenario.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace tcmdp;

TEST_CASE("generated instance follows the benchmark defaults")
{
  const MissionInstance inst = helpers::generated(2, 2, 0.1, 7);
  CHECK(inst.horizon == 480.0);
  CHECK(inst.penalty == 1.0);
  CHECK(inst.task_count() == 2);
  REQUIRE(inst.agent_count() == 2);
  for (const AgentSpec& a : inst.agents)
  {
    CHECK(a.start == inst.depot);
    CHECK(a.capacity == 2);
    CHECK(a.speed.mean == 1.0);
    CHECK(a.speed.variance == doctest::Approx(0.1));
    CHECK(a.speed.truncation_floor == doctest::Approx(0.1));
  }
  CHECK(inst.depot.x >= 0.0);
  CHECK(inst.depot.x < 100.0);
  CHECK_NOTHROW(validate_instance(inst));
}

TEST_CASE("generated task fields stay in their ranges")
{
  for (std::uint64_t seed = 0; seed < 200; ++seed)
  {
    const MissionInstance inst = helpers::generated(6, 3, 0.05, seed);
    for (const Task& t : inst.tasks)
    {
      CHECK(t.price == 1.0);
      CHECK(t.service_duration >= 10.0);
      CHECK(t.service_duration <= 30.0);
      CHECK(t.location.x >= 0.0);
      CHECK(t.location.y < 100.0);
      if (t.windowed)
      {
        CHECK(t.ready_time >= 0.0);
        CHECK(t.due_time - t.ready_time >= 30.0);
        CHECK(t.due_time - t.ready_time <= 90.0);
      }
      else
      {
        CHECK(t.ready_time == 0.0);
        CHECK(t.due_time == inst.horizon);
      }
    }
  }
}

TEST_CASE("window probability covers every level")
{
  int all_windowed = 0;
  int some_open = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
  {
    const MissionInstance inst = helpers::generated(20, 1, 0.0, seed);
    int w = 0;
    for (const Task& t : inst.tasks)
      w += t.windowed ? 1 : 0;
    (w == 20 ? all_windowed : some_open)++;
  }
  CHECK(all_windowed > 0);
  CHECK(some_open > 0);
}

TEST_CASE("zero tasks is valid")
{
  const MissionInstance inst = helpers::generated(0, 1, 0.1, 3);
  CHECK(inst.tasks.empty());
  CHECK(inst.agents[0].capacity == 1);
  CHECK_NOTHROW(validate_instance(inst));
}

TEST_CASE("generation is deterministic in the seed")
{
  CHECK(helpers::generated(5, 2, 0.1, 11) == helpers::generated(5, 2, 0.1, 11));
  CHECK_FALSE(helpers::generated(5, 2, 0.1, 11) == helpers::generated(5, 2, 0.1, 12));
}

TEST_CASE("explicit capacity overrides the default")
{
  GenerationConfig cfg;
  cfg.n_tasks = 4;
  cfg.n_agents = 2;
  cfg.capacity = 1;
  CHECK(generate_instance(cfg).agents[1].capacity == 1);
  cfg.capacity = 0;
  CHECK_THROWS_AS(generate_instance(cfg), InstanceError);
  CHECK(default_capacity(5, 2) == 4);
  CHECK(default_capacity(4, 2) == 3);
}

TEST_CASE("invalid generation configs are rejected")
{
  GenerationConfig cfg;
  cfg.n_tasks = -1;
  CHECK_THROWS_AS(generate_instance(cfg), InstanceError);
  cfg.n_tasks = 2;
  cfg.n_agents = 0;
  CHECK_THROWS_AS(generate_instance(cfg), InstanceError);
  cfg.n_agents = 1;
  cfg.sigma_v_sq = -0.1;
  CHECK_THROWS_AS(generate_instance(cfg), InstanceError);
}

TEST_CASE("euclidean distance")
{
  CHECK(distance({0, 0}, {0, 0}) == 0.0);
  CHECK(distance({0, 0}, {3, 4}) == 5.0);
  CHECK(distance({0, 0}, {100, 100}) == doctest::Approx(141.4213562373095));
}

TEST_CASE("effective due clips at the horizon")
{
  MissionInstance inst = helpers::manual({{10, 0, 0, 500, 0}, {10, 0, 0, 50, 0}});
  CHECK(inst.effective_due(0) == 480.0);
  CHECK(inst.effective_due(1) == 50.0);
  CHECK(inst.position(0) == inst.depot);
  CHECK(inst.position(2) == inst.tasks[1].location);
}

TEST_CASE("serialization round-trips bit-exactly")
{
  for (std::uint64_t seed = 0; seed < 50; ++seed)
  {
    const MissionInstance inst = helpers::generated(static_cast<int>(seed % 7), 1 + static_cast<int>(seed % 3),
                                                    0.2 * static_cast<double>(seed % 4) / 3.0, seed * 977);
    const std::string text = serialize_instance(inst);
    CHECK(parse_instance(text) == inst);
    CHECK(serialize_instance(parse_instance(text)) == text);
  }
}

namespace {

std::string replace(std::string text, const std::string& from, const std::string& to)
{
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

std::string error_field(const std::string& text)
{
  try
  {
    parse_instance(text);
  }
  catch (const InstanceError& e)
  {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("missing horizon names the field")
{
  const std::string text = serialize_instance(helpers::generated(2, 1, 0.1, 1));
  const std::string broken = replace(text, "\"horizon\"", "\"horizon_typo\"");
  CHECK(error_field(broken) == "horizon");
}

TEST_CASE("due before ready is rejected")
{
  MissionInstance inst = helpers::manual({{10, 0, 20, 40, 0}});
  inst.tasks[0].due_time = 10.0;
  try
  {
    validate_instance(inst);
    FAIL("expected an error");
  }
  catch (const InstanceError& e)
  {
    CHECK(e.field() == "tasks[0].due_time");
    CHECK(std::string(e.what()).find("ready_time") != std::string::npos);
  }
}

TEST_CASE("malformed documents report a line")
{
  try
  {
    parse_instance("{\n  \"horizon\": 480,\n  oops\n}");
    FAIL("expected an error");
  }
  catch (const InstanceError& e)
  {
    CHECK(e.line() == 3);
  }
  CHECK(error_field("[1, 2]") == "<document>");
  CHECK(error_field(replace(serialize_instance(helpers::generated(1, 1, 0, 1)), "\"capacity\": 2",
                            "\"capacity\": 0")) == "agents[0].capacity");
  CHECK(error_field(replace(serialize_instance(helpers::generated(1, 1, 0, 1)), "\"tcmdp-instance\"",
                            "\"other\"")) == "format");
}

TEST_CASE("type invariants")
{
  MissionInstance inst = helpers::manual({{10, 0}});
  inst.tasks[0].price = -1.0;
  CHECK_THROWS_AS(validate_instance(inst), InstanceError);
  inst = helpers::manual({{10, 0}});
  inst.agents[0].speed.truncation_floor = 1.5;
  CHECK_THROWS_AS(validate_instance(inst), InstanceError);
  inst = helpers::manual({{10, 0}});
  inst.tasks[0].id = 3;
  CHECK_THROWS_AS(validate_instance(inst), InstanceError);
  inst = helpers::manual({{10, 0}});
  inst.tasks[0].location.x = std::nan("");
  CHECK_THROWS_AS(validate_instance(inst), InstanceError);
}

TEST_CASE("zero variance scenarios sit at the mean")
{
  const MissionInstance inst = helpers::generated(4, 2, 0.0, 5);
  const Scenario s = sample_scenario(inst, 99);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      CHECK(s.speed(a, b) == 1.0);
  CHECK(s == mean_scenario(inst));
}

TEST_CASE("scenarios are reproducible and truncated")
{
  const MissionInstance inst = helpers::generated(3, 1, 2.0, 5);
  CHECK(sample_scenario(inst, 4) == sample_scenario(inst, 4));
  CHECK_FALSE(sample_scenario(inst, 4) == sample_scenario(inst, 5));
  for (std::uint64_t seed = 0; seed < 2000; ++seed)
  {
    const Scenario s = sample_scenario(inst, seed);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if (a != b)
          REQUIRE(s.speed(a, b) >= 0.1);
  }
}

TEST_CASE("arc speeds are uncorrelated")
{
  const MissionInstance inst = helpers::generated(2, 1, 0.1, 5);
  constexpr int kDraws = 100000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int k = 0; k < kDraws; ++k)
  {
    const Scenario s = sample_scenario(inst, static_cast<std::uint64_t>(k));
    const double x = s.speed(0, 1);
    const double y = s.speed(1, 2);
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double n = kDraws;
  const double cov = sxy / n - sx / n * sy / n;
  const double corr = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  CHECK(std::abs(corr) < 0.02);
  CHECK(sx / n == doctest::Approx(1.0).epsilon(0.01));
}
