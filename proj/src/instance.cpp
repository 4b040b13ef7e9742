#include "tcmdp/instance.hpp"

#include "tcmdp/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace tcmdp {

using json = nlohmann::json;

double distance(Location a, Location b)
{
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

double SpeedModel::stddev() const
{
  return std::sqrt(variance);
}

double MissionInstance::effective_due(int task) const
{
  return std::min(tasks[static_cast<std::size_t>(task)].due_time, horizon);
}

Location MissionInstance::position(int location_index) const
{
  return location_index == 0 ? depot : tasks[static_cast<std::size_t>(location_index - 1)].location;
}

InstanceError::InstanceError(std::string field, std::string message, int line)
  : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + field + ": " + message
                                : field + ": " + message)
  , field_(std::move(field))
  , line_(line)
{}

int default_capacity(int n_tasks, int n_agents)
{
  return (n_tasks + n_agents - 1) / n_agents + 1;
}

namespace {

void require_finite_nonneg(double v, const char* field)
{
  if (!std::isfinite(v) || v < 0.0)
    throw InstanceError(field, "must be finite and non-negative");
}

}  // namespace

MissionInstance generate_instance(const GenerationConfig& cfg)
{
  if (cfg.n_tasks < 0)
    throw InstanceError("n_tasks", "must be non-negative");
  if (cfg.n_agents < 1)
    throw InstanceError("n_agents", "must be at least 1");
  require_finite_nonneg(cfg.sigma_v_sq, "sigma_v_sq");
  require_finite_nonneg(cfg.horizon, "horizon");
  if (cfg.horizon == 0.0)
    throw InstanceError("horizon", "must be positive");
  if (!std::isfinite(cfg.speed_mean) || cfg.speed_mean <= 0.0)
    throw InstanceError("speed_mean", "must be positive");
  if (cfg.capacity && *cfg.capacity < 1)
    throw InstanceError("capacity", "must be at least 1");

  constexpr std::array<double, 4> kWindowProbabilities{0.25, 0.5, 0.75, 1.0};

  Rng rng(derive_seed(cfg.seed, {0x1757A7CEULL}));
  MissionInstance inst;
  inst.horizon = cfg.horizon;
  inst.penalty = 1.0;
  inst.seed = cfg.seed;

  const double p_tw = kWindowProbabilities[static_cast<std::size_t>(rng.pick(4))];
  inst.depot = {rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};

  inst.tasks.reserve(static_cast<std::size_t>(cfg.n_tasks));
  for (int j = 0; j < cfg.n_tasks; ++j)
  {
    Task t;
    t.id = j;
    t.location = {rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
    t.price = 1.0;
    t.service_duration = rng.uniform(10.0, 30.0);
    t.windowed = rng.uniform() < p_tw;
    if (t.windowed)
    {
      const double t_max = cfg.horizon - distance(inst.depot, t.location) / cfg.speed_mean - t.service_duration;
      t.ready_time = rng.uniform(0.0, std::max(0.0, t_max));
      t.due_time = t.ready_time + rng.uniform(30.0, 90.0);
    }
    else
    {
      t.ready_time = 0.0;
      t.due_time = cfg.horizon;
    }
    inst.tasks.push_back(t);
  }

  const SpeedModel speed{cfg.speed_mean, cfg.sigma_v_sq, 0.1 * cfg.speed_mean};
  const int capacity = cfg.capacity.value_or(default_capacity(cfg.n_tasks, cfg.n_agents));
  for (int i = 0; i < cfg.n_agents; ++i)
    inst.agents.push_back({i, inst.depot, capacity, speed});
  return inst;
}

namespace {

void check_location(const Location& loc, const std::string& field)
{
  if (!std::isfinite(loc.x))
    throw InstanceError(field + ".x", "must be finite");
  if (!std::isfinite(loc.y))
    throw InstanceError(field + ".y", "must be finite");
}

}  // namespace

void validate_instance(const MissionInstance& inst)
{
  if (!std::isfinite(inst.horizon) || inst.horizon <= 0.0)
    throw InstanceError("horizon", "must be positive and finite");
  if (!std::isfinite(inst.penalty) || inst.penalty < 0.0)
    throw InstanceError("penalty", "must be non-negative and finite");
  check_location(inst.depot, "depot");

  for (std::size_t j = 0; j < inst.tasks.size(); ++j)
  {
    const Task& t = inst.tasks[j];
    const std::string f = "tasks[" + std::to_string(j) + "]";
    if (t.id != static_cast<int>(j))
      throw InstanceError(f + ".id", "task ids must be 0..n-1 in order");
    check_location(t.location, f + ".location");
    if (!std::isfinite(t.price) || t.price < 0.0)
      throw InstanceError(f + ".price", "must be non-negative and finite");
    if (!std::isfinite(t.service_duration) || t.service_duration < 0.0)
      throw InstanceError(f + ".service_duration", "must be non-negative and finite");
    if (!std::isfinite(t.ready_time) || t.ready_time < 0.0)
      throw InstanceError(f + ".ready_time", "must be non-negative and finite");
    if (!std::isfinite(t.due_time) || t.due_time < t.ready_time)
      throw InstanceError(f + ".due_time", "must not precede ready_time");
    if (!t.windowed && (t.ready_time != 0.0 || t.due_time != inst.horizon))
      throw InstanceError(f + ".windowed", "unwindowed tasks must span [0, horizon]");
  }

  for (std::size_t i = 0; i < inst.agents.size(); ++i)
  {
    const AgentSpec& a = inst.agents[i];
    const std::string f = "agents[" + std::to_string(i) + "]";
    if (a.id != static_cast<int>(i))
      throw InstanceError(f + ".id", "agent ids must be 0..m-1 in order");
    check_location(a.start, f + ".start");
    if (a.capacity < 1)
      throw InstanceError(f + ".capacity", "must be at least 1");
    const SpeedModel& s = a.speed;
    if (!std::isfinite(s.mean) || s.mean <= 0.0)
      throw InstanceError(f + ".speed.mean", "must be positive");
    if (!std::isfinite(s.variance) || s.variance < 0.0)
      throw InstanceError(f + ".speed.variance", "must be non-negative");
    if (!std::isfinite(s.truncation_floor) || s.truncation_floor <= 0.0 || s.truncation_floor >= s.mean)
      throw InstanceError(f + ".speed.truncation_floor", "must lie in (0, mean)");
  }
}

namespace {

json location_json(const Location& l)
{
  return json{{"x", l.x}, {"y", l.y}};
}

const json& member(const json& obj, const char* key, const std::string& path)
{
  if (!obj.is_object())
    throw InstanceError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end())
    throw InstanceError(path.empty() ? key : path + "." + key, "missing required field");
  return *it;
}

std::string join(const std::string& path, const char* key)
{
  return path.empty() ? key : path + "." + key;
}

double number(const json& obj, const char* key, const std::string& path)
{
  const json& v = member(obj, key, path);
  if (!v.is_number())
    throw InstanceError(join(path, key), "expected a number");
  return v.get<double>();
}

long long integer(const json& obj, const char* key, const std::string& path)
{
  const json& v = member(obj, key, path);
  if (!v.is_number_integer())
    throw InstanceError(join(path, key), "expected an integer");
  return v.get<long long>();
}

bool boolean(const json& obj, const char* key, const std::string& path)
{
  const json& v = member(obj, key, path);
  if (!v.is_boolean())
    throw InstanceError(join(path, key), "expected a boolean");
  return v.get<bool>();
}

Location location(const json& obj, const char* key, const std::string& path)
{
  const std::string p = join(path, key);
  const json& v = member(obj, key, path);
  return {number(v, "x", p), number(v, "y", p)};
}

const json& array(const json& obj, const char* key)
{
  const json& v = member(obj, key, "");
  if (!v.is_array())
    throw InstanceError(key, "expected an array");
  return v;
}

}  // namespace

std::string serialize_instance(const MissionInstance& inst)
{
  json doc;
  doc["format"] = "tcmdp-instance";
  doc["version"] = 1;
  doc["seed"] = inst.seed;
  doc["horizon"] = inst.horizon;
  doc["penalty"] = inst.penalty;
  doc["depot"] = location_json(inst.depot);

  json agents = json::array();
  for (const AgentSpec& a : inst.agents)
  {
    agents.push_back({{"id", a.id},
                      {"start", location_json(a.start)},
                      {"capacity", a.capacity},
                      {"speed",
                       {{"mean", a.speed.mean},
                        {"variance", a.speed.variance},
                        {"truncation_floor", a.speed.truncation_floor}}}});
  }
  doc["agents"] = std::move(agents);

  json tasks = json::array();
  for (const Task& t : inst.tasks)
  {
    tasks.push_back({{"id", t.id},
                     {"location", location_json(t.location)},
                     {"price", t.price},
                     {"ready_time", t.ready_time},
                     {"due_time", t.due_time},
                     {"service_duration", t.service_duration},
                     {"windowed", t.windowed}});
  }
  doc["tasks"] = std::move(tasks);
  return doc.dump(2) + "\n";
}

MissionInstance parse_instance(std::string_view text)
{
  json doc;
  try
  {
    doc = json::parse(text.begin(), text.end());
  }
  catch (const json::parse_error& e)
  {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw InstanceError("<document>", "malformed JSON", line);
  }
  if (!doc.is_object())
    throw InstanceError("<document>", "expected a JSON object");
  if (auto f = doc.find("format"); f != doc.end() && *f != "tcmdp-instance")
    throw InstanceError("format", "unsupported document format");
  if (auto v = doc.find("version"); v != doc.end() && *v != 1)
    throw InstanceError("version", "unsupported schema version");

  MissionInstance inst;
  inst.horizon = number(doc, "horizon", "");
  inst.penalty = number(doc, "penalty", "");
  {
    const json& s = member(doc, "seed", "");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw InstanceError("seed", "expected a non-negative integer");
    inst.seed = s.get<std::uint64_t>();
  }
  inst.depot = location(doc, "depot", "");

  const json& agents = array(doc, "agents");
  for (std::size_t i = 0; i < agents.size(); ++i)
  {
    const std::string p = "agents[" + std::to_string(i) + "]";
    const json& a = agents[i];
    AgentSpec spec;
    spec.id = static_cast<int>(integer(a, "id", p));
    spec.start = location(a, "start", p);
    spec.capacity = static_cast<int>(integer(a, "capacity", p));
    const std::string sp = p + ".speed";
    const json& s = member(a, "speed", p);
    spec.speed = {number(s, "mean", sp), number(s, "variance", sp), number(s, "truncation_floor", sp)};
    inst.agents.push_back(spec);
  }

  const json& tasks = array(doc, "tasks");
  for (std::size_t j = 0; j < tasks.size(); ++j)
  {
    const std::string p = "tasks[" + std::to_string(j) + "]";
    const json& t = tasks[j];
    Task task;
    task.id = static_cast<int>(integer(t, "id", p));
    task.location = location(t, "location", p);
    task.price = number(t, "price", p);
    task.ready_time = number(t, "ready_time", p);
    task.due_time = number(t, "due_time", p);
    task.service_duration = number(t, "service_duration", p);
    task.windowed = boolean(t, "windowed", p);
    inst.tasks.push_back(task);
  }

  validate_instance(inst);
  return inst;
}

}  // namespace tcmdp
