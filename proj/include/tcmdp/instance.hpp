#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tcmdp {

/// Planar position in kilometers.
struct Location
{
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Location&, const Location&) = default;
};

/// Euclidean distance in kilometers.
double distance(Location a, Location b);

/// A customer request. Unwindowed tasks carry the window [0, horizon].
struct Task
{
  int id = 0;
  Location location;
  double price = 1.0;
  double ready_time = 0.0;
  double due_time = 0.0;
  double service_duration = 0.0;
  bool windowed = false;

  friend bool operator==(const Task&, const Task&) = default;
};

/// Normal flight speed in km/min, truncated below at `truncation_floor`.
struct SpeedModel
{
  double mean = 1.0;
  double variance = 0.0;
  double truncation_floor = 0.1;

  double stddev() const;

  friend bool operator==(const SpeedModel&, const SpeedModel&) = default;
};

struct AgentSpec
{
  int id = 0;
  Location start;
  int capacity = 1;
  SpeedModel speed;

  friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

struct MissionInstance
{
  double horizon = 480.0;
  Location depot;
  std::vector<Task> tasks;
  std::vector<AgentSpec> agents;
  double penalty = 1.0;
  std::uint64_t seed = 0;

  int task_count() const { return static_cast<int>(tasks.size()); }
  int agent_count() const { return static_cast<int>(agents.size()); }

  /// Latest time a service may start at task j: min(t_d, H).
  double effective_due(int task) const;

  /// Coordinates of a location index: 0 is the depot, j + 1 is task j.
  Location position(int location_index) const;

  friend bool operator==(const MissionInstance&, const MissionInstance&) = default;
};

struct GenerationConfig
{
  int n_tasks = 0;
  int n_agents = 1;
  double sigma_v_sq = 0.0;
  double horizon = 480.0;
  std::uint64_t seed = 0;
  double speed_mean = 1.0;
  /// Defaults to ceil(n_tasks / n_agents) + 1.
  std::optional<int> capacity;
};

/// Error raised for invalid configurations and malformed instance documents.
/// `field` names the offending key path; `line` is 0 when unknown.
class InstanceError : public std::runtime_error
{
public:
  InstanceError(std::string field, std::string message, int line = 0);

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

private:
  std::string field_;
  int line_;
};

int default_capacity(int n_tasks, int n_agents);

MissionInstance generate_instance(const GenerationConfig& cfg);

/// Throws InstanceError on the first violated type invariant.
void validate_instance(const MissionInstance& instance);

/// JSON document, schema "tcmdp-instance" version 1. Doubles are written in
/// shortest round-trip form, so parse(serialize(x)) == x bit-exactly.
std::string serialize_instance(const MissionInstance& instance);
MissionInstance parse_instance(std::string_view text);

}  // namespace tcmdp
