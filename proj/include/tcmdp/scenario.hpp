#pragma once

#include "tcmdp/instance.hpp"
#include "tcmdp/rng.hpp"

#include <cstdint>
#include <vector>

namespace tcmdp {

/// One joint realization of arc speeds. Location indices follow
/// MissionInstance::position (0 = depot, j + 1 = task j); every ordered pair
/// of distinct locations carries an independent draw.
class Scenario
{
public:
  Scenario() = default;
  Scenario(int locations, double speed);

  int locations() const { return locations_; }
  double speed(int from, int to) const { return speeds_[index(from, to)]; }
  void set_speed(int from, int to, double v) { speeds_[index(from, to)] = v; }

  friend bool operator==(const Scenario&, const Scenario&) = default;

private:
  std::size_t index(int from, int to) const
  {
    return static_cast<std::size_t>(from) * static_cast<std::size_t>(locations_) + static_cast<std::size_t>(to);
  }

  int locations_ = 0;
  std::vector<double> speeds_;
};

/// Draw from the normal speed model conditioned on speed >= truncation_floor
/// (rejection sampling).
double sample_speed(const SpeedModel& model, Rng& rng);

/// Every arc at the model's mean speed.
Scenario mean_scenario(const MissionInstance& instance);

/// Independent truncated-normal speed per ordered pair, using the fleet speed
/// model (agent 0). Deterministic in `seed`.
Scenario sample_scenario(const MissionInstance& instance, std::uint64_t seed);

}  // namespace tcmdp
