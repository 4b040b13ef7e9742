#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tcmdp {

/// Undirected communication graph over agents, exchanged in synchronous rounds.
class Network
{
public:
  explicit Network(std::vector<std::vector<int>> adjacency, std::string name = "custom");

  static Network complete(int agents);
  static Network ring(int agents);
  static Network line(int agents);
  /// Random spanning tree plus each remaining edge with probability `p`.
  static Network random_connected(int agents, std::uint64_t seed, double p = 0.3);

  int size() const { return static_cast<int>(adjacency_.size()); }
  /// Sorted neighbor ids.
  const std::vector<int>& neighbors(int agent) const { return adjacency_[static_cast<std::size_t>(agent)]; }
  bool connected() const;
  /// Longest shortest path; -1 when disconnected.
  int diameter() const;
  const std::string& name() const { return name_; }

private:
  std::vector<int> distances_from(int source) const;

  std::vector<std::vector<int>> adjacency_;
  std::string name_;
};

/// "complete", "ring", "line" or "random".
Network make_network(std::string_view topology, int agents, std::uint64_t seed = 0);

}  // namespace tcmdp
