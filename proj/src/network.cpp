#include "tcmdp/network.hpp"

#include "tcmdp/rng.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace tcmdp {

Network::Network(std::vector<std::vector<int>> adjacency, std::string name)
  : adjacency_(std::move(adjacency))
  , name_(std::move(name))
{
  const int n = size();
  for (auto& row : adjacency_)
  {
    for (int v : row)
      if (v < 0 || v >= n)
        throw std::invalid_argument("network edge references an unknown agent");
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  for (int a = 0; a < n; ++a)
    for (int b : adjacency_[static_cast<std::size_t>(a)])
      if (!std::binary_search(adjacency_[static_cast<std::size_t>(b)].begin(),
                              adjacency_[static_cast<std::size_t>(b)].end(), a))
        throw std::invalid_argument("network adjacency must be symmetric");
}

Network Network::complete(int agents)
{
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(agents));
  for (int a = 0; a < agents; ++a)
    for (int b = 0; b < agents; ++b)
      if (a != b)
        adj[static_cast<std::size_t>(a)].push_back(b);
  return Network(std::move(adj), "complete");
}

Network Network::line(int agents)
{
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(agents));
  for (int a = 0; a + 1 < agents; ++a)
  {
    adj[static_cast<std::size_t>(a)].push_back(a + 1);
    adj[static_cast<std::size_t>(a + 1)].push_back(a);
  }
  return Network(std::move(adj), "line");
}

Network Network::ring(int agents)
{
  Network net = line(agents);
  if (agents > 2)
  {
    net.adjacency_.front().push_back(agents - 1);
    net.adjacency_.back().push_back(0);
    for (auto& row : net.adjacency_)
      std::sort(row.begin(), row.end());
  }
  net.name_ = "ring";
  return net;
}

Network Network::random_connected(int agents, std::uint64_t seed, double p)
{
  Rng rng(seed);
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(agents));
  const auto link = [&](int a, int b) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  };
  for (int v = 1; v < agents; ++v)
    link(v, rng.pick(v));
  for (int a = 0; a < agents; ++a)
    for (int b = a + 1; b < agents; ++b)
    {
      const auto& row = adj[static_cast<std::size_t>(a)];
      if (std::find(row.begin(), row.end(), b) == row.end() && rng.uniform() < p)
        link(a, b);
    }
  return Network(std::move(adj), "random");
}

std::vector<int> Network::distances_from(int source) const
{
  std::vector<int> dist(adjacency_.size(), -1);
  std::deque<int> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  while (!queue.empty())
  {
    const int v = queue.front();
    queue.pop_front();
    for (int w : neighbors(v))
      if (dist[static_cast<std::size_t>(w)] < 0)
      {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
        queue.push_back(w);
      }
  }
  return dist;
}

bool Network::connected() const
{
  return diameter() >= 0;
}

int Network::diameter() const
{
  int d = 0;
  for (int s = 0; s < size(); ++s)
    for (int x : distances_from(s))
    {
      if (x < 0)
        return -1;
      d = std::max(d, x);
    }
  return d;
}

Network make_network(std::string_view topology, int agents, std::uint64_t seed)
{
  if (topology == "complete")
    return Network::complete(agents);
  if (topology == "ring")
    return Network::ring(agents);
  if (topology == "line")
    return Network::line(agents);
  if (topology == "random")
    return Network::random_connected(agents, seed);
  throw std::invalid_argument("unknown topology '" + std::string(topology) + "'");
}

}  // namespace tcmdp
