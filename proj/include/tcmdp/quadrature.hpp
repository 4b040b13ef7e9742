#pragma once

#include "tcmdp/instance.hpp"

#include <vector>

namespace tcmdp {

struct QuadratureNode
{
  double speed = 0.0;   ///< km/min
  double weight = 0.0;  ///< probability mass
};

/// Discrete surrogate for the truncated speed distribution of a SpeedModel.
struct QuadratureRule
{
  std::vector<QuadratureNode> nodes;
  SpeedModel source;

  int node_count() const { return static_cast<int>(nodes.size()); }

  template <class F>
  double expectation(F&& f) const
  {
    double acc = 0.0;
    for (const auto& n : nodes)
      acc += n.weight * f(n.speed);
    return acc;
  }
};

/// Q-point Gauss rule for the normal(mean, variance) speed conditioned on
/// speed >= truncation_floor. When the truncated tail is negligible this is
/// Gauss-Hermite mapped through the normal; otherwise the recurrence of the
/// truncated measure is obtained by a discretized Stieltjes procedure.
/// Zero variance collapses to the single node (mean, 1).
QuadratureRule build_quadrature(const SpeedModel& speed, int node_count);

/// Gauss nodes and weights from the three-term recurrence (Golub-Welsch).
/// `beta0` is the total mass; beta[k] for k >= 1 are the off-diagonal terms.
void golub_welsch(const std::vector<double>& alpha, const std::vector<double>& beta,
                  std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace tcmdp
