#include "tcmdp/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tcmdp {

void golub_welsch(const std::vector<double>& alpha, const std::vector<double>& beta,
                  std::vector<double>& nodes, std::vector<double>& weights)
{
  const auto n = static_cast<Eigen::Index>(alpha.size());
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n > 1 ? n - 1 : 0);
  for (Eigen::Index k = 0; k < n; ++k)
    diag[k] = alpha[static_cast<std::size_t>(k)];
  for (Eigen::Index k = 1; k < n; ++k)
    sub[k - 1] = std::sqrt(beta[static_cast<std::size_t>(k)]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("golub_welsch: eigen decomposition failed");

  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index k = 0; k < n; ++k)
  {
    nodes[static_cast<std::size_t>(k)] = solver.eigenvalues()[k];
    const double v0 = solver.eigenvectors()(0, k);
    weights[static_cast<std::size_t>(k)] = beta[0] * v0 * v0;
  }
}

namespace {

double normal_pdf(double z)
{
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z)
{
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Recurrence coefficients of the standard normal restricted to [lo, inf),
// via Stieltjes on a composite Gauss-Legendre discretization.
void truncated_normal_recurrence(double lo, int count, std::vector<double>& alpha, std::vector<double>& beta)
{
  constexpr int kPanels = 512;
  constexpr int kPerPanel = 16;
  const double hi = std::max(lo, 0.0) + 14.0;

  std::vector<double> la(kPerPanel, 0.0);
  std::vector<double> lb(kPerPanel, 0.0);
  lb[0] = 2.0;
  for (int k = 1; k < kPerPanel; ++k)
    lb[static_cast<std::size_t>(k)] = static_cast<double>(k) * k / (4.0 * k * k - 1.0);
  std::vector<double> gx;
  std::vector<double> gw;
  golub_welsch(la, lb, gx, gw);

  std::vector<double> z;
  std::vector<double> w;
  z.reserve(kPanels * kPerPanel);
  w.reserve(kPanels * kPerPanel);
  const double h = (hi - lo) / kPanels;
  double mass = 0.0;
  for (int p = 0; p < kPanels; ++p)
  {
    const double mid = lo + (p + 0.5) * h;
    for (int k = 0; k < kPerPanel; ++k)
    {
      const double x = mid + 0.5 * h * gx[static_cast<std::size_t>(k)];
      const double m = 0.5 * h * gw[static_cast<std::size_t>(k)] * normal_pdf(x);
      z.push_back(x);
      w.push_back(m);
      mass += m;
    }
  }
  for (double& m : w)
    m /= mass;

  alpha.assign(static_cast<std::size_t>(count), 0.0);
  beta.assign(static_cast<std::size_t>(count), 0.0);
  std::vector<double> prev(z.size(), 0.0);
  std::vector<double> cur(z.size(), 1.0);
  double norm_prev = 1.0;
  for (int k = 0; k < count; ++k)
  {
    double norm = 0.0;
    double first = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
    {
      norm += w[i] * cur[i] * cur[i];
      first += w[i] * z[i] * cur[i] * cur[i];
    }
    alpha[static_cast<std::size_t>(k)] = first / norm;
    beta[static_cast<std::size_t>(k)] = k == 0 ? 1.0 : norm / norm_prev;
    for (std::size_t i = 0; i < z.size(); ++i)
    {
      const double next = (z[i] - alpha[static_cast<std::size_t>(k)]) * cur[i]
                          - beta[static_cast<std::size_t>(k)] * prev[i];
      prev[i] = cur[i];
      cur[i] = next;
    }
    norm_prev = norm;
  }
}

}  // namespace

QuadratureRule build_quadrature(const SpeedModel& speed, int node_count)
{
  if (node_count <= 0)
    throw std::invalid_argument("build_quadrature: node count must be positive");

  QuadratureRule rule;
  rule.source = speed;
  const double sigma = speed.stddev();
  if (sigma == 0.0)
  {
    rule.nodes.push_back({speed.mean, 1.0});
    return rule;
  }

  const double lo = (speed.truncation_floor - speed.mean) / sigma;
  std::vector<double> alpha;
  std::vector<double> beta;
  if (normal_cdf(lo) < 1e-16)
  {
    // Probabilists' Hermite recurrence.
    alpha.assign(static_cast<std::size_t>(node_count), 0.0);
    beta.assign(static_cast<std::size_t>(node_count), 0.0);
    beta[0] = 1.0;
    for (int k = 1; k < node_count; ++k)
      beta[static_cast<std::size_t>(k)] = k;
  }
  else
  {
    truncated_normal_recurrence(lo, node_count, alpha, beta);
  }

  std::vector<double> z;
  std::vector<double> w;
  golub_welsch(alpha, beta, z, w);

  double total = 0.0;
  for (double m : w)
    total += m;
  for (std::size_t k = 0; k < z.size(); ++k)
  {
    const double v = std::max(speed.truncation_floor, speed.mean + sigma * z[k]);
    rule.nodes.push_back({v, w[k] / total});
  }
  return rule;
}

}  // namespace tcmdp
