#include "spincharge/summation.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include <boost/math/special_functions/legendre.hpp>

namespace spincharge {

GaussRule gauss_legendre(int order) {
  if (order < 2 || order > 64) throw std::invalid_argument("Gauss-Legendre order must be in [2, 64]");
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  // Roots of P_n by Newton iteration from the Tricomi initial guess.
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < order; ++i) {
    double x = std::cos(pi * (i + 0.75) / (order + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const double p = boost::math::legendre_p(order, x);
      const double dp = boost::math::legendre_p_prime(order, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = boost::math::legendre_p_prime(order, x);
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  std::vector<std::pair<double, double>> pairs(order);
  for (int i = 0; i < order; ++i) pairs[i] = {rule.nodes[i], rule.weights[i]};
  std::sort(pairs.begin(), pairs.end());
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = pairs[i].first;
    rule.weights[i] = pairs[i].second;
  }
  return rule;
}

}  // namespace spincharge
