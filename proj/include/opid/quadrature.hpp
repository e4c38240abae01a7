#pragma once

#include <span>

#include <Eigen/Dense>

namespace opid::quad {

/// Gauss-Legendre rule on [-1, 1] (fixed order, tabulated once).
struct Rule {
  std::span<const double> nodes;
  std::span<const double> weights;
};

const Rule& gauss_legendre();

/// Composite Gauss-Legendre over [a, b] split into `panels` equal panels.
/// `f` maps a double to an Eigen matrix expression of fixed shape.
template <class F>
Eigen::MatrixXcd composite(F&& f, double a, double b, int panels, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rows, cols);
  if (b <= a || panels <= 0) return acc;
  const auto& rule = gauss_legendre();
  const double width = (b - a) / panels;
  const double half = 0.5 * width;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) acc += (rule.weights[k] * half) * f(mid + half * rule.nodes[k]);
  }
  return acc;
}

}  // namespace opid::quad
