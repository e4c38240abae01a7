#include "opid/quadrature.hpp"

#include <array>

#include <boost/math/quadrature/gauss.hpp>

namespace opid::quad {

namespace {

constexpr unsigned kOrder = 10;

struct Table {
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};

  Table() {
    // boost stores the non-negative half of the symmetric rule
    using G = boost::math::quadrature::gauss<double, kOrder>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    std::size_t k = 0;
    for (std::size_t i = x.size(); i-- > 0;) {
      if (x[i] == 0.0) continue;
      nodes[k] = -x[i];
      weights[k++] = w[i];
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      nodes[k] = x[i];
      weights[k++] = w[i];
    }
  }
};

}  // namespace

const Rule& gauss_legendre() {
  static const Table table;
  static const Rule rule{table.nodes, table.weights};
  return rule;
}

}  // namespace opid::quad
