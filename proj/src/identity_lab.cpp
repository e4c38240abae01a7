#include "opid/identity_lab.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "opid/errors.hpp"
#include "opid/quadrature.hpp"

namespace opid {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_same_shape(const DiscreteOperator& a, const DiscreteOperator& b) {
  if (a.matrix.rows() != b.matrix.rows() || a.matrix.cols() != b.matrix.cols() || a.block != b.block)
    throw InvalidSpec("operators act on different grids or block sizes");
}

DiscreteOperator commutator_residual(const DiscreteOperator& A, const DiscreteOperator& A_star,
                                     const DiscreteOperator& S, const DiscreteOperator& rhs, cplx factor) {
  require_same_shape(A, S);
  require_same_shape(A_star, S);
  require_same_shape(rhs, S);
  MatrixXcd r = factor * (A.matrix * S.matrix - S.matrix * A_star.matrix) - rhs.matrix;
  return DiscreteOperator{S.grid, S.block, std::move(r)};
}

DiscreteOperator nystrom(const Grid& grid, Index m2, const std::function<MatrixXcd(Index, Index)>& kernel) {
  MatrixXcd samples(grid.size() * m2, grid.size() * m2);
  for (Index i = 0; i < grid.size(); ++i)
    for (Index j = 0; j < grid.size(); ++j) samples.block(i * m2, j * m2, m2, m2) = kernel(i, j);
  return DiscreteOperator{grid, m2, apply_column_weights(grid, m2, samples)};
}

// Inner integral panels for the Leibniz term: the u-interval has length
// l - max(x, t); one panel per eight grid cells keeps GL10 at roundoff for
// the built-in families.
int leibniz_panels(Index i, Index j, int N) {
  const Index remaining = N - std::max(i, j);
  return static_cast<int>(std::max<Index>(1, (remaining + 7) / 8));
}

}  // namespace

double identity_residual(const DiscreteOperator& A, const DiscreteOperator& A_star, const DiscreteOperator& S,
                         const DiscreteOperator& rhs, Variant variant) {
  const cplx factor = variant == Variant::selfadjoint ? cplx{1.0, 0.0} : kI;
  return op_norm(commutator_residual(A, A_star, S, rhs, factor));
}

double identity_residual(const MatrixFunction& fn, const Grid& grid, Variant variant, const BuildOptions& opts) {
  const auto S = build_S(fn, grid, variant, opts);
  const auto rhs = rhs_identity(build_Pi(fn, grid), variant);
  return identity_residual(build_A(grid, fn.m2()), build_A_star_direct(grid, fn.m2()), S.base, rhs, variant);
}

double skew_equivalence_defect(const MatrixFunction& fn, const Grid& grid, const BuildOptions& opts) {
  const Index m2 = fn.m2();
  const auto S = build_S(fn, grid, Variant::skew, opts);
  const auto pi = build_Pi(fn, grid);
  const auto A = build_A(grid, m2);
  const auto A_star = build_A_star_direct(grid, m2);
  const DiscreteOperator check{grid, m2, 2.0 * MatrixXcd::Identity(S.base.dim(), S.base.dim()) - S.base.matrix};
  const auto skew = commutator_residual(A, A_star, S.base, rhs_identity(pi, Variant::skew), kI);
  const auto self = commutator_residual(A, A_star, check, rhs_identity(pi, Variant::selfadjoint), 1.0);
  // skew residual = -i * selfadjoint residual of 2I - S
  return op_norm(DiscreteOperator{grid, m2, skew.matrix + kI * self.matrix});
}

std::array<double, 4> component_residuals(const MatrixFunction& fn, const Grid& grid, const BuildOptions& opts) {
  const Index m2 = fn.m2();
  const auto parts = split_components(fn, grid, opts);
  const auto A = build_A(grid, m2);
  const auto A_star = build_A_star_direct(grid, m2);
  const MatrixXcd c = fn.at_origin();
  std::vector<MatrixXcd> shifted(grid.size());
  for (Index i = 0; i < grid.size(); ++i) shifted[i] = fn.eval(grid.node(i)) - c;

  const MatrixXcd cc_minus_id = c * c.adjoint() - MatrixXcd::Identity(m2, m2);
  const std::array<DiscreteOperator, 4> rhs = {
      nystrom(grid, m2, [&](Index, Index) -> MatrixXcd { return kI * cc_minus_id; }),
      nystrom(grid, m2, [&](Index i, Index) -> MatrixXcd { return kI * shifted[i] * c.adjoint(); }),
      nystrom(grid, m2, [&](Index, Index j) -> MatrixXcd { return kI * c * shifted[j].adjoint(); }),
      nystrom(grid, m2, [&](Index i, Index j) -> MatrixXcd { return kI * shifted[i] * shifted[j].adjoint(); }),
  };
  std::array<double, 4> out{};
  for (std::size_t k = 0; k < 4; ++k) out[k] = op_norm(commutator_residual(A, A_star, parts[k], rhs[k], 1.0));
  return out;
}

MatrixXcd upsilon(const SeparableKernel& k, double l, double x, double t) {
  const double lo = x + t;
  const double hi = 2 * l - std::abs(x - t);
  auto integrand = [&](double xi) -> MatrixXcd { return k.q1.value(0.5 * (xi + x - t)) * k.q2.value(0.5 * (xi - x + t)); };
  return -0.5 * quad::composite(integrand, lo, hi, 16, k.block(), k.block());
}

MatrixXcd upsilon_dt(const SeparableKernel& k, double l, double x, double t, Branch branch, int panels) {
  // upper limit b(t) = 2l - |x - t| has b' = +1 below the diagonal, -1 above
  const double slope = branch == Branch::below_diagonal ? 1.0 : -1.0;
  const double b = branch == Branch::below_diagonal ? 2 * l - x + t : 2 * l + x - t;
  const double shift = t - x;
  const double u_max = 0.5 * (b - shift);
  const MatrixXcd at_upper = k.q1.value(u_max) * k.q2.value(u_max + shift);
  const MatrixXcd at_lower = k.q1.value(x) * k.q2.value(t);
  // d/dt of the integrand, written in u = (xi + x - t)/2 with dxi = 2 du
  auto integrand = [&](double u) -> MatrixXcd {
    const double v = u + shift;
    return k.q1.value(u) * k.q2.derivative(v) - k.q1.derivative(u) * k.q2.value(v);
  };
  const MatrixXcd inner = quad::composite(integrand, x, u_max, panels, k.block(), k.block());
  return -0.5 * (slope * at_upper - at_lower + inner);
}

DiscreteOperator build_T_pnid(const SeparableKernel& k, const Grid& grid, Exec exec) {
  if (k.q2.rows != k.q1.cols || k.q2.cols != k.q1.rows) throw InvalidSpec("separable kernel shapes disagree");
  const int N = grid.panels();
  const double h = grid.spacing();
  const double l = grid.length();
  const Index m = k.block();
  const double delta = std::min(1e-5 * l, 0.25 * h);

  // x-derivative of the one-sided branch at (x_i, t_j) by finite differences
  // that never cross the diagonal or leave [0, l].
  auto dx_below = [&](Index i, Index j) -> MatrixXcd {
    const double x = grid.node(i), t = grid.node(j);
    const int p = leibniz_panels(i, j, N);
    auto K = [&](double xx) { return upsilon_dt(k, l, xx, t, Branch::below_diagonal, p); };
    if (i < N) return (K(x + delta) - K(x - delta)) / (2 * delta);
    return (3 * K(x) - 4 * K(x - delta) + K(x - 2 * delta)) / (2 * delta);
  };
  auto dx_above = [&](Index i, Index j) -> MatrixXcd {
    const double x = grid.node(i), t = grid.node(j);
    const int p = leibniz_panels(i, j, N);
    auto K = [&](double xx) { return upsilon_dt(k, l, xx, t, Branch::above_diagonal, p); };
    if (i > 0) return (K(x + delta) - K(x - delta)) / (2 * delta);
    return (-3 * K(x) + 4 * K(x + delta) - K(x + 2 * delta)) / (2 * delta);
  };

  auto row = [&](Index i, Index) -> MatrixXcd {
    // full block row i, returned as m x (N+1)m
    MatrixXcd out = MatrixXcd::Zero(m, grid.size() * m);
    if (i > 0) {
      std::vector<MatrixXcd> d(i + 1);
      for (Index j = 0; j < i; ++j) d[j] = dx_below(i, j);
      d[i] = i >= 2 ? MatrixXcd(2 * d[i - 1] - d[i - 2]) : d[0];
      for (Index j = 0; j <= i; ++j) {
        const double w = (j == 0 || j == i) ? 0.5 * h : h;
        out.block(0, j * m, m, m) += w * d[j];
      }
    }
    if (i < N) {
      std::vector<MatrixXcd> d(N + 1);
      for (Index j = i + 1; j <= N; ++j) d[j] = dx_above(i, j);
      d[i] = i <= N - 2 ? MatrixXcd(2 * d[i + 1] - d[i + 2]) : d[N];
      for (Index j = i; j <= N; ++j) {
        const double w = (j == i || j == N) ? 0.5 * h : h;
        out.block(0, j * m, m, m) += w * d[j];
      }
    }
    // boundary term of d/dx at t = x: the jump of d/dt Upsilon across the diagonal
    const double x = grid.node(i);
    const int p = leibniz_panels(i, i, N);
    out.block(0, i * m, m, m) += upsilon_dt(k, l, x, x, Branch::below_diagonal, p) -
                                 upsilon_dt(k, l, x, x, Branch::above_diagonal, p);
    return out;
  };
  MatrixXcd t = assemble_full(grid.size(), 1, m, grid.size() * m, row, exec);
  return DiscreteOperator{grid, m, std::move(t)};
}

SeparableKernel flipped_identity_kernel(const MatrixFunction& fn, double l) {
  const Index m1 = fn.m1(), m2 = fn.m2(), p = m1 + m2;
  auto self = std::make_shared<const MatrixFunction>(fn);
  // Q1(x) = [conj(Phi(l - x)), I],  Q2(t) = [Phi(l - t)^T; -I]
  MatrixPath q1{m2, p,
                [self, l, m1, m2](double x) {
                  MatrixXcd q(m2, m1 + m2);
                  q << self->eval(l - x).conjugate(), MatrixXcd::Identity(m2, m2);
                  return q;
                },
                [self, l, m1, m2](double x) {
                  MatrixXcd q(m2, m1 + m2);
                  q << -self->eval_deriv(l - x).conjugate(), MatrixXcd::Zero(m2, m2);
                  return q;
                }};
  MatrixPath q2{p, m2,
                [self, l, m1, m2](double t) {
                  MatrixXcd q(m1 + m2, m2);
                  q << self->eval(l - t).transpose(), -MatrixXcd::Identity(m2, m2);
                  return q;
                },
                [self, l, m1, m2](double t) {
                  MatrixXcd q(m1 + m2, m2);
                  q << -self->eval_deriv(l - t).transpose(), MatrixXcd::Zero(m2, m2);
                  return q;
                }};
  return SeparableKernel{std::move(q1), std::move(q2)};
}

DiscreteOperator reconstruct_S_via_pnid(const MatrixFunction& fn, const Grid& grid, Exec exec) {
  if (grid.length() > fn.length() * (1 + 1e-12))
    throw DomainError("grid extends beyond the domain of the matrix function");
  return build_flip_conjugation(build_T_pnid(flipped_identity_kernel(fn, grid.length()), grid, exec));
}

double observed_order(double residual_coarse, double residual_fine, int n_coarse, int n_fine) {
  return std::log(residual_coarse / residual_fine) / std::log(static_cast<double>(n_fine) / n_coarse);
}

std::vector<ResidualReport> convergence_study(const MatrixFunction& fn, Variant variant, const std::vector<int>& N_list,
                                              double l, bool with_components, const BuildOptions& opts) {
  if (N_list.size() < 2) throw InvalidSpec("convergence study needs at least two grids");
  if (!std::is_sorted(N_list.begin(), N_list.end()) ||
      std::adjacent_find(N_list.begin(), N_list.end()) != N_list.end())
    throw InvalidSpec("grid sizes must be strictly increasing");
  std::vector<ResidualReport> out;
  for (int N : N_list) {
    const Grid grid = make_grid(l, N);
    ResidualReport r;
    r.variant = variant;
    r.N = N;
    r.residual = identity_residual(fn, grid, variant, opts);
    if (with_components) r.component_residuals = component_residuals(fn, grid, opts);
    if (!out.empty()) r.order_estimate = observed_order(out.back().residual, r.residual, out.back().N, N);
    out.push_back(r);
  }
  return out;
}

}  // namespace opid
