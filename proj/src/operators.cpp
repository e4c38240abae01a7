#include "opid/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opid/errors.hpp"
#include "opid/quadrature.hpp"

namespace opid {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr int kMaxPanels = 4096;

// Row i of the trapezoid rule for \int_a^b with a = x_lo, b = x_hi.
void trapezoid_row(MatrixXcd& m, Index row, Index lo, Index hi, Index block, double h, cplx scale) {
  if (hi <= lo) return;
  for (Index j = lo; j <= hi; ++j) {
    const double w = (j == lo || j == hi) ? 0.5 * h : h;
    m.block(row * block, j * block, block, block).diagonal().setConstant(scale * w);
  }
}

}  // namespace

Eigen::MatrixXd SignatureMatrix::matrix() const {
  Eigen::VectorXd d(size());
  d.head(m1).setOnes();
  d.tail(m2).setConstant(-1.0);
  return d.asDiagonal();
}

DiscreteOperator build_A(const Grid& grid, Index m2) {
  const Index n = grid.size() * m2;
  MatrixXcd m = MatrixXcd::Zero(n, n);
  for (Index i = 1; i < grid.size(); ++i) trapezoid_row(m, i, 0, i, m2, grid.spacing(), -kI);
  return DiscreteOperator{grid, m2, std::move(m)};
}

DiscreteOperator build_A_star_direct(const Grid& grid, Index m2) {
  const Index n = grid.size() * m2;
  MatrixXcd m = MatrixXcd::Zero(n, n);
  const Index last = grid.panels();
  for (Index i = 0; i < last; ++i) trapezoid_row(m, i, i, last, m2, grid.spacing(), kI);
  return DiscreteOperator{grid, m2, std::move(m)};
}

DiscreteOperator build_flip_conjugation(const DiscreteOperator& op) {
  const Index nb = op.grid.size();
  const Index b = op.block;
  MatrixXcd out(op.matrix.rows(), op.matrix.cols());
  for (Index i = 0; i < nb; ++i)
    for (Index j = 0; j < nb; ++j)
      out.block(i * b, j * b, b, b) = op.matrix.block((nb - 1 - i) * b, (nb - 1 - j) * b, b, b).conjugate();
  return DiscreteOperator{op.grid, b, std::move(out)};
}

MatrixXcd gram_kernel(const MatrixFunction& fn, double x, double t, double tol) {
  const double upper = std::min(x, t);
  const Index m2 = fn.m2();
  if (upper <= 0.0) return MatrixXcd::Zero(m2, m2);
  auto integrand = [&](double z) -> MatrixXcd { return fn.eval_deriv(x - z) * fn.eval_deriv(t - z).adjoint(); };
  MatrixXcd coarse = quad::composite(integrand, 0.0, upper, 1, m2, m2);
  double estimate = 0.0;
  for (int panels = 2; panels <= kMaxPanels; panels *= 2) {
    MatrixXcd fine = quad::composite(integrand, 0.0, upper, panels, m2, m2);
    estimate = (fine - coarse).norm();
    if (estimate <= tol * std::max(1.0, fine.norm())) return fine;
    coarse = std::move(fine);
  }
  std::ostringstream os;
  os << "kernel quadrature at (" << x << ", " << t << ") did not reach tol " << tol << " (achieved " << estimate
     << ")";
  throw AccuracyError(os.str(), estimate);
}

MatrixXcd case_kernel(const MatrixFunction& fn, double x, double t) {
  const MatrixXcd& c = fn.at_origin();
  if (x > t) return fn.eval_deriv(x - t) * c.adjoint();
  if (t > x) return c * fn.eval_deriv(t - x).adjoint();
  const MatrixXcd d0 = fn.eval_deriv(0.0);
  return 0.5 * (d0 * c.adjoint() + c * d0.adjoint());
}

MatrixXcd kernel_s(const MatrixFunction& fn, double x, double t, double tol) {
  return gram_kernel(fn, x, t, tol) + case_kernel(fn, x, t);
}

MatrixXcd kernel_samples(const MatrixFunction& fn, const Grid& grid, const BuildOptions& opts) {
  if (grid.length() > fn.length() * (1 + 1e-12))
    throw DomainError("grid extends beyond the domain of the matrix function");
  const double tol = opts.kernel_tol;
  return assemble_hermitian(
      grid.size(), fn.m2(),
      [&](Index i, Index j) { return kernel_s(fn, grid.node(i), grid.node(j), tol); }, opts.exec);
}

StructuredOperator build_S(const MatrixFunction& fn, const Grid& grid, Variant variant, const BuildOptions& opts) {
  const MatrixXcd& c = fn.at_origin();
  MatrixXcd cc = c * c.adjoint();
  cc = 0.5 * (cc + cc.adjoint()).eval();
  const MatrixXcd id = MatrixXcd::Identity(fn.m2(), fn.m2());
  MatrixXcd mult = variant == Variant::selfadjoint ? MatrixXcd(id - cc) : MatrixXcd(id + cc);
  return assemble_structured(grid, std::move(mult), kernel_samples(fn, grid, opts), variant);
}

DiscreteMap build_Pi(const MatrixFunction& fn, const Grid& grid) {
  const Index m1 = fn.m1(), m2 = fn.m2();
  MatrixXcd m(grid.size() * m2, m1 + m2);
  for (Index i = 0; i < grid.size(); ++i) {
    m.block(i * m2, 0, m2, m1) = fn.eval(grid.node(i));
    m.block(i * m2, m1, m2, m2).setIdentity();
  }
  return DiscreteMap{grid, m2, m1 + m2, std::move(m)};
}

DiscreteOperator rhs_identity(const DiscreteMap& pi, Variant variant) {
  if (pi.columns <= pi.block) throw InvalidSpec("Pi must have more columns than its block size");
  MatrixXcd kernel;
  if (variant == Variant::selfadjoint) {
    const SignatureMatrix j{pi.columns - pi.block, pi.block};
    kernel = kI * (pi.matrix * j.matrix().cast<cplx>() * pi.matrix.adjoint());
  } else {
    kernel = pi.matrix * pi.matrix.adjoint();
  }
  return DiscreteOperator{pi.grid, pi.block, apply_column_weights(pi.grid, pi.block, kernel)};
}

std::array<DiscreteOperator, 4> split_components(const MatrixFunction& fn, const Grid& grid,
                                                 const BuildOptions& opts) {
  const Index m2 = fn.m2();
  const Index nb = grid.size();
  const MatrixXcd& c = fn.at_origin();
  const MatrixXcd d0 = fn.eval_deriv(0.0);

  MatrixXcd cc = c * c.adjoint();
  cc = 0.5 * (cc + cc.adjoint()).eval();
  const MatrixXcd mult = MatrixXcd::Identity(m2, m2) - cc;
  MatrixXcd s1 = MatrixXcd::Zero(nb * m2, nb * m2);
  for (Index i = 0; i < nb; ++i) s1.block(i * m2, i * m2, m2, m2) = mult;

  MatrixXcd lower = MatrixXcd::Zero(nb * m2, nb * m2);
  MatrixXcd upper = MatrixXcd::Zero(nb * m2, nb * m2);
  for (Index i = 0; i < nb; ++i) {
    for (Index j = 0; j < i; ++j) {
      const MatrixXcd b = fn.eval_deriv(grid.node(i) - grid.node(j)) * c.adjoint();
      lower.block(i * m2, j * m2, m2, m2) = b;
      upper.block(j * m2, i * m2, m2, m2) = b.adjoint();
    }
    lower.block(i * m2, i * m2, m2, m2) = 0.5 * d0 * c.adjoint();
    upper.block(i * m2, i * m2, m2, m2) = 0.5 * c * d0.adjoint();
  }

  const double tol = opts.kernel_tol;
  const MatrixXcd gram = assemble_hermitian(
      nb, m2, [&](Index i, Index j) { return gram_kernel(fn, grid.node(i), grid.node(j), tol); }, opts.exec);

  return {DiscreteOperator{grid, m2, std::move(s1)},
          DiscreteOperator{grid, m2, -apply_column_weights(grid, m2, lower)},
          DiscreteOperator{grid, m2, -apply_column_weights(grid, m2, upper)},
          DiscreteOperator{grid, m2, -apply_column_weights(grid, m2, gram)}};
}

DiscreteOperator build_lemma_operator(const MatrixPath& phi, const MatrixPath& phi_hat, const Grid& grid,
                                      Exec exec) {
  if (phi.rows != phi_hat.cols || phi.cols != phi_hat.rows)
    throw InvalidSpec("lemma operator: Phi must be m2 x m1 and PhiHat m1 x m2");
  constexpr double kZeroTol = 1e-12;
  if (phi.value(0.0).norm() > kZeroTol) throw PreconditionError("lemma operator requires Phi(0) = 0");
  if (phi_hat.value(0.0).norm() > kZeroTol) throw PreconditionError("lemma operator requires PhiHat(0) = 0");

  const Index m2 = phi.rows;
  auto kernel = [&](Index i, Index j) -> MatrixXcd {
    const double x = grid.node(i), t = grid.node(j);
    // xi = x + t - 2 zeta: one panel per grid cell of zeta in [0, min(x, t)]
    const int panels = static_cast<int>(std::max<Index>(1, std::min(i, j)));
    auto integrand = [&](double xi) -> MatrixXcd {
      return phi.derivative(0.5 * (xi + x - t)) * phi_hat.derivative(0.5 * (xi + t - x));
    };
    return -0.5 * quad::composite(integrand, std::abs(x - t), x + t, panels, m2, m2);
  };
  const MatrixXcd samples = assemble_full(grid.size(), grid.size(), m2, m2, kernel, exec);
  return DiscreteOperator{grid, m2, apply_column_weights(grid, m2, samples)};
}

}  // namespace opid
