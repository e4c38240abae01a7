#include "opid/spectral_factor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opid/errors.hpp"

namespace opid {

namespace {

constexpr double kHermitianPrecondition = 1e-8;
constexpr double kSingularThreshold = 1e-10;
constexpr double kOriginZeroTol = 1e-12;

// exact reversal permutation applied on both sides
MatrixXcd reverse_both(const MatrixXcd& m) { return m.reverse(); }

TriangularFactor make_factor(const Grid& grid, Index block, MatrixXcd e_tilde) {
  const VectorXd w = block_weights(grid, block);
  const VectorXd sq = w.cwiseSqrt();
  MatrixXcd e = sq.cwiseInverse().asDiagonal() * e_tilde * sq.asDiagonal();
  MatrixXcd kernel = MatrixXcd::Zero(e.rows(), e.cols());
  for (Index i = 0; i < grid.size(); ++i) {
    for (Index j = 0; j < i; ++j)
      kernel.block(i * block, j * block, block, block) = e.block(i * block, j * block, block, block) / grid.weight(j);
    // E = I + Volterra part, so the diagonal sample drops the identity
    kernel.block(i * block, i * block, block, block) =
        (e.block(i * block, i * block, block, block) - MatrixXcd::Identity(block, block)) / grid.weight(i);
  }
  return TriangularFactor{grid, block, std::move(e), std::move(kernel)};
}

int panels_for(double length, double h) {
  const double n = length / h;
  const double rounded = std::round(n);
  if (rounded < 2 || std::abs(n - rounded) > 1e-9 * rounded)
    throw InvalidSpec("interval length must be an integer multiple (>= 2) of the spacing");
  return static_cast<int>(rounded);
}

}  // namespace

double TriangularFactor::diagonal_constant() const {
  double worst = 0.0;
  for (Index i = 0; i < grid.size(); ++i) {
    const MatrixXcd d = E.block(i * block, i * block, block, block) - MatrixXcd::Identity(block, block);
    worst = std::max(worst, d.norm());
  }
  return worst / grid.spacing();
}

bool PositivityReport::strictly_positive() const {
  return std::all_of(min_eigs.begin(), min_eigs.end(), [](double v) { return v > 0; });
}

double hermiticity_defect(const DiscreteOperator& op) {
  const MatrixXcd h = weighted_similarity(op);
  const double scale = h.norm();
  if (scale == 0.0) return 0.0;
  return (h - h.adjoint()).norm() / scale;
}

Eigen::VectorXd eigenvalues(const DiscreteOperator& op) {
  const double defect = hermiticity_defect(op);
  if (defect > kHermitianPrecondition) {
    std::ostringstream os;
    os << "operator is not weighted-self-adjoint (defect " << defect << ")";
    throw PreconditionError(os.str());
  }
  MatrixXcd h = weighted_similarity(op);
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double min_eigenvalue(const DiscreteOperator& op) { return eigenvalues(op)(0); }

double origin_condition(const MatrixFunction& fn) {
  const MatrixXcd& c = fn.at_origin();
  MatrixXcd d = MatrixXcd::Identity(fn.m2(), fn.m2()) - c * c.adjoint();
  d = 0.5 * (d + d.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(d, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

PositivityReport positivity_family(const MatrixFunction& fn, double l, int num_radii, int base_panels,
                                   const BuildOptions& opts) {
  if (num_radii < 1) throw InvalidSpec("positivity family needs at least one radius");
  if (base_panels < 2 * num_radii || base_panels % num_radii != 0)
    throw InvalidSpec("base grid must split evenly into the radius ladder with >= 2 panels per radius");
  PositivityReport report;
  report.condition_min_eig = origin_condition(fn);
  report.origin_condition_holds = report.condition_min_eig > 0;
  if (!report.origin_condition_holds) return report;
  const double h = l / base_panels;
  const int step = base_panels / num_radii;
  for (int k = 1; k <= num_radii; ++k) {
    const Grid grid = Grid::with_spacing(h, k * step);
    report.r_values.push_back(grid.length());
    report.min_eigs.push_back(min_eigenvalue(build_S(fn, grid, Variant::selfadjoint, opts)));
  }
  return report;
}

std::vector<std::pair<double, double>> epsilon_family_check(const StructuredOperator& S,
                                                            const std::vector<double>& epsilons) {
  if (S.sign != Variant::skew) throw PreconditionError("epsilon family is defined for the skew operator");
  for (double eps : epsilons)
    if (!(eps > 0 && eps <= 1)) throw InvalidSpec("epsilon must lie in (0, 1)");
  const double base = min_eigenvalue(S);
  std::vector<std::pair<double, double>> out;
  out.reserve(epsilons.size());
  for (double eps : epsilons) out.emplace_back(eps, base - (1 - eps));
  return out;
}

Inverse invert(const DiscreteOperator& S) {
  const Eigen::VectorXd ev = eigenvalues(S);
  const double min_abs = ev.cwiseAbs().minCoeff();
  if (min_abs < kSingularThreshold) {
    std::ostringstream os;
    os << "operator is numerically singular (min |eigenvalue| " << min_abs << ")";
    throw SingularityError(os.str(), min_abs);
  }
  MatrixXcd inv = S.matrix.partialPivLu().inverse();
  DiscreteOperator product{S.grid, S.block, S.matrix * inv - MatrixXcd::Identity(inv.rows(), inv.cols())};
  const double residual = op_norm(product);
  return Inverse{DiscreteOperator{S.grid, S.block, std::move(inv)}, residual, ev(0)};
}

TriangularFactor factorize_inverse(const StructuredOperator& S) {
  const Inverse inv = invert(S);
  // G = W^{1/2} S^{-1} W^{-1/2} is Hermitian positive definite; G = Et^H Et
  // with Et lower triangular is a Cholesky factorization started from the
  // bottom-right corner.
  MatrixXcd g = weighted_similarity(inv.op);
  g = 0.5 * (g + g.adjoint()).eval();
  Eigen::LLT<MatrixXcd> llt(reverse_both(g));
  if (llt.info() != Eigen::Success) throw NotPositiveError("Cholesky breakdown: S^{-1} is not positive definite");
  MatrixXcd lower = llt.matrixL();
  MatrixXcd e_tilde = reverse_both(lower.adjoint());
  return make_factor(S.grid(), S.block(), std::move(e_tilde));
}

TriangularFactor factorize_inverse(const MatrixFunction& fn, const Grid& grid, const BuildOptions& opts) {
  if (fn.at_origin().norm() > kOriginZeroTol)
    throw PreconditionError("triangular factorization requires Phi(0) = 0");
  return factorize_inverse(build_S(fn, grid, Variant::selfadjoint, opts));
}

TriangularFactor factorize_by_forward_substitution(const StructuredOperator& S) {
  MatrixXcd h = weighted_similarity(S.base);
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::LLT<MatrixXcd> llt(h);
  if (llt.info() != Eigen::Success) throw NotPositiveError("Cholesky breakdown: S is not positive definite");
  // H = L L^H  =>  H^{-1} = L^{-H} L^{-1}, so Et = L^{-1}
  const auto L = llt.matrixL();
  const Index n = h.rows();
  MatrixXcd e_tilde = MatrixXcd::Identity(n, n);
  L.solveInPlace(e_tilde);
  return make_factor(S.grid(), S.block(), std::move(e_tilde));
}

double reconstruction_error(const TriangularFactor& f, const DiscreteOperator& S_inverse) {
  const DiscreteOperator E{f.grid, f.block, f.E};
  const DiscreteOperator E_star = weighted_adjoint(E);
  const DiscreteOperator diff{f.grid, f.block, E_star.matrix * f.E - S_inverse.matrix};
  return op_norm(diff) / op_norm(S_inverse);
}

double nesting_defect(const MatrixFunction& fn, double l, double l_hat, double h, const BuildOptions& opts) {
  if (!(l_hat < l)) throw InvalidSpec("nesting needs l_hat < l");
  const int n_full = panels_for(l, h);
  const int n_sub = panels_for(l_hat, h);
  const auto full = factorize_inverse(fn, Grid::with_spacing(h, n_full), opts);
  const auto sub = factorize_inverse(fn, Grid::with_spacing(h, n_sub), opts);
  const Index b = full.block;
  double worst = 0.0;
  for (Index i = 1; i <= n_sub; ++i)
    for (Index j = 0; j < i; ++j) {
      const double d =
          (full.kernel_samples.block(i * b, j * b, b, b) - sub.kernel_samples.block(i * b, j * b, b, b)).norm();
      worst = std::max(worst, d);
    }
  return worst;
}

}  // namespace opid
