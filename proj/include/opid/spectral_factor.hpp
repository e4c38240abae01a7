#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "opid/operators.hpp"

namespace opid {

/// Lower-triangular factor E with S^{-1} = E^* E in the weighted inner product.
struct TriangularFactor {
  Grid grid;
  Index block;
  MatrixXcd E;
  /// E_{ij} / w_j; blocks with j > i are zero.
  MatrixXcd kernel_samples;

  /// max_i ||E_ii - I|| / h
  double diagonal_constant() const;
};

struct PositivityReport {
  std::vector<double> r_values;
  std::vector<double> min_eigs;
  bool origin_condition_holds = false;
  double condition_min_eig = 0.0;
  std::optional<std::vector<std::pair<double, double>>> epsilon_results;

  bool strictly_positive() const;
};

/// ||H - H^H|| / ||H|| with H the weighted similarity.
double hermiticity_defect(const DiscreteOperator& op);
inline double hermiticity_defect(const StructuredOperator& op) { return hermiticity_defect(op.base); }

/// Smallest eigenvalue of H = W^{1/2} M W^{-1/2}; requires defect <= 1e-8.
double min_eigenvalue(const DiscreteOperator& op);
inline double min_eigenvalue(const StructuredOperator& op) { return min_eigenvalue(op.base); }

/// All eigenvalues (ascending) of the Hermitian similarity.
Eigen::VectorXd eigenvalues(const DiscreteOperator& op);

/// Smallest eigenvalue of I - Phi(0) Phi(0)^H.
double origin_condition(const MatrixFunction& fn);

/// min eig of S_r (selfadjoint) for r = l k / num_radii, k = 1..num_radii,
/// each on a grid with the spacing l / base_panels.
PositivityReport positivity_family(const MatrixFunction& fn, double l, int num_radii, int base_panels,
                                   const BuildOptions& opts = {});

/// (eps, min eig of S - (1 - eps) I) for the skew operator S.
std::vector<std::pair<double, double>> epsilon_family_check(const StructuredOperator& S,
                                                            const std::vector<double>& epsilons);

struct Inverse {
  DiscreteOperator op;
  double residual;  // ||M M^{-1} - I||
  double min_eig;
};

/// Matrix inverse; SingularityError if min |eig| of H < 1e-10.
Inverse invert(const DiscreteOperator& S);
inline Inverse invert(const StructuredOperator& S) { return invert(S.base); }

/// S^{-1} = E^* E via reversed-order Cholesky of W^{1/2} S^{-1} W^{-1/2}.
/// Requires Phi(0) = 0 (checked on the function when given).
TriangularFactor factorize_inverse(const StructuredOperator& S);
TriangularFactor factorize_inverse(const MatrixFunction& fn, const Grid& grid, const BuildOptions& opts = {});

/// Independent route: Cholesky of H itself, then the triangular inverse by
/// blockwise forward substitution.
TriangularFactor factorize_by_forward_substitution(const StructuredOperator& S);

/// ||E^* E - S^{-1}|| / ||S^{-1}||
double reconstruction_error(const TriangularFactor& f, const DiscreteOperator& S_inverse);

/// max over shared nodes i > j of ||E^(l)(x_i, x_j) - E^(l_hat)(x_i, x_j)||.
double nesting_defect(const MatrixFunction& fn, double l, double l_hat, double h, const BuildOptions& opts = {});

}  // namespace opid
