#pragma once

#include <array>
#include <optional>
#include <vector>

#include "opid/operators.hpp"

namespace opid {

struct ResidualReport {
  Variant variant = Variant::selfadjoint;
  int N = 0;
  double residual = 0.0;
  std::optional<std::array<double, 4>> component_residuals;
  /// log(r_prev / r) / log(N / N_prev); set from the second grid on.
  std::optional<double> order_estimate;
};

/// selfadjoint: ||A S - S A^* - rhs||;  skew: ||i(A S - S A^*) - rhs||.
double identity_residual(const DiscreteOperator& A, const DiscreteOperator& A_star, const DiscreteOperator& S,
                         const DiscreteOperator& rhs, Variant variant);

/// Residual of the identity for S built from fn on grid (A^* discretized directly).
double identity_residual(const MatrixFunction& fn, const Grid& grid, Variant variant, const BuildOptions& opts = {});

/// ||R_skew(S) + i R_selfadjoint(2I - S)||: the two identity forms are
/// equivalent because i(A - A^*) = Phi_2 Phi_2^* holds exactly on the grid.
double skew_equivalence_defect(const MatrixFunction& fn, const Grid& grid, const BuildOptions& opts = {});

/// Residuals of A S_k - S_k A^* = rhs_k for the four components of S.
std::array<double, 4> component_residuals(const MatrixFunction& fn, const Grid& grid, const BuildOptions& opts = {});

/// Q(x, t) = Q1(x) Q2(t) with Q1 : m2 x p, Q2 : p x m2.
struct SeparableKernel {
  MatrixPath q1;
  MatrixPath q2;

  Index block() const { return q1.rows; }
  Index rank() const { return q1.cols; }
};

/// Upsilon(x, t) = -1/2 \int_{x+t}^{2l-|x-t|} Q1((xi+x-t)/2) Q2((xi-x+t)/2) dxi.
MatrixXcd upsilon(const SeparableKernel& k, double l, double x, double t);

/// Which one-sided branch of d/dt Upsilon to evaluate.
enum class Branch { below_diagonal, above_diagonal };

/// d/dt Upsilon(x, t) by the Leibniz rule on the branch t <= x
/// (below_diagonal) or t >= x (above_diagonal). `panels` fixes the inner
/// quadrature so finite differences in x see a smooth function.
MatrixXcd upsilon_dt(const SeparableKernel& k, double l, double x, double t, Branch branch, int panels);

/// T f = d/dx \int_0^l d/dt Upsilon(x, t) f(t) dt on the grid.
DiscreteOperator build_T_pnid(const SeparableKernel& k, const Grid& grid, Exec exec = Exec::parallel);

/// The separable kernel Q obtained by flipping the selfadjoint identity of fn
/// on [0, grid.length()].
SeparableKernel flipped_identity_kernel(const MatrixFunction& fn, double l);

/// S reconstructed as U T U from the flipped identity.
DiscreteOperator reconstruct_S_via_pnid(const MatrixFunction& fn, const Grid& grid, Exec exec = Exec::parallel);

/// Identity residuals over a ladder of grids on [0, l].
std::vector<ResidualReport> convergence_study(const MatrixFunction& fn, Variant variant, const std::vector<int>& N_list,
                                              double l, bool with_components = false, const BuildOptions& opts = {});

/// log(a / b) / log(n_b / n_a)
double observed_order(double residual_coarse, double residual_fine, int n_coarse, int n_fine);

}  // namespace opid
