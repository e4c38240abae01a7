#pragma once

#include <Eigen/Dense>

#include "opid/matfun.hpp"

namespace opid {

using Eigen::VectorXd;

/// Uniform partition of [0, l] with trapezoid weights; the discrete model of
/// L^2(0, l). Nodes are i*h, so grids sharing h share node values bit for bit.
class Grid {
 public:
  /// make_grid: l > 0, N >= 2 panels.
  static Grid uniform(double length, int panels);
  /// Grid of `panels` panels of width `spacing`.
  static Grid with_spacing(double spacing, int panels);

  int panels() const { return panels_; }
  Index size() const { return panels_ + 1; }
  double spacing() const { return h_; }
  double length() const { return length_; }
  double node(Index i) const { return static_cast<double>(i) * h_; }
  double weight(Index i) const { return (i == 0 || i == panels_) ? 0.5 * h_ : h_; }
  VectorXd nodes() const;
  VectorXd weights() const;

  /// Leading subgrid [0, x_r]; keeps the spacing.
  Grid leading(int r_index) const;

 private:
  Grid(double h, int panels, double length) : h_(h), panels_(panels), length_(length) {}
  double h_;
  int panels_;
  double length_;
};

Grid make_grid(double length, int panels);

/// Block matrix acting on grid samples f = (f(x_0), ..., f(x_N)), each sample
/// in C^block. Block (i, j) occupies rows i*block.., cols j*block.. .
struct DiscreteOperator {
  Grid grid;
  Index block;
  MatrixXcd matrix;

  Index dim() const { return grid.size() * block; }
  auto block_at(Index i, Index j) { return matrix.block(i * block, j * block, block, block); }
  auto block_at(Index i, Index j) const { return matrix.block(i * block, j * block, block, block); }
};

/// Discretized Pi : C^columns -> L^2_{block}(0, l).
struct DiscreteMap {
  Grid grid;
  Index block;
  Index columns;
  MatrixXcd matrix;
};

enum class Variant { selfadjoint, skew };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view name);

/// Operator of the form M = D (x) I  -+  [s(x_i, x_j) w_j], with the
/// multiplication part and raw kernel samples kept next to the assembled
/// matrix so that projections can be rebuilt exactly.
struct StructuredOperator {
  DiscreteOperator base;
  MatrixXcd mult_part;
  /// Unweighted kernel samples, same block layout as base.matrix.
  MatrixXcd kernel_samples;
  Variant sign = Variant::selfadjoint;

  const Grid& grid() const { return base.grid; }
  Index block() const { return base.block; }
};

/// Assemble base.matrix from the multiplication part and kernel samples.
StructuredOperator assemble_structured(const Grid& grid, MatrixXcd mult_part, MatrixXcd kernel_samples,
                                       Variant sign);

/// Weight vector replicated over the block: entry i*block + p is w_i.
VectorXd block_weights(const Grid& grid, Index block);

/// Nystrom assembly: blocks kernel(i, j) * w_j.
MatrixXcd apply_column_weights(const Grid& grid, Index block, const MatrixXcd& kernel_samples);

/// W^{1/2} M W^{-1/2}; Hermitian exactly when M is weighted-self-adjoint.
MatrixXcd weighted_similarity(const DiscreteOperator& op);

DiscreteOperator weighted_adjoint(const DiscreteOperator& op);

/// Discrete L^2 operator norm (spectral norm of the weighted similarity).
double op_norm(const DiscreteOperator& op);

/// Frobenius norm of the weighted similarity; diagnostic only.
double frobenius_norm(const DiscreteOperator& op);

DiscreteOperator identity_operator(const Grid& grid, Index block);

/// Restriction of a structured operator to [0, x_r]: leading kernel samples,
/// the subgrid's own trapezoid weights.
StructuredOperator project_operator(const StructuredOperator& op, int r_index);

}  // namespace opid
