#include "opid/discretization.hpp"

#include <cmath>
#include <sstream>

#include "opid/errors.hpp"

namespace opid {

Grid Grid::uniform(double length, int panels) {
  if (!(length > 0) || !std::isfinite(length)) throw InvalidSpec("grid length must be positive");
  if (panels < 2) throw InvalidSpec("grid needs at least 2 panels");
  return Grid(length / panels, panels, length);
}

Grid Grid::with_spacing(double spacing, int panels) {
  if (!(spacing > 0) || !std::isfinite(spacing)) throw InvalidSpec("grid spacing must be positive");
  if (panels < 1) throw InvalidSpec("grid needs at least 1 panel");
  return Grid(spacing, panels, spacing * panels);
}

VectorXd Grid::nodes() const {
  VectorXd x(size());
  for (Index i = 0; i < size(); ++i) x(i) = node(i);
  return x;
}

VectorXd Grid::weights() const {
  VectorXd w(size());
  for (Index i = 0; i < size(); ++i) w(i) = weight(i);
  return w;
}

Grid Grid::leading(int r_index) const {
  if (r_index <= 0 || r_index > panels_) {
    std::ostringstream os;
    os << "projection index " << r_index << " outside (0, " << panels_ << "]";
    throw InvalidSpec(os.str());
  }
  if (r_index == panels_) return *this;
  return Grid(h_, r_index, node(r_index));
}

Grid make_grid(double length, int panels) { return Grid::uniform(length, panels); }

std::string_view to_string(Variant v) { return v == Variant::selfadjoint ? "selfadjoint" : "skew"; }

Variant variant_from_string(std::string_view name) {
  if (name == "selfadjoint") return Variant::selfadjoint;
  if (name == "skew") return Variant::skew;
  throw InvalidSpec("unknown variant '" + std::string(name) + "'");
}

VectorXd block_weights(const Grid& grid, Index block) {
  VectorXd w(grid.size() * block);
  for (Index i = 0; i < grid.size(); ++i) w.segment(i * block, block).setConstant(grid.weight(i));
  return w;
}

MatrixXcd apply_column_weights(const Grid& grid, Index block, const MatrixXcd& kernel_samples) {
  return kernel_samples * block_weights(grid, block).asDiagonal();
}

StructuredOperator assemble_structured(const Grid& grid, MatrixXcd mult_part, MatrixXcd kernel_samples,
                                       Variant sign) {
  const Index m = mult_part.rows();
  const Index n = grid.size() * m;
  if (mult_part.cols() != m || kernel_samples.rows() != n || kernel_samples.cols() != n)
    throw InvalidSpec("structured operator parts have inconsistent shapes");
  MatrixXcd matrix = apply_column_weights(grid, m, kernel_samples);
  if (sign == Variant::selfadjoint) matrix = -matrix;
  for (Index i = 0; i < grid.size(); ++i) matrix.block(i * m, i * m, m, m) += mult_part;
  return StructuredOperator{DiscreteOperator{grid, m, std::move(matrix)}, std::move(mult_part),
                            std::move(kernel_samples), sign};
}

MatrixXcd weighted_similarity(const DiscreteOperator& op) {
  const VectorXd w = block_weights(op.grid, op.block);
  const VectorXd sq = w.cwiseSqrt();
  return sq.asDiagonal() * op.matrix * sq.cwiseInverse().asDiagonal();
}

DiscreteOperator weighted_adjoint(const DiscreteOperator& op) {
  const VectorXd w = block_weights(op.grid, op.block);
  // (M*)_{ij} = (w_j / w_i) M_{ji}^H
  MatrixXcd adj = w.cwiseInverse().asDiagonal() * op.matrix.adjoint() * w.asDiagonal();
  return DiscreteOperator{op.grid, op.block, std::move(adj)};
}

double op_norm(const DiscreteOperator& op) {
  if (op.matrix.size() == 0) return 0.0;
  const MatrixXcd h = weighted_similarity(op);
  if (h.isZero(0.0)) return 0.0;
  Eigen::BDCSVD<MatrixXcd> svd(h);
  return svd.singularValues()(0);
}

double frobenius_norm(const DiscreteOperator& op) { return weighted_similarity(op).norm(); }

DiscreteOperator identity_operator(const Grid& grid, Index block) {
  return DiscreteOperator{grid, block, MatrixXcd::Identity(grid.size() * block, grid.size() * block)};
}

StructuredOperator project_operator(const StructuredOperator& op, int r_index) {
  const Grid sub = op.grid().leading(r_index);
  const Index n = sub.size() * op.block();
  return assemble_structured(sub, op.mult_part, op.kernel_samples.topLeftCorner(n, n), op.sign);
}

}  // namespace opid
