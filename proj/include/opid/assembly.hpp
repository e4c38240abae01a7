#pragma once

#include <functional>

#include <Eigen/Dense>

namespace opid {

/// Execution policy for the block-assembly kernels. `serial` is the reference
/// path; `parallel` distributes rows over OpenMP threads and must produce
/// bit-identical output.
enum class Exec { serial, parallel };

/// Produces block (i, j) of a block matrix.
using BlockKernel = std::function<Eigen::MatrixXcd(Eigen::Index i, Eigen::Index j)>;

/// Fill an (n*block)^2 matrix from `kernel` evaluated on j <= i; the upper
/// triangle is the block adjoint of the lower one and diagonal blocks are
/// Hermitian-symmetrized.
Eigen::MatrixXcd assemble_hermitian(Eigen::Index n, Eigen::Index block, const BlockKernel& kernel, Exec exec);

/// Fill an (rows*block_rows) x (cols*block_cols) matrix from every block.
Eigen::MatrixXcd assemble_full(Eigen::Index rows, Eigen::Index cols, Eigen::Index block_rows,
                               Eigen::Index block_cols, const BlockKernel& kernel, Exec exec);

}  // namespace opid
