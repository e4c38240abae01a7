#include "opid/assembly.hpp"

#include <exception>
#include <mutex>

namespace opid {

using Eigen::Index;
using Eigen::MatrixXcd;

namespace {

void fill_hermitian_row(MatrixXcd& out, Index i, Index block, const BlockKernel& kernel) {
  for (Index j = 0; j <= i; ++j) {
    MatrixXcd b = kernel(i, j);
    if (j == i) b = 0.5 * (b + b.adjoint()).eval();
    out.block(i * block, j * block, block, block) = b;
    if (j != i) out.block(j * block, i * block, block, block) = b.adjoint();
  }
}

void fill_full_row(MatrixXcd& out, Index i, Index cols, Index br, Index bc, const BlockKernel& kernel) {
  for (Index j = 0; j < cols; ++j) out.block(i * br, j * bc, br, bc) = kernel(i, j);
}

// Runs body(i) for i in [0, n) on OpenMP threads; the first exception thrown
// by any row is rethrown on the calling thread.
template <class Body>
void parallel_rows(Index n, Body&& body) {
  std::exception_ptr failure;
  std::mutex guard;
#pragma omp parallel for schedule(dynamic, 1)
  for (Index i = 0; i < n; ++i) {
    {
      std::lock_guard lock(guard);
      if (failure) continue;
    }
    try {
      body(i);
    } catch (...) {
      std::lock_guard lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

MatrixXcd assemble_hermitian(Index n, Index block, const BlockKernel& kernel, Exec exec) {
  MatrixXcd out(n * block, n * block);
  if (exec == Exec::serial) {
    for (Index i = 0; i < n; ++i) fill_hermitian_row(out, i, block, kernel);
  } else {
    // rows are written disjointly: row i touches blocks (i, j<=i) and (j<=i, i)
    parallel_rows(n, [&](Index i) { fill_hermitian_row(out, i, block, kernel); });
  }
  return out;
}

MatrixXcd assemble_full(Index rows, Index cols, Index br, Index bc, const BlockKernel& kernel, Exec exec) {
  MatrixXcd out(rows * br, cols * bc);
  if (exec == Exec::serial) {
    for (Index i = 0; i < rows; ++i) fill_full_row(out, i, cols, br, bc, kernel);
  } else {
    parallel_rows(rows, [&](Index i) { fill_full_row(out, i, cols, br, bc, kernel); });
  }
  return out;
}

}  // namespace opid
