#pragma once

#include <array>

#include "opid/assembly.hpp"
#include "opid/discretization.hpp"
#include "opid/matfun.hpp"

namespace opid {

/// Default absolute/relative tolerance for the inner kernel quadrature.
inline constexpr double kKernelTolerance = 1e-12;

struct BuildOptions {
  double kernel_tol = kKernelTolerance;
  Exec exec = Exec::parallel;
};

/// j = diag(I_{m1}, -I_{m2})
struct SignatureMatrix {
  Index m1;
  Index m2;

  Index size() const { return m1 + m2; }
  Eigen::MatrixXd matrix() const;
};

/// A = -i \int_0^x . dt, trapezoid weights on [0, x_i] in row i.
DiscreteOperator build_A(const Grid& grid, Index m2);

/// A^* = i \int_x^l . dt discretized directly (trapezoid on [x_i, l]).
DiscreteOperator build_A_star_direct(const Grid& grid, Index m2);

/// Matrix of U M U for the antilinear flip (Uf)(x) = conj(f(l - x)).
DiscreteOperator build_flip_conjugation(const DiscreteOperator& op);

/// \int_0^{min(x,t)} Phi'(x - z) Phi'(t - z)^H dz, adaptive composite
/// Gauss-Legendre; throws AccuracyError if `tol` cannot be met.
MatrixXcd gram_kernel(const MatrixFunction& fn, double x, double t, double tol = kKernelTolerance);

/// One-sided convolution term of the close-to-displacement kernel:
///   x > t : Phi'(x - t) Phi(0)^H
///   t > x : Phi(0) Phi'(t - x)^H
///   x = t : mean of the two one-sided limits
MatrixXcd case_kernel(const MatrixFunction& fn, double x, double t);

/// s(x, t) = gram_kernel + case_kernel.
MatrixXcd kernel_s(const MatrixFunction& fn, double x, double t, double tol = kKernelTolerance);

/// Unweighted samples s(x_i, x_j) in block layout.
MatrixXcd kernel_samples(const MatrixFunction& fn, const Grid& grid, const BuildOptions& opts = {});

/// selfadjoint: S = (I - Phi(0)Phi(0)^H) - \int s ;  skew: S = (I + Phi(0)Phi(0)^H) + \int s.
StructuredOperator build_S(const MatrixFunction& fn, const Grid& grid, Variant variant,
                           const BuildOptions& opts = {});

/// Pi = [Phi_1, Phi_2]; row block i is [Phi_1(x_i), I_{m2}].
DiscreteMap build_Pi(const MatrixFunction& fn, const Grid& grid);

/// Right-hand side of the operator identity as a Nystrom operator:
/// selfadjoint i Pi j Pi^*, skew Pi Pi^*.
DiscreteOperator rhs_identity(const DiscreteMap& pi, Variant variant);

/// The four parts of S (selfadjoint): multiplication, lower Volterra,
/// upper Volterra, and the Gram part. Diagonal samples split the averaged
/// case term so that the sum reproduces build_S exactly.
std::array<DiscreteOperator, 4> split_components(const MatrixFunction& fn, const Grid& grid,
                                                 const BuildOptions& opts = {});

/// Operator with kernel
///   -1/2 \int_{|x-t|}^{x+t} Phi'((xi+x-t)/2) PhiHat'((xi+t-x)/2) dxi,
/// requires Phi(0) = 0 and PhiHat(0) = 0.
DiscreteOperator build_lemma_operator(const MatrixPath& phi, const MatrixPath& phi_hat, const Grid& grid,
                                      Exec exec = Exec::parallel);

}  // namespace opid
