#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace opid {

using cplx = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXcd;

enum class Family { zero, constant, linear, trig, polynomial, fourier_random };

std::string_view to_string(Family f);
Family family_from_string(std::string_view name);

/// Parameters of a test matrix function Phi_1 : [0, length] -> C^{m2 x m1}.
///
/// How `coefficients` is read depends on the family:
///   constant        one matrix C, Phi_1 = C
///   linear          one matrix C, Phi_1(x) = C x
///   trig            one matrix C, Phi_1(x) = C sin(omega x)
///   polynomial      C_0 .. C_k, Phi_1(x) = sum C_j x^j
///   fourier_random  none (amplitudes drawn from `seed`)
///   zero            none
/// `offset`, when set, is added to Phi_1 for every family; it moves Phi_1(0)
/// away from zero without changing Phi_1'. `addends` are further specs of the
/// same shape and domain whose values are summed in, e.g. [x, 0.3 sin x] is a
/// linear spec with a trig addend.
struct MatrixFunctionSpec {
  Family family = Family::zero;
  Index m1 = 1;
  Index m2 = 1;
  std::vector<MatrixXcd> coefficients;
  double omega = 1.0;
  int num_terms = 8;
  double decay = 2.0;
  std::uint64_t seed = 0;
  double length = 1.0;
  std::optional<MatrixXcd> offset;
  std::vector<MatrixFunctionSpec> addends;
};

/// Smooth matrix-valued function of one real variable together with its
/// first derivative. Used wherever an operator is parameterized by a generic
/// function (lemma operator, separable kernels).
struct MatrixPath {
  Index rows = 0;
  Index cols = 0;
  std::function<MatrixXcd(double)> value;
  std::function<MatrixXcd(double)> derivative;
};

/// Immutable evaluator pair (Phi_1, Phi_1') built from a spec.
class MatrixFunction {
 public:
  explicit MatrixFunction(MatrixFunctionSpec spec);

  const MatrixFunctionSpec& spec() const { return spec_; }
  Index m1() const { return spec_.m1; }
  Index m2() const { return spec_.m2; }
  double length() const { return spec_.length; }

  MatrixXcd eval(double x) const;
  MatrixXcd eval_deriv(double x) const;

  /// Phi_1(0)
  const MatrixXcd& at_origin() const { return origin_; }

  MatrixPath as_path() const;

 private:
  void check_domain(double x) const;
  MatrixXcd value_unchecked(double x) const;
  MatrixXcd family_value(double x) const;
  MatrixXcd family_deriv(double x) const;
  MatrixXcd deriv_unchecked(double x) const;

  MatrixFunctionSpec spec_;
  // fourier_random: amplitudes A_k / k^decay, k = 1..num_terms
  std::vector<MatrixXcd> modes_;
  std::vector<MatrixFunction> addends_;
  MatrixXcd origin_;
};

MatrixFunction make_family(const MatrixFunctionSpec& spec);
MatrixXcd eval_phi(const MatrixFunction& fn, double x);
MatrixXcd eval_phi_deriv(const MatrixFunction& fn, double x);

/// Shorthand for scalar (m1 = m2 = 1) specs used in tests and configs.
MatrixFunctionSpec scalar_spec(Family family, std::vector<double> coefficients, double length = 1.0);

}  // namespace opid
