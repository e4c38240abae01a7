#include <doctest.h>

#include "families.hpp"
#include "opid/errors.hpp"
#include "opid/operators.hpp"
#include "opid/spectral_factor.hpp"

using namespace opid;
using namespace opid::testing;

TEST_CASE("grid nodes and trapezoid weights") {
  const auto g = make_grid(1.0, 2);
  CHECK(g.size() == 3);
  CHECK(g.nodes().isApprox(Eigen::Vector3d(0, 0.5, 1)));
  CHECK(g.weights().isApprox(Eigen::Vector3d(0.25, 0.5, 0.25)));

  const auto g2 = make_grid(2.0, 4);
  CHECK(g2.spacing() == 0.5);
  CHECK(g2.weights().sum() == doctest::Approx(2.0));

  const auto g3 = make_grid(1.0, 3);
  CHECK(g3.weight(1) == doctest::Approx(1.0 / 3));
  CHECK(g3.weight(2) == doctest::Approx(1.0 / 3));
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(make_grid(0.0, 4), InvalidSpec);
  CHECK_THROWS_AS(make_grid(-1.0, 4), InvalidSpec);
  CHECK_THROWS_AS(make_grid(1.0, 1), InvalidSpec);
  CHECK_THROWS_AS(make_grid(1.0, 8).leading(9), InvalidSpec);
  const auto sub = make_grid(1.0, 8).leading(4);
  CHECK(sub.length() == doctest::Approx(0.5));
  CHECK(sub.spacing() == 0.125);
}

TEST_CASE("weighted adjoint") {
  const auto g = make_grid(1.0, 6);
  const auto id = identity_operator(g, 2);
  CHECK(weighted_adjoint(id).matrix.isApprox(id.matrix));

  // Hermitian kernel samples times column weights are weighted-self-adjoint
  const Index n = g.size();
  MatrixXcd k = MatrixXcd::Random(n, n);
  k = (k + k.adjoint()).eval();
  const DiscreteOperator herm{g, 1, apply_column_weights(g, 1, k)};
  CHECK((weighted_adjoint(herm).matrix - herm.matrix).norm() < 1e-14);

  const DiscreteOperator m{g, 2, MatrixXcd::Random(2 * n, 2 * n)};
  CHECK((weighted_adjoint(weighted_adjoint(m)).matrix - m.matrix).norm() < 1e-13);

  // <M f, g>_W = <f, M^* g>_W
  const Eigen::VectorXcd f = Eigen::VectorXcd::Random(2 * n), h = Eigen::VectorXcd::Random(2 * n);
  const Eigen::VectorXcd w = block_weights(g, 2).cast<cplx>();
  const cplx lhs = (m.matrix * f).dot(w.cwiseProduct(h));
  const cplx rhs = f.dot(w.cwiseProduct(weighted_adjoint(m).matrix * h));
  CHECK(std::abs(lhs - rhs) < 1e-13);
}

TEST_CASE("operator norm") {
  const auto g = make_grid(1.0, 2);
  CHECK(op_norm(DiscreteOperator{g, 1, MatrixXcd::Zero(3, 3)}) == 0.0);
  CHECK(op_norm(identity_operator(g, 3)) == doctest::Approx(1.0));
  MatrixXcd d = MatrixXcd::Zero(3, 3);
  d(0, 0) = 0.37;
  CHECK(op_norm(DiscreteOperator{g, 1, d}) == doctest::Approx(0.37));
}

TEST_CASE("projection to the full grid is the identity map") {
  const auto fn = make_family(fourier(4, 2, 2));
  const auto S = build_S(fn, make_grid(1.0, 16), Variant::selfadjoint);
  const auto P = project_operator(S, 16);
  CHECK(P.base.matrix == S.base.matrix);
  CHECK_THROWS_AS(project_operator(S, 17), InvalidSpec);
}

TEST_CASE("kernel samples nest exactly under projection") {
  const int N = 32, r = 12;
  for (const auto& [name, spec] : builtin_families()) {
    CAPTURE(name);
    const auto fn = make_family(spec);
    const auto S = build_S(fn, make_grid(1.0, N), Variant::selfadjoint);
    const auto P = project_operator(S, r);
    const auto direct = build_S(fn, Grid::with_spacing(1.0 / N, r), Variant::selfadjoint);
    CHECK((P.kernel_samples - direct.kernel_samples).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(min_eigenvalue(P) - min_eigenvalue(direct)) <= 1e-12);
  }
}

TEST_CASE("naive leading block differs from the projection only in the last column") {
  // Cutting the matrix ignores that x_r becomes an end point with half weight.
  const int N = 16, r = 6;
  const auto fn = make_family(linear_scalar());
  const auto S = build_S(fn, make_grid(1.0, N), Variant::selfadjoint);
  const auto P = project_operator(S, r);
  const MatrixXcd naive = S.base.matrix.topLeftCorner(r + 1, r + 1);
  const MatrixXcd diff = naive - P.base.matrix;
  CHECK(diff.leftCols(r).cwiseAbs().maxCoeff() == 0.0);
  CHECK(diff.col(r).cwiseAbs().maxCoeff() > 0.0);
}
