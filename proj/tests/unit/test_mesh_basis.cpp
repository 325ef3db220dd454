#include <doctest.h>

#include <cmath>
#include <limits>

#include "dlrfem/errors.hpp"
#include "dlrfem/mesh_basis.hpp"
#include "support/oracles.hpp"

using namespace dlrfem;

TEST_CASE("Gauss-Lobatto rules integrate monomials up to degree 2k-1") {
  for (int k = 1; k <= kMaxDegree; ++k) {
    const QuadratureRule r = gauss_lobatto_rule(k);
    REQUIRE(r.points.size() == static_cast<std::size_t>(k + 1));
    CHECK(r.points.front() == 0.0);
    CHECK(r.points.back() == 1.0);
    for (int p = 0; p <= 2 * k - 1; ++p) {
      double q = 0.0;
      for (std::size_t i = 0; i < r.points.size(); ++i) q += r.weights[i] * std::pow(r.points[i], p);
      CHECK(std::abs(q - 1.0 / (p + 1.0)) <= 1e-12);
    }
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      CHECK(r.weights[i] > 0.0);
      if (i > 0) CHECK(r.points[i] > r.points[i - 1]);
      CHECK(std::abs(r.points[i] + r.points[k - i] - 1.0) <= 1e-14);
      CHECK(std::abs(r.weights[i] - r.weights[k - i]) <= 1e-14);
    }
    // Weights agree with an independent Vandermonde solve at the same points.
    const auto w = oracle::exactness_weights(r.points);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(w[i] - r.weights[i]) <= 1e-10);
  }
}

TEST_CASE("Gauss-Lobatto low-degree values") {
  const QuadratureRule r2 = gauss_lobatto_rule(2);
  CHECK(r2.points[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r2.weights[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(r2.weights[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  const QuadratureRule r3 = gauss_lobatto_rule(3);
  CHECK(std::abs(r3.points[1] - 0.5 * (1.0 - 1.0 / std::sqrt(5.0))) <= 1e-14);
  CHECK(std::abs(r3.points[2] - 0.5 * (1.0 + 1.0 / std::sqrt(5.0))) <= 1e-14);
  CHECK(std::abs(r3.weights[0] - 1.0 / 12.0) <= 1e-14);
  CHECK(std::abs(r3.weights[1] - 5.0 / 12.0) <= 1e-14);
}

TEST_CASE("unsupported degrees are rejected") {
  CHECK_THROWS_AS(gauss_lobatto_rule(0), ConfigError);
  CHECK_THROWS_AS(gauss_lobatto_rule(kMaxDegree + 1), ConfigError);
  CHECK_THROWS_AS(build_grid(9, 4, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(build_grid(1, 0, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(build_grid(1, 4, 1.0, 1.0), ConfigError);
}

TEST_CASE("Gauss-Legendre rule is exact to degree 2n-1") {
  for (int n = 1; n <= 9; ++n) {
    const QuadratureRule r = gauss_legendre_rule(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double q = 0.0;
      for (std::size_t i = 0; i < r.points.size(); ++i) q += r.weights[i] * std::pow(r.points[i], p);
      CHECK(std::abs(q - 1.0 / (p + 1.0)) <= 1e-13);
    }
  }
}

TEST_CASE("linear grid with two elements") {
  const Grid1D g = build_grid(1, 2, 0.0, 1.0);
  REQUIRE(g.size() == 3);
  CHECK(g.mass_diag()[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.mass_diag()[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.mass_diag()[2] == doctest::Approx(0.25).epsilon(1e-15));
  Eigen::MatrixXd A(3, 3);
  A << 2, -2, 0, -2, 4, -2, 0, -2, 2;
  CHECK((g.stiffness() - A).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("quadratic element stiffness matches the closed form") {
  // Basis on nodes 0, 1/2, 1: K = (1/3h) [[7,-8,1],[-8,16,-8],[1,-8,7]].
  const double h = 0.5;
  const Grid1D g = build_grid(2, 1, 0.0, h);
  Eigen::MatrixXd K(3, 3);
  K << 7, -8, 1, -8, 16, -8, 1, -8, 7;
  K /= 3.0 * h;
  CHECK((g.stiffness() - K).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(g.mass_diag()[1] == doctest::Approx(h * 2.0 / 3.0));
}

TEST_CASE("random grids satisfy the structural invariants") {
  oracle::Rng rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    const int k = rng.integer(1, kMaxDegree);
    const int M = rng.integer(1, 20);
    const double a = rng.uniform(-3.0, 3.0);
    const double b = a + rng.uniform(0.1, 5.0);
    const Grid1D g = build_grid(k, M, a, b);
    const Eigen::Index m = g.size();
    REQUIRE(m == static_cast<Eigen::Index>(M) * k + 1);
    CHECK(std::abs(g.mass_diag().sum() - (b - a)) <= 1e-12 * (b - a));
    CHECK(g.mass_diag().minCoeff() > 0.0);
    CHECK(g.nodes()[0] == a);
    CHECK(g.nodes()[m - 1] == b);
    for (Eigen::Index i = 1; i < m; ++i) CHECK(g.nodes()[i] > g.nodes()[i - 1]);
    const Eigen::MatrixXd& A = g.stiffness();
    const double scale = A.cwiseAbs().maxCoeff();
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * scale);
    CHECK((A * Eigen::VectorXd::Ones(m)).cwiseAbs().maxCoeff() <= 1e-11 * scale);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        if (std::abs(i - j) > k) CHECK(A(i, j) == 0.0);
    // Positive semidefinite: smallest eigenvalue is zero up to rounding.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * scale);
    // Band product agrees with the dense one.
    const Eigen::MatrixXd X = rng.matrix(m, 3);
    CHECK((g.apply_stiffness(X) - A * X).cwiseAbs().maxCoeff() <= 1e-12 * scale * m);
    // Translation invariance.
    const Grid1D t = build_grid(k, M, a + 1.5, b + 1.5);
    CHECK((t.mass_diag() - g.mass_diag()).cwiseAbs().maxCoeff() <= 1e-14 * (b - a + 2));
    CHECK((t.stiffness() - A).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("interior element boundaries carry twice the endpoint weight") {
  for (int k = 1; k <= kMaxDegree; ++k) {
    const Grid1D g = build_grid(k, 3, 0.0, 3.0);
    const double end = g.mass_diag()[0];
    CHECK(std::abs(g.mass_diag()[k] - 2.0 * end) <= 1e-14);
    CHECK(std::abs(g.mass_diag()[2 * k] - 2.0 * end) <= 1e-14);
  }
}

TEST_CASE("interpolation samples nodes and rejects non-finite values") {
  const TensorGrid2D grid{build_grid(2, 3, 0.0, 1.0), build_grid(1, 4, -1.0, 1.0)};
  const FullState s = interpolate_initial(grid, [](double x, double y) { return x + 10.0 * y; });
  REQUIRE(s.W.rows() == 7);
  REQUIRE(s.W.cols() == 5);
  CHECK(s.time == 0.0);
  for (Eigen::Index i = 0; i < 7; ++i)
    for (Eigen::Index j = 0; j < 5; ++j)
      CHECK(s.W(i, j) == grid.gx.nodes()[i] + 10.0 * grid.gy.nodes()[j]);
  CHECK_THROWS_AS(interpolate_initial(grid, [](double, double) { return std::numeric_limits<double>::quiet_NaN(); }),
                  InputError);
  CHECK(grid.area() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("odd data on a symmetric grid samples to an odd array") {
  const TensorGrid2D grid{build_grid(1, 128, -0.5, 0.5), build_grid(1, 128, -0.5, 0.5)};
  const FullState s =
      interpolate_initial(grid, [](double x, double y) { return std::sin(2 * M_PI * x) * std::sin(4 * M_PI * y); });
  const Eigen::Index m = s.W.rows();
  double err = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      err = std::max({err, std::abs(s.W(i, j) + s.W(m - 1 - i, j)), std::abs(s.W(i, j) + s.W(i, m - 1 - j))});
  CHECK(err <= 1e-13);
}
