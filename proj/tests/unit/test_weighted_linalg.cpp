#include <doctest.h>

#include <cmath>

#include "dlrfem/errors.hpp"
#include "dlrfem/weighted_linalg.hpp"
#include "support/oracles.hpp"

using namespace dlrfem;

namespace {

TensorGrid2D unit_grid(int k, int M) { return {build_grid(k, M, 0.0, 1.0), build_grid(k, M, 0.0, 1.0)}; }

Eigen::MatrixXd gram(const Eigen::MatrixXd& Q, const Eigen::VectorXd& mass) {
  return Q.transpose() * mass.asDiagonal() * Q;
}

double orthonormality_defect(const Eigen::MatrixXd& Q, const Eigen::VectorXd& mass) {
  return (gram(Q, mass) - Eigen::MatrixXd::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();
}

Eigen::VectorXd random_mass(oracle::Rng& rng, Eigen::Index p) {
  Eigen::VectorXd m(p);
  for (Eigen::Index i = 0; i < p; ++i) m[i] = rng.uniform(0.05, 2.0);
  return m;
}

}  // namespace

TEST_CASE("weighted inner product") {
  SUBCASE("constant one integrates to the area") {
    const TensorGrid2D g = unit_grid(3, 5);
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(g.rows(), g.cols());
    CHECK(std::abs(weighted_inner(one, one, g.gx, g.gy) - 1.0) <= 1e-14);
  }
  SUBCASE("corner indicator") {
    // One element per axis: corner weight (1/2)(1/2).
    const TensorGrid2D g1 = unit_grid(1, 1);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 1.0;
    CHECK(weighted_inner(A, A, g1.gx, g1.gy) == doctest::Approx(0.25).epsilon(1e-15));
    // Two elements per axis: corner weight (1/4)(1/4).
    const TensorGrid2D g2 = unit_grid(1, 2);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 3);
    B(0, 0) = 1.0;
    CHECK(weighted_inner(B, B, g2.gx, g2.gy) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  }
  SUBCASE("random pairs agree with the direct sum") {
    oracle::Rng rng(7);
    for (int t = 0; t < 20; ++t) {
      const TensorGrid2D g{build_grid(rng.integer(1, 4), rng.integer(1, 6), 0.0, rng.uniform(0.5, 3.0)),
                           build_grid(rng.integer(1, 4), rng.integer(1, 6), -1.0, rng.uniform(0.0, 2.0))};
      const Eigen::MatrixXd A = rng.matrix(g.rows(), g.cols()), B = rng.matrix(g.rows(), g.cols());
      const double direct = oracle::direct_inner(A, B, g);
      CHECK(std::abs(weighted_inner(A, B, g.gx, g.gy) - direct) <= 1e-13 * (1.0 + std::abs(direct)));
      CHECK(std::abs(weighted_norm(A, g.gx, g.gy) - std::sqrt(oracle::direct_inner(A, A, g))) <= 1e-13);
    }
  }
  SUBCASE("shape mismatch is a contract violation") {
    const TensorGrid2D g = unit_grid(1, 2);
    CHECK_THROWS_AS(weighted_inner(Eigen::MatrixXd::Ones(2, 3), Eigen::MatrixXd::Ones(2, 3), g.gx, g.gy),
                    ContractViolation);
  }
}

TEST_CASE("gqr") {
  oracle::Rng rng(11);
  SUBCASE("identity mass gives an ordinary thin QR") {
    const Eigen::MatrixXd A = rng.matrix(9, 4);
    const GqrResult f = gqr(A, Eigen::VectorXd::Ones(9));
    CHECK(orthonormality_defect(f.Q, Eigen::VectorXd::Ones(9)) <= 1e-13);
    CHECK((f.Q * f.R - A).cwiseAbs().maxCoeff() <= 1e-13);
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < i; ++j) CHECK(f.R(i, j) == 0.0);
    // Agrees with Householder up to column signs.
    Eigen::HouseholderQR<Eigen::MatrixXd> hh(A);
    const Eigen::MatrixXd Qh = hh.householderQ() * Eigen::MatrixXd::Identity(9, 4);
    for (Eigen::Index j = 0; j < 4; ++j)
      CHECK(std::min((f.Q.col(j) - Qh.col(j)).norm(), (f.Q.col(j) + Qh.col(j)).norm()) <= 1e-12);
  }
  SUBCASE("an orthonormal input is returned up to signs") {
    const Eigen::VectorXd mass = random_mass(rng, 12);
    const Eigen::MatrixXd A = oracle::random_orthonormal(rng, mass, 5);
    const GqrResult f = gqr(A, mass);
    CHECK((f.R.cwiseAbs() - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((f.Q * f.R - A).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("a dependent column leaves a zero row in R") {
    const Eigen::VectorXd mass = random_mass(rng, 10);
    Eigen::MatrixXd A(10, 2);
    A.col(0) = rng.matrix(10, 1);
    A.col(1) = 2.0 * A.col(0);
    const GqrResult f = gqr(A, mass);
    CHECK(f.R.row(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(orthonormality_defect(f.Q, mass) <= 1e-10);
    CHECK((f.Q * f.R - A).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("random rank-deficient inputs") {
    for (int t = 0; t < 40; ++t) {
      const Eigen::Index p = rng.integer(2, 30);
      const Eigen::Index q = rng.integer(1, static_cast<int>(p));
      const Eigen::Index r = rng.integer(0, static_cast<int>(q));
      const Eigen::VectorXd mass = random_mass(rng, p);
      const Eigen::MatrixXd A = r == 0 ? Eigen::MatrixXd::Zero(p, q) : Eigen::MatrixXd(rng.matrix(p, r) * rng.matrix(r, q));
      const GqrResult f = gqr(A, mass);
      REQUIRE(f.Q.cols() == q);
      CHECK(orthonormality_defect(f.Q, mass) <= 1e-10);
      CHECK((f.Q * f.R - A).cwiseAbs().maxCoeff() <= 1e-11 * (1.0 + A.cwiseAbs().maxCoeff()));
      const Eigen::MatrixXd B = orthonormal_basis(A, mass);
      CHECK(B.cols() == std::max<Eigen::Index>(r, 1));
      CHECK(orthonormality_defect(B, mass) <= 1e-10);
      // range(A) lies in span(B).
      const Eigen::MatrixXd residual = A - B * (B.transpose() * mass.asDiagonal() * A);
      CHECK(residual.cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + A.cwiseAbs().maxCoeff()));
    }
  }
  SUBCASE("contract violations") {
    CHECK_THROWS_AS(gqr(Eigen::MatrixXd::Ones(2, 3), Eigen::VectorXd::Ones(2)), ContractViolation);
    CHECK_THROWS_AS(gqr(Eigen::MatrixXd::Ones(3, 1), Eigen::VectorXd::Ones(2)), ContractViolation);
    Eigen::VectorXd bad = Eigen::VectorXd::Ones(3);
    bad[1] = 0.0;
    CHECK_THROWS_AS(gqr(Eigen::MatrixXd::Ones(3, 1), bad), ContractViolation);
  }
}

TEST_CASE("propagator") {
  SUBCASE("zero step is the identity") {
    const Grid1D g = build_grid(2, 5, 0.0, 1.0);
    const Propagator E = make_propagator(g, 0.0);
    CHECK((E.matrix() - Eigen::MatrixXd::Identity(g.size(), g.size())).cwiseAbs().maxCoeff() <= 1e-13);
  }
  SUBCASE("constants are preserved") {
    for (int k = 1; k <= 4; ++k) {
      const Grid1D g = build_grid(k, 7, -1.0, 2.0);
      for (double s : {1e-3, 0.5, 30.0}) {
        const Eigen::VectorXd one = Eigen::VectorXd::Ones(g.size());
        CHECK((make_propagator(g, s).apply(one) - one).cwiseAbs().maxCoeff() <= 1e-12);
      }
    }
  }
  SUBCASE("matches the truncated exponential series") {
    const Grid1D g = build_grid(1, 2, 0.0, 1.0);
    const Eigen::MatrixXd L = -(g.mass_diag().cwiseInverse().asDiagonal() * g.stiffness());
    const Eigen::MatrixXd series = oracle::taylor_exp(L, -0.1, 30);
    CHECK((make_propagator(g, -0.1).matrix() - series).cwiseAbs().maxCoeff() <= 1e-12);
    const Eigen::MatrixXd forward = oracle::taylor_exp(L, 0.01, 30);
    CHECK((make_propagator(g, 0.01).matrix() - forward).cwiseAbs().maxCoeff() <= 1e-13);
  }
  SUBCASE("higher degree against the series") {
    const Grid1D g = build_grid(3, 2, 0.0, 1.0);
    const Eigen::MatrixXd L = -(g.mass_diag().cwiseInverse().asDiagonal() * g.stiffness());
    const double s = 1e-3;
    CHECK((make_propagator(g, s).matrix() - oracle::taylor_exp(L, s, 40)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("semigroup property") {
    oracle::Rng rng(3);
    for (int t = 0; t < 10; ++t) {
      const Grid1D g = build_grid(rng.integer(1, 4), rng.integer(2, 10), 0.0, 1.0);
      const double s1 = rng.uniform(0.0, 1e-2), s2 = rng.uniform(0.0, 1e-2);
      const Eigen::MatrixXd lhs = make_propagator(g, s1).matrix() * make_propagator(g, s2).matrix();
      CHECK((lhs - make_propagator(g, s1 + s2).matrix()).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
  SUBCASE("mass is conserved and the flow is self-adjoint in M") {
    const Grid1D g = build_grid(2, 6, 0.0, 2.0);
    const Eigen::MatrixXd E = make_propagator(g, 0.05).matrix();
    const Eigen::VectorXd m = g.mass_diag();
    CHECK((m.transpose() * E - m.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
    const Eigen::MatrixXd ME = m.asDiagonal() * E;
    CHECK((ME - ME.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
  }
  SUBCASE("backward steps overflow loudly") {
    const Grid1D g = build_grid(1, 64, 0.0, 1.0);
    CHECK_THROWS_AS(make_propagator(g, -10.0), OverflowError);
    CHECK_NOTHROW(make_propagator(g, 10.0));
  }
  SUBCASE("cache returns one entry per step size") {
    const TensorGrid2D g{build_grid(1, 4, 0.0, 1.0), build_grid(2, 3, 0.0, 2.0)};
    PropagatorCache cache(g);
    const PropagatorPair& a = cache.get(0.1);
    const PropagatorPair& b = cache.get(0.1);
    CHECK(a.x.get() == b.x.get());
    cache.get(0.2);
    CHECK(cache.size() == 2);
    CHECK(a.x->size() == g.rows());
    CHECK(a.y->size() == g.cols());
  }
}

TEST_CASE("linear step") {
  const TensorGrid2D g{build_grid(2, 6, 0.0, 1.0), build_grid(1, 9, 0.0, 2.0)};
  PropagatorCache cache(g);
  oracle::Rng rng(5);
  SUBCASE("zero step returns the input") {
    const Eigen::MatrixXd W = rng.matrix(g.rows(), g.cols());
    CHECK((apply_linear_step(W, cache.get(0.0)) - W).cwiseAbs().maxCoeff() <= 1e-13);
  }
  SUBCASE("low-rank path matches the dense path") {
    for (int t = 0; t < 10; ++t) {
      const LowRankState w = oracle::random_state(rng, g, 3);
      const PropagatorPair& p = cache.get(rng.uniform(1e-4, 1e-1));
      const LowRankState out = apply_linear_step(w, p, g);
      CHECK(orthonormality_defect(out.U, g.gx.mass_diag()) <= 1e-10);
      CHECK(orthonormality_defect(out.V, g.gy.mass_diag()) <= 1e-10);
      CHECK(oracle::m_norm(out.densify() - apply_linear_step(w.densify(), p), g) <= 1e-10);
    }
  }
}

TEST_CASE("rank selection") {
  SUBCASE("absolute threshold drops a negligible value") {
    Eigen::VectorXd s(2);
    s << 1.0, 1e-20;
    const Truncation t = select_rank(s, RankPolicy::absolute(1e-8));
    CHECK(t.rank == 1);
    CHECK(t.tail == doctest::Approx(1e-20));
  }
  SUBCASE("fixed rank reports the tail") {
    Eigen::VectorXd s(3);
    s << 3.0, 2.0, 1.0;
    const Truncation t = select_rank(s, RankPolicy::fixed(2));
    CHECK(t.rank == 2);
    CHECK(t.tail == doctest::Approx(1.0));
  }
  SUBCASE("relative threshold") {
    Eigen::VectorXd s(4);
    s << 1.0, 0.5, 0.01, 0.001;
    const Truncation t = select_rank(s, RankPolicy::relative(0.1));
    CHECK(t.eta == doctest::Approx(0.1));
    CHECK(t.rank == 2);
    CHECK(t.tail == doctest::Approx(std::sqrt(0.01 * 0.01 + 0.001 * 0.001)));
  }
  SUBCASE("rank zero is clamped to one") {
    Eigen::VectorXd s(2);
    s << 1e-3, 1e-4;
    CHECK(select_rank(s, RankPolicy::absolute(1.0)).rank == 1);
    CHECK(select_rank(Eigen::VectorXd::Zero(3), RankPolicy::relative(0.1)).rank == 1);
  }
  SUBCASE("cap is enforced and flagged") {
    Eigen::VectorXd s(4);
    s << 1.0, 0.9, 0.8, 0.7;
    const Truncation t = select_rank(s, RankPolicy::absolute(1e-6, 2));
    CHECK(t.rank == 2);
    CHECK(t.clamped);
    CHECK_FALSE(select_rank(s, RankPolicy::absolute(1e-6, 4)).clamped);
  }
  SUBCASE("adaptive choice is minimal") {
    oracle::Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = rng.integer(1, 12);
      Eigen::VectorXd s(n);
      for (int i = 0; i < n; ++i) s[i] = std::pow(10.0, rng.uniform(-8.0, 0.0));
      std::sort(s.data(), s.data() + n, std::greater<>());
      const double eta = std::pow(10.0, rng.uniform(-9.0, 0.0));
      const Truncation t = select_rank(s, RankPolicy::absolute(eta));
      CHECK(s.tail(n - t.rank).norm() <= eta * (1.0 + 1e-14));
      if (t.rank > 1) CHECK(s.tail(n - t.rank + 1).norm() > eta);
    }
  }
}

TEST_CASE("weighted truncated SVD") {
  const TensorGrid2D g{build_grid(1, 7, 0.0, 1.0), build_grid(2, 4, 0.0, 1.0)};
  oracle::Rng rng(23);
  SUBCASE("outer product is rank one") {
    const Eigen::VectorXd u = rng.matrix(g.rows(), 1), v = rng.matrix(g.cols(), 1);
    const Eigen::MatrixXd W = u * v.transpose();
    const LowRankState s = weighted_truncated_svd(W, g, RankPolicy::relative(1e-10));
    CHECK(s.rank() == 1);
    CHECK(oracle::m_norm(s.densify() - W, g) <= 1e-12);
  }
  SUBCASE("separable samples are rank one") {
    const FullState w =
        interpolate_initial(g, [](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y); });
    const LowRankState s = weighted_truncated_svd(w.W, g, RankPolicy::absolute(1e-12));
    CHECK(s.rank() == 1);
    CHECK(oracle::m_norm(s.densify() - w.W, g) <= 1e-12);
  }
  SUBCASE("full rank reconstructs exactly") {
    const TensorGrid2D g8{build_grid(1, 7, 0.0, 1.0), build_grid(1, 7, 0.0, 1.0)};
    const Eigen::MatrixXd W = rng.matrix(8, 8);
    Truncation info;
    const LowRankState s = weighted_truncated_svd(W, g8, RankPolicy::fixed(8), &info);
    CHECK(s.rank() == 8);
    CHECK((s.densify() - W).cwiseAbs().maxCoeff() <= 1e-11);
    CHECK(info.tail <= 1e-12);
  }
  SUBCASE("tail equals the weighted truncation error") {
    for (int t = 0; t < 10; ++t) {
      const Eigen::MatrixXd W = rng.matrix(g.rows(), g.cols());
      Truncation info;
      const LowRankState s = weighted_truncated_svd(W, g, RankPolicy::fixed(rng.integer(1, 6)), &info);
      CHECK(orthonormality_defect(s.U, g.gx.mass_diag()) <= 1e-10);
      CHECK(orthonormality_defect(s.V, g.gy.mass_diag()) <= 1e-10);
      CHECK(std::abs(oracle::m_norm(s.densify() - W, g) - info.tail) <= 1e-10);
    }
  }
}
