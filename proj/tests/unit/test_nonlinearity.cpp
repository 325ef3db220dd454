#include <doctest.h>

#include <cmath>

#include "dlrfem/errors.hpp"
#include "dlrfem/nonlinearity.hpp"
#include "dlrfem/reference_kernels.hpp"
#include "support/oracles.hpp"

using namespace dlrfem;

namespace {

constexpr NonlinearityKind kAllKinds[] = {NonlinearityKind::Classical, NonlinearityKind::ConservativeRSLM,
                                          NonlinearityKind::ConservativeBBLM, NonlinearityKind::Zero,
                                          NonlinearityKind::Identity};

// Pointwise formula written out independently of the library.
Eigen::MatrixXd naive_n(const Eigen::MatrixXd& W, NonlinearityKind kind, const TensorGrid2D& g) {
  const Eigen::Index m = W.rows(), n = W.cols();
  Eigen::MatrixXd f(m, n), one_minus_sq(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = W(i, j);
      f(i, j) = w - w * w * w;
      one_minus_sq(i, j) = 1.0 - w * w;
    }
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(m, n);
  switch (kind) {
    case NonlinearityKind::Classical: return f;
    case NonlinearityKind::Zero: return Eigen::MatrixXd::Zero(m, n);
    case NonlinearityKind::Identity: return W;
    case NonlinearityKind::ConservativeRSLM:
      return f - (oracle::direct_inner(f, ones, g) / oracle::direct_inner(ones, ones, g)) * ones;
    case NonlinearityKind::ConservativeBBLM:
      return f - (oracle::direct_inner(f, ones, g) / oracle::direct_inner(one_minus_sq, ones, g)) * one_minus_sq;
  }
  return f;
}

double scale_of(const Eigen::MatrixXd& X) { return std::max(1.0, X.cwiseAbs().maxCoeff()); }

TensorGrid2D random_grid(oracle::Rng& rng) {
  return {build_grid(rng.integer(1, 3), rng.integer(2, 12), 0.0, rng.uniform(0.5, 2.0)),
          build_grid(rng.integer(1, 3), rng.integer(2, 12), -1.0, rng.uniform(-0.5, 1.0))};
}

// Random state with a rectangular core to exercise r_left != r_right.
LowRankState random_rect_state(oracle::Rng& rng, const TensorGrid2D& g, Eigen::Index r1, Eigen::Index r2,
                               double scale) {
  LowRankState w;
  w.U = oracle::random_orthonormal(rng, g.gx.mass_diag(), r1);
  w.V = oracle::random_orthonormal(rng, g.gy.mass_diag(), r2);
  w.S = rng.matrix(r1, r2, scale);
  return w;
}

}  // namespace

TEST_CASE("dense reaction term") {
  const TensorGrid2D g{build_grid(1, 8, 0.0, 1.0), build_grid(2, 3, 0.0, 1.0)};
  const Eigen::Index m = g.rows(), n = g.cols();
  SUBCASE("classical roots") {
    CHECK(n_dense(Eigen::MatrixXd::Zero(m, n), NonlinearityKind::Classical, g).cwiseAbs().maxCoeff() == 0.0);
    CHECK(n_dense(Eigen::MatrixXd::Ones(m, n), NonlinearityKind::Classical, g).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("RSLM has zero mean") {
    oracle::Rng rng(1);
    const Eigen::MatrixXd W = rng.matrix(m, n, 1.2);
    const Eigen::MatrixXd N = n_dense(W, NonlinearityKind::ConservativeRSLM, g);
    CHECK(std::abs(oracle::direct_inner(N, Eigen::MatrixXd::Ones(m, n), g)) <= 1e-14);
  }
  SUBCASE("BBLM has zero mean") {
    oracle::Rng rng(2);
    const Eigen::MatrixXd W = rng.matrix(m, n, 0.9);
    const Eigen::MatrixXd N = n_dense(W, NonlinearityKind::ConservativeBBLM, g);
    CHECK(std::abs(oracle::direct_inner(N, Eigen::MatrixXd::Ones(m, n), g)) <= 1e-14);
  }
  SUBCASE("BBLM on a constant field") {
    // f(0.5) = 0.375, 1 - 0.25 = 0.75, multiplier 0.375/0.75, so N = 0.375 - 0.5 * 0.75 = 0.
    const Eigen::MatrixXd N = n_dense(Eigen::MatrixXd::Constant(m, n, 0.5), NonlinearityKind::ConservativeBBLM, g);
    CHECK(N.cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("BBLM saturated field is degenerate") {
    Eigen::MatrixXd W = Eigen::MatrixXd::Ones(m, n);
    W.topRows(3) *= -1.0;
    CHECK_THROWS_AS(n_dense(W, NonlinearityKind::ConservativeBBLM, g), DegenerateStateError);
  }
  SUBCASE("test hooks") {
    oracle::Rng rng(3);
    const Eigen::MatrixXd W = rng.matrix(m, n);
    CHECK(n_dense(W, NonlinearityKind::Zero, g).cwiseAbs().maxCoeff() == 0.0);
    CHECK((n_dense(W, NonlinearityKind::Identity, g) - W).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("agrees with the naive formula and the serial reference") {
    oracle::Rng rng(4);
    for (int t = 0; t < 20; ++t) {
      const TensorGrid2D gg = random_grid(rng);
      const Eigen::MatrixXd W = rng.matrix(gg.rows(), gg.cols(), 0.95);
      for (NonlinearityKind kind : kAllKinds) {
        const Eigen::MatrixXd expect = naive_n(W, kind, gg);
        CHECK((n_dense(W, kind, gg) - expect).cwiseAbs().maxCoeff() <= 1e-13);
        CHECK((reference::n_dense(W, kind, gg) - expect).cwiseAbs().maxCoeff() <= 1e-13);
      }
    }
  }
}

TEST_CASE("factored kernels agree with the densified oracle") {
  oracle::Rng rng(99);
  for (int t = 0; t < 40; ++t) {
    const TensorGrid2D g = random_grid(rng);
    const Eigen::Index rmax = std::min<Eigen::Index>({g.rows(), g.cols(), 13});
    const Eigen::Index r1 = rng.integer(1, static_cast<int>(rmax));
    const Eigen::Index r2 = rng.integer(1, static_cast<int>(rmax));
    const LowRankState w = random_rect_state(rng, g, r1, r2, 0.3);
    const Eigen::MatrixXd W = w.densify();
    const Eigen::MatrixXd Vt = rng.matrix(g.cols(), rng.integer(1, 5));
    const Eigen::MatrixXd Ut = rng.matrix(g.rows(), rng.integer(1, 5));
    const Eigen::VectorXd& mx = g.gx.mass_diag();
    const Eigen::VectorXd& my = g.gy.mass_diag();
    for (NonlinearityKind kind : kAllKinds) {
      CAPTURE(to_string(kind));
      const Eigen::MatrixXd N = naive_n(W, kind, g);
      const Eigen::MatrixXd nv = N * my.asDiagonal() * Vt;
      const Eigen::MatrixXd ntu = N.transpose() * mx.asDiagonal() * Ut;
      const Eigen::MatrixXd proj = Ut.transpose() * mx.asDiagonal() * N * my.asDiagonal() * Vt;
      for (KernelMode mode : {KernelMode::Factored, KernelMode::Dense, KernelMode::Auto}) {
        CAPTURE(to_string(mode));
        CHECK((n_times_v(w, Vt, kind, g, mode) - nv).cwiseAbs().maxCoeff() <= 1e-10 * scale_of(nv));
        CHECK((n_transpose_times_u(w, Ut, kind, g, mode) - ntu).cwiseAbs().maxCoeff() <= 1e-10 * scale_of(ntu));
        CHECK((projected_n(Ut, w, Vt, kind, g, mode) - proj).cwiseAbs().maxCoeff() <= 1e-10 * scale_of(proj));
      }
      CHECK((reference::n_times_v(w, Vt, kind, g) - nv).cwiseAbs().maxCoeff() <= 1e-10 * scale_of(nv));
      CHECK((reference::n_transpose_times_u(w, Ut, kind, g) - ntu).cwiseAbs().maxCoeff() <= 1e-10 * scale_of(ntu));
      CHECK((reference::projected_n(Ut, w, Vt, kind, g) - proj).cwiseAbs().maxCoeff() <= 1e-10 * scale_of(proj));
    }
    const NonlinearScalars sc = n_scalars(w, g);
    const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(g.rows(), g.cols());
    const Eigen::MatrixXd sq = W.cwiseProduct(W);
    CHECK(std::abs(sc.mass - oracle::direct_inner(W, ones, g)) <= 1e-12);
    CHECK(std::abs(sc.quadratic - oracle::direct_inner(sq, ones, g)) <= 1e-12);
    CHECK(std::abs(sc.cubic - oracle::direct_inner(sq.cwiseProduct(W), ones, g)) <= 1e-12);
    const NonlinearScalars rs = reference::n_scalars(w, g);
    CHECK(std::abs(rs.cubic - sc.cubic) <= 1e-12);
    const NonlinearScalars ds = n_scalars_dense(W, g);
    CHECK(std::abs(ds.quadratic - sc.quadratic) <= 1e-12);
  }
}

TEST_CASE("factored kernel special cases") {
  const TensorGrid2D g{build_grid(1, 10, 0.0, 1.0), build_grid(1, 12, 0.0, 1.0)};
  const Eigen::VectorXd& mx = g.gx.mass_diag();
  const Eigen::VectorXd& my = g.gy.mass_diag();
  oracle::Rng rng(8);
  SUBCASE("constant one field") {
    LowRankState w;
    w.U = Eigen::MatrixXd::Ones(g.rows(), 1);
    w.V = Eigen::MatrixXd::Ones(g.cols(), 1);
    w.S = Eigen::MatrixXd::Ones(1, 1);
    const Eigen::MatrixXd Vt = rng.matrix(g.cols(), 3), Ut = rng.matrix(g.rows(), 3);
    CHECK(n_times_v(w, Vt, NonlinearityKind::Classical, g).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(n_transpose_times_u(w, Ut, NonlinearityKind::Classical, g).cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("zero core") {
    LowRankState w = oracle::random_state(rng, g, 3);
    w.S.setZero();
    const Eigen::MatrixXd Vt = rng.matrix(g.cols(), 2), Ut = rng.matrix(g.rows(), 2);
    CHECK(n_times_v(w, Vt, NonlinearityKind::Classical, g).cwiseAbs().maxCoeff() == 0.0);
    CHECK(projected_n(Ut, w, Vt, NonlinearityKind::Classical, g).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("transposed kernel on a symmetric state") {
    const TensorGrid2D sq{build_grid(2, 5, 0.0, 1.0), build_grid(2, 5, 0.0, 1.0)};
    LowRankState w = oracle::random_state(rng, sq, 4, 0.5);
    w.V = w.U;
    w.S = 0.5 * (w.S + w.S.transpose()).eval();
    const Eigen::MatrixXd T = rng.matrix(sq.rows(), 3);
    for (NonlinearityKind kind : kAllKinds) {
      const Eigen::MatrixXd a = n_times_v(w, T, kind, sq), b = n_transpose_times_u(w, T, kind, sq);
      CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * scale_of(a));
    }
  }
  SUBCASE("conservative projections vanish on the constant direction") {
    const LowRankState w = oracle::random_state(rng, g, 3, 0.4);
    Eigen::MatrixXd Ubar(g.rows(), 3), Vbar(g.cols(), 2);
    Ubar.col(0) = Eigen::VectorXd::Ones(g.rows()) / std::sqrt(mx.sum());
    Ubar.rightCols(2) = rng.matrix(g.rows(), 2);
    Vbar.col(0) = Eigen::VectorXd::Ones(g.cols()) / std::sqrt(my.sum());
    Vbar.col(1) = rng.matrix(g.cols(), 1);
    for (NonlinearityKind kind : {NonlinearityKind::ConservativeRSLM, NonlinearityKind::ConservativeBBLM}) {
      const Eigen::MatrixXd P = projected_n(Ubar, w, Vbar, kind, g);
      CHECK(std::abs(P(0, 0)) <= 1e-12);
      CHECK(std::abs(P(1, 0)) > 1e-6);
    }
  }
  SUBCASE("scalars of a constant field") {
    const TensorGrid2D unit{build_grid(1, 4, 0.0, 1.0), build_grid(1, 4, 0.0, 1.0)};
    LowRankState w;
    w.U = Eigen::MatrixXd::Ones(5, 1);
    w.V = Eigen::MatrixXd::Ones(5, 1);
    w.S = Eigen::MatrixXd::Constant(1, 1, 0.7);
    const NonlinearScalars sc = n_scalars(w, unit);
    CHECK(sc.mass == doctest::Approx(0.7));
    CHECK(sc.quadratic == doctest::Approx(0.49));
    CHECK(sc.cubic == doctest::Approx(0.343));
    w.S.setZero();
    const NonlinearScalars z = n_scalars(w, unit);
    CHECK(z.mass == 0.0);
    CHECK(z.cubic == 0.0);
  }
  SUBCASE("factored BBLM on a saturated field is degenerate") {
    LowRankState w;
    w.U = Eigen::MatrixXd::Ones(g.rows(), 1);
    w.V = Eigen::MatrixXd::Ones(g.cols(), 1);
    w.S = Eigen::MatrixXd::Ones(1, 1);
    CHECK_THROWS_AS(n_times_v(w, w.V, NonlinearityKind::ConservativeBBLM, g), DegenerateStateError);
  }
}

TEST_CASE("helpers") {
  Eigen::MatrixXd W(2, 3);
  W << 0.5, -1.0, 1.0 + 1e-9, -1.2, 0.0, 0.99;
  CHECK(overshoot_count(W) == 2);
  for (NonlinearityKind kind : kAllKinds) CHECK(nonlinearity_from_string(to_string(kind)) == kind);
  for (KernelMode mode : {KernelMode::Factored, KernelMode::Dense, KernelMode::Auto})
    CHECK(kernel_mode_from_string(to_string(mode)) == mode);
  CHECK_THROWS_AS(nonlinearity_from_string("quartic"), ConfigError);
  CHECK_THROWS_AS(kernel_mode_from_string("sparse"), ConfigError);
}
