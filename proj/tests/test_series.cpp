#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bssdim/series.hpp"
#include "helpers.hpp"

using namespace bssdim;
using testutil::ar1_series;
using testutil::random_matrix;

TEST_CASE("time series matrix validates shape and values") {
    CHECK_THROWS_AS(TimeSeriesMatrix{Matrix::Zero(1, 1)}, InvalidInput);
    CHECK_THROWS_AS(TimeSeriesMatrix{Matrix::Zero(3, 3)}, InvalidInput);  // T <= p
    Matrix bad = Matrix::Zero(5, 2);
    bad(1, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(TimeSeriesMatrix{bad}, InvalidInput);
    CHECK_NOTHROW(TimeSeriesMatrix{Matrix::Zero(3, 2)});
}

TEST_CASE("center: zero and constant series") {
    TimeSeriesMatrix zero(Matrix::Zero(6, 2));
    Centered c0 = center(zero);
    CHECK(c0.series.values().cwiseAbs().maxCoeff() == 0.0);
    CHECK(c0.mean.cwiseAbs().maxCoeff() == 0.0);

    Matrix constant(4, 2);
    constant.col(0).setConstant(2.5);
    constant.col(1).setConstant(-7.0);
    Centered c1 = center(TimeSeriesMatrix(constant));
    CHECK(c1.series.values().cwiseAbs().maxCoeff() < 1e-14);
    CHECK(c1.mean(0) == doctest::Approx(2.5));
    CHECK(c1.mean(1) == doctest::Approx(-7.0));
}

TEST_CASE("center: known column means on a 5x2 matrix") {
    Matrix x(5, 2);
    x << 1.0, -4.0,
         1.5, -2.0,
         2.0, -1.0,
         1.0, -2.0,
         2.0, -1.0;
    // column means by hand: (1+1.5+2+1+2)/5 = 1.5 and (-4-2-1-2-1)/5 = -2
    Centered c = center(TimeSeriesMatrix(x));
    CHECK(c.mean(0) == doctest::Approx(1.5));
    CHECK(c.mean(1) == doctest::Approx(-2.0));
    CHECK(std::abs(c.series.values().col(0).mean()) < 1e-13);
    CHECK(std::abs(c.series.values().col(1).mean()) < 1e-13);
}

TEST_CASE("autocov: zero series gives zero matrix for any lag") {
    TimeSeriesMatrix zero(Matrix::Zero(10, 2));
    for (int tau : {0, 1, 5, 8}) {
        CHECK(max_abs(autocov(zero, tau).entries()) == 0.0);
    }
}

TEST_CASE("autocov: lag bounds") {
    Rng rng = make_stream(21, {0});
    TimeSeriesMatrix x(random_matrix(10, 2, rng));
    CHECK_THROWS_AS(autocov(x, -1), InvalidLag);
    CHECK_THROWS_AS(autocov(x, 9), InvalidLag);   // tau = T - 1
    CHECK_NOTHROW(autocov(x, 8));                 // tau = T - 2
}

TEST_CASE("autocov: iid noise has near-zero lag-1 autocovariance") {
    Rng rng = make_stream(21, {1});
    TimeSeriesMatrix x(random_matrix(100000, 3, rng));
    SymmetricMatrix ac = autocov(x, 1);
    CHECK(max_abs(ac.entries()) < 0.02);  // standard error ~ 1/sqrt(T)
}

TEST_CASE("autocov: AR(1) matches the closed form") {
    // oracle: gamma_1 = phi / (1 - phi^2) for unit innovation variance
    const double phi = 0.5;
    Rng rng = make_stream(21, {2});
    Matrix x(100000, 1);
    x.col(0) = ar1_series(100000, phi, rng);
    SymmetricMatrix ac = autocov(TimeSeriesMatrix(x), 1);
    CHECK(ac(0, 0) == doctest::Approx(phi / (1.0 - phi * phi)).epsilon(0.045));
    CHECK(std::abs(ac(0, 0) - 0.6667) < 0.03);
}

TEST_CASE("autocov: exactly symmetric and commutes with centering") {
    Rng rng = make_stream(21, {3});
    Matrix raw = random_matrix(200, 4, rng);
    raw.rowwise() += Eigen::RowVector4d(3.0, -1.0, 0.5, 10.0);
    TimeSeriesMatrix x(raw);

    for (int tau : {0, 1, 3}) {
        SymmetricMatrix ac = autocov(x, tau);
        CHECK((ac.entries() - ac.entries().transpose()).cwiseAbs().maxCoeff() == 0.0);

        SymmetricMatrix ac_centered = autocov(center(x).series, tau);
        CHECK((ac.entries() - ac_centered.entries()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("whiten: standardized series has identity covariance") {
    Rng rng = make_stream(21, {4});
    // build a series whose sample covariance is [[2,1],[1,2]]
    Matrix base = random_matrix(500, 2, rng);
    WhiteningResult white_base = whiten(TimeSeriesMatrix(base));
    Matrix target(2, 2);
    target << 2.0, 1.0, 1.0, 2.0;
    Matrix chol = Eigen::LLT<Matrix>(target).matrixL();
    Matrix shaped = white_base.standardized.values() * chol.transpose();

    WhiteningResult w = whiten(TimeSeriesMatrix(shaped));
    SymmetricMatrix cov = autocov(w.standardized, 0);
    CHECK((cov.entries() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6);
    Matrix roots = w.cov_sqrt.entries() * w.cov_inv_sqrt.entries();
    CHECK((roots - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("whiten: idempotent on an already-white series") {
    Rng rng = make_stream(21, {5});
    WhiteningResult first = whiten(TimeSeriesMatrix(random_matrix(300, 3, rng)));
    const Matrix& white = first.standardized.values();

    WhiteningResult again = whiten(first.standardized);
    CHECK((again.standardized.values() - white).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("whiten: per-column scaling does not change the output") {
    Rng rng = make_stream(21, {6});
    WhiteningResult base = whiten(TimeSeriesMatrix(random_matrix(300, 2, rng)));
    const Matrix& white = base.standardized.values();

    Matrix scaled = white;
    scaled.col(0) *= 2.0;
    scaled.col(1) *= 5.0;
    WhiteningResult w = whiten(TimeSeriesMatrix(scaled));
    CHECK((w.standardized.values() - white).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("whiten: equivariance under invertible affine maps (Gram check)") {
    Rng rng = make_stream(21, {7});
    TimeSeriesMatrix x(random_matrix(150, 3, rng));
    WhiteningResult w0 = whiten(x);
    Matrix gram0 = w0.standardized.values() * w0.standardized.values().transpose();

    for (int rep = 0; rep < 5; ++rep) {
        Matrix a = random_matrix(3, 3, rng);
        Eigen::RowVector3d b(1.0, -2.0, 0.25);
        Matrix transformed = x.values() * a.transpose();
        transformed.rowwise() += b;

        WhiteningResult w1 = whiten(TimeSeriesMatrix(transformed));
        Matrix gram1 = w1.standardized.values() * w1.standardized.values().transpose();
        CHECK((gram1 - gram0).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("whiten: singular covariance is rejected") {
    Rng rng = make_stream(21, {8});
    Matrix x = random_matrix(100, 3, rng);
    x.col(2) = x.col(0);  // rank-deficient
    CHECK_THROWS_AS(whiten(TimeSeriesMatrix(x)), SingularCovariance);
}
