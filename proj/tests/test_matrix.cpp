#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bssdim/matrix.hpp"
#include "helpers.hpp"

using namespace bssdim;
using testutil::random_matrix;
using testutil::random_orthogonal;
using testutil::random_spd;
using testutil::random_symmetric;
using testutil::signed_permutation_distance;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const auto r = rows.size();
    const auto c = rows.begin()->size();
    Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

}  // namespace

TEST_CASE("symmetric matrix symmetrizes and validates input") {
    Matrix a = from_rows({{1.0, 2.0}, {4.0, 3.0}});
    SymmetricMatrix s(a);
    CHECK(s(0, 1) == doctest::Approx(3.0));
    CHECK(s(1, 0) == doctest::Approx(3.0));

    Matrix bad = a;
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(SymmetricMatrix{bad}, InvalidInput);
    CHECK_THROWS_AS(SymmetricMatrix{Matrix(2, 3)}, InvalidInput);
}

TEST_CASE("orthogonal matrix rejects non-orthonormal columns") {
    CHECK_NOTHROW(OrthogonalMatrix{Matrix::Identity(4, 4)});
    Matrix skewed = Matrix::Identity(3, 3);
    skewed(0, 1) = 0.1;
    CHECK_THROWS_AS(OrthogonalMatrix{skewed}, InvalidInput);
}

TEST_CASE("sym_eig identity") {
    SymEig eig = sym_eig(SymmetricMatrix(Matrix::Identity(3, 3)));
    for (int i = 0; i < 3; ++i) CHECK(eig.eigenvalues(i) == doctest::Approx(1.0));
    Matrix vtv = eig.eigenvectors.entries().transpose() * eig.eigenvectors.entries();
    CHECK((vtv - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sym_eig diagonal case") {
    Matrix d = from_rows({{4.0, 0.0}, {0.0, 1.0}});
    SymEig eig = sym_eig(SymmetricMatrix(d));
    CHECK(eig.eigenvalues(0) == doctest::Approx(4.0));
    CHECK(eig.eigenvalues(1) == doctest::Approx(1.0));
    CHECK((eig.eigenvectors.entries() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("sym_eig 2x2 verified by direct multiplication") {
    Matrix a = from_rows({{2.0, 1.0}, {1.0, 2.0}});
    SymmetricMatrix s(a);
    SymEig eig = sym_eig(s);
    CHECK(eig.eigenvalues(0) == doctest::Approx(3.0));
    CHECK(eig.eigenvalues(1) == doctest::Approx(1.0));

    // oracle: S v = lambda v, checked by multiplying out
    for (int i = 0; i < 2; ++i) {
        Vector v = eig.eigenvectors.entries().col(i);
        Vector residual = a * v - eig.eigenvalues(i) * v;
        CHECK(residual.cwiseAbs().maxCoeff() < 1e-12);
    }

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(eig.eigenvectors(0, 0)) == doctest::Approx(inv_sqrt2));
    CHECK(std::abs(eig.eigenvectors(1, 1)) == doctest::Approx(inv_sqrt2));
}

TEST_CASE("sym_eig sign convention and descending order on random input") {
    Rng rng = make_stream(11, {1});
    for (int rep = 0; rep < 20; ++rep) {
        int p = 2 + static_cast<int>(rng() % 19);  // up to 20
        SymmetricMatrix s = random_symmetric(p, rng);
        SymEig eig = sym_eig(s);

        for (int i = 0; i + 1 < p; ++i) CHECK(eig.eigenvalues(i) >= eig.eigenvalues(i + 1));

        const Matrix& v = eig.eigenvectors.entries();
        for (int j = 0; j < p; ++j) {
            Eigen::Index imax = 0;
            v.col(j).cwiseAbs().maxCoeff(&imax);
            CHECK(v(imax, j) > 0.0);
        }

        // reconstruction invariant
        Matrix rec = v * eig.eigenvalues.asDiagonal() * v.transpose();
        double tol = 1e-8 * (1.0 + max_abs(s.entries()));
        CHECK((rec - s.entries()).cwiseAbs().maxCoeff() < tol);
    }
}

TEST_CASE("inv_sqrt_sym identity and diagonal cases") {
    SymmetricMatrix r1 = inv_sqrt_sym(SymmetricMatrix(Matrix::Identity(4, 4)), 1e-10);
    CHECK((r1.entries() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

    SymmetricMatrix r2 = inv_sqrt_sym(SymmetricMatrix(from_rows({{4.0, 0.0}, {0.0, 1.0}})));
    CHECK(r2(0, 0) == doctest::Approx(0.5));
    CHECK(r2(1, 1) == doctest::Approx(1.0));
    CHECK(r2(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("inv_sqrt_sym satisfies R S R = I") {
    SymmetricMatrix s(from_rows({{2.0, 1.0}, {1.0, 2.0}}));
    SymmetricMatrix r = inv_sqrt_sym(s);
    Matrix prod = r.entries() * s.entries() * r.entries();
    CHECK((prod - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);

    Rng rng = make_stream(11, {2});
    for (int rep = 0; rep < 20; ++rep) {
        int p = 1 + static_cast<int>(rng() % 12);
        SymmetricMatrix spd = random_spd(p, rng);
        SymmetricMatrix rr = inv_sqrt_sym(spd);
        Matrix check = rr.entries() * spd.entries() * rr.entries();
        CHECK((check - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((rr.entries() - rr.entries().transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("inv_sqrt_sym rejects rank-deficient input") {
    Matrix near_singular = from_rows({{1.0, 0.0}, {0.0, 1e-14}});
    CHECK_THROWS_AS(inv_sqrt_sym(SymmetricMatrix(near_singular), 1e-10), SingularCovariance);

    Matrix indefinite = from_rows({{1.0, 0.0}, {0.0, -1.0}});
    CHECK_THROWS_AS(inv_sqrt_sym(SymmetricMatrix(indefinite), 1e-10), SingularCovariance);
}

TEST_CASE("sqrt_sym inverts inv_sqrt_sym") {
    Rng rng = make_stream(11, {3});
    SymmetricMatrix spd = random_spd(5, rng);
    Matrix prod = sqrt_sym(spd).entries() * inv_sqrt_sym(spd).entries();
    CHECK((prod - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("joint_diagonalize keeps already-diagonal input") {
    std::vector<SymmetricMatrix> mats{
        SymmetricMatrix(from_rows({{3.0, 0.0}, {0.0, 1.0}})),
        SymmetricMatrix(from_rows({{2.0, 0.0}, {0.0, 5.0}}))};
    JointDiagResult jd = joint_diagonalize(mats);

    CHECK(signed_permutation_distance(jd.rotation.entries(), Matrix::Identity(2, 2)) <
          1e-10);
    // diagonals unchanged as sets
    std::vector<double> d0{jd.diagonals[0](0), jd.diagonals[0](1)};
    std::sort(d0.begin(), d0.end());
    CHECK(d0[0] == doctest::Approx(1.0));
    CHECK(d0[1] == doctest::Approx(3.0));
}

TEST_CASE("joint_diagonalize recovers a planted rotation") {
    Rng rng = make_stream(11, {4});
    const int p = 5;
    Matrix r = random_orthogonal(p, rng);
    Vector d1(p), d2(p);
    d1 << 5.0, 4.0, 3.0, 2.0, 1.0;
    d2 << 1.0, 3.0, 2.0, 5.0, 4.0;  // distinct pair pattern

    std::vector<SymmetricMatrix> mats{
        SymmetricMatrix(r * d1.asDiagonal() * r.transpose()),
        SymmetricMatrix(r * d2.asDiagonal() * r.transpose())};
    JointDiagResult jd = joint_diagonalize(mats);

    CHECK(signed_permutation_distance(jd.rotation.entries(), r) < 1e-7);
}

TEST_CASE("joint_diagonalize of a single matrix matches sym_eig") {
    Rng rng = make_stream(11, {5});
    SymmetricMatrix s = random_symmetric(4, rng);

    JointDiagResult jd = joint_diagonalize({s});
    SymEig eig = sym_eig(s);

    CHECK(signed_permutation_distance(jd.rotation.entries(), eig.eigenvectors.entries()) <
          1e-8);

    std::vector<double> diag(jd.diagonals[0].data(), jd.diagonals[0].data() + 4);
    std::sort(diag.begin(), diag.end(), std::greater<>());
    for (int i = 0; i < 4; ++i) CHECK(diag[i] == doctest::Approx(eig.eigenvalues(i)));
}

TEST_CASE("joint_diagonalize drives commuting input below 1e-8 off-diagonal mass") {
    Rng rng = make_stream(11, {6});
    for (int rep = 0; rep < 10; ++rep) {
        int p = 2 + static_cast<int>(rng() % 7);
        Matrix r = random_orthogonal(p, rng);
        std::vector<SymmetricMatrix> mats;
        std::uniform_real_distribution<double> unif(-3.0, 3.0);
        for (int k = 0; k < 4; ++k) {
            Vector d(p);
            for (int i = 0; i < p; ++i) d(i) = unif(rng);
            mats.push_back(SymmetricMatrix(r * d.asDiagonal() * r.transpose()));
        }
        JointDiagResult jd = joint_diagonalize(mats);

        const Matrix& v = jd.rotation.entries();
        double off_mass = 0.0;
        for (const auto& m : mats) {
            Matrix rotated = v.transpose() * m.entries() * v;
            off_mass += rotated.squaredNorm() - rotated.diagonal().squaredNorm();
        }
        CHECK(off_mass < 1e-8);
    }
}

TEST_CASE("joint_diagonalize objective is non-decreasing across sweeps") {
    Rng rng = make_stream(11, {7});
    std::vector<SymmetricMatrix> mats;
    for (int k = 0; k < 6; ++k) mats.push_back(random_symmetric(6, rng));

    JointDiagResult jd = joint_diagonalize(mats);
    REQUIRE(!jd.objective.empty());
    for (std::size_t i = 1; i < jd.objective.size(); ++i) {
        CHECK(jd.objective[i] >= jd.objective[i - 1] - 1e-10);
    }
    CHECK(jd.last_max_sin < 1e-10);
}

TEST_CASE("joint_diagonalize returns an orthogonal rotation") {
    Rng rng = make_stream(11, {8});
    std::vector<SymmetricMatrix> mats;
    for (int k = 0; k < 3; ++k) mats.push_back(random_symmetric(8, rng));
    JointDiagResult jd = joint_diagonalize(mats);
    const Matrix& v = jd.rotation.entries();
    CHECK((v.transpose() * v - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("joint_diagonalize input validation") {
    CHECK_THROWS_AS(joint_diagonalize({}), InvalidInput);
    std::vector<SymmetricMatrix> mismatched{SymmetricMatrix(Matrix::Identity(2, 2)),
                                            SymmetricMatrix(Matrix::Identity(3, 3))};
    CHECK_THROWS_AS(joint_diagonalize(mismatched), InvalidInput);
    CHECK_THROWS_AS(joint_diagonalize({SymmetricMatrix(Matrix::Identity(2, 2))}, 0.0, 10),
                    InvalidInput);
}

TEST_CASE("joint_diagonalize reports non-convergence with the remaining mass") {
    Rng rng = make_stream(11, {9});
    std::vector<SymmetricMatrix> mats;
    for (int k = 0; k < 8; ++k) mats.push_back(random_symmetric(6, rng));

    try {
        joint_diagonalize(mats, 1e-10, 1);
        FAIL("expected ConvergenceFailure");
    } catch (const ConvergenceFailure& e) {
        CHECK(e.off_diagonal_mass() > 0.0);
    }
}
