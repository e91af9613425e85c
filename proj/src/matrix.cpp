#include "bssdim/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bssdim {

double max_abs(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

namespace {

void require_square_finite(const Matrix& m, const char* what) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw InvalidInput(std::string(what) + ": expected a nonempty square matrix");
    }
    if (!m.allFinite()) {
        throw InvalidInput(std::string(what) + ": non-finite entries");
    }
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(Matrix entries) {
    require_square_finite(entries, "SymmetricMatrix");
    entries_ = 0.5 * (entries + entries.transpose());
}

OrthogonalMatrix::OrthogonalMatrix(Matrix entries) {
    require_square_finite(entries, "OrthogonalMatrix");
    const auto n = entries.cols();
    double defect = (entries.transpose() * entries - Matrix::Identity(n, n))
                        .cwiseAbs()
                        .maxCoeff();
    if (defect > 1e-8) {
        throw InvalidInput("OrthogonalMatrix: columns not orthonormal, defect " +
                           std::to_string(defect));
    }
    entries_ = std::move(entries);
}

void fix_column_signs(Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        Eigen::Index imax = 0;
        m.col(j).cwiseAbs().maxCoeff(&imax);
        if (m(imax, j) < 0.0) m.col(j) = -m.col(j);
    }
}

SymEig sym_eig(const SymmetricMatrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s.entries());
    if (solver.info() != Eigen::Success) {
        throw InvalidInput("sym_eig: eigendecomposition failed");
    }

    // Eigen sorts ascending; flip to descending.
    const auto p = s.dim();
    Vector values(p);
    Matrix vectors(p, p);
    for (int i = 0; i < p; ++i) {
        values(i) = solver.eigenvalues()(p - 1 - i);
        vectors.col(i) = solver.eigenvectors().col(p - 1 - i);
    }
    fix_column_signs(vectors);
    return {std::move(values), OrthogonalMatrix(std::move(vectors))};
}

namespace {

// Shared guard for the symmetric matrix powers: eigenvalues must clear
// eps * lambda_max or the input is treated as rank deficient.
Matrix sym_power(const SymmetricMatrix& s, double eps, double exponent,
                 const char* what) {
    SymEig eig = sym_eig(s);
    const double lambda_max = eig.eigenvalues(0);
    const double lambda_min = eig.eigenvalues(eig.eigenvalues.size() - 1);
    if (lambda_max <= 0.0 || lambda_min <= eps * lambda_max) {
        throw SingularCovariance(std::string(what) +
                                 ": matrix not positive definite (lambda_min " +
                                 std::to_string(lambda_min) + ", lambda_max " +
                                 std::to_string(lambda_max) + ")");
    }
    Vector powered = eig.eigenvalues.array().pow(exponent);
    const Matrix& v = eig.eigenvectors.entries();
    return v * powered.asDiagonal() * v.transpose();
}

}  // namespace

SymmetricMatrix inv_sqrt_sym(const SymmetricMatrix& s, double eps) {
    return SymmetricMatrix(sym_power(s, eps, -0.5, "inv_sqrt_sym"));
}

SymmetricMatrix sqrt_sym(const SymmetricMatrix& s, double eps) {
    return SymmetricMatrix(sym_power(s, eps, 0.5, "sqrt_sym"));
}

namespace {

double off_diagonal_mass(const std::vector<Matrix>& mats) {
    double mass = 0.0;
    for (const Matrix& m : mats) {
        mass += m.squaredNorm() - m.diagonal().squaredNorm();
    }
    return mass;
}

double diagonal_objective(const std::vector<Matrix>& mats) {
    double obj = 0.0;
    for (const Matrix& m : mats) obj += m.diagonal().squaredNorm();
    return obj;
}

// Closed-form Givens angle for one (i, j) pair: the 2x2 subproblem maximizes
//   sum_k (cos2t * u_k + sin2t * v_k)^2,  u_k = M_ii - M_jj, v_k = 2 M_ij,
// whose solution is the principal eigenvector (x, y) of the 2x2 Gram matrix
// of the (u, v) rows; taking x >= 0 picks the inner rotation.
struct PairRotation {
    double c = 1.0;
    double s = 0.0;
};

PairRotation pair_rotation(const std::vector<Matrix>& mats, int i, int j) {
    double g11 = 0.0, g12 = 0.0, g22 = 0.0;
    for (const Matrix& m : mats) {
        const double u = m(i, i) - m(j, j);
        const double v = 2.0 * m(i, j);
        g11 += u * u;
        g12 += u * v;
        g22 += v * v;
    }

    const double half_gap = 0.5 * (g11 - g22);
    const double disc = std::hypot(half_gap, g12);
    if (disc <= 0.0) return {};  // degenerate pair: any angle, keep identity

    const double lambda = 0.5 * (g11 + g22) + disc;
    // Two candidate eigenvector expressions; pick the better-conditioned one.
    double x, y;
    if (std::abs(lambda - g22) >= std::abs(lambda - g11)) {
        x = lambda - g22;
        y = g12;
    } else {
        x = g12;
        y = lambda - g11;
    }
    const double norm = std::hypot(x, y);
    if (norm <= 0.0) return {};
    x /= norm;
    y /= norm;
    if (x < 0.0) {
        x = -x;
        y = -y;
    }

    PairRotation rot;
    rot.c = std::sqrt(0.5 * (1.0 + x));  // x >= 0 keeps c >= sqrt(1/2)
    rot.s = y / (2.0 * rot.c);
    return rot;
}

void apply_rotation(Matrix& m, int i, int j, double c, double s) {
    const Vector ci = m.col(i);
    const Vector cj = m.col(j);
    m.col(i) = c * ci + s * cj;
    m.col(j) = -s * ci + c * cj;
    const Eigen::RowVectorXd ri = m.row(i);
    const Eigen::RowVectorXd rj = m.row(j);
    m.row(i) = c * ri + s * rj;
    m.row(j) = -s * ri + c * rj;
}

}  // namespace

JointDiagResult joint_diagonalize(const std::vector<SymmetricMatrix>& matrices,
                                  double tol, int max_sweeps) {
    if (matrices.empty()) {
        throw InvalidInput("joint_diagonalize: need at least one matrix");
    }
    if (tol <= 0.0) {
        throw InvalidInput("joint_diagonalize: tol must be positive");
    }
    const int p = matrices.front().dim();
    for (const auto& m : matrices) {
        if (m.dim() != p) {
            throw InvalidInput("joint_diagonalize: dimension mismatch");
        }
    }

    std::vector<Matrix> work;
    work.reserve(matrices.size());
    for (const auto& m : matrices) work.push_back(m.entries());

    Matrix v = Matrix::Identity(p, p);
    std::vector<double> objective;
    int sweeps = 0;
    double last_max_sin = 0.0;
    bool converged = (p == 1);

    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        double max_sin = 0.0;
        for (int i = 0; i < p - 1; ++i) {
            for (int j = i + 1; j < p; ++j) {
                PairRotation rot = pair_rotation(work, i, j);
                max_sin = std::max(max_sin, std::abs(rot.s));
                if (std::abs(rot.s) < tol) continue;
                for (Matrix& m : work) apply_rotation(m, i, j, rot.c, rot.s);
                const Vector vi = v.col(i);
                const Vector vj = v.col(j);
                v.col(i) = rot.c * vi + rot.s * vj;
                v.col(j) = -rot.s * vi + rot.c * vj;
            }
        }
        ++sweeps;
        last_max_sin = max_sin;
        objective.push_back(diagonal_objective(work));
        converged = max_sin < tol;
    }

    if (!converged) {
        throw ConvergenceFailure(
            "joint_diagonalize: no convergence within " +
                std::to_string(max_sweeps) + " sweeps",
            off_diagonal_mass(work));
    }

    fix_column_signs(v);
    std::vector<Vector> diagonals;
    diagonals.reserve(work.size());
    for (const Matrix& m : work) diagonals.push_back(m.diagonal());

    JointDiagResult result{OrthogonalMatrix(std::move(v)), std::move(diagonals),
                           sweeps, last_max_sin, std::move(objective)};
    return result;
}

}  // namespace bssdim
