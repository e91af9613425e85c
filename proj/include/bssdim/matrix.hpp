#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bssdim/errors.hpp"

namespace bssdim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Largest absolute entry; 0 for empty matrices.
double max_abs(const Matrix& m);

// Dense symmetric p x p matrix. Construction symmetrizes the input as
// (A + A^T)/2, so sample autocovariances can be fed in directly; the stored
// entries are exactly symmetric. Non-finite or non-square input is rejected.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(Matrix entries);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

private:
    Matrix entries_;
};

// p x p matrix with orthonormal columns: ||V^T V - I||_max <= 1e-8 is
// checked on construction.
class OrthogonalMatrix {
public:
    explicit OrthogonalMatrix(Matrix entries);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }
    double operator()(int i, int j) const { return entries_(i, j); }

private:
    Matrix entries_;
};

// Flips column signs in place so the largest-magnitude entry of each column
// is positive. Removes the sign indeterminacy of eigenvectors and rotations.
void fix_column_signs(Matrix& m);

struct SymEig {
    Vector eigenvalues;           // sorted descending
    OrthogonalMatrix eigenvectors;  // columns match eigenvalue order, sign-fixed
};

// Eigendecomposition S = V diag(lambda) V^T.
SymEig sym_eig(const SymmetricMatrix& s);

// Unique symmetric inverse square root R with R * S * R = I. Throws
// SingularCovariance when the smallest eigenvalue is <= eps * largest.
SymmetricMatrix inv_sqrt_sym(const SymmetricMatrix& s, double eps = 1e-10);

// Symmetric square root, same positive-definiteness guard as inv_sqrt_sym.
SymmetricMatrix sqrt_sym(const SymmetricMatrix& s, double eps = 1e-10);

struct JointDiagResult {
    OrthogonalMatrix rotation;       // V
    std::vector<Vector> diagonals;   // diagonals[k] = diag(V^T M_k V)
    int sweeps = 0;                  // sweeps actually performed
    double last_max_sin = 0.0;       // largest |sin theta| in the final sweep
    std::vector<double> objective;   // sum of squared diagonals after each sweep
};

// Orthogonal joint diagonalization of several symmetric matrices by cyclic
// Jacobi rotations. Each pair rotation uses the closed-form angle that
// maximizes the summed squared diagonals of the 2x2 subproblems across all
// input matrices. Converged once every rotation in a full sweep has
// |sin theta| < tol; otherwise throws ConvergenceFailure after max_sweeps,
// carrying the remaining off-diagonal Frobenius mass.
JointDiagResult joint_diagonalize(const std::vector<SymmetricMatrix>& matrices,
                                  double tol = 1e-10, int max_sweeps = 100);

}  // namespace bssdim
