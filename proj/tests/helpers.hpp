#pragma once

// Shared generators and matchers for the test suites. Everything here is
// independent of the library internals it checks: plain loops and direct
// linear algebra only.

#include <cmath>
#include <limits>
#include <vector>

#include "bssdim/matrix.hpp"
#include "bssdim/rng.hpp"

namespace testutil {

using bssdim::Matrix;
using bssdim::Rng;
using bssdim::Vector;

inline Matrix random_matrix(int rows, int cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
    }
    return m;
}

inline bssdim::SymmetricMatrix random_symmetric(int p, Rng& rng) {
    return bssdim::SymmetricMatrix(random_matrix(p, p, rng));
}

inline Matrix random_orthogonal(int p, Rng& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(p, p, rng));
    Matrix q = qr.householderQ();
    // normalize the sign ambiguity of the QR factor
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < p; ++j) {
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    }
    return q;
}

inline bssdim::SymmetricMatrix random_spd(int p, Rng& rng, double lo = 0.5,
                                          double hi = 5.0) {
    Matrix q = random_orthogonal(p, rng);
    std::uniform_real_distribution<double> unif(lo, hi);
    Vector d(p);
    for (int i = 0; i < p; ++i) d(i) = unif(rng);
    return bssdim::SymmetricMatrix(q * d.asDiagonal() * q.transpose());
}

// Greedy column matching of a against b up to sign and permutation; returns
// the largest entry deviation after the match, or infinity when the match is
// not a bijection.
inline double signed_permutation_distance(const Matrix& a, const Matrix& b) {
    const int p = static_cast<int>(a.cols());
    if (b.cols() != p || a.rows() != b.rows()) {
        return std::numeric_limits<double>::infinity();
    }
    std::vector<bool> used(static_cast<std::size_t>(p), false);
    double worst = 0.0;
    for (int j = 0; j < p; ++j) {
        int best = -1;
        double best_dot = -1.0;
        for (int k = 0; k < p; ++k) {
            if (used[static_cast<std::size_t>(k)]) continue;
            double dot = std::abs(a.col(j).dot(b.col(k)));
            if (dot > best_dot) {
                best_dot = dot;
                best = k;
            }
        }
        if (best < 0) return std::numeric_limits<double>::infinity();
        used[static_cast<std::size_t>(best)] = true;
        double sign = a.col(j).dot(b.col(best)) >= 0.0 ? 1.0 : -1.0;
        worst = std::max(worst, (a.col(j) - sign * b.col(best)).cwiseAbs().maxCoeff());
    }
    return worst;
}

// AR(1) with unit innovation variance, zero initial state, simple burn-in.
inline Vector ar1_series(int length, double phi, Rng& rng, int burnin = 500) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double x = 0.0;
    for (int t = 0; t < burnin; ++t) x = phi * x + normal(rng);
    Vector out(length);
    for (int t = 0; t < length; ++t) {
        x = phi * x + normal(rng);
        out(t) = x;
    }
    return out;
}

inline double sample_correlation(const Vector& a, const Vector& b) {
    const double ma = a.mean();
    const double mb = b.mean();
    Vector ca = a.array() - ma;
    Vector cb = b.array() - mb;
    return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
}

}  // namespace testutil
