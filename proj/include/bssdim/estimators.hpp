#pragma once

#include <string>
#include <vector>

#include "bssdim/series.hpp"

namespace bssdim {

std::vector<int> default_sobi_lags();  // {1, ..., 12}

// Which estimator drives a fit: AMUSE with a single lag or SOBI with a lag
// set.
struct MethodSpec {
    enum class Kind { Amuse, Sobi };

    Kind kind = Kind::Sobi;
    std::vector<int> lags = default_sobi_lags();

    static MethodSpec amuse(int lag = 1) { return {Kind::Amuse, {lag}}; }
    static MethodSpec sobi(std::vector<int> lags = default_sobi_lags()) {
        return {Kind::Sobi, std::move(lags)};
    }

    std::string name() const { return kind == Kind::Amuse ? "amuse" : "sobi"; }
};

// Numerical knobs shared by the estimators.
struct FitOptions {
    double eps = 1e-10;     // relative eigenvalue floor for whitening
    double tol = 1e-10;     // |sin theta| convergence threshold, SOBI
    int max_sweeps = 100;   // Jacobi sweep cap, SOBI
};

struct BssSolution {
    Matrix unmixing;           // W = U^T Sigma0^{-1/2}
    WhiteningResult whitening;
    OrthogonalMatrix rotation; // U, columns ordered with the components
    std::vector<int> lags;
    Matrix lambda;             // p x |lags|; lambda(i,k) = [U^T Sigma_{lags[k]} U]_ii
    Vector diagnostics;        // d_i = sum_k lambda(i,k)^2, sorted descending
    TimeSeriesMatrix sources;  // rows z_t = W (x_t - mean)
};

// AMUSE: eigendecomposition of the lag-tau0 autocovariance of the whitened
// series; components ordered by descending squared eigenvalue.
BssSolution amuse(const TimeSeriesMatrix& x, int tau0 = 1, const FitOptions& opts = {});

// SOBI: joint diagonalization of the lagged autocovariances of the whitened
// series; components ordered by descending sum of squared pseudo-eigenvalues.
BssSolution sobi(const TimeSeriesMatrix& x,
                 const std::vector<int>& lags = default_sobi_lags(),
                 const FitOptions& opts = {});

BssSolution fit(const TimeSeriesMatrix& x, const MethodSpec& method,
                const FitOptions& opts = {});

struct NoiseStatistic {
    int d;         // candidate signal dimension
    double value;  // running mean of the last p - d diagnostics
};

// Mean of the smallest p - d component diagnostics. Requires 0 <= d <= p-1;
// d = p has no statistic (the hypothesis is vacuous).
NoiseStatistic noise_statistic(const BssSolution& solution, int d);

// Same arithmetic on a bare descending diagnostics vector.
NoiseStatistic noise_statistic(const Vector& diagnostics, int d);

}  // namespace bssdim
