#pragma once

#include "bssdim/matrix.hpp"

namespace bssdim {

// T x p multivariate time series; rows are time points, columns channels.
// Requires T >= 2, p >= 1, T > p and finite values.
class TimeSeriesMatrix {
public:
    explicit TimeSeriesMatrix(Matrix values);

    int length() const { return static_cast<int>(values_.rows()); }  // T
    int dim() const { return static_cast<int>(values_.cols()); }     // p
    const Matrix& values() const { return values_; }

private:
    Matrix values_;
};

struct Centered {
    TimeSeriesMatrix series;  // column means removed
    Vector mean;              // the removed column-mean vector
};

Centered center(const TimeSeriesMatrix& x);

// Lag-tau sample autocovariance, symmetrized:
//   (1/2) (A + A^T),  A = (1/(T-tau)) sum_t (x_t - xbar)(x_{t+tau} - xbar)^T
// with a single global mean. tau = 0 gives the sample covariance.
SymmetricMatrix autocov(const TimeSeriesMatrix& x, int tau);

struct WhiteningResult {
    TimeSeriesMatrix standardized;  // (X - mean) * cov_inv_sqrt
    Vector mean;
    SymmetricMatrix cov_inv_sqrt;
    SymmetricMatrix cov_sqrt;
};

// Whitens the series by the symmetric inverse root of its sample covariance,
// so the standardized series has identity sample covariance.
WhiteningResult whiten(const TimeSeriesMatrix& x, double eps = 1e-10);

}  // namespace bssdim
