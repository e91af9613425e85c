#include "bssdim/series.hpp"

namespace bssdim {

TimeSeriesMatrix::TimeSeriesMatrix(Matrix values) {
    const auto t = values.rows();
    const auto p = values.cols();
    if (t < 2 || p < 1) {
        throw InvalidInput("TimeSeriesMatrix: need at least 2 time points and 1 channel");
    }
    if (t <= p) {
        throw InvalidInput("TimeSeriesMatrix: need more time points than channels, got " +
                           std::to_string(t) + " x " + std::to_string(p));
    }
    if (!values.allFinite()) {
        throw InvalidInput("TimeSeriesMatrix: non-finite values");
    }
    values_ = std::move(values);
}

Centered center(const TimeSeriesMatrix& x) {
    Vector mean = x.values().colwise().mean();
    Matrix centered = x.values().rowwise() - mean.transpose();
    return {TimeSeriesMatrix(std::move(centered)), std::move(mean)};
}

SymmetricMatrix autocov(const TimeSeriesMatrix& x, int tau) {
    const int t = x.length();
    if (tau < 0 || tau > t - 2) {
        throw InvalidLag("autocov: lag " + std::to_string(tau) +
                         " outside [0, " + std::to_string(t - 2) + "]");
    }
    Vector mean = x.values().colwise().mean();
    Matrix centered = x.values().rowwise() - mean.transpose();
    const int n = t - tau;
    Matrix raw = centered.topRows(n).transpose() * centered.bottomRows(n) /
                 static_cast<double>(n);
    return SymmetricMatrix(std::move(raw));
}

WhiteningResult whiten(const TimeSeriesMatrix& x, double eps) {
    Centered c = center(x);
    SymmetricMatrix cov = autocov(x, 0);
    SymmetricMatrix cov_inv_sqrt = inv_sqrt_sym(cov, eps);
    SymmetricMatrix cov_sqrt = sqrt_sym(cov, eps);
    Matrix standardized = c.series.values() * cov_inv_sqrt.entries();
    return {TimeSeriesMatrix(std::move(standardized)), std::move(c.mean),
            std::move(cov_inv_sqrt), std::move(cov_sqrt)};
}

}  // namespace bssdim
