#include "bssdim/estimators.hpp"

#include <algorithm>
#include <numeric>

namespace bssdim {

std::vector<int> default_sobi_lags() {
    std::vector<int> lags(12);
    std::iota(lags.begin(), lags.end(), 1);
    return lags;
}

namespace {

void check_lag(int lag, int t) {
    if (lag < 1 || lag > t - 2) {
        throw InvalidLag("lag " + std::to_string(lag) + " outside [1, " +
                         std::to_string(t - 2) + "]");
    }
}

// Descending order of the diagnostics, ties broken by original column index.
std::vector<int> diagnostic_order(const Vector& diagnostics) {
    std::vector<int> order(diagnostics.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return diagnostics(a) > diagnostics(b);
    });
    return order;
}

BssSolution assemble(WhiteningResult whitening, Matrix rotation,
                     std::vector<int> lags, Matrix lambda) {
    const int p = static_cast<int>(rotation.rows());
    Vector diagnostics = lambda.array().square().rowwise().sum();

    std::vector<int> order = diagnostic_order(diagnostics);
    Matrix rotation_sorted(p, p);
    Matrix lambda_sorted(p, lambda.cols());
    Vector diagnostics_sorted(p);
    for (int i = 0; i < p; ++i) {
        rotation_sorted.col(i) = rotation.col(order[i]);
        lambda_sorted.row(i) = lambda.row(order[i]);
        diagnostics_sorted(i) = diagnostics(order[i]);
    }

    Matrix unmixing = rotation_sorted.transpose() * whitening.cov_inv_sqrt.entries();
    Matrix sources = whitening.standardized.values() * rotation_sorted;

    return {std::move(unmixing),
            std::move(whitening),
            OrthogonalMatrix(std::move(rotation_sorted)),
            std::move(lags),
            std::move(lambda_sorted),
            std::move(diagnostics_sorted),
            TimeSeriesMatrix(std::move(sources))};
}

}  // namespace

BssSolution amuse(const TimeSeriesMatrix& x, int tau0, const FitOptions& opts) {
    check_lag(tau0, x.length());
    WhiteningResult w = whiten(x, opts.eps);
    SymEig eig = sym_eig(autocov(w.standardized, tau0));
    return assemble(std::move(w), eig.eigenvectors.entries(), {tau0},
                    eig.eigenvalues);
}

BssSolution sobi(const TimeSeriesMatrix& x, const std::vector<int>& lags,
                 const FitOptions& opts) {
    if (lags.empty()) {
        throw InvalidLag("sobi: empty lag set");
    }
    for (std::size_t a = 0; a < lags.size(); ++a) {
        check_lag(lags[a], x.length());
        for (std::size_t b = a + 1; b < lags.size(); ++b) {
            if (lags[a] == lags[b]) {
                throw InvalidLag("sobi: duplicate lag " + std::to_string(lags[a]));
            }
        }
    }

    WhiteningResult w = whiten(x, opts.eps);
    std::vector<SymmetricMatrix> autocovs;
    autocovs.reserve(lags.size());
    for (int lag : lags) autocovs.push_back(autocov(w.standardized, lag));

    JointDiagResult jd = joint_diagonalize(autocovs, opts.tol, opts.max_sweeps);

    const int p = x.dim();
    Matrix lambda(p, static_cast<Eigen::Index>(lags.size()));
    for (std::size_t k = 0; k < lags.size(); ++k) {
        lambda.col(static_cast<Eigen::Index>(k)) = jd.diagonals[k];
    }
    return assemble(std::move(w), jd.rotation.entries(), lags, std::move(lambda));
}

BssSolution fit(const TimeSeriesMatrix& x, const MethodSpec& method,
                const FitOptions& opts) {
    if (method.kind == MethodSpec::Kind::Amuse) {
        if (method.lags.size() != 1) {
            throw InvalidLag("amuse: expected exactly one lag");
        }
        return amuse(x, method.lags.front(), opts);
    }
    return sobi(x, method.lags, opts);
}

NoiseStatistic noise_statistic(const Vector& diagnostics, int d) {
    const int p = static_cast<int>(diagnostics.size());
    if (d < 0 || d >= p) {
        throw InvalidDimension("noise_statistic: d " + std::to_string(d) +
                               " outside [0, " + std::to_string(p - 1) + "]");
    }
    return {d, diagnostics.tail(p - d).mean()};
}

NoiseStatistic noise_statistic(const BssSolution& solution, int d) {
    return noise_statistic(solution.diagnostics, d);
}

}  // namespace bssdim
