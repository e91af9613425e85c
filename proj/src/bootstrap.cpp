#include "bssdim/bootstrap.hpp"

#include <atomic>

#include "bssdim/parallel.hpp"

namespace bssdim {

std::string to_string(BootstrapStrategy s) {
    switch (s) {
        case BootstrapStrategy::Parametric: return "parametric";
        case BootstrapStrategy::NonparPooled: return "non-parametric I";
        case BootstrapStrategy::NonparComponentwise: return "non-parametric II";
        case BootstrapStrategy::NonparJointRows: return "non-parametric III";
    }
    throw InvalidInput("unknown bootstrap strategy");
}

BootstrapStrategy strategy_from_string(std::string_view name) {
    if (name == "parametric") return BootstrapStrategy::Parametric;
    if (name == "np1" || name == "non-parametric I") return BootstrapStrategy::NonparPooled;
    if (name == "np2" || name == "non-parametric II") return BootstrapStrategy::NonparComponentwise;
    if (name == "np3" || name == "non-parametric III") return BootstrapStrategy::NonparJointRows;
    throw InvalidInput("unknown bootstrap strategy '" + std::string(name) + "'");
}

Matrix resample_noise(const Matrix& z_noise, BootstrapStrategy strategy, Rng& rng) {
    const Eigen::Index t = z_noise.rows();
    const Eigen::Index m = z_noise.cols();
    if (m < 1) {
        throw InvalidDimension("resample_noise: empty noise block");
    }
    if (t < 2) {
        throw InvalidInput("resample_noise: need at least 2 time points");
    }

    Matrix out(t, m);
    switch (strategy) {
        case BootstrapStrategy::Parametric: {
            std::normal_distribution<double> normal(0.0, 1.0);
            for (Eigen::Index j = 0; j < m; ++j) {
                for (Eigen::Index i = 0; i < t; ++i) out(i, j) = normal(rng);
            }
            break;
        }
        case BootstrapStrategy::NonparPooled: {
            // z_noise is column-major, so its flat storage is the pool.
            std::uniform_int_distribution<Eigen::Index> pick(0, t * m - 1);
            const double* pool = z_noise.data();
            for (Eigen::Index j = 0; j < m; ++j) {
                for (Eigen::Index i = 0; i < t; ++i) out(i, j) = pool[pick(rng)];
            }
            break;
        }
        case BootstrapStrategy::NonparComponentwise: {
            std::uniform_int_distribution<Eigen::Index> pick(0, t - 1);
            for (Eigen::Index j = 0; j < m; ++j) {
                for (Eigen::Index i = 0; i < t; ++i) out(i, j) = z_noise(pick(rng), j);
            }
            break;
        }
        case BootstrapStrategy::NonparJointRows: {
            std::uniform_int_distribution<Eigen::Index> pick(0, t - 1);
            for (Eigen::Index i = 0; i < t; ++i) out.row(i) = z_noise.row(pick(rng));
            break;
        }
    }
    return out;
}

Matrix bootstrap_sources(const Matrix& z, int d, BootstrapStrategy strategy, Rng& rng) {
    const int p = static_cast<int>(z.cols());
    if (d < 0 || d >= p) {
        throw InvalidDimension("bootstrap_sources: d " + std::to_string(d) +
                               " leaves no noise block in [0, " +
                               std::to_string(p - 1) + "]");
    }
    Matrix out = z;
    out.rightCols(p - d) = resample_noise(z.rightCols(p - d), strategy, rng);
    return out;
}

double bootstrap_p_value(int count_at_least, int replicates) {
    if (replicates < 1 || count_at_least < 0 || count_at_least > replicates) {
        throw InvalidInput("bootstrap_p_value: need 0 <= count <= R, R >= 1");
    }
    return (count_at_least + 1.0) / (replicates + 1.0);
}

NoiseTest test_dimension_with(const TimeSeriesMatrix& x, int d,
                              const TestOptions& opts, const FitFn& fit_fn) {
    if (d < 0 || d >= x.dim()) {
        throw InvalidDimension("test_dimension: d " + std::to_string(d) +
                               " outside [0, " + std::to_string(x.dim() - 1) + "]");
    }
    if (opts.replicates < 1) {
        throw InvalidInput("test_dimension: need at least one replicate");
    }

    BssSolution observed = fit_fn(x);
    const double m_observed = noise_statistic(observed, d).value;

    // Back-map from the estimated sources to the observation scale:
    // x* = Sigma0^{1/2} U z*, applied row-wise.
    const Matrix back = observed.whitening.cov_sqrt.entries() *
                        observed.rotation.entries();
    const Matrix back_t = back.transpose();
    const Matrix& z = observed.sources.values();

    constexpr int kMaxRetries = 3;
    std::vector<double> m_star(static_cast<std::size_t>(opts.replicates));
    std::atomic<int> warnings{0};

    parallel_for(static_cast<std::size_t>(opts.replicates), opts.threads,
                 [&](std::size_t r) {
        for (int attempt = 0;; ++attempt) {
            Rng rng = make_stream(opts.seed,
                                  {static_cast<std::uint64_t>(r),
                                   static_cast<std::uint64_t>(attempt)});
            Matrix z_star = bootstrap_sources(z, d, opts.strategy, rng);
            TimeSeriesMatrix x_star(z_star * back_t);
            try {
                BssSolution refit = fit_fn(x_star);
                m_star[r] = noise_statistic(refit, d).value;
                return;
            } catch (const ConvergenceFailure&) {
                warnings.fetch_add(1, std::memory_order_relaxed);
                if (attempt >= kMaxRetries) throw;
            }
        }
    });

    int count = 0;
    for (double m : m_star) {
        if (m >= m_observed) ++count;
    }

    NoiseTest result;
    result.d = d;
    result.method = opts.method;
    result.strategy = opts.strategy;
    result.replicates = opts.replicates;
    result.m_observed = m_observed;
    result.m_star = std::move(m_star);
    result.p_value = bootstrap_p_value(count, opts.replicates);
    result.seed = opts.seed;
    result.warnings = warnings.load();
    return result;
}

NoiseTest test_dimension(const TimeSeriesMatrix& x, int d, const TestOptions& opts) {
    return test_dimension_with(x, d, opts, [&](const TimeSeriesMatrix& data) {
        return fit(data, opts.method, opts.fit);
    });
}

}  // namespace bssdim
