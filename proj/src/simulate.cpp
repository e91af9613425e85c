#include "bssdim/simulate.hpp"

#include <algorithm>
#include <atomic>

#include "bssdim/parallel.hpp"

namespace bssdim {

namespace {

// Spectral radius of the AR companion matrix; < 1 means stationary.
double ar_spectral_radius(const std::vector<double>& phi) {
    const int p = static_cast<int>(phi.size());
    if (p == 0) return 0.0;
    Matrix companion = Matrix::Zero(p, p);
    for (int i = 0; i < p; ++i) companion(0, i) = phi[static_cast<std::size_t>(i)];
    for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Matrix> solver(companion, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

double arma_stddev(const std::vector<double>& phi, const std::vector<double>& theta) {
    if (ar_spectral_radius(phi) >= 1.0) {
        throw InvalidModel("arma: AR polynomial not stationary");
    }
    const std::size_t q = theta.size();
    const std::size_t np = phi.size();

    // MA(inf) weights: psi_0 = 1, psi_j = theta_j + sum_i phi_i psi_{j-i};
    // gamma_0 = sum psi_j^2 with unit innovation variance.
    std::vector<double> psi{1.0};
    double gamma0 = 1.0;
    int quiet = 0;
    const std::size_t j_max = 1000000;
    for (std::size_t j = 1; j <= j_max; ++j) {
        double w = j <= q ? theta[j - 1] : 0.0;
        for (std::size_t i = 1; i <= std::min(j, np); ++i) {
            w += phi[i - 1] * psi[j - i];
        }
        psi.push_back(w);
        gamma0 += w * w;
        if (j > q && w * w < 1e-24 * gamma0) {
            if (++quiet >= 64) break;
        } else {
            quiet = 0;
        }
    }
    return std::sqrt(gamma0);
}

Vector gen_arma(int length, const std::vector<double>& phi,
                const std::vector<double>& theta, Rng& rng, int burnin) {
    if (length < 1) throw InvalidInput("gen_arma: length must be positive");
    if (burnin < 0) throw InvalidInput("gen_arma: burnin must be non-negative");
    const double sd = arma_stddev(phi, theta);  // validates stationarity

    const int np = static_cast<int>(phi.size());
    const int nq = static_cast<int>(theta.size());
    const int total = length + burnin;

    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> eps(static_cast<std::size_t>(total));
    std::vector<double> x(static_cast<std::size_t>(total));
    for (int t = 0; t < total; ++t) {
        eps[t] = normal(rng);
        double v = eps[t];
        for (int j = 1; j <= nq && t - j >= 0; ++j) v += theta[j - 1] * eps[t - j];
        for (int i = 1; i <= np && t - i >= 0; ++i) v += phi[i - 1] * x[t - i];
        x[t] = v;
    }

    Vector out(length);
    for (int t = 0; t < length; ++t) out(t) = x[burnin + t] / sd;
    return out;
}

Matrix gen_noise(int setting_id, int length, Rng& rng, bool scale_t_to_unit_variance) {
    if (length < 1) throw InvalidInput("gen_noise: length must be positive");
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix out(length, 3);

    // t5 coordinates have variance 5/3; sqrt(3/5) restores unit variance.
    const double t_scale = scale_t_to_unit_variance ? std::sqrt(3.0 / 5.0) : 1.0;

    switch (setting_id) {
        case 1: {
            for (Eigen::Index j = 0; j < 3; ++j) {
                for (int i = 0; i < length; ++i) out(i, j) = normal(rng);
            }
            break;
        }
        case 2: {
            // Spherical trivariate t5: Gaussian rows over a shared chi-square.
            std::chi_squared_distribution<double> chi2(5.0);
            for (int i = 0; i < length; ++i) {
                double a = normal(rng);
                double b = normal(rng);
                double c = normal(rng);
                double u = chi2(rng);
                double f = t_scale * std::sqrt(5.0 / u);
                out(i, 0) = f * a;
                out(i, 1) = f * b;
                out(i, 2) = f * c;
            }
            break;
        }
        case 3: {
            std::student_t_distribution<double> t5(5.0);
            const double bound = std::sqrt(3.0);
            std::uniform_real_distribution<double> uniform(-bound, bound);
            for (int i = 0; i < length; ++i) out(i, 0) = normal(rng);
            for (int i = 0; i < length; ++i) out(i, 1) = t_scale * t5(rng);
            for (int i = 0; i < length; ++i) out(i, 2) = uniform(rng);
            break;
        }
        default:
            throw InvalidModel("gen_noise: unknown setting " + std::to_string(setting_id));
    }
    return out;
}

Matrix gen_mixing(int p, Rng& rng) {
    if (p < 1) throw InvalidInput("gen_mixing: p must be positive");
    std::normal_distribution<double> normal(0.0, 1.0);
    for (;;) {
        Matrix omega(p, p);
        for (Eigen::Index j = 0; j < p; ++j) {
            for (Eigen::Index i = 0; i < p; ++i) omega(i, j) = normal(rng);
        }
        Eigen::JacobiSVD<Matrix> svd(omega);
        const double smin = svd.singularValues()(p - 1);
        // retry near-singular draws
        if (smin > 0.0 && svd.singularValues()(0) / smin <= 1e8) return omega;
    }
}

TimeSeriesMatrix gen_setting_sources(int setting_id, int length, Rng& rng,
                                     bool scale_t_to_unit_variance) {
    Vector arma = gen_arma(length, kSignalArmaPhi, kSignalArmaTheta, rng);
    Vector ma = gen_arma(length, {}, kSignalMaTheta, rng);
    Matrix noise = gen_noise(setting_id, length, rng, scale_t_to_unit_variance);

    Matrix z(length, 5);
    z.col(0) = arma;
    z.col(1) = ma;
    z.rightCols(3) = noise;
    return TimeSeriesMatrix(std::move(z));
}

TimeSeriesMatrix mix(const TimeSeriesMatrix& z, const Matrix& omega) {
    if (omega.rows() != omega.cols() || omega.rows() != z.dim()) {
        throw InvalidInput("mix: mixing matrix must be p x p");
    }
    return TimeSeriesMatrix(z.values() * omega.transpose());
}

const StudyCell* StudyResult::find(int setting, int length, std::size_t method_index,
                                   std::size_t strategy_index, int d) const {
    for (const StudyCell& c : cells) {
        if (c.setting == setting && c.length == length &&
            c.method_index == method_index && c.strategy_index == strategy_index &&
            c.d == d) {
            return &c;
        }
    }
    return nullptr;
}

namespace {

void validate_study_config(const StudyConfig& c) {
    if (c.repetitions < 1) throw InvalidInput("study: repetitions must be >= 1");
    if (c.replicates < 1) throw InvalidInput("study: replicates must be >= 1");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw InvalidInput("study: alpha in (0,1)");
    if (c.settings.empty() || c.lengths.empty() || c.methods.empty() ||
        c.strategies.empty() || c.hypotheses.empty()) {
        throw InvalidInput("study: settings, lengths, methods, strategies and "
                           "hypotheses must be nonempty");
    }
    for (int s : c.settings) {
        if (s < 1 || s > 3) throw InvalidModel("study: unknown setting " + std::to_string(s));
    }
    for (int d : c.hypotheses) {
        if (d < 0 || d > 4) {
            throw InvalidInput("study: hypothesis d " + std::to_string(d) +
                               " outside [0, 4] for p = 5");
        }
    }
    for (int t : c.lengths) {
        for (const MethodSpec& m : c.methods) {
            int max_lag = *std::max_element(m.lags.begin(), m.lags.end());
            if (max_lag > t - 2) {
                throw InvalidInput("study: lag " + std::to_string(max_lag) +
                                   " too large for T = " + std::to_string(t));
            }
        }
    }
}

}  // namespace

StudyResult run_rejection_study(const StudyConfig& config) {
    validate_study_config(config);

    const std::size_t n_methods = config.methods.size();
    const std::size_t n_strategies = config.strategies.size();
    const std::size_t n_hypotheses = config.hypotheses.size();
    const std::size_t cells_per_dataset = n_methods * n_strategies * n_hypotheses;

    StudyResult result;
    result.config = config;

    for (int setting : config.settings) {
        for (int length : config.lengths) {
            std::vector<std::atomic<int>> rejections(cells_per_dataset);
            std::vector<std::atomic<int>> completed(cells_per_dataset);
            std::vector<std::atomic<int>> aborted(cells_per_dataset);

            parallel_for(static_cast<std::size_t>(config.repetitions), config.threads,
                         [&](std::size_t rep) {
                const auto s64 = static_cast<std::uint64_t>(setting);
                const auto t64 = static_cast<std::uint64_t>(length);
                Rng data_rng = make_stream(config.seed, {0xDA7Au, s64, t64, rep});
                TimeSeriesMatrix z = gen_setting_sources(setting, length, data_rng,
                                                         config.scale_t_noise);
                Matrix omega = gen_mixing(5, data_rng);
                TimeSeriesMatrix x = mix(z, omega);

                std::size_t cell = 0;
                for (std::size_t mi = 0; mi < n_methods; ++mi) {
                    for (std::size_t si = 0; si < n_strategies; ++si) {
                        for (std::size_t hi = 0; hi < n_hypotheses; ++hi, ++cell) {
                            const int d = config.hypotheses[hi];
                            TestOptions opts;
                            opts.method = config.methods[mi];
                            opts.strategy = config.strategies[si];
                            opts.replicates = config.replicates;
                            opts.threads = 1;  // the repetitions are the parallel axis
                            opts.seed = derive_seed(config.seed,
                                                    {0x7E57u, s64, t64, rep, mi, si,
                                                     static_cast<std::uint64_t>(d)});
                            try {
                                NoiseTest t = test_dimension(x, d, opts);
                                completed[cell].fetch_add(1, std::memory_order_relaxed);
                                if (t.p_value <= config.alpha) {
                                    rejections[cell].fetch_add(1, std::memory_order_relaxed);
                                }
                            } catch (const Error&) {
                                aborted[cell].fetch_add(1, std::memory_order_relaxed);
                            }
                        }
                    }
                }
            });

            std::size_t cell = 0;
            for (std::size_t mi = 0; mi < n_methods; ++mi) {
                for (std::size_t si = 0; si < n_strategies; ++si) {
                    for (std::size_t hi = 0; hi < n_hypotheses; ++hi, ++cell) {
                        StudyCell c;
                        c.setting = setting;
                        c.length = length;
                        c.method_index = mi;
                        c.strategy_index = si;
                        c.d = config.hypotheses[hi];
                        c.rejections = rejections[cell].load();
                        c.completed = completed[cell].load();
                        c.aborted = aborted[cell].load();
                        result.cells.push_back(c);
                    }
                }
            }
        }
    }
    return result;
}

SoundExperimentResult sound_experiment(const TimeSeriesMatrix& signals,
                                       const SoundExperimentOptions& opts) {
    if (opts.noise_channels < 0) {
        throw InvalidInput("sound_experiment: noise_channels must be >= 0");
    }
    const int t = signals.length();
    const int k = signals.dim();
    const int p = k + opts.noise_channels;

    Rng rng = make_stream(opts.seed, {0x50u, 0u});
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(t, p);
    z.leftCols(k) = signals.values();
    for (int j = 0; j < opts.noise_channels; ++j) {
        for (int i = 0; i < t; ++i) z(i, k + j) = normal(rng);
    }
    Matrix omega = gen_mixing(p, rng);
    TimeSeriesMatrix x = mix(TimeSeriesMatrix(std::move(z)), omega);

    const std::vector<BootstrapStrategy> strategies{
        BootstrapStrategy::Parametric, BootstrapStrategy::NonparPooled,
        BootstrapStrategy::NonparComponentwise, BootstrapStrategy::NonparJointRows};
    const std::vector<MethodSpec> methods{MethodSpec::amuse(1), MethodSpec::sobi()};

    SoundExperimentResult result;
    result.signal_dim = k;
    result.noise_channels = opts.noise_channels;
    for (std::size_t si = 0; si < strategies.size(); ++si) {
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            EstimateOptions eo;
            eo.alpha = opts.alpha;
            eo.test.method = methods[mi];
            eo.test.strategy = strategies[si];
            eo.test.replicates = opts.replicates;
            eo.test.threads = opts.threads;
            eo.test.fit = opts.fit;

            SoundCombo combo{strategies[si], methods[mi], {}, {}};
            eo.test.seed = derive_seed(opts.seed, {0xF0u, si, mi});
            combo.forward = estimate_forward(x, eo);
            eo.test.seed = derive_seed(opts.seed, {0xBAu, si, mi});
            combo.backward = estimate_backward(x, eo);
            result.combos.push_back(std::move(combo));
        }
    }
    return result;
}

}  // namespace bssdim
