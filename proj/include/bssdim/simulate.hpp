#pragma once

#include <cmath>
#include <cstdint>

#include "bssdim/dimension.hpp"

namespace bssdim {

// Signal processes shared by all three simulation settings: an ARMA(2,1)
// and an MA(5), both rescaled to unit theoretical variance.
inline const std::vector<double> kSignalArmaPhi{0.5, 0.2};
inline const std::vector<double> kSignalArmaTheta{0.5};
inline const std::vector<double> kSignalMaTheta{-0.4, 0.6, -0.3, 0.1, -0.3};

// Simulates x_t = sum_i phi_i x_{t-i} + e_t + sum_j theta_j e_{t-j} with
// standard normal innovations, drops `burnin` warm-up samples and rescales
// the result to unit theoretical variance. Throws InvalidModel when the AR
// polynomial is not stationary.
Vector gen_arma(int length, const std::vector<double>& phi,
                const std::vector<double>& theta, Rng& rng, int burnin = 1000);

// Theoretical standard deviation of the ARMA process with unit innovation
// variance (from the MA(inf) weight recursion); the scale gen_arma divides by.
double arma_stddev(const std::vector<double>& phi, const std::vector<double>& theta);

// T x 3 noise block for the given setting:
//   1: i.i.d. standard normal entries
//   2: rows from the spherical trivariate t5
//   3: independent columns N(0,1), t5, U(-sqrt3, sqrt3)
// With scale_t_to_unit_variance (default) the t5 draws are multiplied by
// sqrt(3/5) so every coordinate has unit variance.
Matrix gen_noise(int setting_id, int length, Rng& rng,
                 bool scale_t_to_unit_variance = true);

// p x p mixing matrix with i.i.d. standard normal entries, redrawn while the
// condition number exceeds 1e8.
Matrix gen_mixing(int p, Rng& rng);

// Latent sources of a setting: the two signals followed by the three noise
// channels (T x 5).
TimeSeriesMatrix gen_setting_sources(int setting_id, int length, Rng& rng,
                                     bool scale_t_to_unit_variance = true);

// x_t = Omega z_t, i.e. rows x_t^T = z_t^T Omega^T.
TimeSeriesMatrix mix(const TimeSeriesMatrix& z, const Matrix& omega);

struct StudyConfig {
    std::vector<int> settings{1};
    std::vector<int> lengths{200, 500};                 // T values
    std::vector<MethodSpec> methods{MethodSpec::amuse(1), MethodSpec::sobi()};
    std::vector<BootstrapStrategy> strategies{
        BootstrapStrategy::Parametric, BootstrapStrategy::NonparPooled,
        BootstrapStrategy::NonparComponentwise, BootstrapStrategy::NonparJointRows};
    int replicates = 200;       // bootstrap samples per test
    int repetitions = 500;      // Monte-Carlo repetitions per cell
    double alpha = 0.05;
    std::vector<int> hypotheses{1, 2, 3};  // d values tested
    std::uint64_t seed = 0;
    int threads = 0;            // repetition-level parallelism; <= 0: all cores
    bool scale_t_noise = true;
};

struct StudyCell {
    int setting = 0;
    int length = 0;
    std::size_t method_index = 0;
    std::size_t strategy_index = 0;
    int d = 0;
    int rejections = 0;  // repetitions with p <= alpha
    int completed = 0;   // repetitions that produced a p-value
    int aborted = 0;     // repetitions whose test failed

    double rate() const {
        return completed > 0 ? static_cast<double>(rejections) / completed : 0.0;
    }
    double std_error() const {
        if (completed <= 0) return 0.0;
        double r = rate();
        return std::sqrt(r * (1.0 - r) / completed);
    }
};

struct StudyResult {
    StudyConfig config;
    std::vector<StudyCell> cells;

    const StudyCell* find(int setting, int length, std::size_t method_index,
                          std::size_t strategy_index, int d) const;
};

// Monte-Carlo rejection-rate study. Each repetition simulates one dataset
// (sources, then a fresh random mixing) and runs every configured
// method x strategy x hypothesis test on it; cells count rejections at
// alpha. All seeds derive from (config.seed, setting, T, repetition, ...)
// so the result is independent of the degree of parallelism. A repetition
// whose test aborts is recorded in the cell and the study continues.
StudyResult run_rejection_study(const StudyConfig& config);

struct SoundCombo {
    BootstrapStrategy strategy;
    MethodSpec method;
    DimensionEstimate forward;
    DimensionEstimate backward;
};

struct SoundExperimentResult {
    int signal_dim = 0;
    int noise_channels = 0;
    std::vector<SoundCombo> combos;  // strategy-major, method-minor
};

struct SoundExperimentOptions {
    int noise_channels = 17;
    int replicates = 200;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int threads = 0;
    FitOptions fit;
};

// Appends standard normal noise channels to the given signals, mixes with a
// random Gaussian matrix and runs the forward and backward estimators for
// every bootstrap strategy x {AMUSE lag 1, SOBI lags 1..12}. Signals are
// expected centered and standardized.
SoundExperimentResult sound_experiment(const TimeSeriesMatrix& signals,
                                       const SoundExperimentOptions& opts);

}  // namespace bssdim
