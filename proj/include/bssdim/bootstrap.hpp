#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "bssdim/estimators.hpp"
#include "bssdim/rng.hpp"

namespace bssdim {

// How the hypothetical noise block is resampled.
//   Parametric:          fresh standard normal draws
//   NonparPooled:        i.i.d. draws from the pooled ecdf of all noise entries
//   NonparComponentwise: each column resampled from its own ecdf
//   NonparJointRows:     whole rows resampled with replacement
enum class BootstrapStrategy {
    Parametric,
    NonparPooled,
    NonparComponentwise,
    NonparJointRows,
};

std::string to_string(BootstrapStrategy s);
// Accepts parametric|np1|np2|np3 and the long names used in reports.
BootstrapStrategy strategy_from_string(std::string_view name);

// Resamples a T x (p-d) noise block. The pooled and componentwise schemes
// coincide when the block has one column; they are dispatched through the
// same draw order so identical streams give identical output.
Matrix resample_noise(const Matrix& z_noise, BootstrapStrategy strategy, Rng& rng);

// Copy of the source matrix with its last p - d columns resampled; the
// first d columns are left untouched.
Matrix bootstrap_sources(const Matrix& z, int d, BootstrapStrategy strategy, Rng& rng);

struct NoiseTest {
    int d = 0;
    MethodSpec method;
    BootstrapStrategy strategy = BootstrapStrategy::Parametric;
    int replicates = 0;           // R
    double m_observed = 0.0;
    std::vector<double> m_star;   // one statistic per replicate, index = replicate
    double p_value = 1.0;         // (#{m* >= m_observed} + 1) / (R + 1)
    std::uint64_t seed = 0;
    int warnings = 0;             // replicate fits retried after ConvergenceFailure
};

struct TestOptions {
    MethodSpec method;
    BootstrapStrategy strategy = BootstrapStrategy::Parametric;
    int replicates = 200;  // R
    std::uint64_t seed = 0;
    int threads = 1;       // replicate-level parallelism; <= 0 uses all cores
    FitOptions fit;
};

// Bootstrap test of the hypothesis that the last p - d latent series are
// white noise. Fits the method on x, rebuilds R replicate datasets by
// resampling the noise block of the estimated sources and mapping back
// through the fitted mixing, refits on each, and compares running-mean
// statistics. Replicate r draws only from a stream derived from (seed, r),
// so results do not depend on thread count. A replicate whose refit fails
// to converge is retried on a fresh derived stream (at most 3 retries, each
// counted in warnings) before the whole run aborts with ConvergenceFailure.
NoiseTest test_dimension(const TimeSeriesMatrix& x, int d, const TestOptions& opts);

// Seam for exercising the replicate retry logic; production code passes the
// regular estimator.
using FitFn = std::function<BssSolution(const TimeSeriesMatrix&)>;
NoiseTest test_dimension_with(const TimeSeriesMatrix& x, int d,
                              const TestOptions& opts, const FitFn& fit_fn);

// (count + 1) / (R + 1), the zero-avoiding bootstrap p-value.
double bootstrap_p_value(int count_at_least, int replicates);

}  // namespace bssdim
