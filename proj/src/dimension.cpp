#include "bssdim/dimension.hpp"

namespace bssdim {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("alpha must lie in (0, 1)");
    }
}

void check_p(int p) {
    if (p < 1) throw InvalidInput("dimension estimation: need p >= 1");
}

}  // namespace

DimensionEstimate sequential_forward(int p, double alpha, const HypothesisTester& test) {
    check_p(p);
    check_alpha(alpha);
    DimensionEstimate est;
    est.alpha = alpha;
    est.strategy_name = "forward";
    for (int d = 0; d < p; ++d) {
        double pv = test(d);
        est.trace.emplace_back(d, pv);
        if (pv > alpha) {
            est.d_hat = d;
            return est;
        }
    }
    est.d_hat = p;  // every hypothesis rejected
    return est;
}

DimensionEstimate sequential_backward(int p, double alpha, const HypothesisTester& test) {
    check_p(p);
    check_alpha(alpha);
    DimensionEstimate est;
    est.alpha = alpha;
    est.strategy_name = "backward";
    for (int d = p - 1; d >= 0; --d) {
        double pv = test(d);
        est.trace.emplace_back(d, pv);
        if (pv <= alpha) {
            est.d_hat = d + 1;  // last rejected hypothesis
            return est;
        }
    }
    est.d_hat = 0;  // nothing rejected
    return est;
}

DimensionEstimate sequential_bisect(int p, double alpha, const HypothesisTester& test) {
    check_p(p);
    check_alpha(alpha);
    DimensionEstimate est;
    est.alpha = alpha;
    est.strategy_name = "divide-conquer";
    // Invariant under monotone rejection: every d < lo rejects, every
    // d >= hi accepts. The estimate is the smallest accepted d, or p.
    int lo = 0;
    int hi = p;
    while (lo < hi) {
        int mid = lo + (hi - lo) / 2;
        double pv = test(mid);
        est.trace.emplace_back(mid, pv);
        if (pv <= alpha) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    est.d_hat = lo;
    return est;
}

namespace {

DimensionEstimate estimate_with(
    const TimeSeriesMatrix& x, const EstimateOptions& opts,
    DimensionEstimate (*rule)(int, double, const HypothesisTester&)) {
    std::vector<NoiseTest> tests;
    // Each hypothesis gets its own stream derived from (master seed, d) so
    // sequential tests never share replicate draws.
    HypothesisTester tester = [&](int d) {
        TestOptions test_opts = opts.test;
        test_opts.seed = derive_seed(opts.test.seed, {static_cast<std::uint64_t>(d)});
        NoiseTest t = test_dimension(x, d, test_opts);
        double pv = t.p_value;
        tests.push_back(std::move(t));
        return pv;
    };
    DimensionEstimate est = rule(x.dim(), opts.alpha, tester);
    est.tests = std::move(tests);
    return est;
}

}  // namespace

DimensionEstimate estimate_forward(const TimeSeriesMatrix& x, const EstimateOptions& opts) {
    return estimate_with(x, opts, &sequential_forward);
}

DimensionEstimate estimate_backward(const TimeSeriesMatrix& x, const EstimateOptions& opts) {
    return estimate_with(x, opts, &sequential_backward);
}

DimensionEstimate estimate_divide_conquer(const TimeSeriesMatrix& x, const EstimateOptions& opts) {
    return estimate_with(x, opts, &sequential_bisect);
}

}  // namespace bssdim
