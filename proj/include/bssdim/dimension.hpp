#pragma once

#include <utility>

#include "bssdim/bootstrap.hpp"

namespace bssdim {

struct DimensionEstimate {
    int d_hat = 0;                               // in [0, p]
    double alpha = 0.05;
    std::vector<std::pair<int, double>> trace;   // (d, p_value), evaluation order
    std::string strategy_name;                   // forward | backward | divide-conquer
    std::vector<NoiseTest> tests;                // full records, same order as trace
};

struct EstimateOptions {
    TestOptions test;
    double alpha = 0.05;
};

// Tests H_{0,0}, H_{0,1}, ... upward; the estimate is the first d whose
// hypothesis is not rejected, or p when every d in [0, p-1] is rejected.
DimensionEstimate estimate_forward(const TimeSeriesMatrix& x, const EstimateOptions& opts);

// Tests H_{0,p-1}, H_{0,p-2}, ... downward until the first rejection at
// some k; the estimate is k + 1, or 0 when nothing is rejected.
DimensionEstimate estimate_backward(const TimeSeriesMatrix& x, const EstimateOptions& opts);

// Bisection over d assuming rejection is monotone (rejecting H_{0,d} means
// every smaller d is also rejected); finds the smallest non-rejected d in
// at most ceil(log2 p) + 1 tests.
DimensionEstimate estimate_divide_conquer(const TimeSeriesMatrix& x, const EstimateOptions& opts);

// The sequential rules themselves, driven by a callback returning the
// p-value for hypothesis d. The public estimators wrap these around real
// bootstrap tests; tests can drive them with canned p-value profiles.
using HypothesisTester = std::function<double(int d)>;

DimensionEstimate sequential_forward(int p, double alpha, const HypothesisTester& test);
DimensionEstimate sequential_backward(int p, double alpha, const HypothesisTester& test);
DimensionEstimate sequential_bisect(int p, double alpha, const HypothesisTester& test);

}  // namespace bssdim
