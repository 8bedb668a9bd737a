#pragma once

#include <cstdint>
#include <utility>

namespace treeperc {

/// Bernoulli frequency with Wald standard error and Wilson 95% interval.
struct McEstimate {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    std::pair<double, double> ci95{0.0, 1.0};
};

McEstimate make_estimate(std::uint64_t successes, std::uint64_t trials);

/// sqrt(se_a^2 + se_b^2) for independent estimates.
double combined_std_error(const McEstimate& a, const McEstimate& b);

/// Sample mean with its standard error, for real-valued statistics.
struct MeanEstimate {
    std::uint64_t samples = 0;
    double mean = 0.0;
    double std_error = 0.0;
};

/// Running sums; merge by adding, so the result is independent of how the
/// samples were partitioned.
struct MomentAccumulator {
    std::uint64_t n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double x) {
        ++n;
        sum += x;
        sum_sq += x * x;
    }
    void merge(const MomentAccumulator& other) {
        n += other.n;
        sum += other.sum;
        sum_sq += other.sum_sq;
    }
    [[nodiscard]] MeanEstimate finish() const;
};

}  // namespace treeperc
