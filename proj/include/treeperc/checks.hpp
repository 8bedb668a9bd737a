#pragma once

#include <cstdint>
#include <vector>

#include "treeperc/spectral.hpp"
#include "treeperc/tree_sim.hpp"

namespace treeperc {

/// Monte Carlo tau_m against the first-moment envelope ((d+1)/d) p0 lambda(u,a)^m
/// and the fitted decay rate against ln lambda(u,a).
struct DecayReport {
    double u = 0.0;
    double a = 0.0;
    double lambda = 0.0;
    int fit_from = 0;
    int fit_to = 0;
    TauEstimate tau;
    std::vector<double> envelope;  ///< per radius m = 0..n
    double slope = 0.0;
    double target_slope = 0.0;     ///< ln lambda(u, a)
    double relative_error = 0.0;   ///< |slope / target - 1|
    double slope_tolerance = 0.05;
    bool slope_pass = false;
    bool envelope_pass = false;
    [[nodiscard]] bool pass() const { return slope_pass && envelope_pass; }
};

/// Requires lambda(u, a) < 1.
DecayReport check_decay_rate(Level u, double a, int fit_from, int fit_to, std::uint64_t trials,
                             const TreeParams& params, Seed seed, const SimOptions& sim = {},
                             const SpectralOptions& spectral = {});

/// u giving lambda(u, a) = target; requires target <= lambda_a.
double level_for_lambda(double target, double a, const TreeParams& params,
                        const SpectralOptions& spectral = {});

struct FloorReport {
    double u = 0.0;
    double a = 0.0;
    double lambda = 0.0;
    SecondMomentBound bound;
    McEstimate tau;
    bool pass = false;  ///< tau >= A^2/B - 3 se
};

/// Requires lambda(u, a) > 1.
FloorReport check_second_moment_floor(Level u, double a, int n, std::uint64_t trials,
                                      const TreeParams& params, Seed seed, const SimOptions& sim = {},
                                      const SpectralOptions& spectral = {});

struct TwoPointReport {
    double u = 0.0;
    double a = 0.0;
    int n = 0;
    McEstimate estimate;
    double prediction = 0.0;  ///< p0 p^n <1, (L_a/d)^n 1>
    double z = 0.0;
    bool pass = false;        ///< |z| <= 3
};

TwoPointReport check_two_point(Level u, double a, int n, std::uint64_t trials, const TreeParams& params,
                               Seed seed, const SimOptions& sim = {}, const SpectralOptions& spectral = {});

}  // namespace treeperc
