#pragma once

// Monte Carlo ray-survival oracle for lambda_h.
//
// P[phi > h along a ray with n edges] is the survival probability of the
// Gaussian chain X_{k+1} = X_k / d + s Z killed below h. A Fleming-Viot
// particle system (killed particles restart from a uniformly chosen survivor)
// gives the product of per-step survival fractions as an unbiased estimator
// of that probability, so its n-th root, taken after a burn-in, converges to
// lambda_h / d. Uses its own engine and no project code.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

struct RaySurvival {
    double lambda = 0.0;     ///< d * exp(mean log survival fraction)
    double std_error = 0.0;  ///< batch-means standard error of lambda
};

inline RaySurvival ray_survival_lambda(double h, int d, std::size_t particles, int burn_in, int steps,
                                       std::uint64_t seed, int batch = 50) {
    const double dd = d;
    const double var = dd / (dd * dd - 1.0);
    const double c = 1.0 / dd;
    const double s = std::sqrt(var * (1.0 - c * c));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;

    std::vector<double> x(particles);
    for (double& xi : x) {
        do {
            xi = std::sqrt(var) * normal(rng);
        } while (!(xi > h));
    }
    std::vector<double> next(particles);
    std::vector<std::size_t> alive;
    alive.reserve(particles);
    std::vector<double> batch_means;
    double batch_sum = 0.0;
    int in_batch = 0;
    for (int k = 0; k < burn_in + steps; ++k) {
        alive.clear();
        for (std::size_t i = 0; i < particles; ++i) {
            next[i] = c * x[i] + s * normal(rng);
            if (next[i] > h) {
                alive.push_back(i);
            }
        }
        if (alive.empty()) {
            return {0.0, 0.0};
        }
        const double q = static_cast<double>(alive.size()) / particles;
        std::uniform_int_distribution<std::size_t> pick(0, alive.size() - 1);
        for (std::size_t i = 0; i < particles; ++i) {
            x[i] = next[i] > h ? next[i] : next[alive[pick(rng)]];
        }
        if (k >= burn_in) {
            batch_sum += std::log(q);
            if (++in_batch == batch) {
                batch_means.push_back(batch_sum / batch);
                batch_sum = 0.0;
                in_batch = 0;
            }
        }
    }
    double mean = 0.0;
    for (double b : batch_means) {
        mean += b;
    }
    mean /= batch_means.size();
    double ss = 0.0;
    for (double b : batch_means) {
        ss += (b - mean) * (b - mean);
    }
    const double se_log = std::sqrt(ss / (batch_means.size() - 1) / batch_means.size());
    const double lambda = dd * std::exp(mean);
    return {lambda, lambda * se_log};
}

}  // namespace oracle
