#pragma once

#include <cstdint>

namespace treeperc {

/// Constants of the (d+1)-regular tree with unit weights.
struct TreeParams {
    int d = 2;
    double sigma2 = 0.0;          ///< g(x,x) = d / (d^2 - 1)
    double contraction = 0.0;     ///< neighbour correlation 1/d
    double decay_exponent = 0.0;  ///< (d-1)^2 / d
    double point_capacity = 0.0;  ///< (d^2 - 1) / d = 1 / sigma2

    [[nodiscard]] double sigma() const;
    /// Variance of a child value given its parent: sigma2 * (1 - 1/d^2).
    [[nodiscard]] double transition_variance() const;
};

/// Interlacement level, v >= 0.
struct Level {
    double v = 0.0;
};

struct VacancyConstants {
    double p0 = 1.0;  ///< P[x_0 vacant]
    double p = 1.0;   ///< P[no trajectory has x != x_0 as its closest point to x_0]
};

/// Throws DomainError for d < 2.
TreeParams make_params(int d);

/// Density of nu = N(0, sigma2) at x.
double nu_density(double x, const TreeParams& params);

/// Transition density of the stationary Gaussian chain with contraction 1/d,
/// taken with respect to nu(dy). Symmetric in (x, y).
double mehler_kernel(double x, double y, const TreeParams& params);

/// Vacancy probabilities at level v. Throws DomainError for v < 0.
VacancyConstants vacancy_probs(Level level, const TreeParams& params);

/// Critical interlacement level: d * exp(-u (d-1)^2 / d) = 1.
double u_star(const TreeParams& params);

/// Capacity of the ball B_n around x_0.
double ball_capacity(int n, const TreeParams& params);

/// Number of vertices of B_n: 1 + (d+1)(d^n - 1)/(d-1).
std::uint64_t ball_size(int n, int d);

/// Number of vertices of the sphere S_n.
std::uint64_t sphere_size(int n, int d);

}  // namespace treeperc
