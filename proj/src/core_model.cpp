#include "treeperc/core_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "treeperc/errors.hpp"

namespace treeperc {

double TreeParams::sigma() const { return std::sqrt(sigma2); }

double TreeParams::transition_variance() const {
    return sigma2 * (1.0 - contraction * contraction);
}

TreeParams make_params(int d) {
    if (d < 2) {
        throw DomainError("tree parameter d must be >= 2, got " + std::to_string(d));
    }
    const double dd = d;
    TreeParams p;
    p.d = d;
    p.sigma2 = dd / (dd * dd - 1.0);
    p.contraction = 1.0 / dd;
    p.decay_exponent = (dd - 1.0) * (dd - 1.0) / dd;
    p.point_capacity = (dd * dd - 1.0) / dd;
    return p;
}

double nu_density(double x, const TreeParams& params) {
    return std::exp(-0.5 * x * x / params.sigma2) /
           std::sqrt(2.0 * std::numbers::pi * params.sigma2);
}

double mehler_kernel(double x, double y, const TreeParams& params) {
    const double c = params.contraction;
    const double one_minus_c2 = 1.0 - c * c;
    const double exponent =
        (2.0 * c * x * y - c * c * (x * x + y * y)) / (2.0 * params.sigma2 * one_minus_c2);
    return std::exp(exponent) / std::sqrt(one_minus_c2);
}

VacancyConstants vacancy_probs(Level level, const TreeParams& params) {
    if (!(level.v >= 0.0)) {
        throw DomainError("interlacement level must be >= 0");
    }
    return {std::exp(-level.v * params.point_capacity),
            std::exp(-level.v * params.decay_exponent)};
}

double u_star(const TreeParams& params) {
    const double dd = params.d;
    return dd / ((dd - 1.0) * (dd - 1.0)) * std::log(dd);
}

double ball_capacity(int n, const TreeParams& params) {
    if (n < 0) {
        throw DomainError("ball radius must be >= 0");
    }
    if (n == 0) {
        return params.point_capacity;
    }
    // Only sphere vertices carry equilibrium mass: each escapes with
    // probability d/(d+1) * (1 - 1/d), times the vertex weight d+1.
    const double dd = params.d;
    return static_cast<double>(sphere_size(n, params.d)) * (dd - 1.0);
}

std::uint64_t sphere_size(int n, int d) {
    if (n == 0) {
        return 1;
    }
    std::uint64_t s = static_cast<std::uint64_t>(d) + 1;
    for (int k = 1; k < n; ++k) {
        s *= static_cast<std::uint64_t>(d);
    }
    return s;
}

std::uint64_t ball_size(int n, int d) {
    std::uint64_t total = 0;
    for (int k = 0; k <= n; ++k) {
        total += sphere_size(k, d);
    }
    return total;
}

}  // namespace treeperc
