#include "treeperc/checks.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "treeperc/errors.hpp"

namespace treeperc {

DecayReport check_decay_rate(Level u, double a, int fit_from, int fit_to, std::uint64_t trials,
                             const TreeParams& params, Seed seed, const SimOptions& sim,
                             const SpectralOptions& spectral) {
    if (fit_from < 0 || fit_to <= fit_from) {
        throw DomainError("decay fit needs 0 <= fit_from < fit_to");
    }
    DecayReport r;
    r.u = u.v;
    r.a = a;
    r.fit_from = fit_from;
    r.fit_to = fit_to;
    r.lambda = lambda_ua(u, a, params, spectral);
    if (!(r.lambda < 1.0)) {
        throw PreconditionError("decay-rate check needs lambda(u, a) < 1, got " + std::to_string(r.lambda));
    }
    r.tau = estimate_tau_n(u, a, fit_to, trials, params, seed, sim);
    const double p0 = vacancy_probs(u, params).p0;
    r.envelope_pass = true;
    for (int m = 0; m <= fit_to; ++m) {
        const double env = (params.d + 1.0) / params.d * p0 * std::pow(r.lambda, m);
        r.envelope.push_back(env);
        const McEstimate& e = r.tau.by_radius[m];
        r.envelope_pass = r.envelope_pass && e.estimate <= env + 3.0 * e.std_error;
    }
    r.target_slope = std::log(r.lambda);
    try {
        r.slope = fit_log_slope(r.tau.by_radius, fit_from, fit_to);
        r.relative_error = std::abs(r.slope / r.target_slope - 1.0);
    } catch (const DomainError&) {
        r.slope = std::numeric_limits<double>::quiet_NaN();
        r.relative_error = std::numeric_limits<double>::infinity();
    }
    r.slope_pass = r.relative_error <= r.slope_tolerance;
    return r;
}

double level_for_lambda(double target, double a, const TreeParams& params, const SpectralOptions& spectral) {
    const double lam = lambda_h(a, params, spectral);
    if (!(target > 0.0 && target <= lam)) {
        throw DomainError("target lambda must lie in (0, lambda_a]");
    }
    return std::log(lam / target) / params.decay_exponent;
}

FloorReport check_second_moment_floor(Level u, double a, int n, std::uint64_t trials,
                                      const TreeParams& params, Seed seed, const SimOptions& sim,
                                      const SpectralOptions& spectral) {
    FloorReport r;
    r.u = u.v;
    r.a = a;
    r.lambda = lambda_ua(u, a, params, spectral);
    r.bound = second_moment_bound(u, a, params, spectral);
    r.tau = estimate_tau_n(u, a, n, trials, params, seed, sim).tau_n();
    r.pass = r.tau.estimate >= r.bound.bound - 3.0 * r.tau.std_error;
    return r;
}

TwoPointReport check_two_point(Level u, double a, int n, std::uint64_t trials, const TreeParams& params,
                               Seed seed, const SimOptions& sim, const SpectralOptions& spectral) {
    TwoPointReport r;
    r.u = u.v;
    r.a = a;
    r.n = n;
    r.estimate = estimate_two_point(u, a, n, trials, params, seed, sim);
    const VacancyConstants vc = vacancy_probs(u, params);
    r.prediction = vc.p0 * std::pow(vc.p, n) * two_point_prediction(a, n, params, spectral);
    // Standard error from the prediction so that a zero-success run is not a free pass.
    const double se = std::sqrt(r.prediction * (1.0 - r.prediction) / static_cast<double>(trials));
    const double diff = r.estimate.estimate - r.prediction;
    r.z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    r.pass = std::abs(r.z) <= 3.0;
    return r;
}

}  // namespace treeperc
