#include "treeperc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "treeperc/errors.hpp"

namespace treeperc {

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
    return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

std::vector<double> sqrt_weights(const QuadratureGrid& grid) {
    std::vector<double> s(grid.node_count());
    std::transform(grid.weights.begin(), grid.weights.end(), s.begin(),
                   [](double w) { return std::sqrt(w); });
    return s;
}

void require_nonnegative_level(double a, double rho) {
    if (!(a >= 0.0)) {
        throw DomainError("height a must be >= 0, got " + std::to_string(a));
    }
    if (!(rho > 0.0)) {
        throw DomainError("increment rho must be > 0, got " + std::to_string(rho));
    }
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

// ---------------------------------------------------------------------------
// DiscreteOperator

DiscreteOperator::DiscreteOperator(QuadratureGrid grid, std::vector<double> matrix, double h, int d)
    : grid_(std::move(grid)), matrix_(std::move(matrix)), h_(h), d_(d) {}

std::span<const double> DiscreteOperator::row(std::size_t i) const {
    return {matrix_.data() + i * size(), size()};
}

void DiscreteOperator::apply(std::span<const double> in, std::span<double> out) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = dot(row(i), in);
    }
}

DiscreteOperator DiscreteOperator::conjugated(std::span<const double> s) const {
    const std::size_t n = size();
    std::vector<double> m(matrix_);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m[i * n + j] *= s[i] * s[j];
        }
    }
    return {grid_, std::move(m), h_, d_};
}

DiscreteOperator discretize_Lh(double h, const QuadratureGrid& grid, const TreeParams& params) {
    const std::size_t n = grid.node_count();
    const std::vector<double> sw = sqrt_weights(grid);
    std::vector<double> m(n * n);
    const double d = params.d;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double v = d * mehler_kernel(grid.nodes[i], grid.nodes[j], params) * sw[i] * sw[j];
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    return {grid, std::move(m), h, params.d};
}

// ---------------------------------------------------------------------------
// Power iteration

SpectralPair top_eigenpair(const DiscreteOperator& op, double tol, const EigenOptions& opts) {
    return top_eigenpair(op, tol, sqrt_weights(op.grid()), opts);
}

SpectralPair top_eigenpair(const DiscreteOperator& op, double tol, std::span<const double> start,
                           const EigenOptions& opts) {
    if (!(tol > 0.0)) {
        throw DomainError("eigen tolerance must be > 0");
    }
    const std::size_t n = op.size();
    if (start.size() != n) {
        throw DomainError("start vector size does not match the operator");
    }
    std::vector<double> v(start.begin(), start.end());
    const double start_norm = norm2(v);
    if (!(start_norm > 0.0)) {
        throw DomainError("start vector must be nonzero");
    }
    for (double& x : v) {
        x /= start_norm;
    }

    std::vector<double> y(n);
    double lambda = 0.0;
    double previous = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::infinity();
    int it = 0;
    bool converged = false;
    while (it < opts.max_iterations) {
        ++it;
        op.apply(v, y);
        lambda = dot(v, y);
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - lambda * v[i];
            r2 += r * r;
        }
        residual = std::sqrt(r2);
        const double ny = norm2(y);
        if (!(ny > 0.0)) {
            throw ConvergenceError("power iteration collapsed to the zero vector");
        }
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = y[i] / ny;
        }
        if (std::abs(lambda - previous) <= tol && residual <= opts.residual_tol) {
            converged = true;
            break;
        }
        previous = lambda;
    }
    if (!converged) {
        throw ConvergenceError("power iteration did not converge after " + std::to_string(it) +
                               " iterations; last lambda = " + std::to_string(lambda) +
                               ", residual = " + std::to_string(residual));
    }

    // Report lambda and residual for the vector actually returned.
    op.apply(v, y);
    lambda = dot(v, y);
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - lambda * v[i];
        r2 += r * r;
    }

    const double sign = std::accumulate(v.begin(), v.end(), 0.0) < 0.0 ? -1.0 : 1.0;
    SpectralPair pair;
    pair.lambda = lambda;
    pair.residual = std::sqrt(r2);
    pair.iterations = it;
    pair.chi.resize(n);
    const QuadratureGrid& grid = op.grid();
    for (std::size_t i = 0; i < n; ++i) {
        pair.chi[i] = std::max(0.0, sign * v[i]) / std::sqrt(grid.weights[i]);
    }
    pair.grid_meta = {n, grid.lower, grid.upper};
    return pair;
}

// ---------------------------------------------------------------------------
// lambda_h and friends

GridOptions grid_options_for(double h, const TreeParams& params, const SpectralOptions& opts) {
    GridOptions g = opts.grid;
    g.M = std::max(g.M, h / params.sigma() + opts.tail_sigmas);
    return g;
}

namespace {

template <class MakeOperator>
HeightSolution refine(double h, const TreeParams& params, const SpectralOptions& opts,
                      MakeOperator&& make) {
    GridOptions g = grid_options_for(h, params, opts);
    auto build = [&](const GridOptions& go) {
        DiscreteOperator op = make(build_grid(h, params, go));
        SpectralPair pair = top_eigenpair(op, opts.eigen_tol);
        return HeightSolution{std::move(op), std::move(pair)};
    };
    HeightSolution coarse = build(g);
    while (true) {
        g.node_count *= 2;
        if (g.node_count > opts.max_node_count) {
            throw ConvergenceError("grid refinement at h = " + std::to_string(h) +
                                   " did not stabilize below " +
                                   std::to_string(opts.max_node_count) + " nodes");
        }
        HeightSolution fine = build(g);
        const double change = std::abs(fine.pair.lambda - coarse.pair.lambda);
        if (change < opts.refine_tol) {
            return fine;
        }
        coarse = std::move(fine);
    }
}

}  // namespace

HeightSolution solve_at_height(double h, const TreeParams& params, const SpectralOptions& opts) {
    return refine(h, params, opts,
                  [&](const QuadratureGrid& grid) { return discretize_Lh(h, grid, params); });
}

double lambda_h(double h, const TreeParams& params, const SpectralOptions& opts) {
    return solve_at_height(h, params, opts).pair.lambda;
}

CriticalHeight solve_h_star(const TreeParams& params, double tol, const SpectralOptions& opts) {
    if (!(tol > 0.0)) {
        throw DomainError("h_star tolerance must be > 0");
    }
    auto f = [&](double h) { return lambda_h(h, params, opts) - 1.0; };
    double lo = 0.0;
    double hi = std::sqrt(2.0 * u_star(params));
    double f_lo = f(lo);
    double f_hi = f(hi);
    for (int expand = 0; expand < 8 && f_lo <= 0.0; ++expand) {
        lo -= 1.0;
        f_lo = f(lo);
    }
    for (int expand = 0; expand < 8 && f_hi >= 0.0; ++expand) {
        hi += 1.0;
        f_hi = f(hi);
    }
    if (!(f_lo > 0.0 && f_hi < 0.0)) {
        throw ConvergenceError("no sign change of lambda_h - 1 on [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]: values " + std::to_string(f_lo) + ", " +
                               std::to_string(f_hi));
    }
    CriticalHeight out;
    out.bracket = {lo, hi};
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) <= tol) {
            out.h_star = mid;
            out.residual = std::abs(fm);
            return out;
        }
        if (fm > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-15) {
            break;
        }
    }
    throw ConvergenceError("bisection for h_star stalled at [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "] without reaching |lambda - 1| <= tol");
}

double lambda_ua(Level u, double a, const TreeParams& params, const SpectralOptions& opts) {
    if (!(u.v >= 0.0)) {
        throw DomainError("level u must be >= 0");
    }
    return lambda_h(a, params, opts) * std::exp(-u.v * params.decay_exponent);
}

std::optional<double> critical_a(Level u, const TreeParams& params, double tol,
                                 const SpectralOptions& opts) {
    if (!(u.v >= 0.0)) {
        throw DomainError("level u must be >= 0");
    }
    const double target = std::exp(u.v * params.decay_exponent);
    if (target >= params.d) {
        return std::nullopt;
    }
    const double sigma = params.sigma();
    const double lo = -opts.grid.M * sigma + 0.5 * sigma;
    const double hi = opts.grid.M * sigma;
    auto f = [&](double a) { return lambda_h(a, params, opts) - target; };
    const double f_lo = f(lo);
    if (f_lo <= 0.0) {
        return std::nullopt;
    }
    const double f_hi = f(hi);
    if (f_hi >= 0.0) {
        return std::nullopt;
    }
    std::uintmax_t max_iter = 100;
    auto done = [tol](double l, double r) { return std::abs(r - l) <= tol; };
    const auto [l, r] =
        boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, done, max_iter);
    return 0.5 * (l + r);
}

std::vector<double> two_point_sequence(double a, int n, const TreeParams& params,
                                       const SpectralOptions& opts) {
    if (n < 0) {
        throw DomainError("geodesic length must be >= 0");
    }
    const HeightSolution sol = solve_at_height(a, params, opts);
    const DiscreteOperator& op = sol.op;
    const std::vector<double> sw = sqrt_weights(op.grid());
    std::vector<double> g = sw;
    std::vector<double> next(g.size());
    std::vector<double> out;
    out.reserve(n + 1);
    const double inv_d = 1.0 / params.d;
    out.push_back(dot(sw, g));
    for (int k = 1; k <= n; ++k) {
        op.apply(g, next);
        for (std::size_t i = 0; i < next.size(); ++i) {
            g[i] = next[i] * inv_d;
        }
        out.push_back(std::clamp(dot(sw, g), 0.0, 1.0));
    }
    return out;
}

double two_point_prediction(double a, int n, const TreeParams& params, const SpectralOptions& opts) {
    return two_point_sequence(a, n, params, opts).back();
}

double check_thm21(double a, double rho, const TreeParams& params, const SpectralOptions& opts) {
    require_nonnegative_level(a, rho);
    const double level = a * rho + 0.5 * rho * rho;
    return lambda_h(a, params, opts) * std::exp(-level * params.decay_exponent) -
           lambda_h(a + rho, params, opts);
}

double v_function(double b, double a, double rho, const TreeParams& params) {
    const double beta = std::max(b - a, 0.0);
    if (beta == 0.0) {
        return 1.0;
    }
    const double p = vacancy_probs(Level{a * rho + 0.5 * rho * rho}, params).p;
    const double s = std::sqrt(params.transition_variance());
    // Y = b/d + s Z exceeds a exactly when Z > z0.
    const double z0 = (a - b * params.contraction) / s;
    const double rate = 2.0 * beta * s;
    static const GaussLegendreRule rule = gauss_legendre(16);
    const double upper = std::max(z0, 0.0) + 14.0;
    auto integrand = [&](double z) {
        return std::exp(-rate * (z - z0) - 0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    };
    const double expectation =
        standard_normal_cdf(z0) + integrate_panels(integrand, z0, upper, 32, rule);
    return p + (1.0 - p) * expectation;
}

double lambda_tilde(double a, double rho, const TreeParams& params, const SpectralOptions& opts) {
    require_nonnegative_level(a, rho);
    auto make = [&](const QuadratureGrid& grid) {
        std::vector<double> root_v(grid.node_count());
        for (std::size_t i = 0; i < root_v.size(); ++i) {
            root_v[i] = std::sqrt(v_function(grid.nodes[i], a, rho, params));
        }
        return discretize_Lh(a, grid, params).conjugated(root_v);
    };
    return refine(a, params, opts, make).pair.lambda;
}

ParabolaScan parabola_scan(double h, int K, const TreeParams& params, const SpectralOptions& opts) {
    if (!(h > 0.0)) {
        throw DomainError("parabola scan needs h > 0");
    }
    if (K < 2) {
        throw DomainError("parabola scan needs K >= 2");
    }
    ParabolaScan scan;
    scan.h = h;
    const double u_end = 0.5 * h * h;
    for (int k = 0; k <= K; ++k) {
        ArcSample s;
        s.u = (k == K) ? u_end : u_end * k / K;
        s.a = (k == K) ? 0.0 : std::sqrt(std::max(h * h - 2.0 * s.u, 0.0));
        s.lambda = lambda_ua(Level{s.u}, s.a, params, opts);
        scan.samples.push_back(s);
    }
    scan.min_step = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < scan.samples.size(); ++k) {
        scan.min_step = std::min(scan.min_step, scan.samples[k].lambda - scan.samples[k - 1].lambda);
    }
    return scan;
}

SecondMomentBound second_moment_bound(Level u, double a, const TreeParams& params,
                                      const SpectralOptions& opts) {
    const VacancyConstants vc = vacancy_probs(u, params);
    const HeightSolution sol = solve_at_height(a, params, opts);
    const double lam = sol.pair.lambda * std::exp(-u.v * params.decay_exponent);
    if (!(lam > 1.0)) {
        throw PreconditionError("second moment bound needs lambda(u, a) > 1 for the geometric "
                                "series over branch points to converge; got " +
                                std::to_string(lam));
    }
    const QuadratureGrid& grid = sol.op.grid();
    double inner = 0.0;
    double fourth = 0.0;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const double c = sol.pair.chi[i];
        inner += grid.weights[i] * c;
        fourth += grid.weights[i] * c * c * c * c;
    }
    const double prefactor = (params.d + 1.0) / params.d * vc.p0;
    SecondMomentBound out;
    out.A = prefactor * inner;
    out.B = prefactor * std::sqrt(fourth) * lam / (lam - 1.0);
    out.bound = out.A * out.A / out.B;
    return out;
}

}  // namespace treeperc
