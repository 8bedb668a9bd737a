#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "frozen_constants.hpp"
#include "oracles/dense_oracle.hpp"
#include "treeperc/errors.hpp"
#include "treeperc/spectral.hpp"

using namespace treeperc;

namespace {

const TreeParams P2 = make_params(2);
const TreeParams P3 = make_params(3);
const double S2 = P2.sigma();

double nu_tail(double a, const TreeParams& p) { return 0.5 * std::erfc(a / (p.sigma() * std::numbers::sqrt2)); }

}  // namespace

TEST_CASE("build_grid") {
    const QuadratureGrid full = build_grid(-8 * S2, P2);
    CHECK(full.node_count() == 400);
    CHECK(std::abs(full.total_weight() - 1.0) <= 1e-12);
    CHECK(std::abs(build_grid(0.0, P2).total_weight() - 0.5) <= 1e-10);

    GridOptions fine;
    fine.node_count = 800;
    for (double h : {-8 * S2, -1.0, 0.0, 0.7}) {
        CHECK(std::abs(build_grid(h, P2, fine).total_weight() - build_grid(h, P2).total_weight()) <= 1e-12);
    }

    const QuadratureGrid g = build_grid(0.35, P2);
    CHECK(g.lower == 0.35);
    CHECK(g.upper == doctest::Approx(8 * S2));
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        CHECK(g.weights[i] > 0.0);
        CHECK(g.nodes[i] >= g.lower);
        CHECK(g.nodes[i] <= g.upper);
        if (i > 0) {
            CHECK(g.nodes[i] > g.nodes[i - 1]);
        }
    }
    CHECK(g.total_weight() <= 1.0);
    CHECK(g.total_weight() >= nu_tail(0.35, P2) - nu_tail(8 * S2, P2) - 1e-12);

    GridOptions bad;
    bad.node_count = 8;
    CHECK_THROWS_AS(build_grid(0.0, P2, bad), DomainError);
    bad = GridOptions{};
    bad.M = 5.0;
    CHECK_THROWS_AS(build_grid(0.0, P2, bad), DomainError);
    CHECK_THROWS_AS(build_grid(8 * S2, P2), DomainError);
}

TEST_CASE("discretize_Lh gives a symmetric positive matrix with L1 = d1") {
    for (double h : {-8 * S2, 0.0, 1.2}) {
        const DiscreteOperator op = discretize_Lh(h, build_grid(h, P2), P2);
        for (std::size_t i = 0; i < op.size(); ++i) {
            for (std::size_t j = 0; j < op.size(); ++j) {
                REQUIRE(op(i, j) > 0.0);
                REQUIRE(std::abs(op(i, j) - op(j, i)) <= 1e-13);
            }
        }
    }
    const QuadratureGrid g = build_grid(-8 * S2, P2);
    const DiscreteOperator op = discretize_Lh(-8 * S2, g, P2);
    std::vector<double> v(g.node_count());
    std::vector<double> out(g.node_count());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = std::sqrt(g.weights[i]);
    }
    op.apply(v, out);
    double vav = 0.0;
    double vv = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        vav += v[i] * out[i];
        vv += v[i] * v[i];
    }
    CHECK(std::abs(vav / vv - 2.0) <= 1e-6);
}

TEST_CASE("top_eigenpair: Perron pair properties") {
    const DiscreteOperator op = discretize_Lh(0.3, build_grid(0.3, P2), P2);
    const SpectralPair pair = top_eigenpair(op, 1e-12);
    CHECK(pair.lambda > 0.0);
    CHECK(pair.lambda < 2.0);
    CHECK(pair.residual <= 1e-10);
    double norm = 0.0;
    for (std::size_t i = 0; i < pair.chi.size(); ++i) {
        CHECK(pair.chi[i] >= 0.0);
        norm += op.grid().weights[i] * pair.chi[i] * pair.chi[i];
    }
    CHECK(std::abs(norm - 1.0) <= 1e-10);
    CHECK(pair.grid_meta.node_count == 400);
    CHECK(pair.grid_meta.lower == 0.3);

    // Independent of the positive start vector.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.01, 1.0);
    std::vector<double> s1(op.size());
    std::vector<double> s2(op.size());
    for (std::size_t i = 0; i < op.size(); ++i) {
        s1[i] = unif(rng);
        s2[i] = unif(rng);
    }
    const double l1 = top_eigenpair(op, 1e-12, s1).lambda;
    const double l2 = top_eigenpair(op, 1e-12, s2).lambda;
    CHECK(std::abs(l1 - l2) <= 1e-10);
    CHECK(std::abs(l1 - pair.lambda) <= 1e-10);

    CHECK_THROWS_AS(top_eigenpair(op, 0.0), DomainError);
    EigenOptions tight;
    tight.max_iterations = 2;
    CHECK_THROWS_AS(top_eigenpair(op, 1e-12, tight), ConvergenceError);
}

TEST_CASE("lambda_h limits and monotonicity") {
    CHECK(std::abs(lambda_h(-8 * S2, P2) - 2.0) <= 1e-6);
    CHECK(std::abs(lambda_h(-8 * P3.sigma(), P3) - 3.0) <= 1e-6);
    double previous = 2.0;
    for (int h = -2; h <= 3; ++h) {
        const double lam = lambda_h(h, P2);
        CHECK(lam > 0.0);
        CHECK(lam < previous);
        previous = lam;
    }
    CHECK(lambda_h(0.0, P2) > lambda_h(0.5, P2));
    CHECK(lambda_h(0.5, P2) > lambda_h(1.0, P2));

    // Right tail: lambda_{8 sigma} is about 7.3e-6 for d = 2 and needs a
    // wider grid than the default [.., 8 sigma].
    const double far = lambda_h(8 * S2, P2);
    CHECK(far > 0.0);
    CHECK(far < 1e-5);
    CHECK(far == doctest::Approx(oracle::dense_lambda(8 * S2, 2)).epsilon(1e-6));
    CHECK(lambda_h(10 * S2, P2) < 1e-6);
    CHECK(lambda_h(8 * P3.sigma(), P3) < 1e-6);
}

TEST_CASE("grid refinement N -> 2N moves lambda by less than 1e-8") {
    for (double h : {-8 * S2, -1.0, 0.0, 0.5, 1.5, 3.0}) {
        SpectralOptions coarse;
        SpectralOptions fine;
        fine.grid.node_count = 800;
        const double a = top_eigenpair(discretize_Lh(h, build_grid(h, P2, grid_options_for(h, P2, coarse)), P2),
                                       1e-12).lambda;
        const double b = top_eigenpair(discretize_Lh(h, build_grid(h, P2, grid_options_for(h, P2, fine)), P2),
                                       1e-12).lambda;
        CHECK(std::abs(a - b) < 1e-8);
    }
}

TEST_CASE("lambda_0 agrees with the frozen dual-oracle value and a fresh dense solve") {
    CHECK(std::abs(lambda_h(0.0, P2) - frozen::lambda0_d2) <= 1e-9);
    CHECK(std::abs(lambda_h(0.0, P3) - frozen::lambda0_d3) <= 1e-9);
    CHECK(std::abs(oracle::dense_lambda(0.0, 2) - lambda_h(0.0, P2)) <= 1e-8);
    CHECK(std::abs(oracle::dense_lambda(0.7, 3) - lambda_h(0.7, P3)) <= 1e-8);
}

TEST_CASE("solve_h_star") {
    for (const auto& [p, frozen_h] : {std::pair{P2, frozen::h_star_d2}, {P3, frozen::h_star_d3}}) {
        const CriticalHeight hs = solve_h_star(p);
        CHECK(std::abs(hs.h_star - frozen_h) <= 1e-8);
        CHECK(hs.residual <= 1e-9);
        CHECK(std::abs(lambda_h(hs.h_star, p) - 1.0) <= 1e-8);
        CHECK(hs.h_star > 0.0);
        CHECK(hs.h_star < std::sqrt(2.0 * u_star(p)));
        CHECK(hs.bracket.first <= hs.h_star);
        CHECK(hs.bracket.second >= hs.h_star);
    }
    CHECK(std::sqrt(2.0 * u_star(P2)) == doctest::Approx(1.6651).epsilon(1e-4));
    CHECK_THROWS_AS(solve_h_star(P2, 0.0), DomainError);
}

TEST_CASE("lambda_ua") {
    for (double a : {-1.0, 0.0, 1.0}) {
        CHECK(lambda_ua(Level{0.0}, a, P2) == lambda_h(a, P2));
    }
    const double at_ustar = lambda_ua(Level{u_star(P2)}, 0.0, P2);
    CHECK(at_ustar == doctest::Approx(frozen::lambda0_d2 / 2.0).epsilon(1e-9));
    CHECK(at_ustar < 1.0);
    std::vector<double> lam_a;
    for (int j = 0; j < 10; ++j) {
        lam_a.push_back(lambda_h(-1.0 + 0.3 * j, P2));
    }
    for (int i = 0; i < 10; ++i) {
        const double u = 0.15 * i;
        for (int j = 0; j < 10; ++j) {
            const double val = lambda_ua(Level{u}, -1.0 + 0.3 * j, P2);
            CHECK(val == doctest::Approx(lam_a[j] * std::exp(-u * 0.5)).epsilon(1e-12));
            if (j > 0) {
                CHECK(val < lambda_ua(Level{u}, -1.0 + 0.3 * (j - 1), P2));
            }
            if (i > 0) {
                CHECK(val < lambda_ua(Level{0.15 * (i - 1)}, -1.0 + 0.3 * j, P2));
            }
        }
    }
    CHECK_THROWS_AS(lambda_ua(Level{-0.1}, 0.0, P2), DomainError);
}

TEST_CASE("critical_a") {
    const double hs = solve_h_star(P2).h_star;
    const auto at0 = critical_a(Level{0.0}, P2);
    REQUIRE(at0);
    CHECK(std::abs(*at0 - hs) <= 1e-8);

    const double u0 = std::log(frozen::lambda0_d2) / P2.decay_exponent;
    CHECK(std::abs(u0 - frozen::u0_d2) <= 1e-9);
    CHECK(u0 < u_star(P2));
    const auto at_u0 = critical_a(Level{u0}, P2);
    REQUIRE(at_u0);
    CHECK(std::abs(*at_u0) <= 1e-6);
    CHECK(std::abs(std::log(frozen::lambda0_d3) / P3.decay_exponent - frozen::u0_d3) <= 1e-9);

    for (int k = 0; k <= 8; ++k) {
        const double u = u0 * k / 8.0;
        const auto a = critical_a(Level{u}, P2);
        REQUIRE(a);
        CHECK(std::abs(lambda_ua(Level{u}, *a, P2) - 1.0) <= 1e-8);
    }
    CHECK_FALSE(critical_a(Level{u_star(P2)}, P2).has_value());
    CHECK_FALSE(critical_a(Level{2.0 * u_star(P2)}, P2).has_value());
    CHECK_THROWS_AS(critical_a(Level{-1.0}, P2), DomainError);
}

TEST_CASE("two_point_prediction") {
    for (double a : {-0.5, 0.0, 0.4}) {
        CHECK(std::abs(two_point_prediction(a, 0, P2) - nu_tail(a, P2)) <= 1e-10);
    }
    for (int n : {1, 5, 20}) {
        CHECK(std::abs(two_point_prediction(-8 * S2, n, P2) - 1.0) <= 1e-6);
    }

    const HeightSolution sol = solve_at_height(0.3, P2);
    double chi_mass = 0.0;
    for (std::size_t i = 0; i < sol.pair.chi.size(); ++i) {
        chi_mass += sol.op.grid().weights[i] * sol.pair.chi[i];
    }
    const double rate = sol.pair.lambda / 2.0;
    for (int n : {4, 8, 12}) {
        const double v = two_point_prediction(0.3, n, P2);
        CHECK(v <= std::pow(rate, n));
        CHECK(v >= std::pow(rate, n) * chi_mass * chi_mass);
    }

    // The values form a moment sequence of a positive semidefinite operator,
    // so consecutive ratios increase to lambda_a / d from below.
    const std::vector<double> seq = two_point_sequence(0.3, 64, P2);
    for (int n = 1; n < 64; ++n) {
        CHECK(seq[n + 1] / seq[n] >= seq[n] / seq[n - 1] - 1e-12);
        CHECK(std::pow(seq[n] / seq[0], 1.0 / n) <= rate + 1e-12);
    }
    CHECK(std::abs(seq[64] / seq[63] - rate) <= 1e-4);
    CHECK(std::abs(std::pow(seq[64] / seq[0], 1.0 / 64) - rate) <= 1e-2);

    // Lebesgue-quadrature oracle of the same chain probability.
    CHECK(two_point_prediction(0.3, 8, P2) ==
          doctest::Approx(oracle::dense_ray_probability(0.3, 2, 0.5, 8)).epsilon(1e-8));
    CHECK_THROWS_AS(two_point_prediction(0.3, -1, P2), DomainError);
}

TEST_CASE("ray survival of a Gaussian vector with the tree Green function matches the c = 1/d reading") {
    // Covariance sigma2 d^{-|i-j|} along a ray of n edges, sampled by Cholesky.
    const int d = 2;
    const int n = 8;
    const double a = 0.3;
    Eigen::MatrixXd cov(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            cov(i, j) = P2.sigma2 * std::pow(1.0 / d, std::abs(i - j));
        }
    }
    const Eigen::MatrixXd chol = cov.llt().matrixL();
    std::mt19937_64 rng(2718);
    std::normal_distribution<double> normal;
    const int samples = 400000;
    int hits = 0;
    Eigen::VectorXd z(n + 1);
    for (int s = 0; s < samples; ++s) {
        for (int i = 0; i <= n; ++i) {
            z(i) = normal(rng);
        }
        const Eigen::VectorXd x = chol * z;
        hits += (x.array() > a).all() ? 1 : 0;
    }
    const double est = static_cast<double>(hits) / samples;
    const double se = std::sqrt(est * (1.0 - est) / samples);
    const double predicted = two_point_prediction(a, n, P2);
    const double literal = oracle::dense_ray_probability(a, d, std::exp(-1.0 / d), n);
    CHECK(std::abs(est - predicted) <= 3.0 * se);
    CHECK(std::abs(est - literal) > 10.0 * se);
}

TEST_CASE("eigenvalue gap inequality") {
    CHECK(check_thm21(0.0, 1.0, P2) == doctest::Approx(frozen::gap_d2_a0_r1).epsilon(1e-8));
    CHECK(check_thm21(0.5, 0.5, P2) == doctest::Approx(frozen::gap_d2_a05_r05).epsilon(1e-8));
    CHECK(check_thm21(1.0, 0.5, P2) == doctest::Approx(frozen::gap_d2_a1_r05).epsilon(1e-8));
    CHECK(std::abs(check_thm21(2.0, 2.0, P3) - frozen::gap_d3_a2_r2) <= 1e-10);

    SpectralOptions fine;
    fine.grid.node_count = 800;
    for (auto [a, rho] : {std::pair{0.0, 1.0}, {0.5, 0.5}, {1.75, 0.25}}) {
        const double g1 = check_thm21(a, rho, P2);
        CHECK(g1 > 0.0);
        CHECK(std::abs(g1 - check_thm21(a, rho, P2, fine)) <= 1e-6);
    }
    CHECK_THROWS_AS(check_thm21(-0.1, 0.5, P2), DomainError);
    CHECK_THROWS_AS(check_thm21(0.1, 0.0, P2), DomainError);
}

TEST_CASE("v_function") {
    CHECK(v_function(0.2, 0.5, 1.0, P2) == 1.0);
    CHECK(v_function(0.5, 0.5, 1.0, P2) == 1.0);
    CHECK(v_function(-3.0, 0.0, 1.0, P2) == 1.0);

    const double p = vacancy_probs(Level{0.5}, P2).p;
    double previous = 1.0;
    for (int k = 1; k <= 40; ++k) {
        const double b = 0.1 * k;
        const double v = v_function(b, 0.0, 1.0, P2);
        CHECK(v > p);
        CHECK(v <= 1.0);
        CHECK(v < previous);
        previous = v;
    }

    // Brute-force expectation over Z on a wide uniform panel grid.
    const double s = std::sqrt(P2.transition_variance());
    for (auto [b, a, rho] : {std::tuple{1.0, 0.0, 1.0}, {2.5, 0.5, 0.5}, {0.8, 0.3, 2.0}}) {
        const double pp = vacancy_probs(Level{a * rho + 0.5 * rho * rho}, P2).p;
        const double e = integrate_panels(
            [&](double z) {
                const double y = b / 2.0 + s * z;
                return std::exp(-2.0 * std::max(y - a, 0.0) * (b - a) - 0.5 * z * z) /
                       std::sqrt(2.0 * std::numbers::pi);
            },
            -12.0, 12.0, 2000, gauss_legendre(8));
        CHECK(v_function(b, a, rho, P2) == doctest::Approx(pp + (1.0 - pp) * e).epsilon(1e-7));
    }
}

TEST_CASE("lambda_tilde sits between lambda_{a+rho}/p and lambda_a") {
    for (auto [a, rho] : {std::pair{0.0, 1.0}, {0.5, 0.5}, {1.0, 0.5}}) {
        for (const TreeParams& p : {P2, P3}) {
            const double lt = lambda_tilde(a, rho, p);
            const double pp = vacancy_probs(Level{a * rho + 0.5 * rho * rho}, p).p;
            CHECK(lambda_h(a + rho, p) < lt * pp - 1e-6);
            CHECK(lt < lambda_h(a, p) - 1e-6);
        }
    }
    CHECK(std::abs(lambda_tilde(0.5, 1e-4, P2) - lambda_h(0.5, P2)) <= 1e-3);
    CHECK_THROWS_AS(lambda_tilde(-0.5, 0.5, P2), DomainError);
    CHECK_THROWS_AS(lambda_tilde(0.5, -0.5, P2), DomainError);
}

TEST_CASE("parabola_scan") {
    const double hs = solve_h_star(P2).h_star;
    const double h_top = std::sqrt(2.0 * u_star(P2));
    for (double h : {0.5 * hs, hs, h_top}) {
        const ParabolaScan scan = parabola_scan(h, 16, P2);
        REQUIRE(scan.samples.size() == 17);
        CHECK(scan.strictly_increasing(1e-9));
        CHECK(std::abs(scan.samples.front().lambda - lambda_h(h, P2)) <= 1e-8);
        CHECK(std::abs(scan.samples.back().lambda - frozen::lambda0_d2 * std::exp(-0.25 * h * h)) <= 1e-8);
        CHECK(scan.samples.back().a == 0.0);
        CHECK(scan.samples.back().u == 0.5 * h * h);
        for (const ArcSample& s : scan.samples) {
            CHECK(s.a >= 0.0);
        }
    }
    const ParabolaScan at_hs = parabola_scan(hs, 8, P2);
    CHECK(std::abs(at_hs.samples.front().lambda - 1.0) <= 1e-8);
    const ParabolaScan top = parabola_scan(h_top, 8, P2);
    CHECK(top.samples.back().lambda == doctest::Approx(frozen::lambda0_d2 / 2.0).epsilon(1e-8));
    CHECK(top.samples.back().lambda < 1.0);
    CHECK(top.samples.front().lambda < 1.0);
    CHECK_THROWS_AS(parabola_scan(0.0, 8, P2), DomainError);
    CHECK_THROWS_AS(parabola_scan(1.0, 1, P2), DomainError);
}

TEST_CASE("second_moment_bound") {
    const SecondMomentBound b = second_moment_bound(Level{0.05}, 0.2, P2);
    CHECK(b.bound > 0.0);
    CHECK(b.bound < 1.0);
    CHECK(b.A <= 1.5 * vacancy_probs(Level{0.05}, P2).p0);
    CHECK(b.A > 0.0);
    CHECK(b.B >= b.A);
    CHECK(b.bound == doctest::Approx(b.A * b.A / b.B));
    CHECK_THROWS_AS(second_moment_bound(Level{0.0}, 1.0, P2), PreconditionError);
    CHECK_THROWS_AS(second_moment_bound(Level{2.0}, 0.0, P2), PreconditionError);
}
