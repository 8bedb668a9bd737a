#include "treeperc/selftest.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <sstream>

#include "treeperc/core_model.hpp"
#include "treeperc/diagram.hpp"
#include "treeperc/quadrature.hpp"
#include "treeperc/spectral.hpp"
#include "treeperc/tree_sim.hpp"

namespace treeperc {

namespace {

struct Runner {
    std::vector<SelfTestCase> cases;

    void check(const std::string& module, const std::string& name, const std::function<double()>& value,
               double expected, double tol) {
        SelfTestCase c{module, name, false, {}};
        try {
            const double got = value();
            c.pass = std::abs(got - expected) <= tol;
            std::ostringstream os;
            os.precision(15);
            os << "got " << got << ", expected " << expected << " +- " << tol;
            c.detail = os.str();
        } catch (const std::exception& e) {
            c.detail = std::string("threw: ") + e.what();
        }
        cases.push_back(std::move(c));
    }

    void expect(const std::string& module, const std::string& name, const std::function<bool()>& predicate) {
        SelfTestCase c{module, name, false, {}};
        try {
            c.pass = predicate();
        } catch (const std::exception& e) {
            c.detail = std::string("threw: ") + e.what();
        }
        cases.push_back(std::move(c));
    }
};

}  // namespace

std::vector<SelfTestCase> run_selftest() {
    Runner r;
    const TreeParams p2 = make_params(2);
    const TreeParams p3 = make_params(3);
    const double s2 = p2.sigma();

    r.check("core_model", "d=2 sigma2", [&] { return p2.sigma2; }, 2.0 / 3.0, 1e-15);
    r.check("core_model", "d=2 decay exponent", [&] { return p2.decay_exponent; }, 0.5, 1e-15);
    r.check("core_model", "d=2 point capacity", [&] { return p2.point_capacity; }, 1.5, 1e-15);
    r.check("core_model", "d=3 sigma2", [&] { return p3.sigma2; }, 3.0 / 8.0, 1e-15);
    r.check("core_model", "d=3 decay exponent", [&] { return p3.decay_exponent; }, 4.0 / 3.0, 1e-15);
    r.check("core_model", "nu density at 0", [&] { return nu_density(0.0, p2); },
            1.0 / std::sqrt(2.0 * std::numbers::pi * 2.0 / 3.0), 1e-15);
    r.check("core_model", "nu density symmetric", [&] { return nu_density(0.37, p2) - nu_density(-0.37, p2); },
            0.0, 0.0);
    r.check("core_model", "nu mass on [-8 sigma, 8 sigma]",
            [&] { return integrate_panels([&](double x) { return nu_density(x, p2); }, -8 * s2, 8 * s2, 64,
                                          gauss_legendre(16)); },
            1.0, 1e-12);
    r.check("core_model", "kernel at (0,0)", [&] { return mehler_kernel(0.0, 0.0, p2); }, 2.0 / std::sqrt(3.0),
            1e-15);
    r.check("core_model", "kernel symmetric",
            [&] { return mehler_kernel(0.3, -1.1, p2) - mehler_kernel(-1.1, 0.3, p2); }, 0.0, 1e-14);
    r.check("core_model", "kernel normalized at x=0.7",
            [&] {
                return integrate_panels([&](double y) { return mehler_kernel(0.7, y, p2) * nu_density(y, p2); },
                                        -10 * s2, 10 * s2, 64, gauss_legendre(16));
            },
            1.0, 1e-10);
    r.check("core_model", "p0 at v=0", [&] { return vacancy_probs(Level{0.0}, p2).p0; }, 1.0, 0.0);
    r.check("core_model", "p at v=0", [&] { return vacancy_probs(Level{0.0}, p2).p; }, 1.0, 0.0);
    r.check("core_model", "p0 at v=1", [&] { return vacancy_probs(Level{1.0}, p2).p0; }, std::exp(-1.5), 1e-15);
    r.check("core_model", "p at v=1", [&] { return vacancy_probs(Level{1.0}, p2).p; }, std::exp(-0.5), 1e-15);
    r.check("core_model", "u_star d=2", [&] { return u_star(p2); }, 2.0 * std::numbers::ln2, 1e-14);
    r.check("core_model", "u_star d=3", [&] { return u_star(p3); }, 0.75 * std::log(3.0), 1e-14);
    for (int d = 2; d <= 6; ++d) {
        const TreeParams p = make_params(d);
        r.check("core_model", "d exp(-u_* decay) = 1, d=" + std::to_string(d),
                [&] { return d * std::exp(-u_star(p) * p.decay_exponent); }, 1.0, 1e-14);
    }
    r.check("core_model", "cap(B_0)", [&] { return ball_capacity(0, p2); }, 1.5, 0.0);
    r.check("core_model", "cap(B_1)", [&] { return ball_capacity(1, p2); }, 3.0, 0.0);

    r.check("spectral", "grid mass at h=-8 sigma", [&] { return build_grid(-8 * s2, p2).total_weight(); }, 1.0,
            1e-12);
    r.check("spectral", "grid mass at h=0", [&] { return build_grid(0.0, p2).total_weight(); }, 0.5, 1e-10);
    r.check("spectral", "grid mass stable under doubling",
            [&] {
                GridOptions g;
                g.node_count = 800;
                return build_grid(0.0, p2, g).total_weight() - build_grid(0.0, p2).total_weight();
            },
            0.0, 1e-12);
    r.check("spectral", "Rayleigh quotient of sqrt(w) at h=-8 sigma",
            [&] {
                const QuadratureGrid g = build_grid(-8 * s2, p2);
                const DiscreteOperator op = discretize_Lh(-8 * s2, g, p2);
                std::vector<double> v(g.node_count());
                std::vector<double> out(g.node_count());
                double vv = 0.0;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    v[i] = std::sqrt(g.weights[i]);
                    vv += v[i] * v[i];
                }
                op.apply(v, out);
                double vav = 0.0;
                for (std::size_t i = 0; i < v.size(); ++i) {
                    vav += v[i] * out[i];
                }
                return vav / vv;
            },
            2.0, 1e-6);
    r.expect("spectral", "operator symmetric with positive entries", [&] {
        const DiscreteOperator op = discretize_Lh(0.2, build_grid(0.2, p2), p2);
        for (std::size_t i = 0; i < op.size(); ++i) {
            for (std::size_t j = 0; j < op.size(); ++j) {
                if (!(op(i, j) > 0.0) || std::abs(op(i, j) - op(j, i)) > 1e-13) {
                    return false;
                }
            }
        }
        return true;
    });
    r.check("spectral", "lambda(0, a) = lambda_a", [&] { return lambda_ua(Level{0.0}, 0.5, p2) - lambda_h(0.5, p2); },
            0.0, 0.0);
    r.check("spectral", "two-point n=0 is nu([a, inf))", [&] { return two_point_prediction(0.4, 0, p2); },
            0.5 * std::erfc(0.4 / (s2 * std::numbers::sqrt2)), 1e-10);
    r.check("spectral", "two-point at a=-8 sigma", [&] { return two_point_prediction(-8 * s2, 6, p2); }, 1.0, 1e-6);
    r.check("spectral", "V(b) = 1 for b <= a", [&] { return v_function(0.2, 0.5, 1.0, p2); }, 1.0, 0.0);
    r.check("spectral", "lambda tilde -> lambda_a as rho -> 0",
            [&] { return lambda_tilde(0.5, 1e-4, p2) - lambda_h(0.5, p2); }, 0.0, 1e-3);
    r.expect("spectral", "A <= ((d+1)/d) p0", [&] {
        const SecondMomentBound b = second_moment_bound(Level{0.05}, 0.2, p2);
        return b.A <= 1.5 * vacancy_probs(Level{0.05}, p2).p0;
    });

    r.check("tree_sim", "child conditional variance", [&] { return p2.transition_variance(); }, 0.5, 1e-15);
    r.expect("tree_sim", "v=0 blocks nothing", [&] {
        const VacancyMarks m = sample_vacancy_marks(Level{0.0}, 5, p2, Seed{1, 0});
        for (auto b : m.blocked) {
            if (b) {
                return false;
            }
        }
        return true;
    });
    r.expect("tree_sim", "Lupu edges closed at vertices with phi <= a", [&] {
        const GffBall ball = sample_gff_ball(6, p2, Seed{2, 0});
        const EdgeStates e = sample_lupu_edges(ball, 0.3, Seed{3, 0});
        for (BallLayout::Index v = 1; v < ball.layout.size(); ++v) {
            const bool low = ball.values[v] <= 0.3 || ball.values[ball.layout.parent(v)] <= 0.3;
            if (low && e[v]) {
                return false;
            }
        }
        return true;
    });
    r.check("tree_sim", "Lupu open probability at phi_x = phi_y = a+1",
            [&] { return -std::expm1(-2.0 * 1.0 * 1.0); }, 1.0 - std::exp(-2.0), 1e-15);
    r.check("tree_sim", "tau_n at u=0, a=-8 sigma",
            [&] { return estimate_tau_n(Level{0.0}, -8 * s2, 6, 2000, p2, Seed{4, 0}).tau_n().estimate; }, 1.0, 0.0);
    r.check("tree_sim", "two-point at u=0, a=-8 sigma",
            [&] { return estimate_two_point(Level{0.0}, -8 * s2, 8, 2000, p2, Seed{5, 0}).estimate; }, 1.0, 0.0);
    r.expect("tree_sim", "window occupancy touches the sphere", [&] {
        const InterlacementWindow w = sample_interlacement_window(Level{0.5}, 4, p2, Seed{6, 0});
        const BallLayout& L = w.layout;
        // Every occupied vertex must connect to S_n through occupied vertices.
        std::vector<std::uint8_t> good(L.size(), 0);
        for (int k = L.depth(); k >= 0; --k) {
            for (BallLayout::Index v = L.level_begin(k); v < L.level_end(k); ++v) {
                if (!w.occupied[v]) {
                    continue;
                }
                if (k == L.depth()) {
                    good[v] = 1;
                    continue;
                }
                for (int j = 0; j < L.child_count(v); ++j) {
                    good[v] = good[v] || good[L.first_child(v) + j];
                }
            }
        }
        // A component may also reach the sphere through an ancestor.
        for (int k = 1; k <= L.depth(); ++k) {
            for (BallLayout::Index v = L.level_begin(k); v < L.level_end(k); ++v) {
                if (w.occupied[v] && good[L.parent(v)]) {
                    good[v] = 1;
                }
            }
        }
        for (BallLayout::Index v = 0; v < L.size(); ++v) {
            if (w.occupied[v] && !good[v]) {
                return false;
            }
        }
        return true;
    });
    r.expect("tree_sim", "domination at rho=5: LEFT near 0 and PASS", [&] {
        const DominationReport d = check_domination(0.0, 5.0, 3, 1, 500, p2, Seed{7, 0});
        return d.main.left.estimate == 0.0 && d.pass();
    });

    r.check("diagram", "(0, h_*) in the critical band",
            [&] {
                const CriticalHeight hs = solve_h_star(p2);
                return classify(lambda_ua(Level{0.0}, hs.h_star, p2), 1e-3) == Region::critical_band ? 1.0 : 0.0;
            },
            1.0, 0.0);
    r.expect("diagram", "classification is a function of (lambda, eps)", [&] {
        return classify(1.002, 1e-3) == Region::supercritical && classify(0.998, 1e-3) == Region::subcritical &&
               classify(1.0005, 1e-3) == Region::critical_band;
    });
    return r.cases;
}

}  // namespace treeperc
