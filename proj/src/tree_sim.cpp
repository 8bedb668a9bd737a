#include "treeperc/tree_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <string>

#include "treeperc/errors.hpp"
#include "treeperc/parallel.hpp"

namespace treeperc {

namespace {

using Index = BallLayout::Index;

BallLayout checked_layout(int n, int d, const SimOptions& opts) {
    if (n < 0) {
        throw DomainError("ball depth must be >= 0");
    }
    const std::uint64_t size = ball_size(n, d);
    if (size > opts.max_vertices) {
        throw ResourceError("ball B_" + std::to_string(n) + " has " + std::to_string(size) +
                            " vertices, above the configured cap of " +
                            std::to_string(opts.max_vertices));
    }
    return BallLayout(d, n);
}

void require_level(Level v) {
    if (!(v.v >= 0.0)) {
        throw DomainError("interlacement level must be >= 0");
    }
}

void require_trials(std::uint64_t trials) {
    if (trials < 1) {
        throw DomainError("need at least one trial");
    }
}

void require_inequality_args(double a, double rho) {
    if (!(a >= 0.0)) {
        throw DomainError("inequality checks need a >= 0, got " + std::to_string(a));
    }
    if (!(rho > 0.0)) {
        throw DomainError("inequality checks need rho > 0, got " + std::to_string(rho));
    }
}

struct CountAcc {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    void merge(const CountAcc& o) {
        trials += o.trials;
        successes += o.successes;
    }
    [[nodiscard]] McEstimate finish() const { return make_estimate(successes, trials); }
};

}  // namespace

// ---------------------------------------------------------------------------
// Samplers

bool VacancyMarks::geodesic_vacant(Index v) const {
    while (true) {
        if (blocked[v]) {
            return false;
        }
        if (v == 0) {
            return true;
        }
        v = layout.parent(v);
    }
}

bool InterlacementWindow::empty() const {
    return std::none_of(occupied.begin(), occupied.end(), [](std::uint8_t o) { return o != 0; });
}

void fill_gff(GffBall& ball, const TreeParams& params, Xoshiro256& rng) {
    const BallLayout& L = ball.layout;
    ball.values.resize(L.size());
    std::normal_distribution<double> normal;
    const double c = params.contraction;
    const double s = std::sqrt(params.transition_variance());
    ball.values[0] = params.sigma() * normal(rng);
    // Children of consecutive vertices are consecutive, so the next child
    // index just advances.
    Index next = 1;
    for (int k = 0; k < L.depth(); ++k) {
        const int children = k == 0 ? params.d + 1 : params.d;
        for (Index v = L.level_begin(k); v < L.level_end(k); ++v) {
            const double mean = c * ball.values[v];
            for (int j = 0; j < children; ++j) {
                ball.values[next++] = mean + s * normal(rng);
            }
        }
    }
}

void fill_vacancy_marks(VacancyMarks& marks, const TreeParams& params, Xoshiro256& rng) {
    const VacancyConstants vc = vacancy_probs(marks.level, params);
    marks.blocked.resize(marks.layout.size());
    marks.blocked[0] = rng.uniform() >= vc.p0;
    for (Index v = 1; v < marks.layout.size(); ++v) {
        marks.blocked[v] = rng.uniform() >= vc.p;
    }
}

void fill_interlacement_window(InterlacementWindow& window, const TreeParams& params,
                               Xoshiro256& rng) {
    const BallLayout& L = window.layout;
    const int n = L.depth();
    const int d = params.d;
    window.occupied.assign(L.size(), 0);
    window.trajectory_count = 0;
    const double mean = window.level.v * ball_capacity(n, params);
    if (mean <= 0.0) {
        return;
    }
    std::poisson_distribution<std::uint64_t> poisson(mean);
    std::uniform_int_distribution<Index> entrance(L.level_begin(n), L.level_end(n) - 1);
    std::uniform_int_distribution<int> step(0, d);
    const double return_prob = 1.0 / d;
    window.trajectory_count = poisson(rng);
    for (std::uint64_t t = 0; t < window.trajectory_count; ++t) {
        // Forward part from the entrance point; the backward part never
        // re-enters the ball.
        Index x = entrance(rng);
        int level = n;
        while (true) {
            window.occupied[x] = 1;
            const int r = step(rng);
            if (level > 0 && r == 0) {
                x = L.parent(x);
                --level;
                continue;
            }
            if (level == n) {
                // Stepped off the ball; the only way back is through x,
                // reached with probability 1/d.
                if (rng.uniform() < return_prob) {
                    continue;
                }
                break;
            }
            const int child = level == 0 ? r : r - 1;
            x = L.first_child(x) + static_cast<Index>(child);
            ++level;
        }
    }
}

void fill_lupu_edges(EdgeStates& edges, const GffBall& phi, double a, Xoshiro256& rng) {
    const BallLayout& L = phi.layout;
    edges.assign(L.size(), 0);
    Index v = 1;
    for (int k = 0; k < L.depth(); ++k) {
        const int children = k == 0 ? L.d() + 1 : L.d();
        for (Index x = L.level_begin(k); x < L.level_end(k); ++x) {
            const double above = std::max(phi.values[x] - a, 0.0);
            for (int j = 0; j < children; ++j, ++v) {
                const double w = above * std::max(phi.values[v] - a, 0.0);
                if (w > 0.0) {
                    edges[v] = rng.uniform() < -std::expm1(-2.0 * w);
                }
            }
        }
    }
}

GffBall sample_gff_ball(int n, const TreeParams& params, Seed seed, const SimOptions& opts) {
    GffBall ball{checked_layout(n, params.d, opts), {}};
    Xoshiro256 rng = trial_engine(seed, 0);
    fill_gff(ball, params, rng);
    return ball;
}

VacancyMarks sample_vacancy_marks(Level v, int n, const TreeParams& params, Seed seed,
                                  const SimOptions& opts) {
    require_level(v);
    VacancyMarks marks{checked_layout(n, params.d, opts), v, {}};
    Xoshiro256 rng = trial_engine(seed, 0);
    fill_vacancy_marks(marks, params, rng);
    return marks;
}

InterlacementWindow sample_interlacement_window(Level v, int n, const TreeParams& params, Seed seed,
                                                const SimOptions& opts) {
    require_level(v);
    if (n < 1) {
        throw DomainError("interlacement window needs n >= 1");
    }
    InterlacementWindow window{checked_layout(n, params.d, opts), v, {}, 0};
    Xoshiro256 rng = trial_engine(seed, 0);
    fill_interlacement_window(window, params, rng);
    return window;
}

EdgeStates sample_lupu_edges(const GffBall& phi, double a, Seed seed) {
    EdgeStates edges;
    Xoshiro256 rng = trial_engine(seed, 0);
    fill_lupu_edges(edges, phi, a, rng);
    return edges;
}

// ---------------------------------------------------------------------------
// Cluster exploration

namespace {

struct Frame {
    int depth;
    double phi;
    int children_left;
};

struct TauAcc {
    std::vector<std::uint64_t> reached;
    std::uint64_t capped = 0;
    std::uint64_t completed = 0;
    std::vector<Frame> stack;

    void merge(const TauAcc& o) {
        if (reached.size() < o.reached.size()) {
            reached.resize(o.reached.size(), 0);
        }
        for (std::size_t m = 0; m < o.reached.size(); ++m) {
            reached[m] += o.reached[m];
        }
        capped += o.capped;
        completed += o.completed;
    }
};

/// Largest radius reached (capped at n) by the cluster of x_0 in
/// V^u cap {phi > a}, or -1 when x_0 itself is excluded. Returns -2 when the
/// exploration budget ran out.
int explore_cluster(const VacancyConstants& vc, double a, int n, const TreeParams& params,
                    std::uint64_t max_explored, Xoshiro256& rng, std::vector<Frame>& stack) {
    std::normal_distribution<double> normal;
    if (!(rng.uniform() < vc.p0)) {
        return -1;
    }
    const double phi0 = params.sigma() * normal(rng);
    if (!(phi0 > a)) {
        return -1;
    }
    if (n == 0) {
        return 0;
    }
    const double c = params.contraction;
    const double s = std::sqrt(params.transition_variance());
    int max_radius = 0;
    std::uint64_t explored = 1;
    stack.clear();
    stack.push_back({0, phi0, params.d + 1});
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.children_left == 0) {
            stack.pop_back();
            continue;
        }
        --top.children_left;
        if (++explored > max_explored) {
            return -2;
        }
        if (!(rng.uniform() < vc.p)) {
            continue;
        }
        const double phi = c * top.phi + s * normal(rng);
        if (!(phi > a)) {
            continue;
        }
        const int depth = top.depth + 1;
        max_radius = std::max(max_radius, depth);
        if (depth == n) {
            return n;
        }
        stack.push_back({depth, phi, params.d});
    }
    return max_radius;
}

}  // namespace

TauEstimate estimate_tau_n(Level u, double a, int n, std::uint64_t trials, const TreeParams& params,
                           Seed seed, const SimOptions& opts) {
    require_level(u);
    require_trials(trials);
    if (n < 0) {
        throw DomainError("radius n must be >= 0");
    }
    const VacancyConstants vc = vacancy_probs(u, params);
    auto acc = run_trials<TauAcc>(trials, opts.workers, [&](std::uint64_t t, TauAcc& local) {
        if (local.reached.empty()) {
            local.reached.assign(n + 1, 0);
        }
        Xoshiro256 rng = trial_engine(seed, t);
        const int radius = explore_cluster(vc, a, n, params, opts.max_explored, rng, local.stack);
        if (radius == -2) {
            ++local.capped;
            return;
        }
        ++local.completed;
        for (int m = 0; m <= radius; ++m) {
            ++local.reached[m];
        }
    });
    acc.reached.resize(n + 1, 0);
    TauEstimate out;
    out.u = u.v;
    out.a = a;
    out.n = n;
    out.capped_trials = acc.capped;
    out.reached = acc.reached;
    if (acc.completed == 0) {
        throw ResourceError("every trial exceeded the exploration cap of " +
                            std::to_string(opts.max_explored) + " vertices");
    }
    for (int m = 0; m <= n; ++m) {
        out.by_radius.push_back(make_estimate(acc.reached[m], acc.completed));
    }
    return out;
}

McEstimate estimate_two_point(Level u, double a, int n, std::uint64_t trials, const TreeParams& params,
                              Seed seed, const SimOptions& opts) {
    require_level(u);
    require_trials(trials);
    if (n < 0) {
        throw DomainError("geodesic length must be >= 0");
    }
    const VacancyConstants vc = vacancy_probs(u, params);
    const double c = params.contraction;
    const double s = std::sqrt(params.transition_variance());
    auto acc = run_trials<CountAcc>(trials, opts.workers, [&](std::uint64_t t, CountAcc& local) {
        ++local.trials;
        Xoshiro256 rng = trial_engine(seed, t);
        std::normal_distribution<double> normal;
        if (!(rng.uniform() < vc.p0)) {
            return;
        }
        double phi = params.sigma() * normal(rng);
        if (!(phi > a)) {
            return;
        }
        for (int k = 1; k <= n; ++k) {
            if (!(rng.uniform() < vc.p)) {
                return;
            }
            phi = c * phi + s * normal(rng);
            if (!(phi > a)) {
                return;
            }
        }
        ++local.successes;
    });
    return acc.finish();
}

// ---------------------------------------------------------------------------
// Inequality checks

double ComparisonReport::z() const {
    const double se = combined_std_error(left, right);
    const double diff = left.estimate - right.estimate;
    if (se == 0.0) {
        return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    return diff / se;
}

ComparisonReport compare_le(std::string name, const McEstimate& left, const McEstimate& right,
                            double sigmas) {
    ComparisonReport r{std::move(name), left, right, sigmas, false};
    r.pass = left.estimate <= right.estimate + sigmas * combined_std_error(left, right);
    return r;
}

ComparisonReport check_ineq_118(Level u, double a, double rho, int n, std::uint64_t trials,
                                const TreeParams& params, Seed seed, const SimOptions& opts) {
    require_level(u);
    require_inequality_args(a, rho);
    const TauEstimate left = estimate_tau_n(u, a + rho, n, trials, params, seed.child(1), opts);
    const TauEstimate right =
        estimate_tau_n(Level{u.v + a * rho + 0.5 * rho * rho}, a, n, trials, params, seed.child(2), opts);
    return compare_le("tau_n(u, a+rho) <= tau_n(u + a rho + rho^2/2, a)", left.tau_n(), right.tau_n());
}

ArcReport check_arc_monotonicity(double h, int n, int K, std::uint64_t trials, const TreeParams& params,
                                 Seed seed, const SimOptions& opts) {
    if (!(h >= 0.0)) {
        throw DomainError("arc parameter h must be >= 0");
    }
    if (K < 2) {
        throw DomainError("arc check needs K >= 2");
    }
    ArcReport report;
    report.h = h;
    report.n = n;
    const double u_end = 0.5 * h * h;
    for (int k = 0; k <= K; ++k) {
        ArcPoint p;
        p.u = k == K ? u_end : u_end * k / K;
        p.a = k == K ? 0.0 : std::sqrt(std::max(h * h - 2.0 * p.u, 0.0));
        p.tau = estimate_tau_n(Level{p.u}, p.a, n, trials, params, seed.child(k), opts).tau_n();
        report.points.push_back(p);
    }
    report.pass = true;
    report.worst_drop_sigmas = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < report.points.size(); ++k) {
        const McEstimate& prev = report.points[k - 1].tau;
        const McEstimate& cur = report.points[k].tau;
        const double se = combined_std_error(prev, cur);
        const double drop = prev.estimate - cur.estimate;
        const double drop_sigmas =
            se > 0.0 ? drop / se : (drop > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        report.worst_drop_sigmas = std::max(report.worst_drop_sigmas, drop_sigmas);
        if (drop > 3.0 * se) {
            report.pass = false;
        }
    }
    return report;
}

namespace {

struct DominationScratch {
    GffBall ball;
    InterlacementWindow window;
    EdgeStates edges;
    std::vector<std::uint8_t> removed;
    std::vector<Index> queue;
    std::vector<Index> parent;
    std::vector<Index> first_child;  ///< equal to size() on the sphere
    std::vector<int> level;

    DominationScratch(const TreeParams& params, int depth, double level_v)
        : ball{BallLayout(params.d, depth), {}}, window{BallLayout(params.d, depth), Level{level_v}, {}, 0} {
        const BallLayout& L = ball.layout;
        parent.assign(L.size(), 0);
        first_child.assign(L.size(), L.size());
        level.assign(L.size(), depth);
        Index next = 1;
        for (int k = 0; k < depth; ++k) {
            const int children = k == 0 ? params.d + 1 : params.d;
            for (Index v = L.level_begin(k); v < L.level_end(k); ++v) {
                level[v] = k;
                first_child[v] = next;
                for (int j = 0; j < children; ++j) {
                    parent[next++] = v;
                }
            }
        }
    }
};

bool right_event(double a, int n, const TreeParams& params, DominationScratch& sc, Xoshiro256& rng) {
    const BallLayout& L = sc.ball.layout;
    fill_gff(sc.ball, params, rng);
    fill_interlacement_window(sc.window, params, rng);
    fill_lupu_edges(sc.edges, sc.ball, a, rng);
    const std::vector<double>& phi = sc.ball.values;

    // Remove every open-edge cluster that contains an occupied vertex.
    sc.removed.assign(L.size(), 0);
    sc.queue.clear();
    for (Index v = 0; v < L.size(); ++v) {
        if (sc.window.occupied[v] && phi[v] > a) {
            sc.removed[v] = 1;
            sc.queue.push_back(v);
        }
    }
    for (std::size_t head = 0; head < sc.queue.size(); ++head) {
        const Index x = sc.queue[head];
        if (x != 0 && sc.edges[x]) {
            const Index p = sc.parent[x];
            if (!sc.removed[p]) {
                sc.removed[p] = 1;
                sc.queue.push_back(p);
            }
        }
        const int children = sc.level[x] < L.depth() ? (x == 0 ? L.d() + 1 : L.d()) : 0;
        const Index first = sc.first_child[x];
        for (int j = 0; j < children; ++j) {
            const Index y = first + static_cast<Index>(j);
            if (sc.edges[y] && !sc.removed[y]) {
                sc.removed[y] = 1;
                sc.queue.push_back(y);
            }
        }
    }

    auto allowed = [&](Index v) { return phi[v] > a && !sc.removed[v]; };
    if (!allowed(0)) {
        return false;
    }
    if (n == 0) {
        return true;
    }
    sc.queue.clear();
    sc.queue.push_back(0);
    while (!sc.queue.empty()) {
        const Index x = sc.queue.back();
        sc.queue.pop_back();
        const int level = sc.level[x];
        const Index first = sc.first_child[x];
        const int children = level < L.depth() ? (x == 0 ? L.d() + 1 : L.d()) : 0;
        for (int j = 0; j < children; ++j) {
            const Index y = first + static_cast<Index>(j);
            if (allowed(y)) {
                if (level + 1 == n) {
                    return true;
                }
                sc.queue.push_back(y);
            }
        }
    }
    return false;
}

struct DominationAcc {
    CountAcc counts;
    std::unique_ptr<DominationScratch> scratch;
    void merge(const DominationAcc& o) { counts.merge(o.counts); }
};

McEstimate estimate_right(double a, double rho, int n, int buffer, std::uint64_t trials,
                          const TreeParams& params, Seed seed, const SimOptions& opts) {
    const int depth = n + buffer;
    checked_layout(depth, params.d, opts);
    const double level = a * rho + 0.5 * rho * rho;
    auto acc = run_trials<DominationAcc>(trials, opts.workers, [&](std::uint64_t t, DominationAcc& local) {
        if (!local.scratch) {
            local.scratch = std::make_unique<DominationScratch>(params, depth, level);
        }
        Xoshiro256 rng = trial_engine(seed, t);
        ++local.counts.trials;
        if (right_event(a, n, params, *local.scratch, rng)) {
            ++local.counts.successes;
        }
    });
    return acc.counts.finish();
}

}  // namespace

bool domination_right_event(double a, double rho, int n, int buffer, const TreeParams& params,
                            Xoshiro256& rng) {
    DominationScratch sc(params, n + buffer, a * rho + 0.5 * rho * rho);
    return right_event(a, n, params, sc, rng);
}

DominationReport check_domination(double a, double rho, int n, int buffer, std::uint64_t trials,
                                  const TreeParams& params, Seed seed, const SimOptions& opts) {
    require_inequality_args(a, rho);
    require_trials(trials);
    if (n < 1) {
        throw DomainError("domination check needs n >= 1");
    }
    if (buffer < 0) {
        throw DomainError("buffer must be >= 0");
    }
    DominationReport report;
    report.a = a;
    report.rho = rho;
    report.n = n;
    report.buffer = buffer;
    const McEstimate left =
        estimate_tau_n(Level{0.0}, a + rho, n, trials, params, seed.child(1), opts).tau_n();
    const McEstimate right = estimate_right(a, rho, n, buffer, trials, params, seed.child(2), opts);
    report.main = compare_le("P[x_0 <-> S_n in {phi > a+rho}] <= P[x_0 <-> S_n in {phi > a} minus "
                             "Lupu clusters of I^(a rho + rho^2/2)]",
                             left, right);
    if (buffer >= 1) {
        report.alt_buffer = buffer - 1;
        report.right_alt =
            estimate_right(a, rho, n, buffer - 1, trials, params, seed.child(3), opts);
        const double se = combined_std_error(right, report.right_alt);
        const double shift = right.estimate - report.right_alt.estimate;
        report.buffer_shift_sigmas = se > 0.0 ? shift / se : (shift == 0.0 ? 0.0 : 1e300);
        report.buffer_stable = std::abs(report.buffer_shift_sigmas) < 2.0;
    }
    report.caveat = "Lupu clusters and interlacement traces are computed inside B_" +
                    std::to_string(n + buffer) + " only; connections through vertices outside "
                    "the window are ignored";
    return report;
}

// ---------------------------------------------------------------------------
// Sampler validation

McEstimate estimate_window_void(Level v, int n, std::uint64_t trials, const TreeParams& params, Seed seed,
                                const SimOptions& opts) {
    require_level(v);
    require_trials(trials);
    if (n < 1) {
        throw DomainError("interlacement window needs n >= 1");
    }
    const BallLayout layout = checked_layout(n, params.d, opts);
    struct Acc {
        CountAcc counts;
        InterlacementWindow window;
        bool ready = false;
        void merge(const Acc& o) { counts.merge(o.counts); }
    };
    auto acc = run_trials<Acc>(trials, opts.workers, [&](std::uint64_t t, Acc& local) {
        if (!local.ready) {
            local.window.layout = layout;
            local.ready = true;
        }
        local.window.level = v;
        Xoshiro256 rng = trial_engine(seed, t);
        fill_interlacement_window(local.window, params, rng);
        ++local.counts.trials;
        local.counts.successes += local.window.empty() ? 1 : 0;
    });
    return acc.counts.finish();
}

CrossSamplerReport cross_sampler_check(Level v, int n, std::uint64_t trials, const TreeParams& params,
                                       Seed seed, const SimOptions& opts) {
    require_level(v);
    require_trials(trials);
    if (n < 1) {
        throw DomainError("cross-sampler check needs n >= 1");
    }
    const BallLayout layout = checked_layout(n, params.d, opts);
    const Index target = layout.ray_vertex(n);

    struct MarksAcc {
        CountAcc counts;
        VacancyMarks marks;
        bool ready = false;
        void merge(const MarksAcc& o) { counts.merge(o.counts); }
    };
    const Seed marks_seed = seed.child(1);
    auto marks = run_trials<MarksAcc>(trials, opts.workers, [&](std::uint64_t t, MarksAcc& local) {
        if (!local.ready) {
            local.marks.layout = layout;
            local.ready = true;
        }
        local.marks.level = v;
        Xoshiro256 rng = trial_engine(marks_seed, t);
        fill_vacancy_marks(local.marks, params, rng);
        ++local.counts.trials;
        local.counts.successes += local.marks.geodesic_vacant(target) ? 1 : 0;
    });

    struct WindowAcc {
        CountAcc counts;
        InterlacementWindow window;
        bool ready = false;
        void merge(const WindowAcc& o) { counts.merge(o.counts); }
    };
    const Seed window_seed = seed.child(2);
    auto window = run_trials<WindowAcc>(trials, opts.workers, [&](std::uint64_t t, WindowAcc& local) {
        if (!local.ready) {
            local.window.layout = layout;
            local.ready = true;
        }
        local.window.level = v;
        Xoshiro256 rng = trial_engine(window_seed, t);
        fill_interlacement_window(local.window, params, rng);
        bool vacant = true;
        for (int k = 0; k <= n && vacant; ++k) {
            vacant = !local.window.occupied[layout.ray_vertex(k)];
        }
        ++local.counts.trials;
        local.counts.successes += vacant ? 1 : 0;
    });

    CrossSamplerReport r;
    r.from_marks = marks.counts.finish();
    r.from_window = window.counts.finish();
    const double se = combined_std_error(r.from_marks, r.from_window);
    const double diff = r.from_marks.estimate - r.from_window.estimate;
    r.z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : 1e300);
    r.pass = std::abs(r.z) <= 4.0;
    return r;
}

GffMoments gff_moment_check(std::uint64_t samples, const TreeParams& params, Seed seed,
                            const SimOptions& opts) {
    require_trials(samples);
    const BallLayout layout(params.d, 1);
    struct Acc {
        MomentAccumulator variance;
        MomentAccumulator covariance;
        GffBall ball;
        bool ready = false;
        void merge(const Acc& o) {
            variance.merge(o.variance);
            covariance.merge(o.covariance);
        }
    };
    auto acc = run_trials<Acc>(samples, opts.workers, [&](std::uint64_t t, Acc& local) {
        if (!local.ready) {
            local.ball.layout = layout;
            local.ready = true;
        }
        Xoshiro256 rng = trial_engine(seed, t);
        fill_gff(local.ball, params, rng);
        const double root = local.ball.values[0];
        local.variance.add(root * root);
        local.covariance.add(root * local.ball.values[1]);
    });
    return {acc.variance.finish(), acc.covariance.finish()};
}

double fit_log_slope(const std::vector<McEstimate>& by_radius, int m_from, int m_to) {
    if (m_from < 0 || m_to >= static_cast<int>(by_radius.size()) || m_to - m_from < 1) {
        throw DomainError("log-slope fit needs a valid range of at least two radii");
    }
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    const double count = m_to - m_from + 1;
    for (int m = m_from; m <= m_to; ++m) {
        const double est = by_radius[m].estimate;
        if (!(est > 0.0)) {
            throw DomainError("log-slope fit hit a zero estimate at radius " + std::to_string(m));
        }
        const double y = std::log(est);
        sx += m;
        sy += y;
        sxx += static_cast<double>(m) * m;
        sxy += m * y;
    }
    return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

}  // namespace treeperc
