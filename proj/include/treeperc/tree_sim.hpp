#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treeperc/core_model.hpp"
#include "treeperc/mc_estimate.hpp"
#include "treeperc/rng.hpp"
#include "treeperc/tree_ball.hpp"

namespace treeperc {

struct SimOptions {
    std::uint64_t max_vertices = std::uint64_t{1} << 24;  ///< cap for materialized balls
    std::uint64_t max_explored = std::uint64_t{1} << 22;  ///< cap per exploration trial
    int workers = 1;
};

/// Field values on B_n. Child given parent b is Normal(b/d, sigma2 (1 - 1/d^2)).
struct GffBall {
    BallLayout layout;
    std::vector<double> values;
    [[nodiscard]] int depth() const { return layout.depth(); }
};

/// blocked[x]: some trajectory has x as its closest point to x_0.
struct VacancyMarks {
    BallLayout layout;
    Level level;
    std::vector<std::uint8_t> blocked;
    /// True when the geodesic from x_0 to v has no blocked vertex.
    [[nodiscard]] bool geodesic_vacant(BallLayout::Index v) const;
};

/// Trace of the interlacement on B_n.
struct InterlacementWindow {
    BallLayout layout;
    Level level;
    std::vector<std::uint8_t> occupied;
    std::uint64_t trajectory_count = 0;
    [[nodiscard]] bool empty() const;
};

/// Open/closed state per edge, indexed by the edge's child vertex (entry 0 unused).
using EdgeStates = std::vector<std::uint8_t>;

GffBall sample_gff_ball(int n, const TreeParams& params, Seed seed, const SimOptions& opts = {});
VacancyMarks sample_vacancy_marks(Level v, int n, const TreeParams& params, Seed seed,
                                  const SimOptions& opts = {});
InterlacementWindow sample_interlacement_window(Level v, int n, const TreeParams& params, Seed seed,
                                                const SimOptions& opts = {});
EdgeStates sample_lupu_edges(const GffBall& phi, double a, Seed seed);

/// Engine-driven variants used inside trial loops.
void fill_gff(GffBall& ball, const TreeParams& params, Xoshiro256& rng);
void fill_vacancy_marks(VacancyMarks& marks, const TreeParams& params, Xoshiro256& rng);
void fill_interlacement_window(InterlacementWindow& window, const TreeParams& params, Xoshiro256& rng);
void fill_lupu_edges(EdgeStates& edges, const GffBall& phi, double a, Xoshiro256& rng);

/// Nested estimates of tau_m(u, a), m = 0..n, from one set of trials.
struct TauEstimate {
    double u = 0.0;
    double a = 0.0;
    int n = 0;
    std::vector<McEstimate> by_radius;  ///< by_radius[m] estimates P[x_0 <-> S_m]
    std::vector<std::uint64_t> reached;  ///< reached[m] = trials whose cluster reached S_m
    std::uint64_t capped_trials = 0;    ///< trials stopped by max_explored, excluded from estimates
    [[nodiscard]] const McEstimate& tau_n() const { return by_radius.back(); }
};

TauEstimate estimate_tau_n(Level u, double a, int n, std::uint64_t trials, const TreeParams& params,
                           Seed seed, const SimOptions& opts = {});

/// P[geodesic of n edges lies in V^u and above a].
McEstimate estimate_two_point(Level u, double a, int n, std::uint64_t trials, const TreeParams& params,
                              Seed seed, const SimOptions& opts = {});

/// Outcome of a one-sided statistical comparison left <= right.
struct ComparisonReport {
    std::string name;
    McEstimate left;
    McEstimate right;
    double sigmas = 3.0;
    bool pass = false;
    /// (left - right) / combined standard error; positive means left is larger.
    [[nodiscard]] double z() const;
};

ComparisonReport compare_le(std::string name, const McEstimate& left, const McEstimate& right,
                            double sigmas = 3.0);

/// tau_n(u, a + rho) <= tau_n(u + a rho + rho^2/2, a), independent streams.
ComparisonReport check_ineq_118(Level u, double a, double rho, int n, std::uint64_t trials,
                                const TreeParams& params, Seed seed, const SimOptions& opts = {});

struct ArcPoint {
    double u = 0.0;
    double a = 0.0;
    McEstimate tau;
};

struct ArcReport {
    double h = 0.0;
    int n = 0;
    std::vector<ArcPoint> points;
    double worst_drop_sigmas = 0.0;  ///< largest decrease between neighbours, in combined sigmas
    bool pass = false;
};

/// tau_n along u -> (u, sqrt(h^2 - 2u)) must not drop by more than 3 sigma.
ArcReport check_arc_monotonicity(double h, int n, int K, std::uint64_t trials, const TreeParams& params,
                                 Seed seed, const SimOptions& opts = {});

struct DominationReport {
    double a = 0.0;
    double rho = 0.0;
    int n = 0;
    int buffer = 0;
    ComparisonReport main;  ///< LEFT vs RIGHT at the requested buffer
    int alt_buffer = -1;    ///< buffer - 1 sensitivity run (absent when buffer == 0)
    McEstimate right_alt;
    double buffer_shift_sigmas = 0.0;
    bool buffer_stable = true;  ///< |shift| < 2 combined sigma
    std::string caveat;
    [[nodiscard]] bool pass() const { return main.pass; }
};

/// Statistical check of the discrete domination of {phi > a + rho} by
/// {phi > a} minus the Lupu clusters of an independent interlacement at
/// level a rho + rho^2/2, on B_{n+buffer}.
DominationReport check_domination(double a, double rho, int n, int buffer, std::uint64_t trials,
                                  const TreeParams& params, Seed seed, const SimOptions& opts = {});

/// Event "RIGHT" for one trial (exposed for tests).
bool domination_right_event(double a, double rho, int n, int buffer, const TreeParams& params,
                            Xoshiro256& rng);

/// P[I^v intersect B_n is empty] from the window sampler.
McEstimate estimate_window_void(Level v, int n, std::uint64_t trials, const TreeParams& params, Seed seed,
                                const SimOptions& opts = {});

struct CrossSamplerReport {
    McEstimate from_marks;
    McEstimate from_window;
    double z = 0.0;
    bool pass = false;  ///< |z| <= 4
};

/// Frequency of "ray to S_n inside V^v" from marks and from windows.
CrossSamplerReport cross_sampler_check(Level v, int n, std::uint64_t trials, const TreeParams& params,
                                       Seed seed, const SimOptions& opts = {});

struct GffMoments {
    MeanEstimate variance;             ///< E[phi_x^2]
    MeanEstimate neighbour_covariance;  ///< E[phi_x phi_y], x ~ y
};

/// Independent (root, child) pairs.
GffMoments gff_moment_check(std::uint64_t samples, const TreeParams& params, Seed seed,
                            const SimOptions& opts = {});

/// Least-squares slope of ln(estimate) against m over [m_from, m_to].
double fit_log_slope(const std::vector<McEstimate>& by_radius, int m_from, int m_to);

}  // namespace treeperc
