#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "treeperc/core_model.hpp"
#include "treeperc/quadrature.hpp"

namespace treeperc {

/// Symmetrized Nystrom matrix of L_h = pi_h L pi_h on a quadrature grid:
/// A_ij = d k(x_i, x_j) sqrt(w_i w_j).
class DiscreteOperator {
public:
    DiscreteOperator(QuadratureGrid grid, std::vector<double> matrix, double h, int d);

    [[nodiscard]] const QuadratureGrid& grid() const { return grid_; }
    [[nodiscard]] double h() const { return h_; }
    [[nodiscard]] int d() const { return d_; }
    [[nodiscard]] std::size_t size() const { return grid_.node_count(); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return matrix_[i * size() + j]; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const;

    /// out = A in (symmetric coordinates g = sqrt(w) f).
    void apply(std::span<const double> in, std::span<double> out) const;

    /// Multiplies row and column i by s_i, i.e. A -> S A S.
    [[nodiscard]] DiscreteOperator conjugated(std::span<const double> s) const;

private:
    QuadratureGrid grid_;
    std::vector<double> matrix_;
    double h_;
    int d_;
};

struct GridMeta {
    std::size_t node_count = 0;
    double lower = 0.0;
    double upper = 0.0;
};

struct SpectralPair {
    double lambda = 0.0;
    std::vector<double> chi;  ///< eigenfunction values at the grid nodes
    double residual = 0.0;
    int iterations = 0;
    GridMeta grid_meta;
};

struct CriticalHeight {
    double h_star = 0.0;
    std::pair<double, double> bracket;
    double residual = 0.0;
};

struct EigenOptions {
    int max_iterations = 100000;
    double residual_tol = 1e-10;
};

struct SpectralOptions {
    GridOptions grid;
    double eigen_tol = 1e-12;    ///< Rayleigh-quotient stopping |dlambda|
    double refine_tol = 1e-8;    ///< node doubling stops when |dlambda| below this
    int max_node_count = 6400;
    double tail_sigmas = 6.0;    ///< upper end kept at least this many sigma above h
};

/// Matrix of L_h on `grid` (which must have been built for h).
DiscreteOperator discretize_Lh(double h, const QuadratureGrid& grid, const TreeParams& params);

/// Perron pair by power iteration from the positive vector sqrt(w).
/// Throws ConvergenceError carrying the last iterate's lambda on failure.
SpectralPair top_eigenpair(const DiscreteOperator& op, double tol, const EigenOptions& opts = {});

/// Same, from a caller-chosen positive start vector in symmetric coordinates.
SpectralPair top_eigenpair(const DiscreteOperator& op, double tol, std::span<const double> start,
                           const EigenOptions& opts = {});

/// Operator and Perron pair after grid refinement.
struct HeightSolution {
    DiscreteOperator op;
    SpectralPair pair;
};

/// Grid options actually used at height h (widens M for large h).
GridOptions grid_options_for(double h, const TreeParams& params, const SpectralOptions& opts);

/// Doubles the node count until lambda moves by less than refine_tol.
HeightSolution solve_at_height(double h, const TreeParams& params, const SpectralOptions& opts = {});

double lambda_h(double h, const TreeParams& params, const SpectralOptions& opts = {});

/// Bisection on h -> lambda_h - 1 from [0, sqrt(2 u_*)].
CriticalHeight solve_h_star(const TreeParams& params, double tol = 1e-9,
                            const SpectralOptions& opts = {});

/// lambda(u, a) = lambda_a exp(-u (d-1)^2 / d).
double lambda_ua(Level u, double a, const TreeParams& params, const SpectralOptions& opts = {});

/// The a with lambda(u, a) = 1, or nullopt when u is beyond the critical line's domain.
std::optional<double> critical_a(Level u, const TreeParams& params, double tol = 1e-10,
                                 const SpectralOptions& opts = {});

/// <1, (L_a / d)^n 1>_nu, the probability that phi > a along a geodesic with n edges.
double two_point_prediction(double a, int n, const TreeParams& params, const SpectralOptions& opts = {});

/// Same for every m in [0, n] from one operator.
std::vector<double> two_point_sequence(double a, int n, const TreeParams& params,
                                       const SpectralOptions& opts = {});

/// lambda_a exp(-(a rho + rho^2/2)(d-1)^2/d) - lambda_{a+rho}.
double check_thm21(double a, double rho, const TreeParams& params, const SpectralOptions& opts = {});

/// V(b) = p + (1-p) E[exp(-2 (b/d + s Z - a)_+ (b - a)_+)], p at level a rho + rho^2/2.
double v_function(double b, double a, double rho, const TreeParams& params);

/// Top eigenvalue of sqrt(V) L_a sqrt(V).
double lambda_tilde(double a, double rho, const TreeParams& params, const SpectralOptions& opts = {});

struct ArcSample {
    double u = 0.0;
    double a = 0.0;
    double lambda = 0.0;
};

struct ParabolaScan {
    double h = 0.0;
    std::vector<ArcSample> samples;
    double min_step = 0.0;  ///< smallest lambda increment between consecutive samples
    [[nodiscard]] bool strictly_increasing(double margin = 0.0) const { return min_step > margin; }
};

/// lambda along u -> (u, sqrt(h^2 - 2u)) at K+1 equally spaced u in [0, h^2/2].
ParabolaScan parabola_scan(double h, int K, const TreeParams& params, const SpectralOptions& opts = {});

struct SecondMomentBound {
    double A = 0.0;
    double B = 0.0;
    double bound = 0.0;  ///< A^2 / B
};

/// First/second moment constants of the weighted sphere count. Throws
/// PreconditionError unless lambda(u, a) > 1.
SecondMomentBound second_moment_bound(Level u, double a, const TreeParams& params,
                                      const SpectralOptions& opts = {});

}  // namespace treeperc
