#pragma once

#include <cstddef>
#include <vector>

#include "treeperc/core_model.hpp"

namespace treeperc {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes by Newton iteration on P_n; accurate to a few ulps for n <= 64.
GaussLegendreRule gauss_legendre(int n);

struct GridOptions {
    int node_count = 400;  ///< rounded up to a multiple of nodes_per_panel
    double M = 8.0;        ///< domain is [max(h, -M sigma), M sigma]
    int nodes_per_panel = 8;
};

/// Discretization of L^2(nu) restricted to [lower, upper]: the nu-density is
/// folded into the weights, so sum_i w_i f(x_i) ~ int_lower^upper f dnu.
struct QuadratureGrid {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    [[nodiscard]] std::size_t node_count() const { return nodes.size(); }
    [[nodiscard]] double total_weight() const;
};

/// Composite Gauss-Legendre panels starting exactly at max(h, -M sigma).
/// Throws DomainError when h >= M sigma or the options are out of range.
QuadratureGrid build_grid(double h, const TreeParams& params, const GridOptions& opts = {});

/// Integral of f over [lo, hi] with `panels` Gauss-Legendre panels of `rule`.
template <class F>
double integrate_panels(F&& f, double lo, double hi, int panels, const GaussLegendreRule& rule) {
    const double width = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double left = lo + p * width;
        const double mid = left + 0.5 * width;
        double panel = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            panel += rule.weights[k] * f(mid + 0.5 * width * rule.nodes[k]);
        }
        total += 0.5 * width * panel;
    }
    return total;
}

}  // namespace treeperc
