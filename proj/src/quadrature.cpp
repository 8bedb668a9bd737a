#include "treeperc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "treeperc/errors.hpp"

namespace treeperc {

GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) {
        throw DomainError("Gauss-Legendre rule needs at least one node");
    }
    if (n == 1) {
        return {{0.0}, {2.0}};
    }
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
    }
    return rule;
}

double QuadratureGrid::total_weight() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

QuadratureGrid build_grid(double h, const TreeParams& params, const GridOptions& opts) {
    if (opts.node_count < 16) {
        throw DomainError("grid needs node_count >= 16");
    }
    if (opts.M < 6.0) {
        throw DomainError("grid needs M >= 6");
    }
    if (opts.nodes_per_panel < 2) {
        throw DomainError("grid needs at least 2 nodes per panel");
    }
    const double sigma = params.sigma();
    const double upper = opts.M * sigma;
    if (!(h < upper)) {
        throw DomainError("truncation height h = " + std::to_string(h) +
                          " leaves an empty domain below M*sigma = " + std::to_string(upper));
    }
    QuadratureGrid grid;
    grid.lower = std::max(h, -opts.M * sigma);
    grid.upper = upper;

    const int per_panel = opts.nodes_per_panel;
    const int panels = (opts.node_count + per_panel - 1) / per_panel;
    const GaussLegendreRule rule = gauss_legendre(per_panel);
    const double width = (grid.upper - grid.lower) / panels;

    grid.nodes.reserve(static_cast<std::size_t>(panels) * per_panel);
    grid.weights.reserve(grid.nodes.capacity());
    for (int p = 0; p < panels; ++p) {
        const double mid = grid.lower + (p + 0.5) * width;
        for (int k = 0; k < per_panel; ++k) {
            const double x = mid + 0.5 * width * rule.nodes[k];
            grid.nodes.push_back(x);
            grid.weights.push_back(0.5 * width * rule.weights[k] * nu_density(x, params));
        }
    }
    return grid;
}

}  // namespace treeperc
