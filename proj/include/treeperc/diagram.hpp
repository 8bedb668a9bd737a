#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "treeperc/core_model.hpp"
#include "treeperc/rng.hpp"
#include "treeperc/spectral.hpp"
#include "treeperc/tree_sim.hpp"

namespace treeperc {

enum class Region { supercritical, subcritical, critical_band };
enum class RowSource { critical_line, arc_hstar, arc_sqrt2ustar, grid };

std::string_view to_string(Region region);
std::string_view to_string(RowSource source);

/// supercritical when lambda > 1 + eps, subcritical when lambda < 1 - eps.
Region classify(double lambda, double eps);

struct DiagramRow {
    RowSource source = RowSource::grid;
    double u = 0.0;
    double a = 0.0;
    double lambda = 0.0;
    Region region = Region::critical_band;
};

/// A point whose lambda evaluation threw.
struct DiagramFailure {
    RowSource source = RowSource::grid;
    double u = 0.0;
    double a = 0.0;
    std::string message;
};

struct SpotCheck {
    double u = 0.0;
    double a = 0.0;
    double lambda = 0.0;
    Region region = Region::critical_band;
    McEstimate tau;
    double envelope = 0.0;  ///< ((d+1)/d) p0 lambda^n, subcritical points only
    bool pass = false;
};

struct DiagramOptions {
    SpectralOptions spectral;
    int line_samples = 40;  ///< critical-line samples over [0, u_*)
    int arc_samples = 32;   ///< K for each arc (K + 1 rows)
    int workers = 1;

    int spot_checks_per_region = 0;  ///< 0 disables the Monte Carlo spot checks
    int spot_depth = 10;
    std::uint64_t spot_trials = 20000;
    Seed spot_seed{};
};

struct DiagramSummary {
    double h_star = 0.0;
    double u_star = 0.0;
    double u0 = 0.0;  ///< where the critical line crosses a = 0
    double lambda0 = 0.0;

    bool line_through_hstar = false;        ///< a_c(0) = h_* and (0, h_*) is in the band
    bool hstar_arc_supercritical = false;   ///< lambda > 1 on the h_* arc (u > 0) and inside it
    bool ustar_arc_subcritical = false;     ///< region subcritical on the sqrt(2 u_*) arc
    bool critical_line_decreasing = false;  ///< a_c strictly decreasing on the traced samples
    bool spot_checks_pass = true;

    [[nodiscard]] bool all_passed() const {
        return line_through_hstar && hstar_arc_supercritical && ustar_arc_subcritical &&
               critical_line_decreasing && spot_checks_pass;
    }
};

struct Diagram {
    TreeParams params;
    double eps = 1e-3;
    std::vector<DiagramRow> rows;
    std::vector<DiagramFailure> failures;
    std::vector<SpotCheck> spot_checks;
    DiagramSummary summary;
};

/// Grid rows, the traced critical line a_c(u) and the arcs u -> (u, sqrt(h^2 - 2u))
/// for h = h_* and h = sqrt(2 u_*), with the summary assertions evaluated.
Diagram build_diagram(const TreeParams& params, const std::vector<double>& u_grid,
                      const std::vector<double>& a_grid, double eps, const DiagramOptions& opts = {});

/// `source,u,a,lambda,region`, 12 significant digits.
void write_diagram_csv(std::ostream& out, const std::vector<DiagramRow>& rows);

}  // namespace treeperc
