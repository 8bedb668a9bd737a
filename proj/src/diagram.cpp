#include "treeperc/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <optional>
#include <ostream>

#include "treeperc/errors.hpp"
#include "treeperc/parallel.hpp"

namespace treeperc {

std::string_view to_string(Region region) {
    switch (region) {
        case Region::supercritical:
            return "supercritical";
        case Region::subcritical:
            return "subcritical";
        case Region::critical_band:
            return "critical-band";
    }
    return "unknown";
}

std::string_view to_string(RowSource source) {
    switch (source) {
        case RowSource::critical_line:
            return "critical_line";
        case RowSource::arc_hstar:
            return "arc_hstar";
        case RowSource::arc_sqrt2ustar:
            return "arc_sqrt2ustar";
        case RowSource::grid:
            return "grid";
    }
    return "unknown";
}

Region classify(double lambda, double eps) {
    if (lambda > 1.0 + eps) {
        return Region::supercritical;
    }
    if (lambda < 1.0 - eps) {
        return Region::subcritical;
    }
    return Region::critical_band;
}

namespace {

/// lambda_a or the message of the exception it threw.
struct HeightValue {
    std::optional<double> lambda;
    std::string error;
};

HeightValue evaluate_height(double a, const TreeParams& params, const SpectralOptions& opts) {
    try {
        return {lambda_h(a, params, opts), {}};
    } catch (const std::exception& e) {
        return {std::nullopt, e.what()};
    }
}

struct LinePoint {
    double u = 0.0;
    std::optional<double> a;
    double lambda = 0.0;
    std::string error;
};

void add_arc(Diagram& out, RowSource source, double h, const DiagramOptions& opts) {
    const double u_end = 0.5 * h * h;
    const int K = opts.arc_samples;
    std::vector<std::pair<double, double>> points;
    for (int k = 0; k <= K; ++k) {
        const double u = (k == K) ? u_end : u_end * k / K;
        const double a = (k == K) ? 0.0 : std::sqrt(std::max(h * h - 2.0 * u, 0.0));
        points.emplace_back(u, a);
    }
    const auto values = parallel_map(points.size(), opts.workers, [&](std::size_t i) {
        return evaluate_height(points[i].second, out.params, opts.spectral);
    });
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto [u, a] = points[i];
        if (!values[i].lambda) {
            out.failures.push_back({source, u, a, values[i].error});
            continue;
        }
        const double lam = *values[i].lambda * std::exp(-u * out.params.decay_exponent);
        out.rows.push_back({source, u, a, lam, classify(lam, out.eps)});
    }
}

void run_spot_checks(Diagram& out, const DiagramOptions& opts) {
    const int k = opts.spot_checks_per_region;
    std::uint64_t tag = 0;
    for (Region want : {Region::supercritical, Region::subcritical}) {
        std::vector<const DiagramRow*> pool;
        for (const DiagramRow& r : out.rows) {
            if (r.source == RowSource::grid && r.region == want) {
                pool.push_back(&r);
            }
        }
        const int take = std::min<int>(k, static_cast<int>(pool.size()));
        for (int i = 0; i < take; ++i) {
            const DiagramRow& row = *pool[(pool.size() * (2 * i + 1)) / (2 * take)];
            SimOptions sim;
            sim.workers = opts.workers;
            SpotCheck check;
            check.u = row.u;
            check.a = row.a;
            check.lambda = row.lambda;
            check.region = row.region;
            check.tau = estimate_tau_n(Level{row.u}, row.a, opts.spot_depth, opts.spot_trials, out.params,
                                       opts.spot_seed.child(tag++), sim)
                            .tau_n();
            if (want == Region::supercritical) {
                check.pass = check.tau.ci95.first > 0.0;
            } else {
                const double p0 = vacancy_probs(Level{row.u}, out.params).p0;
                check.envelope = (out.params.d + 1.0) / out.params.d * p0 *
                                 std::pow(row.lambda, opts.spot_depth);
                check.pass = check.tau.estimate <= check.envelope + 3.0 * check.tau.std_error;
            }
            out.summary.spot_checks_pass = out.summary.spot_checks_pass && check.pass;
            out.spot_checks.push_back(check);
        }
    }
}

}  // namespace

Diagram build_diagram(const TreeParams& params, const std::vector<double>& u_grid,
                      const std::vector<double>& a_grid, double eps, const DiagramOptions& opts) {
    if (u_grid.empty() || a_grid.empty()) {
        throw DomainError("diagram grids must be nonempty");
    }
    if (!(eps > 0.0)) {
        throw DomainError("critical band eps must be > 0");
    }
    for (double u : u_grid) {
        if (!(u >= 0.0)) {
            throw DomainError("diagram u values must be >= 0");
        }
    }
    if (opts.line_samples < 2 || opts.arc_samples < 2) {
        throw DomainError("diagram needs at least 2 line and arc samples");
    }

    Diagram out;
    out.params = params;
    out.eps = eps;
    DiagramSummary& sum = out.summary;
    const CriticalHeight hs = solve_h_star(params, 1e-10, opts.spectral);
    sum.h_star = hs.h_star;
    sum.u_star = u_star(params);
    sum.lambda0 = lambda_h(0.0, params, opts.spectral);
    sum.u0 = std::log(sum.lambda0) / params.decay_exponent;

    // Rectangular grid: lambda(u, a) = lambda_a exp(-u dec), one eigensolve per a.
    const auto heights = parallel_map(a_grid.size(), opts.workers, [&](std::size_t i) {
        return evaluate_height(a_grid[i], params, opts.spectral);
    });
    for (double u : u_grid) {
        for (std::size_t j = 0; j < a_grid.size(); ++j) {
            if (!heights[j].lambda) {
                out.failures.push_back({RowSource::grid, u, a_grid[j], heights[j].error});
                continue;
            }
            const double lam = *heights[j].lambda * std::exp(-u * params.decay_exponent);
            out.rows.push_back({RowSource::grid, u, a_grid[j], lam, classify(lam, eps)});
        }
    }

    // Critical line over [0, u_*), with u0 inserted.
    std::vector<double> line_u;
    for (int k = 0; k < opts.line_samples; ++k) {
        line_u.push_back(sum.u_star * k / opts.line_samples);
    }
    line_u.push_back(sum.u0);
    std::sort(line_u.begin(), line_u.end());
    const auto line = parallel_map(line_u.size(), opts.workers, [&](std::size_t i) {
        LinePoint pt;
        pt.u = line_u[i];
        try {
            pt.a = critical_a(Level{pt.u}, params, 1e-10, opts.spectral);
            if (pt.a) {
                pt.lambda = lambda_ua(Level{pt.u}, *pt.a, params, opts.spectral);
            }
        } catch (const std::exception& e) {
            pt.a.reset();
            pt.error = e.what();
        }
        return pt;
    });
    std::vector<const LinePoint*> traced;
    for (const LinePoint& pt : line) {
        if (!pt.error.empty()) {
            out.failures.push_back({RowSource::critical_line, pt.u, 0.0, pt.error});
        } else if (pt.a) {
            out.rows.push_back({RowSource::critical_line, pt.u, *pt.a, pt.lambda, classify(pt.lambda, eps)});
            traced.push_back(&pt);
        }
    }

    const std::size_t arc_begin = out.rows.size();
    add_arc(out, RowSource::arc_hstar, sum.h_star, opts);
    add_arc(out, RowSource::arc_sqrt2ustar, std::sqrt(2.0 * sum.u_star), opts);

    // (iii) the line passes through (0, h_*).
    if (!line.empty() && line.front().u == 0.0 && line.front().a) {
        const double lam = line.front().lambda;
        sum.line_through_hstar =
            std::abs(*line.front().a - sum.h_star) <= 1e-8 && classify(lam, eps) == Region::critical_band;
    }

    // a_c strictly decreasing along the traced samples.
    sum.critical_line_decreasing = traced.size() >= 2;
    for (std::size_t i = 1; i < traced.size(); ++i) {
        if (!(*traced[i]->a < *traced[i - 1]->a)) {
            sum.critical_line_decreasing = false;
        }
    }

    // (i) lambda > 1 on the h_* arc (u > 0) and at grid points strictly inside it.
    // (ii) subcritical on the sqrt(2 u_*) arc and at grid points on or beyond it.
    bool hstar_ok = true;
    bool ustar_ok = true;
    bool hstar_seen = false;
    bool ustar_seen = false;
    for (std::size_t i = arc_begin; i < out.rows.size(); ++i) {
        const DiagramRow& r = out.rows[i];
        if (r.source == RowSource::arc_hstar && r.u > 0.0) {
            hstar_seen = true;
            hstar_ok = hstar_ok && r.lambda > 1.0;
        }
        if (r.source == RowSource::arc_sqrt2ustar) {
            ustar_seen = true;
            ustar_ok = ustar_ok && r.region == Region::subcritical;
        }
    }
    for (const DiagramRow& r : out.rows) {
        if (r.source != RowSource::grid || r.a < 0.0) {
            continue;
        }
        const double level = r.u + 0.5 * r.a * r.a;
        if (r.u > 0.0 && level < 0.5 * sum.h_star * sum.h_star) {
            hstar_ok = hstar_ok && r.lambda > 1.0;
        }
        if (level >= sum.u_star) {
            ustar_ok = ustar_ok && r.region == Region::subcritical;
        }
    }
    for (const DiagramFailure& f : out.failures) {
        hstar_ok = hstar_ok && f.source != RowSource::arc_hstar;
        ustar_ok = ustar_ok && f.source != RowSource::arc_sqrt2ustar;
    }
    sum.hstar_arc_supercritical = hstar_seen && hstar_ok;
    sum.ustar_arc_subcritical = ustar_seen && ustar_ok;

    if (opts.spot_checks_per_region > 0) {
        run_spot_checks(out, opts);
    }
    return out;
}

void write_diagram_csv(std::ostream& out, const std::vector<DiagramRow>& rows) {
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << "source,u,a,lambda,region\n";
    out << std::setprecision(12) << std::defaultfloat;
    for (const DiagramRow& r : rows) {
        out << to_string(r.source) << ',' << r.u << ',' << r.a << ',' << r.lambda << ','
            << to_string(r.region) << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

}  // namespace treeperc
