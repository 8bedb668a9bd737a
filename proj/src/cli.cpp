#include "treeperc/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "treeperc/checks.hpp"
#include "treeperc/diagram.hpp"
#include "treeperc/errors.hpp"
#include "treeperc/selftest.hpp"
#include "treeperc/spectral.hpp"
#include "treeperc/tree_sim.hpp"

#ifndef TREEPERC_VERSION
#define TREEPERC_VERSION "0.0.0"
#endif

namespace treeperc::cli {

using nlohmann::json;

const char* tool_version() { return TREEPERC_VERSION; }

namespace {

/// What a subcommand reports back: JSON payload, verdict, stdout line.
struct Outcome {
    json result = json::object();
    bool pass = true;
    std::string summary;
};

json to_json(const McEstimate& e) {
    return {{"trials", e.trials},
            {"successes", e.successes},
            {"estimate", e.estimate},
            {"stderr", e.std_error},
            {"ci95", {e.ci95.first, e.ci95.second}}};
}

json to_json(const ComparisonReport& r) {
    return {{"name", r.name}, {"left", to_json(r.left)}, {"right", to_json(r.right)},
            {"sigmas", r.sigmas}, {"z", r.z()},           {"pass", r.pass}};
}

json to_json(const TreeParams& p) {
    return {{"d", p.d},
            {"sigma2", p.sigma2},
            {"contraction", p.contraction},
            {"decay_exponent", p.decay_exponent},
            {"point_capacity", p.point_capacity}};
}

json config_json(const RunConfig& c) {
    return {{"command", c.command},
            {"d", c.d},
            {"u", c.u},
            {"a", c.a},
            {"rho", c.rho},
            {"n", c.n},
            {"K", c.K},
            {"buffer", c.buffer},
            {"dom_n", c.dom_n},
            {"trials", c.trials},
            {"fit_from", c.fit_from},
            {"fit_to", c.fit_to},
            {"node_count", c.node_count},
            {"M", c.M},
            {"eps", c.eps},
            {"samples", c.samples},
            {"grid_u", c.grid_u},
            {"grid_a", c.grid_a},
            {"u_max", c.u_max},
            {"a_min", c.a_min},
            {"a_max", c.a_max},
            {"spot", c.spot},
            {"seed", c.seed},
            {"workers", c.workers},
            {"out_dir", c.out_dir},
            {"config_file", c.config_file},
            {"config_entries", c.config_entries},
            {"sources", c.sources}};
}

SpectralOptions spectral_options(const RunConfig& c) {
    SpectralOptions o;
    o.grid.node_count = c.node_count;
    o.grid.M = c.M;
    return o;
}

SimOptions sim_options(const RunConfig& c) {
    SimOptions o;
    o.workers = c.workers;
    return o;
}

std::string fmt(double x, int digits = 10) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

std::map<std::string, std::string> read_config_entries(const std::string& path) {
    std::map<std::string, std::string> entries;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r\"");
            const auto e = s.find_last_not_of(" \t\r\"");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return entries;
}

// ---------------------------------------------------------------------------
// Subcommands

Outcome cmd_lambda(const RunConfig& c) {
    const TreeParams p = make_params(c.d);
    const SpectralOptions so = spectral_options(c);
    const HeightSolution sol = solve_at_height(c.a, p, so);
    const double lam_ua = sol.pair.lambda * std::exp(-c.u * p.decay_exponent);
    Outcome o;
    o.result = {{"params", to_json(p)},
                {"h", c.a},
                {"u", c.u},
                {"lambda_h", sol.pair.lambda},
                {"lambda_ua", lam_ua},
                {"residual", sol.pair.residual},
                {"iterations", sol.pair.iterations},
                {"grid",
                 {{"node_count", sol.pair.grid_meta.node_count},
                  {"lower", sol.pair.grid_meta.lower},
                  {"upper", sol.pair.grid_meta.upper}}}};
    o.summary = "lambda_" + fmt(c.a) + " = " + fmt(sol.pair.lambda, 13) + ", lambda(u=" + fmt(c.u) +
                ", a=" + fmt(c.a) + ") = " + fmt(lam_ua, 13);
    return o;
}

Outcome cmd_hstar(const RunConfig& c) {
    const TreeParams p = make_params(c.d);
    const SpectralOptions so = spectral_options(c);
    const CriticalHeight hs = solve_h_star(p, 1e-9, so);
    const double check = std::abs(lambda_h(hs.h_star, p, so) - 1.0);
    const double upper = std::sqrt(2.0 * u_star(p));
    Outcome o;
    o.pass = check <= 1e-8 && hs.h_star > 0.0 && hs.h_star < upper;
    o.result = {{"params", to_json(p)},
                {"h_star", hs.h_star},
                {"bracket", {hs.bracket.first, hs.bracket.second}},
                {"residual", check},
                {"sqrt_2_u_star", upper},
                {"pass", o.pass}};
    o.summary = "h_star = " + fmt(hs.h_star, 13) + ", |lambda - 1| = " + fmt(check, 3) +
                (o.pass ? " (<= 1e-8, in (0, sqrt(2 u_*)))" : " FAIL");
    return o;
}

Outcome cmd_critline(const RunConfig& c) {
    const TreeParams p = make_params(c.d);
    const SpectralOptions so = spectral_options(c);
    const double us = u_star(p);
    const double lam0 = lambda_h(0.0, p, so);
    const double u0 = std::log(lam0) / p.decay_exponent;
    std::vector<DiagramRow> rows;
    json points = json::array();
    for (int k = 0; k < c.samples; ++k) {
        const double u = us * k / c.samples;
        const auto a = critical_a(Level{u}, p, 1e-10, so);
        if (!a) {
            points.push_back({{"u", u}, {"a", nullptr}});
            continue;
        }
        const double lam = lambda_ua(Level{u}, *a, p, so);
        rows.push_back({RowSource::critical_line, u, *a, lam, classify(lam, c.eps)});
        points.push_back({{"u", u}, {"a", *a}, {"lambda", lam}});
    }
    const auto a_at_u0 = critical_a(Level{u0}, p, 1e-10, so);
    const std::filesystem::path csv = std::filesystem::path(c.out_dir) / "critline.csv";
    std::ofstream f(csv);
    write_diagram_csv(f, rows);
    Outcome o;
    o.pass = a_at_u0 && std::abs(*a_at_u0) <= 1e-6;
    o.result = {{"params", to_json(p)},
                {"u_star", us},
                {"lambda0", lam0},
                {"u0", u0},
                {"a_c_at_u0", a_at_u0 ? json(*a_at_u0) : json(nullptr)},
                {"points", points},
                {"csv", csv.string()},
                {"pass", o.pass}};
    o.summary = "critical line: " + std::to_string(rows.size()) + " points, crosses a=0 at u0 = " + fmt(u0, 12) +
                " -> " + csv.string();
    return o;
}

Outcome cmd_verify_spectral(const RunConfig& c) {
    const TreeParams p = make_params(c.d);
    const SpectralOptions so = spectral_options(c);
    Outcome o;

    json thm = json::array();
    double min_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 8; ++i) {
        for (int j = 1; j <= 8; ++j) {
            const double a = 0.25 * i;
            const double rho = 0.25 * j;
            const double gap = check_thm21(a, rho, p, so);
            min_gap = std::min(min_gap, gap);
            thm.push_back({{"a", a}, {"rho", rho}, {"gap", gap}});
        }
    }
    const bool thm_pass = min_gap > 1e-6;

    json chain = json::array();
    bool chain_pass = true;
    for (auto [a, rho] : {std::pair{0.0, 1.0}, {0.5, 0.5}, {1.0, 0.5}}) {
        const double lt = lambda_tilde(a, rho, p, so);
        const double la = lambda_h(a, p, so);
        const double lar = lambda_h(a + rho, p, so);
        const double pp = vacancy_probs(Level{a * rho + 0.5 * rho * rho}, p).p;
        const double m14 = lt * pp - lar;
        const double m15 = la - lt;
        chain_pass = chain_pass && m14 > 1e-6 && m15 > 1e-6;
        chain.push_back({{"a", a},
                         {"rho", rho},
                         {"lambda_tilde", lt},
                         {"lambda_a", la},
                         {"lambda_a_plus_rho", lar},
                         {"p", pp},
                         {"margin_upper", m14},
                         {"margin_strict", m15}});
    }

    const CriticalHeight hs = solve_h_star(p, 1e-9, so);
    const double lam0 = lambda_h(0.0, p, so);
    json arcs = json::array();
    bool arcs_pass = true;
    for (double h : {0.5 * hs.h_star, hs.h_star, std::sqrt(2.0 * u_star(p))}) {
        const ParabolaScan scan = parabola_scan(h, 16, p, so);
        const double start_err = std::abs(scan.samples.front().lambda - lambda_h(h, p, so));
        const double end_err = std::abs(scan.samples.back().lambda -
                                        lam0 * std::exp(-0.5 * h * h * p.decay_exponent));
        const bool ok = scan.strictly_increasing(1e-9) && start_err <= 1e-8 && end_err <= 1e-8;
        arcs_pass = arcs_pass && ok;
        json samples = json::array();
        for (const ArcSample& s : scan.samples) {
            samples.push_back({{"u", s.u}, {"a", s.a}, {"lambda", s.lambda}});
        }
        arcs.push_back({{"h", h},
                        {"min_step", scan.min_step},
                        {"start_error", start_err},
                        {"end_error", end_err},
                        {"pass", ok},
                        {"samples", samples}});
    }
    o.pass = thm_pass && chain_pass && arcs_pass;
    o.result = {{"params", to_json(p)},
                {"gap_grid", {{"min_gap", min_gap}, {"pass", thm_pass}, {"points", thm}}},
                {"lambda_tilde_chain", {{"pass", chain_pass}, {"points", chain}}},
                {"parabola_scans", {{"pass", arcs_pass}, {"scans", arcs}}},
                {"pass", o.pass}};
    o.summary = std::string("verify-spectral: gap grid ") + (thm_pass ? "PASS" : "FAIL") + " (min " +
                fmt(min_gap, 4) + "), lambda-tilde chain " + (chain_pass ? "PASS" : "FAIL") +
                ", parabola scans " + (arcs_pass ? "PASS" : "FAIL");
    return o;
}

Outcome cmd_tau(const RunConfig& c) {
    const TreeParams p = make_params(c.d);
    const SpectralOptions so = spectral_options(c);
    const TauEstimate t = estimate_tau_n(Level{c.u}, c.a, c.n, c.trials, p, Seed{c.seed, 0}, sim_options(c));
    const double lam = lambda_ua(Level{c.u}, c.a, p, so);
    const double p0 = vacancy_probs(Level{c.u}, p).p0;
    const std::filesystem::path csv = std::filesystem::path(c.out_dir) / "tau.csv";
    std::ofstream f(csv);
    f << "n,successes,trials,estimate,stderr\n" << std::setprecision(12);
    json by_n = json::array();
    for (int m = 0; m <= c.n; ++m) {
        const McEstimate& e = t.by_radius[m];
        f << m << ',' << e.successes << ',' << e.trials << ',' << e.estimate << ',' << e.std_error << '\n';
        json row = to_json(e);
        row["n"] = m;
        if (lam < 1.0) {
            row["envelope"] = (p.d + 1.0) / p.d * p0 * std::pow(lam, m);
        }
        by_n.push_back(row);
    }
    Outcome o;
    o.result = {{"params", to_json(p)},
                {"lambda", lam},
                {"by_n", by_n},
                {"capped_trials", t.capped_trials},
                {"csv", csv.string()}};
    if (lam > 1.0) {
        const SecondMomentBound b = second_moment_bound(Level{c.u}, c.a, p, so);
        o.result["second_moment"] = {{"A", b.A}, {"B", b.B}, {"bound", b.bound}};
    }
    o.summary = "tau_" + std::to_string(c.n) + "(" + fmt(c.u) + ", " + fmt(c.a) + ") = " +
                fmt(t.tau_n().estimate, 6) + " +- " + fmt(t.tau_n().std_error, 3) + " (lambda = " + fmt(lam, 6) +
                ") -> " + csv.string();
    return o;
}

Outcome cmd_two_point(const RunConfig& c) {
    const TreeParams p = make_params(c.d);
    const TwoPointReport r =
        check_two_point(Level{c.u}, c.a, c.n, c.trials, p, Seed{c.seed, 0}, sim_options(c), spectral_options(c));
    Outcome o;
    o.pass = r.pass;
    o.result = {{"params", to_json(p)},
                {"estimate", to_json(r.estimate)},
                {"prediction", r.prediction},
                {"z", r.z},
                {"pass", r.pass}};
    o.summary = "two-point n=" + std::to_string(c.n) + ": " + fmt(r.estimate.estimate, 6) + " vs predicted " +
                fmt(r.prediction, 6) + " (z = " + fmt(r.z, 3) + ") " + (r.pass ? "PASS" : "FAIL");
    return o;
}

Outcome cmd_verify_mc(const RunConfig& c) {
    const TreeParams p = make_params(c.d);
    const SpectralOptions so = spectral_options(c);
    const SimOptions sim = sim_options(c);
    const Seed root{c.seed, 0};
    Outcome o;
    int failures = 0;
    int checks = 0;
    auto tally = [&](bool pass) {
        ++checks;
        failures += pass ? 0 : 1;
    };

    json ineq = json::array();
    const double triples[6][3] = {{0.1, 0.3, 0.4}, {0.0, 0.0, 0.5},  {0.05, 0.2, 0.3},
                                  {0.2, 0.5, 0.25}, {0.0, 0.4, 0.6}, {0.3, 0.1, 1.0}};
    for (int i = 0; i < 6; ++i) {
        const auto& t = triples[i];
        const ComparisonReport r =
            check_ineq_118(Level{t[0]}, t[1], t[2], c.n, c.trials, p, root.child(100 + i), sim);
        tally(r.pass);
        json j = to_json(r);
        j["u"] = t[0];
        j["a"] = t[1];
        j["rho"] = t[2];
        ineq.push_back(j);
    }

    json arcs = json::array();
    const double hs = solve_h_star(p, 1e-9, so).h_star;
    int arc_index = 0;
    for (double h : {hs, std::sqrt(2.0 * u_star(p))}) {
        const ArcReport r = check_arc_monotonicity(h, c.n, c.K, c.trials, p, root.child(200 + arc_index++), sim);
        tally(r.pass);
        json pts = json::array();
        for (const ArcPoint& pt : r.points) {
            pts.push_back({{"u", pt.u}, {"a", pt.a}, {"tau", to_json(pt.tau)}});
        }
        arcs.push_back({{"h", h}, {"worst_drop_sigmas", r.worst_drop_sigmas}, {"pass", r.pass}, {"points", pts}});
    }

    json dom = json::array();
    int dom_index = 0;
    for (auto [a, rho] : {std::pair{0.0, 0.5}, {0.5, 0.5}}) {
        const DominationReport r = check_domination(a, rho, c.dom_n, c.buffer, c.trials, p,
                                                    root.child(300 + dom_index++), sim);
        tally(r.pass());
        tally(r.buffer_stable);
        dom.push_back({{"a", a},
                       {"rho", rho},
                       {"n", r.n},
                       {"buffer", r.buffer},
                       {"comparison", to_json(r.main)},
                       {"alt_buffer", r.alt_buffer},
                       {"right_alt", to_json(r.right_alt)},
                       {"buffer_shift_sigmas", r.buffer_shift_sigmas},
                       {"buffer_stable", r.buffer_stable},
                       {"caveat", r.caveat},
                       {"pass", r.pass()}});
    }

    const CrossSamplerReport cs = cross_sampler_check(Level{1.0}, 3, c.trials, p, root.child(400), sim);
    tally(cs.pass);

    const double u_sub = level_for_lambda(0.8, 0.0, p, so);
    const DecayReport dr =
        check_decay_rate(Level{u_sub}, 0.0, c.fit_from, c.fit_to, c.trials, p, root.child(500), sim, so);
    tally(dr.pass());
    json decay_n = json::array();
    for (std::size_t m = 0; m < dr.tau.by_radius.size(); ++m) {
        json row = to_json(dr.tau.by_radius[m]);
        row["n"] = m;
        row["envelope"] = dr.envelope[m];
        decay_n.push_back(row);
    }

    o.pass = failures == 0;
    o.result = {{"params", to_json(p)},
                {"ineq_level_shift", ineq},
                {"arc_monotonicity", arcs},
                {"domination", dom},
                {"cross_sampler",
                 {{"v", 1.0},
                  {"n", 3},
                  {"from_marks", to_json(cs.from_marks)},
                  {"from_window", to_json(cs.from_window)},
                  {"z", cs.z},
                  {"pass", cs.pass}}},
                {"decay_rate",
                 {{"u", dr.u},
                  {"a", dr.a},
                  {"lambda", dr.lambda},
                  {"fit_from", dr.fit_from},
                  {"fit_to", dr.fit_to},
                  {"slope", dr.slope},
                  {"target_slope", dr.target_slope},
                  {"relative_error", dr.relative_error},
                  {"slope_pass", dr.slope_pass},
                  {"envelope_pass", dr.envelope_pass},
                  {"by_n", decay_n}}},
                {"checks", checks},
                {"failures", failures},
                {"pass", o.pass}};
    o.summary = "verify-mc: " + std::to_string(checks - failures) + "/" + std::to_string(checks) + " checks PASS" +
                (o.pass ? "" : " (see JSON for the failing ones)");
    return o;
}

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> v;
    for (int i = 0; i < count; ++i) {
        v.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    }
    return v;
}

Outcome cmd_diagram(const RunConfig& c) {
    const TreeParams p = make_params(c.d);
    DiagramOptions opts;
    opts.spectral = spectral_options(c);
    opts.line_samples = c.samples;
    opts.workers = c.workers;
    opts.spot_checks_per_region = c.spot;
    opts.spot_depth = c.n;
    opts.spot_trials = c.trials;
    opts.spot_seed = Seed{c.seed, 0};
    const double u_max = c.u_max < 0.0 ? 1.25 * u_star(p) : c.u_max;
    if (!(c.a_max > c.a_min)) {
        throw DomainError("diagram needs a_max > a_min");
    }
    const Diagram dg = build_diagram(p, linspace(0.0, u_max, c.grid_u), linspace(c.a_min, c.a_max, c.grid_a),
                                     c.eps, opts);
    const std::filesystem::path csv = std::filesystem::path(c.out_dir) / "diagram.csv";
    std::ofstream f(csv);
    write_diagram_csv(f, dg.rows);

    const DiagramSummary& s = dg.summary;
    json failures = json::array();
    for (const DiagramFailure& fl : dg.failures) {
        failures.push_back({{"source", to_string(fl.source)}, {"u", fl.u}, {"a", fl.a}, {"message", fl.message}});
    }
    json spots = json::array();
    for (const SpotCheck& sc : dg.spot_checks) {
        spots.push_back({{"u", sc.u},
                         {"a", sc.a},
                         {"lambda", sc.lambda},
                         {"region", to_string(sc.region)},
                         {"tau", to_json(sc.tau)},
                         {"envelope", sc.envelope},
                         {"pass", sc.pass}});
    }
    std::map<std::string, int> counts;
    for (const DiagramRow& r : dg.rows) {
        ++counts[std::string(to_string(r.source))];
    }
    Outcome o;
    o.pass = s.all_passed() && dg.failures.empty();
    o.result = {{"params", to_json(p)},
                {"h_star", s.h_star},
                {"u_star", s.u_star},
                {"u0", s.u0},
                {"lambda0", s.lambda0},
                {"eps", c.eps},
                {"assertions",
                 {{"critical_line_through_0_hstar", s.line_through_hstar},
                  {"hstar_arc_supercritical", s.hstar_arc_supercritical},
                  {"sqrt2ustar_arc_subcritical", s.ustar_arc_subcritical},
                  {"critical_line_decreasing", s.critical_line_decreasing},
                  {"spot_checks", s.spot_checks_pass},
                  {"all_passed", s.all_passed()}}},
                {"undetermined_region",
                 "points between the h_* arc and the sqrt(2 u_*) arc are classified by lambda only; "
                 "whether tau > 0 there is not settled beyond the neighbourhoods of the two arcs"},
                {"row_counts", counts},
                {"failures", failures},
                {"spot_checks", spots},
                {"csv", csv.string()},
                {"tool_version", tool_version()},
                {"pass", o.pass}};
    o.summary = "diagram: " + std::to_string(dg.rows.size()) + " rows, assertions " +
                (s.all_passed() ? "PASS" : "FAIL") + ", " + std::to_string(dg.failures.size()) +
                " failed evaluations -> " + csv.string();
    return o;
}

Outcome cmd_selftest(const RunConfig&) {
    const std::vector<SelfTestCase> cases = run_selftest();
    Outcome o;
    json list = json::array();
    int failed = 0;
    for (const SelfTestCase& sc : cases) {
        failed += sc.pass ? 0 : 1;
        list.push_back({{"module", sc.module}, {"name", sc.name}, {"pass", sc.pass}, {"detail", sc.detail}});
    }
    o.pass = failed == 0;
    o.result = {{"cases", list}, {"failed", failed}, {"pass", o.pass}};
    o.summary = "selftest: " + std::to_string(cases.size() - failed) + "/" + std::to_string(cases.size()) + " PASS";
    return o;
}

void validate(const RunConfig& c) {
    if (c.command == "tau" || c.command == "two-point") {
        if (!(c.u >= 0.0)) {
            throw DomainError("--u must be >= 0");
        }
    }
    if (c.command == "diagram" && c.spot > 0 && c.n < 0) {
        throw DomainError("--n must be >= 0");
    }
    if (c.command == "verify-mc" && !(c.fit_from >= 0 && c.fit_to > c.fit_from)) {
        throw DomainError("need 0 <= --fit-from < --fit-to");
    }
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Spectral and Monte Carlo checks for vacant-set level-set percolation on regular trees",
                 argv.empty() ? "treeperc" : argv.front()};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(tool_version()));
    auto* cfg = app.set_config("--config", "", "key=value file supplying defaults; flags override it");

    struct Spec {
        std::string key;
        CLI::Option* opt;
    };
    std::vector<Spec> specs;
    auto add = [&](const std::string& key, auto& target, const std::string& help) {
        CLI::Option* opt = app.add_option("--" + key, target, help)->capture_default_str();
        specs.push_back({key, opt});
        return opt;
    };
    add("d", c.d, "branching number (tree degree d+1)")->check(CLI::Range(2, 1000));
    add("u", c.u, "interlacement level u")->check(CLI::NonNegativeNumber);
    add("a", c.a, "field height a (also the height h for `lambda`)");
    add("rho", c.rho, "height increment rho");
    add("n", c.n, "radius n")->check(CLI::Range(0, 64));
    add("K", c.K, "arc sample count for `verify-mc`")->check(CLI::Range(2, 1000));
    add("buffer", c.buffer, "domination window buffer")->check(CLI::Range(0, 16));
    add("dom-n", c.dom_n, "domination radius")->check(CLI::Range(1, 24));
    add("trials", c.trials, "Monte Carlo trials")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40));
    add("fit-from", c.fit_from, "first radius of the decay fit")->check(CLI::Range(0, 64));
    add("fit-to", c.fit_to, "last radius of the decay fit")->check(CLI::Range(1, 64));
    add("node-count", c.node_count, "quadrature nodes")->check(CLI::Range(16, 6400));
    add("M", c.M, "grid half-width in units of sigma")->check(CLI::Range(6.0, 40.0));
    add("eps", c.eps, "critical band half-width")->check(CLI::PositiveNumber);
    add("samples", c.samples, "critical-line samples")->check(CLI::Range(2, 100000));
    add("grid-u", c.grid_u, "diagram grid points in u")->check(CLI::Range(1, 100000));
    add("grid-a", c.grid_a, "diagram grid points in a")->check(CLI::Range(1, 100000));
    add("u-max", c.u_max, "diagram u range end (negative: 1.25 u_*)");
    add("a-min", c.a_min, "diagram a range start");
    add("a-max", c.a_max, "diagram a range end");
    add("spot", c.spot, "Monte Carlo spot checks per region in `diagram`")->check(CLI::Range(0, 1000));
    add("seed", c.seed, "64-bit run seed");
    add("workers", c.workers, "worker threads")->check(CLI::Range(1, 1024));
    add("out-dir", c.out_dir, "directory for CSV/JSON artifacts");

    const std::map<std::string, std::function<Outcome(const RunConfig&)>> commands = {
        {"lambda", cmd_lambda},
        {"hstar", cmd_hstar},
        {"critline", cmd_critline},
        {"verify-spectral", cmd_verify_spectral},
        {"tau", cmd_tau},
        {"two-point", cmd_two_point},
        {"verify-mc", cmd_verify_mc},
        {"diagram", cmd_diagram},
        {"selftest", cmd_selftest},
    };
    const std::map<std::string, std::string> help = {
        {"lambda", "top eigenvalue lambda_a and lambda(u, a)"},
        {"hstar", "critical height h_* with lambda_{h_*} = 1"},
        {"critline", "trace the critical line a_c(u)"},
        {"verify-spectral", "eigenvalue inequalities and parabola arcs"},
        {"tau", "Monte Carlo tau_m(u, a) for m = 0..n"},
        {"two-point", "ray event frequency against the spectral prediction"},
        {"verify-mc", "Monte Carlo inequality suites"},
        {"diagram", "phase diagram CSV and summary"},
        {"selftest", "closed-form checks of every module"},
    };
    for (const auto& [name, text] : help) {
        app.add_subcommand(name, text);
    }

    std::vector<const char*> raw;
    for (const std::string& s : argv) {
        raw.push_back(s.c_str());
    }
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kValidation;
    }
    c.command = app.get_subcommands().front()->get_name();

    // Record where each value came from.
    if (cfg->count() > 0) {
        c.config_file = cfg->as<std::string>();
        c.config_entries = read_config_entries(c.config_file);
    }
    auto on_command_line = [&](const std::string& key) {
        const std::string flag = "--" + key;
        for (std::size_t i = 1; i < argv.size(); ++i) {
            if (argv[i] == flag || argv[i].rfind(flag + "=", 0) == 0) {
                return true;
            }
        }
        return false;
    };
    for (const Spec& s : specs) {
        std::string source = "default";
        if (on_command_line(s.key)) {
            source = "flag";
        } else if (s.opt->count() > 0) {
            source = "config";
        }
        c.sources[s.key] = source;
    }

    json record = {{"tool", "treeperc"}, {"version", tool_version()}, {"config", config_json(c)}};
    int code = kSuccess;
    try {
        validate(c);
        std::filesystem::create_directories(c.out_dir);
        Outcome o = commands.at(c.command)(c);
        record["result"] = std::move(o.result);
        code = o.pass ? kSuccess : kCheckFailed;
        out << o.summary << '\n';
    } catch (const ConvergenceError& e) {
        err << "non-convergence: " << e.what() << '\n';
        record["error"] = e.what();
        code = kNonConvergence;
    } catch (const DomainError& e) {
        err << "invalid arguments: " << e.what() << '\n';
        record["error"] = e.what();
        code = kValidation;
    } catch (const PreconditionError& e) {
        err << "precondition failed: " << e.what() << '\n';
        record["error"] = e.what();
        code = kValidation;
    } catch (const ResourceError& e) {
        err << "resource limit: " << e.what() << '\n';
        record["error"] = e.what();
        code = kValidation;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "output error: " << e.what() << '\n';
        return kValidation;
    }
    record["exit_code"] = code;
    const std::filesystem::path json_path = std::filesystem::path(c.out_dir) / (c.command + ".json");
    std::ofstream jf(json_path);
    if (jf) {
        jf << record.dump(2) << '\n';
    } else {
        err << "could not write " << json_path.string() << '\n';
    }
    return code;
}

}  // namespace treeperc::cli
