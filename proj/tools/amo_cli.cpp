// Command-line front end: nondim, simulate, geometry, reduce, blowup, sweep,
// report. Exit codes: 0 ok, 2 usage, 3 numeric failure, 4 verification
// mismatch.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "amo/blowup.hpp"
#include "amo/dynamics.hpp"
#include "amo/geometry.hpp"
#include "amo/models.hpp"
#include "amo/parametrisation.hpp"
#include "amo/params.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace amo;

namespace {

constexpr const char* kVersion = "1.0.0";

// Table 2.2 golden values, embedded so self-checks run offline
struct GoldenRow {
    const char* name;
    double value;
};
constexpr GoldenRow kGoldenDimensionless[] = {
    {"hatAlpha", 5.56e-3}, {"hatNu1", 6.72e-2},   {"hatNu2", 1.00},      {"hatGamma", 3.30e-1},
    {"hatSigma1", 1.38},   {"hatSigma2", 4.20e-2}, {"hatSigma3", 1.14e-1}, {"hatSigma4", 5.02e-2},
    {"hatSigma6", 2.52e-3}};

struct RunContext {
    fs::path out_dir;
    json config;
    std::string command_line;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    bool verify = false;
    int exit_code = 0;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void write_file(RunContext& ctx, const std::string& name, const std::string& content) {
    fs::path p = ctx.out_dir / name;
    if (ctx.verify) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        if (ss.str() != content) {
            std::cerr << "verification mismatch: " << p << "\n";
            ctx.exit_code = 4;
        }
        return;
    }
    std::ofstream out(p, std::ios::binary);
    out << content;
    ctx.outputs.push_back(name);
}

void write_manifest(RunContext& ctx, const std::string& cmd, const json& param_snapshot) {
    if (ctx.verify) return;
    json m;
    m["command"] = cmd;
    m["command_line"] = ctx.command_line;
    char hash[32];
    nlohmann::json canonical = ctx.config;  // plain json sorts keys
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical.dump())));
    m["config_hash"] = hash;
    m["parameters"] = param_snapshot;
    m["outputs"] = ctx.outputs;
    auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - ctx.t0);
    m["wall_ms"] = wall.count();
    m["version"] = kVersion;
    std::ofstream out(ctx.out_dir / (cmd + "_manifest.json"));
    out << m.dump(2) << "\n";
}

json params_snapshot(const BiophysicalParams& b, const SmolenParams& s, const EpsilonParams& e) {
    json j = json::parse(params_to_json(b, s));
    j["hierarchy"] = {{"epsilon", e.epsilon}, {"alpha", e.alpha},   {"nu", e.nu},
                      {"gamma", e.gamma},     {"sigma1", e.sigma1}, {"sigma2", e.sigma2},
                      {"sigma3", e.sigma3},   {"sigma4", e.sigma4}};
    return j;
}

// minimal SVG polyline plot, no timestamps so reruns are byte-identical
std::string svg_plot(const std::vector<Vec2>& pts, const std::string& xlabel, const std::string& ylabel) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (auto& p : pts) {
        xmin = std::min(xmin, p[0]);
        xmax = std::max(xmax, p[0]);
        ymin = std::min(ymin, p[1]);
        ymax = std::max(ymax, p[1]);
    }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    int W = 760, H = 500, m = 55;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    s << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << W - 2 * m << "\" height=\"" << H - 2 * m
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    s << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    s << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2 << ")\" text-anchor=\"middle\">"
      << ylabel << "</text>\n";
    s << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1\" points=\"";
    size_t stride = std::max<size_t>(1, pts.size() / 4000);
    for (size_t i = 0; i < pts.size(); i += stride) {
        double px = m + (pts[i][0] - xmin) / (xmax - xmin) * (W - 2 * m);
        double py = H - m - (pts[i][1] - ymin) / (ymax - ymin) * (H - 2 * m);
        s << px << "," << py << " ";
    }
    s << "\"/>\n</svg>\n";
    return s.str();
}

std::string csv_trajectory(const Trajectory& tr, const std::vector<std::string>& coords) {
    std::ostringstream s;
    s << "t";
    for (auto& c : coords) s << "," << c;
    s << "\n";
    for (size_t i = 0; i < tr.size(); ++i) {
        s << fmt(tr.t[i]);
        for (int j = 0; j < tr.dim; ++j) s << "," << fmt(tr.state(i)[j]);
        s << "\n";
    }
    return s.str();
}

struct Loaded {
    BiophysicalParams bio;
    SmolenParams smo;
    DimensionlessParams dimless;
    EpsilonParams eps;
};

Loaded load_params(const json& config) {
    Loaded L;
    if (config.contains("params_file")) {
        std::ifstream in(config.at("params_file").get<std::string>());
        if (!in) throw std::invalid_argument("cannot open params_file");
        std::stringstream ss;
        ss << in.rdbuf();
        params_from_json(ss.str(), L.bio, L.smo);
    } else if (config.contains("params")) {
        params_from_json(config.at("params").dump(), L.bio, L.smo);
    }
    L.dimless = nondimensionalise(L.bio);
    L.eps = extract_hierarchy(L.dimless);
    if (config.contains("eps")) L.eps.epsilon = config.at("eps").get<double>();
    return L;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

json validation_to_json(const ValidationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"measured", c.measured}, {"margin", c.margin}, {"pass", c.pass}});
    return {{"all_pass", r.all_pass}, {"checks", checks}};
}

int cmd_nondim(RunContext& ctx, const Loaded& L, bool emit_scales) {
    json out;
    out["dimensionless"] = {{"hatAlpha", L.dimless.hatAlpha},   {"hatNu1", L.dimless.hatNu1},
                            {"hatNu2", L.dimless.hatNu2},       {"hatGamma", L.dimless.hatGamma},
                            {"hatSigma1", L.dimless.hatSigma1}, {"hatSigma2", L.dimless.hatSigma2},
                            {"hatSigma3", L.dimless.hatSigma3}, {"hatSigma4", L.dimless.hatSigma4},
                            {"hatSigma6", L.dimless.hatSigma6}};
    out["validation"] = validation_to_json(validate_asymptotics(L.dimless));
    const double* vals[] = {&L.dimless.hatAlpha,  &L.dimless.hatNu1,   &L.dimless.hatNu2,
                            &L.dimless.hatGamma,  &L.dimless.hatSigma1, &L.dimless.hatSigma2,
                            &L.dimless.hatSigma3, &L.dimless.hatSigma4, &L.dimless.hatSigma6};
    json table = json::array();
    bool all_ok = true;
    for (size_t i = 0; i < 9; ++i) {
        double rel = std::abs(*vals[i] - kGoldenDimensionless[i].value) / kGoldenDimensionless[i].value;
        bool ok = rel < 5e-3;
        all_ok = all_ok && ok;
        table.push_back({{"name", kGoldenDimensionless[i].name},
                         {"computed", *vals[i]},
                         {"published", kGoldenDimensionless[i].value},
                         {"rel_diff", rel},
                         {"pass", ok}});
    }
    out["published_comparison"] = table;
    out["published_comparison_pass"] = all_ok;
    if (emit_scales) {
        ReferenceScales s = compute_reference_scales(L.bio);
        out["scales"] = {{"kappaX", s.kappaX}, {"kappaY", s.kappaY}, {"kappaTau", s.kappaTau}};
    }
    out["hierarchy"] = {{"epsilon", L.eps.epsilon}, {"alpha", L.eps.alpha},   {"nu", L.eps.nu},
                        {"gamma", L.eps.gamma},     {"sigma1", L.eps.sigma1}, {"sigma2", L.eps.sigma2},
                        {"sigma3", L.eps.sigma3},   {"sigma4", L.eps.sigma4}};
    write_file(ctx, "nondim.json", out.dump(2) + "\n");
    std::cout << "nondim: 9-row comparison " << (all_ok ? "all within 0.5%" : "MISMATCH") << "\n";
    return all_ok ? 0 : 3;
}

int cmd_simulate(RunContext& ctx, const Loaded& L, const std::string& model, double duration,
                 const std::vector<double>& initial, double rtol, const std::string& method) {
    ModelSet ms{L.bio, L.smo, L.eps};
    auto reg = make_registry(ms);
    auto it = reg.find(model);
    if (it == reg.end()) {
        std::cerr << "unknown model id '" << model << "'; valid ids:";
        for (auto& id : registry_ids()) std::cerr << " " << id;
        std::cerr << "\n";
        return 2;
    }
    const ModelEntry& entry = it->second;
    std::vector<double> y0 = initial;
    if (y0.empty()) {
        if (model == "biophysical-xy" || model == "fullflux") y0 = {150.0, 5.0};
        else if (entry.dim == 2) y0 = {0.4, 0.4};
        else y0 = {0.3, 0.3, 0.1};
    }
    if (static_cast<int>(y0.size()) != entry.dim) {
        std::cerr << "initial state must have " << entry.dim << " coordinates\n";
        return 2;
    }
    IntegratorOptions opt;
    opt.rel_tol = rtol;
    opt.abs_tol = rtol * 1e-2;
    opt.method = method;
    if (entry.dim == 2 && model != "regime3-xv") opt.clamp_coords = {1};
    Trajectory tr = integrate(entry.rhs, entry.dim, y0, 0.0, duration, opt);
    tr.model_id = model;
    write_file(ctx, "trace_" + model + ".csv", csv_trajectory(tr, entry.coords));
    std::vector<Vec2> phase, trace;
    for (size_t i = 0; i < tr.size(); ++i) {
        phase.push_back({tr.state(i)[0], tr.state(i)[1]});
        trace.push_back({tr.t[i], tr.state(i)[1]});
    }
    write_file(ctx, "phase_" + model + ".svg", svg_plot(phase, entry.coords[0], entry.coords[1]));
    write_file(ctx, "trace_" + model + ".svg", svg_plot(trace, "t", entry.coords[1]));
    std::cout << "simulate " << model << ": " << tr.stats.steps << " steps, " << tr.stats.rejects
              << " rejects, " << tr.size() << " samples\n";
    return 0;
}

int cmd_geometry(RunContext& ctx, const Loaded& L) {
    json out;
    FoldReport f = fold_points(L.dimless);
    out["folds"] = {{"Yf1", f.Yf1},           {"Xf1", f.Xf1},           {"Yf2", f.Yf2},
                    {"Xf2", f.Xf2},           {"Yf1_asym", f.Yf1_asym}, {"Yf2_asym", f.Yf2_asym},
                    {"Xf1_asym", f.Xf1_asym}, {"res_Yf1", f.res_Yf1},   {"res_Yf2", f.res_Yf2},
                    {"res_Xf1", f.res_Xf1}};
    EquilibriumReport eq = equilibrium_xy(L.dimless);
    out["equilibrium"] = {{"X", eq.location[0]},
                          {"Y", eq.location[1]},
                          {"trace", eq.trace},
                          {"det", eq.determinant},
                          {"discriminant", eq.discriminant},
                          {"classification", eq.classification},
                          {"residual", eq.nullcline_residual}};
    auto poles = y_nullcline_poles(L.dimless);
    out["nullcline_poles_Y"] = poles;
    auto range = y_nullcline_physical_range(L.dimless);
    out["physical_branch_Y"] = {range.first, range.second};
    auto branches = regime1_manifolds(L.eps);
    json jb = json::array();
    for (const auto& b : branches) {
        json eigs = json::array();
        for (double xi : b.sample_grid) eigs.push_back({{"xi", xi}, {"lambda", b.eigenvalue(xi)}});
        jb.push_back({{"label", b.label},
                      {"stability", stability_name(b.stability)},
                      {"param_range", {b.param_lo, b.param_hi}},
                      {"eigenvalues", eigs}});
    }
    out["regime1_manifolds"] = jb;
    Regime2Layer r2 = regime2_layer_objects(L.eps);
    out["regime2"] = {{"gamma5_lambda", r2.gamma5.eigenvalue(1.0)},
                      {"eigendirection", {r2.eigendirection[0], r2.eigendirection[1]}},
                      {"p0", {{"U", r2.p0.location[0]}, {"Z", r2.p0.location[1]},
                              {"classification", r2.p0.classification}}}};
    Regime3Manifold r3 = regime3_manifold(L.eps);
    out["regime3"] = {{"fold_p4", {r3.fold_p4[0], r3.fold_p4[1]}},
                      {"lambda_at_V0", r3.gamma4a.eigenvalue(0.0)},
                      {"lambda_at_V1", r3.gamma4a.eigenvalue(1.0)}};
    ConnectionResult sep = k2_connection_p1_to_gamma5(L.eps, 1e-3);
    out["gamma12_reaches_gamma5"] = sep.reached;
    out["gamma12_landing_U"] = sep.landing_U;
    write_file(ctx, "geometry.json", out.dump(2) + "\n");

    std::ostringstream csv;
    csv << "Y,X_nullcline\n";
    for (int i = 1; i <= 400; ++i) {
        double Y = range.first + (range.second - range.first) * i / 401.0;
        try {
            NullclineValue v = y_nullcline(Y, L.dimless);
            if (v.physical) csv << fmt(Y) << "," << fmt(std::sqrt(v.X2)) << "\n";
        } catch (const PoleError&) {
        }
    }
    write_file(ctx, "nullcline.csv", csv.str());
    std::ostringstream g12;
    g12 << "U,Z\n";
    for (auto& p : sep.path) g12 << fmt(p[0]) << "," << fmt(p[1]) << "\n";
    write_file(ctx, "gamma12.csv", g12.str());
    std::ostringstream g4;
    g4 << "V,X,lambda\n";
    for (int i = 0; i <= 400; ++i) {
        double V = 10.0 * i / 400.0;
        Vec2 pt = (V <= 1.0 ? r3.gamma4a : r3.gamma4r).embedding(V);
        g4 << fmt(V) << "," << fmt(pt[0]) << "," << fmt(r3.gamma4a.eigenvalue(V)) << "\n";
    }
    write_file(ctx, "gamma4.csv", g4.str());
    std::cout << "geometry: folds Yf1=" << f.Yf1 << " Yf2=" << f.Yf2 << ", equilibrium "
              << eq.classification << "\n";
    return 0;
}

int cmd_reduce(RunContext& ctx, const Loaded& L, const std::string& model, const std::string& manifold,
               int order) {
    DecomposedField2 field;
    GraphManifold g;
    if (model == "regime2-uz" && manifold == "gamma5") {
        field = decomposed_regime2_uz(L.eps);
        g = gamma5_manifold(L.eps);
    } else if (model == "regime3-xv" && manifold == "gamma4") {
        field = decomposed_regime3_xv(L.eps);
        g = gamma4_manifold(L.eps);
        g.right_inverse = RightInverse::CoordinateGraph;
    } else {
        std::cerr << "reduce: supported pairs are (regime2-uz, gamma5) and (regime3-xv, gamma4)\n";
        return 2;
    }
    auto grid = parametrisation_grid(g, 41, manifold == "gamma4" ? 1.0 : -1.0, 0.1);
    OrderSolution sol = solve_order(field, g, order, grid);
    std::ostringstream csv;
    csv << "xi,r" << order << ",phi" << order << "_0,phi" << order << "_1,residual\n";
    for (const auto& p : sol.pts)
        csv << fmt(p.xi) << "," << fmt(p.r) << "," << fmt(p.phi[0]) << "," << fmt(p.phi[1]) << ","
            << fmt(p.lin_residual) << "\n";
    write_file(ctx, "reduce_" + manifold + "_order" + std::to_string(order) + ".csv", csv.str());
    std::cout << "reduce " << model << "/" << manifold << " order " << order << ": " << sol.pts.size()
              << " grid points\n";
    return 0;
}

int cmd_blowup(RunContext& ctx, const Loaded& L, const std::string& chart_str) {
    ChartId id;
    if (chart_str == "k1") id = ChartId::K1;
    else if (chart_str == "k2") id = ChartId::K2;
    else if (chart_str == "k3") id = ChartId::K3;
    else if (chart_str == "k4") id = ChartId::K4;
    else {
        std::cerr << "unknown chart '" << chart_str << "' (valid: k1 k2 k3 k4)\n";
        return 2;
    }
    json out;
    out["chart"] = chart_str;
    out["printed_time_factor"] = chart_map(id).printed_factor();
    json eqs = json::array();
    for (const auto& q : chart_equilibria(id, L.eps)) {
        eqs.push_back({{"label", q.label},
                       {"coords", {q.coords[0], q.coords[1], q.coords[2]}},
                       {"spectrum", {q.spectrum[0], q.spectrum[1], q.spectrum[2]}},
                       {"hyperbolicity", q.hyperbolicity},
                       {"residual", q.residual}});
    }
    out["equilibria"] = eqs;
    out["pushforward_residual"] = pushforward_residual(id, 100, 12345, L.eps);
    if (id == ChartId::K1) {
        CentreCoefficients c = centre_coefficients("p1", L.eps);
        out["centre_manifold_p1"] = {{"graph_coeff", c.graph_coeff},
                                     {"graph_coeff_fit", c.graph_coeff_fit},
                                     {"flow_coeff", c.flow_coeff},
                                     {"flow_coeff_fit", c.flow_coeff_fit},
                                     {"verified", c.verified}};
    }
    if (id == ChartId::K3) {
        for (const char* pt : {"p3", "p7"}) {
            CentreCoefficients c = centre_coefficients(pt, L.eps);
            out[std::string("centre_manifold_") + pt] = {{"graph_coeff", c.graph_coeff},
                                                         {"graph_coeff_fit", c.graph_coeff_fit},
                                                         {"flow_coeff", c.flow_coeff},
                                                         {"flow_coeff_fit", c.flow_coeff_fit},
                                                         {"verified", c.verified}};
        }
    }
    write_file(ctx, "blowup_" + chart_str + ".json", out.dump(2) + "\n");
    std::cout << "blowup " << chart_str << ": " << eqs.size() << " equilibria, pushforward residual "
              << out["pushforward_residual"].get<double>() << "\n";
    return 0;
}

int cmd_sweep(RunContext& ctx, const Loaded& L, const std::string& observable, const std::string& eps_csv,
              int jobs) {
    auto eps_list = parse_double_list(eps_csv);
    double Xf10 = std::sqrt(L.eps.gamma * L.eps.sigma4 / (2.0 - L.eps.gamma * L.eps.sigma2));
    double Z2 = 1.0 / (L.eps.gamma * L.eps.sigma1);
    struct Row {
        double eps = 0, period = 0, hausdorff = 0;
        std::vector<SegmentStats> segs;
    };
    EpsilonParams base = L.eps;
    auto run_one = [base, Xf10, Z2](double eps) {
        Row row;
        row.eps = eps;
        LimitCycle c = find_surrogate_cycle(base, eps);
        row.period = c.period;
        EpsilonParams e = base.with_epsilon(eps);
        RhsFn rhs = [e](double, const double* y, double* dy) {
            Vec2 f = eval_surrogate_xz({y[0], y[1]}, e);
            dy[0] = f[0];
            dy[1] = f[1];
        };
        auto poly = cycle_polyline(rhs, c, 2e-3);
        row.hausdorff = hausdorff_distance(poly, rectangle_polyline(0.0, Xf10, 0.0, Z2));
        SegmentConfig cfg;
        cfg.practical_top = true;
        row.segs = segment_speeds(c, e, cfg);
        return row;
    };
    std::vector<Row> rows(eps_list.size());
    size_t next = 0;
    while (next < eps_list.size()) {
        size_t batch = std::min<size_t>(static_cast<size_t>(std::max(jobs, 1)), eps_list.size() - next);
        std::vector<std::future<Row>> futs;
        for (size_t k = 0; k < batch; ++k)
            futs.push_back(std::async(std::launch::async, run_one, eps_list[next + k]));
        for (size_t k = 0; k < batch; ++k) rows[next + k] = futs[k].get();
        next += batch;
    }
    json out;
    out["observable"] = observable;
    json jrows = json::array();
    for (const auto& r : rows) {
        json jr = {{"eps", r.eps}, {"period", r.period}, {"hausdorff", r.hausdorff}};
        json segs = json::array();
        for (const auto& s : r.segs)
            segs.push_back({{"name", s.name},
                            {"min", s.vmin},
                            {"median", s.vmed},
                            {"max", s.vmax},
                            {"median_projected", s.vmed_projected},
                            {"count", s.count},
                            {"empty", s.empty}});
        jr["segments"] = segs;
        jrows.push_back(jr);
    }
    out["rows"] = jrows;
    if (observable == "hausdorff") {
        bool monotone = true;
        for (size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].hausdorff < rows[i - 1].hausdorff;
        out["hausdorff_monotone_decreasing"] = monotone;
        bool period_up = true;
        for (size_t i = 1; i < rows.size(); ++i) period_up = period_up && rows[i].period > rows[i - 1].period;
        out["period_monotone_increasing"] = period_up;
    }
    if (observable == "segments" || observable == "timescales") {
        const char* names[5] = {"gamma2", "gamma1", "gamma5", "gamma4a", "jump_tail"};
        int stat[5] = {3, 1, 0, 0, 1};  // projected-median / median / min / min / median
        json slopes;
        for (int k = 0; k < 5; ++k) {
            std::vector<double> lx, ly;
            for (const auto& r : rows)
                for (const auto& s : r.segs)
                    if (s.name == names[k] && !s.empty) {
                        double v = stat[k] == 0 ? s.vmin : (stat[k] == 1 ? s.vmed : s.vmed_projected);
                        lx.push_back(std::log(r.eps));
                        ly.push_back(std::log(v));
                    }
            slopes[names[k]] = (lx.size() >= 2) ? fitted_slope(lx, ly) : 0.0;
        }
        out["slopes"] = slopes;
    }
    std::ostringstream csv;
    csv << "eps,period,hausdorff\n";
    for (const auto& r : rows) csv << fmt(r.eps) << "," << fmt(r.period) << "," << fmt(r.hausdorff) << "\n";
    write_file(ctx, "sweep.csv", csv.str());
    write_file(ctx, "sweep.json", out.dump(2) + "\n");
    std::cout << "sweep over " << rows.size() << " eps values done\n";
    return 0;
}

int cmd_report(RunContext& ctx, const Loaded& L) {
    json out;
    int rc = cmd_nondim(ctx, L, true);
    FoldReport f = fold_points(L.dimless);
    EquilibriumReport eq = equilibrium_xy(L.dimless);
    out["fold_Yf1_over_sigma6"] = f.Yf1 / L.dimless.hatSigma6;
    out["equilibrium_classification"] = eq.classification;
    json push;
    for (auto id : {ChartId::K1, ChartId::K2, ChartId::K3, ChartId::K4})
        push[chart_name(id)] = pushforward_residual(id, 100, 12345, L.eps);
    out["pushforward_residuals"] = push;
    write_file(ctx, "report.json", out.dump(2) + "\n");
    std::cout << "report written\n";
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiscale analysis toolkit for the beta-cell metabolic oscillator"};
    app.require_subcommand(1);
    std::string config_path, out_dir, eps_csv = "0.3,0.2241,0.15,0.1";
    std::string model = "surrogate-xz", manifold = "gamma5", chart = "k1", observable = "hausdorff";
    std::string method = "rk54", initial_csv;
    double duration = 1e4, rtol = 1e-10, eps_override = 0;
    int order = 2, jobs = 2;
    bool emit_scales = false, verify = false;
    app.add_option("--config", config_path, "JSON config file; flags override its fields");
    app.add_option("--out-dir", out_dir, "output directory (default AMO_OUT_DIR or .)");
    app.add_flag("--verify", verify, "recompute and diff against existing outputs");
    app.add_option("--eps", eps_override, "override the hierarchy epsilon");

    auto* nd = app.add_subcommand("nondim", "non-dimensionalise and compare against the published table");
    nd->add_flag("--emit-scales", emit_scales, "include the reference scales");
    auto* sim = app.add_subcommand("simulate", "integrate a registered model");
    sim->add_option("--model", model, "model id");
    sim->add_option("--duration", duration, "integration span (model time units)");
    sim->add_option("--initial", initial_csv, "comma-separated initial state");
    sim->add_option("--rtol", rtol, "relative tolerance");
    sim->add_option("--method", method, "rk54 | trapezoidal");
    auto* geo = app.add_subcommand("geometry", "singular geometry report");
    auto* red = app.add_subcommand("reduce", "slow-manifold reduction via the parametrisation hierarchy");
    red->add_option("--model", model, "regime2-uz | regime3-xv");
    red->add_option("--manifold", manifold, "gamma5 | gamma4");
    red->add_option("--order", order, "hierarchy order j");
    auto* blw = app.add_subcommand("blowup", "chart equilibria, spectra and residuals");
    blw->add_option("--chart", chart, "k1 | k2 | k3 | k4");
    blw->add_flag("--report", "compatibility flag; the report is always written");
    auto* swp = app.add_subcommand("sweep", "eps sweep of cycle observables");
    swp->add_option("--observable", observable, "hausdorff | segments | timescales | period");
    swp->add_option("--eps", eps_csv, "comma-separated eps list");
    swp->add_option("--jobs", jobs, "concurrent cycle computations");
    auto* rep = app.add_subcommand("report", "combined self-check report");
    (void)rep;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    RunContext ctx;
    for (int i = 0; i < argc; ++i) ctx.command_line += std::string(i ? " " : "") + argv[i];
    ctx.verify = verify;
    const char* env_out = std::getenv("AMO_OUT_DIR");
    ctx.out_dir = !out_dir.empty() ? out_dir : (env_out ? env_out : ".");
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);

    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "cannot open config " << config_path << "\n";
                return 2;
            }
            ctx.config = json::parse(in);
        } else {
            ctx.config = json::object();
        }
        Loaded L = load_params(ctx.config);
        if (eps_override > 0) L.eps.epsilon = eps_override;
        int rc = 0;
        std::string cmd;
        if (nd->parsed()) {
            cmd = "nondim";
            rc = cmd_nondim(ctx, L, emit_scales);
        } else if (sim->parsed()) {
            cmd = "simulate";
            std::vector<double> y0;
            if (!initial_csv.empty()) y0 = parse_double_list(initial_csv);
            rc = cmd_simulate(ctx, L, model, duration, y0, rtol, method);
        } else if (geo->parsed()) {
            cmd = "geometry";
            rc = cmd_geometry(ctx, L);
        } else if (red->parsed()) {
            cmd = "reduce";
            rc = cmd_reduce(ctx, L, model, manifold, order);
        } else if (blw->parsed()) {
            cmd = "blowup";
            rc = cmd_blowup(ctx, L, chart);
        } else if (swp->parsed()) {
            cmd = "sweep";
            rc = cmd_sweep(ctx, L, observable, eps_csv, jobs);
        } else {
            cmd = "report";
            rc = cmd_report(ctx, L);
        }
        if (rc == 0) write_manifest(ctx, cmd, params_snapshot(L.bio, L.smo, L.eps));
        if (ctx.exit_code != 0) return ctx.exit_code;
        return rc;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
}
