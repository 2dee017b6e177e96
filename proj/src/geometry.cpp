#include "amo/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace amo {

namespace {
// denominator of the Y-nullcline as a function of w = sqrt(Y)
double nullcline_den(double w, const DimensionlessParams& d) {
    return -d.hatGamma * d.hatSigma1 * w * w * w + w * w - d.hatGamma * d.hatSigma2 * w + d.hatSigma6;
}
}  // namespace

std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi, int n) {
    std::vector<double> roots;
    double prev = f(lo);
    double x_prev = lo;
    for (int i = 1; i <= n; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / n;
        double v = f(x);
        if (prev == 0.0) roots.push_back(x_prev);
        if (prev * v < 0.0) {
            double a = x_prev, b = x, fa = prev;
            for (int it = 0; it < 200; ++it) {
                double m = 0.5 * (a + b), fm = f(m);
                if (fa * fm <= 0.0)
                    b = m;
                else {
                    a = m;
                    fa = fm;
                }
                if (b - a < 1e-16 * (1.0 + std::abs(a))) break;
            }
            double r = 0.5 * (a + b);
            // Newton polish with numeric derivative
            for (int it = 0; it < 6; ++it) {
                double h = 1e-7 * (1.0 + std::abs(r));
                double df = (f(r + h) - f(r - h)) / (2.0 * h);
                if (std::abs(df) < 1e-300) break;
                double step = f(r) / df;
                double rn = r - step;
                if (rn > lo && rn < hi) r = rn;
                if (std::abs(step) < 1e-16 * (1.0 + std::abs(r))) break;
            }
            roots.push_back(r);
        }
        prev = v;
        x_prev = x;
    }
    return roots;
}

NullclineValue y_nullcline(double Y, const DimensionlessParams& d) {
    if (Y < 0.0) throw std::domain_error("y_nullcline: Y < 0");
    double w = std::sqrt(Y);
    double den = nullcline_den(w, d);
    double scale = std::max({std::abs(w * w), d.hatSigma6, 1e-30});
    if (std::abs(den) < 1e-14 * scale) throw PoleError("y_nullcline: denominator pole at Y");
    double num = d.hatGamma * w * (d.hatSigma3 * Y + d.hatSigma4);
    NullclineValue v;
    v.X2 = num / den;
    v.physical = v.X2 >= 0.0;
    return v;
}

std::vector<double> y_nullcline_poles(const DimensionlessParams& d) {
    double whi = 1.5 / (d.hatGamma * d.hatSigma1);
    auto f = [&d](double w) { return nullcline_den(w, d); };
    auto ws = scan_roots(f, 0.0, whi, 20000);
    std::vector<double> Ys;
    for (double w : ws)
        if (w > 0.0) Ys.push_back(w * w);
    std::sort(Ys.begin(), Ys.end());
    return Ys;
}

std::pair<double, double> y_nullcline_physical_range(const DimensionlessParams& d) {
    // maximal interval of positive denominator whose upper end is the largest
    // pole; at the physical parameters the two near-zero poles of the
    // asymptotic analysis are complex and the interval starts at Y = 0
    auto poles = y_nullcline_poles(d);
    if (poles.empty()) throw GeometryError("physical range: no positive pole found");
    double hi = poles.back();
    double lo = 0.0;
    for (size_t i = 0; i + 1 < poles.size(); ++i) {
        double mid = std::sqrt(0.5 * (std::sqrt(poles[i]) + std::sqrt(poles[i + 1])));
        if (i + 2 == poles.size() && nullcline_den(mid, d) > 0.0) lo = poles[i];
    }
    return {lo, hi};
}

FoldReport fold_points(const DimensionlessParams& d) {
    d.validate();
    FoldReport r;
    double A = 2.0 * d.hatGamma * (d.hatSigma1 * d.hatSigma4 / d.hatSigma3 - d.hatSigma2);
    double B = 3.0 * d.hatSigma6 - d.hatSigma4 / d.hatSigma3;
    double C = d.hatSigma4 * d.hatSigma6 / d.hatSigma3;
    auto quartic = [A, B, C](double w) { return ((w + A) * w + B) * w * w + C; };
    double whi = 1.5 / (d.hatGamma * d.hatSigma1);
    auto ws = scan_roots(quartic, 0.0, whi, 10000);
    std::vector<double> pos;
    for (double w : ws)
        if (w > 0.0) pos.push_back(w);
    if (pos.size() < 2) {
        std::string pat = "sign pattern:";
        for (int i = 0; i <= 20; ++i) {
            double w = whi * i / 20.0;
            pat += quartic(w) >= 0 ? " +" : " -";
        }
        throw GeometryError("fold_points: quartic bracketing found fewer than two positive roots; " + pat);
    }
    std::sort(pos.begin(), pos.end());
    r.Yf1 = pos.front() * pos.front();
    r.Yf2 = pos.back() * pos.back();
    r.Xf1 = std::sqrt(std::max(0.0, y_nullcline(r.Yf1, d).X2));
    r.Xf2 = std::sqrt(std::max(0.0, y_nullcline(r.Yf2, d).X2));
    // asymptotic predictions
    r.Yf1_asym = d.hatSigma6;
    double t = d.hatGamma * d.hatSigma1 * d.hatSigma4 / d.hatSigma3;
    double wf2 = std::sqrt(t * t + d.hatSigma4 / d.hatSigma3) - t;
    r.Yf2_asym = wf2 * wf2;
    double s6r = std::sqrt(d.hatSigma6);
    r.Xf1_asym = std::sqrt(d.hatGamma * d.hatSigma4 * s6r / (2.0 * d.hatSigma6 - d.hatGamma * d.hatSigma2 * s6r));
    r.res_Yf1 = std::abs(r.Yf1 - r.Yf1_asym);
    r.res_Yf2 = std::abs(r.Yf2 - r.Yf2_asym);
    r.res_Xf1 = std::abs(r.Xf1 - r.Xf1_asym);
    return r;
}

std::string classify_planar(double det, double tr, double disc) {
    if (det < 0.0) return "saddle";
    std::string kind = disc >= 0.0 ? "node" : "focus";
    std::string stab = tr > 0.0 ? "unstable" : "stable";
    return stab + " " + kind;
}

EquilibriumReport equilibrium_xy(const DimensionlessParams& d) {
    auto rep = validate_asymptotics(d);
    if (!rep.all_pass) throw GeometryError("equilibrium_xy: asymptotic conditions fail for these parameters");
    double Yeq = std::pow(d.hatAlpha / (d.hatGamma * d.hatNu1), 2.0);
    double num = d.hatAlpha * (d.hatAlpha * d.hatAlpha * d.hatSigma3 + d.hatGamma * d.hatGamma * d.hatNu1 * d.hatNu1 * d.hatSigma4);
    double den = d.hatGamma * d.hatGamma * d.hatNu1 * d.hatNu1 * (d.hatNu1 * d.hatSigma6 - d.hatAlpha * d.hatSigma2) +
                 d.hatAlpha * d.hatAlpha * (d.hatNu1 - d.hatAlpha * d.hatSigma1);
    double Xeq = std::sqrt(num / den);
    Vec2 s{Xeq, Yeq};
    // Newton refinement on the joint nullcline system
    for (int it = 0; it < 60; ++it) {
        Vec2 F = eval_dimensionless_xy(s, d);
        Mat J = jac_dimensionless_xy(s, d);
        auto dx = solve_small(J, {F[0], F[1], 0, 0});
        s[0] -= dx[0];
        s[1] -= dx[1];
        if (!std::isfinite(s[0]) || !std::isfinite(s[1]))
            throw GeometryError("equilibrium_xy: Newton diverged");
        if (std::abs(dx[0]) + std::abs(dx[1]) < 1e-15 * (1.0 + std::abs(s[0]) + std::abs(s[1]))) break;
    }
    EquilibriumReport er;
    er.location = s;
    er.jacobian = jac_dimensionless_xy(s, d);
    er.trace = er.jacobian(0, 0) + er.jacobian(1, 1);
    er.determinant = det(er.jacobian);
    er.discriminant = er.trace * er.trace - 4.0 * er.determinant;
    er.classification = classify_planar(er.determinant, er.trace, er.discriminant);
    Vec2 F = eval_dimensionless_xy(s, d);
    er.nullcline_residual = std::max(std::abs(F[0]), std::abs(F[1]));
    if (er.nullcline_residual > 1e-12 * (1.0 + d.hatAlpha))
        throw GeometryError("equilibrium_xy: Newton residual too large");
    return er;
}

std::string stability_name(Stability s) {
    switch (s) {
        case Stability::Attracting: return "attracting";
        case Stability::Repelling: return "repelling";
        case Stability::Degenerate: return "degenerate";
        case Stability::FoldBoundary: return "fold-boundary";
    }
    return "?";
}

namespace {
std::vector<double> geometric_grid(double lo, double hi, int n) {
    std::vector<double> g;
    g.reserve(static_cast<size_t>(n));
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i) g.push_back(std::exp(llo + (lhi - llo) * i / (n - 1)));
    return g;
}
}  // namespace

std::vector<ManifoldBranch> regime1_manifolds(const EpsilonParams& e) {
    e.validate();
    double Z2 = 1.0 / (e.gamma * e.sigma1);
    std::vector<ManifoldBranch> out;
    ManifoldBranch g0;
    g0.label = "Gamma0";
    g0.param_lo = 0.0;
    g0.param_hi = 1.0;
    g0.embedding = [](double xi) -> Vec2 { return {xi, 0.0}; };
    g0.eigenvalue = [](double) { return 0.0; };
    g0.stability = Stability::Degenerate;
    g0.sample_grid = geometric_grid(1e-3, 1.0, 21);
    out.push_back(g0);
    ManifoldBranch g1;
    g1.label = "Gamma1";
    g1.param_lo = 0.0;
    g1.param_hi = 2.0 * Z2;
    g1.embedding = [](double xi) -> Vec2 { return {0.0, xi}; };
    g1.eigenvalue = [](double) { return 0.0; };
    g1.stability = Stability::Degenerate;
    g1.sample_grid = geometric_grid(1e-3, 2.0 * Z2, 21);
    out.push_back(g1);
    ManifoldBranch g2;
    g2.label = "Gamma2";
    g2.param_lo = 0.0;
    g2.param_hi = 1.0;
    g2.embedding = [Z2](double xi) -> Vec2 { return {xi, Z2}; };
    g2.eigenvalue = [e](double xi) { return -xi * xi / (e.gamma * e.sigma1); };
    g2.stability = Stability::Attracting;  // for X > 0; loses hyperbolicity at p1
    g2.sample_grid = geometric_grid(1e-3, 1.0, 21);
    out.push_back(g2);
    return out;
}

Regime2Layer regime2_layer_objects(const EpsilonParams& e) {
    e.validate();
    Regime2Layer out;
    out.gamma5.label = "Gamma5";
    out.gamma5.param_lo = 0.0;
    out.gamma5.param_hi = 3.0;
    out.gamma5.embedding = [](double xi) -> Vec2 { return {xi, 0.0}; };
    out.gamma5.eigenvalue = [e](double) { return -e.gamma * e.sigma4; };
    out.gamma5.stability = Stability::Attracting;
    out.gamma5.sample_grid = geometric_grid(1e-2, 3.0, 21);
    out.eigendirection = {2.0 * e.alpha, -e.gamma};

    DecomposedField2 f = decomposed_regime2_uz(e);
    // closed-form node location, then Newton on N0 = 0
    double Z0 = e.alpha / (e.gamma * e.nu);
    double U0 = std::sqrt(e.alpha * (e.sigma3 * Z0 * Z0 + e.sigma4) / ((e.nu - e.alpha * e.sigma1) * Z0 * Z0));
    Vec2 s{U0, Z0};
    for (int it = 0; it < 60; ++it) {
        Vec2 F = f.N0(s);
        Mat J = f.DN0(s);
        std::array<double, 4> dx{};
        try {
            dx = solve_small(J, {F[0], F[1], 0, 0});
        } catch (const std::domain_error&) {
            throw GeometryError("regime2_layer_objects: p0 solver hit a singular Jacobian");
        }
        s[0] -= dx[0];
        s[1] -= dx[1];
        if (!std::isfinite(s[0]) || !std::isfinite(s[1]))
            throw GeometryError("regime2_layer_objects: p0 solver diverged");
        if (std::abs(dx[0]) + std::abs(dx[1]) < 1e-15 * (1.0 + std::abs(s[0]))) break;
    }
    EquilibriumReport er;
    er.location = s;
    // layer Jacobian at an isolated zero of N0: D(N0 f0) = DN0 * f0 (f0 != 0 here)
    Mat DN = f.DN0(s);
    double f0v = f.f0(s);
    er.jacobian = f0v * DN;
    er.trace = er.jacobian(0, 0) + er.jacobian(1, 1);
    er.determinant = det(er.jacobian);
    er.discriminant = er.trace * er.trace - 4.0 * er.determinant;
    er.classification = classify_planar(er.determinant, er.trace, er.discriminant);
    Vec2 F = f.N0(s);
    er.nullcline_residual = std::max(std::abs(F[0]), std::abs(F[1]));
    out.p0 = er;
    return out;
}

Regime3Manifold regime3_manifold(const EpsilonParams& e) {
    e.validate();
    auto q = [e](double V) { return V * V - e.gamma * e.sigma2 * V + 1.0; };
    auto emb = [e, q](double V) -> Vec2 {
        return {std::sqrt(e.gamma * e.sigma4 * V / q(V)), V};
    };
    auto lam = [e, q](double V) { return e.gamma * e.sigma4 * (V * V - 1.0) / q(V); };
    Regime3Manifold out;
    out.gamma4a.label = "Gamma4a";
    out.gamma4a.param_lo = 0.0;
    out.gamma4a.param_hi = 1.0;
    out.gamma4a.embedding = emb;
    out.gamma4a.eigenvalue = lam;
    out.gamma4a.stability = Stability::Attracting;
    out.gamma4a.sample_grid = geometric_grid(1e-3, 0.999, 21);
    out.gamma4r.label = "Gamma4r";
    out.gamma4r.param_lo = 1.0;
    out.gamma4r.param_hi = 10.0;
    out.gamma4r.embedding = emb;
    out.gamma4r.eigenvalue = lam;
    out.gamma4r.stability = Stability::Repelling;
    out.gamma4r.sample_grid = geometric_grid(1.001, 10.0, 21);
    out.fold_p4 = {std::sqrt(e.gamma * e.sigma4 / (2.0 - e.gamma * e.sigma2)), 1.0};
    return out;
}

}  // namespace amo
