#include "amo/blowup.hpp"

#include <cmath>
#include <random>

namespace amo {

namespace {
void check_locus(double denom, const char* what) {
    if (std::abs(denom) < 1e-14) throw LocusError(std::string("chart map singular on the blown-up locus: ") + what);
}
}  // namespace

Vec3 ChartMap::to_chart(const Vec3& o) const {
    double X = o[0], Z = o[1], e = o[2];
    switch (id) {
        case ChartId::K1:
            check_locus(X, "X = 0 (K1)");
            return {X, Z, e / X};
        case ChartId::K2:
            check_locus(e, "eps = 0 (K2)");
            return {X / e, Z, e};
        case ChartId::K3: {
            check_locus(X, "X = 0 (K3)");
            check_locus(e, "eps = 0 (K3)");
            double s3 = e / X;
            return {X, Z / (s3 * s3), s3};
        }
        case ChartId::K4: {
            check_locus(X, "X = 0 (K4)");
            if (Z <= 0.0) throw LocusError("Z <= 0 (K4)");
            double s4 = std::sqrt(Z);
            return {X, s4, e / (X * s4)};
        }
    }
    throw std::logic_error("to_chart: bad chart");
}

Vec3 ChartMap::from_chart(const Vec3& c) const {
    switch (id) {
        case ChartId::K1: return {c[0], c[1], c[2] * c[0]};
        case ChartId::K2: return {c[2] * c[0], c[1], c[2]};
        case ChartId::K3: return {c[0], c[2] * c[2] * c[1], c[2] * c[0]};
        case ChartId::K4: return {c[0], c[1] * c[1], c[1] * c[2] * c[0]};
    }
    throw std::logic_error("from_chart: bad chart");
}

Mat ChartMap::to_chart_jacobian(const Vec3& o) const {
    double X = o[0], Z = o[1], e = o[2];
    Mat J(3, 3);
    switch (id) {
        case ChartId::K1:
            check_locus(X, "X = 0 (K1)");
            J(0, 0) = 1;
            J(1, 1) = 1;
            J(2, 0) = -e / (X * X);
            J(2, 2) = 1.0 / X;
            return J;
        case ChartId::K2:
            check_locus(e, "eps = 0 (K2)");
            J(0, 0) = 1.0 / e;
            J(0, 2) = -X / (e * e);
            J(1, 1) = 1;
            J(2, 2) = 1;
            return J;
        case ChartId::K3:
            check_locus(X, "X = 0 (K3)");
            check_locus(e, "eps = 0 (K3)");
            J(0, 0) = 1;
            J(1, 0) = 2.0 * Z * X / (e * e);
            J(1, 1) = X * X / (e * e);
            J(1, 2) = -2.0 * Z * X * X / (e * e * e);
            J(2, 0) = -e / (X * X);
            J(2, 2) = 1.0 / X;
            return J;
        case ChartId::K4: {
            check_locus(X, "X = 0 (K4)");
            if (Z <= 0.0) throw LocusError("Z <= 0 (K4)");
            double rz = std::sqrt(Z);
            J(0, 0) = 1;
            J(1, 1) = 0.5 / rz;
            J(2, 0) = -e / (X * X * rz);
            J(2, 1) = -0.5 * e / (X * Z * rz);
            J(2, 2) = 1.0 / (X * rz);
            return J;
        }
    }
    throw std::logic_error("to_chart_jacobian: bad chart");
}

double ChartMap::time_factor(const Vec3& c) const {
    switch (id) {
        case ChartId::K1: return 1.0 / (c[0] * c[0]);
        case ChartId::K2: return 1.0 / (c[2] * c[2]);
        case ChartId::K3: return 1.0 / (c[0] * c[0] * c[2] * c[2]);
        case ChartId::K4: return 2.0 / (c[0] * c[0] * c[1] * c[1]);
    }
    throw std::logic_error("time_factor: bad chart");
}

std::string ChartMap::printed_factor() const {
    switch (id) {
        case ChartId::K1: return "dtaubar = r1^-2 dtau1";
        case ChartId::K2: return "dtaubar = r2^-2 dtau2";
        case ChartId::K3: return "dtau1 = s3^-2 dtau3";
        case ChartId::K4: return "dtau1 = 2 s4^-2 dtau4";
    }
    return "";
}

ChartMap chart_map(ChartId id) { return ChartMap{id}; }

Vec3 chart_transform(ChartId id, const Vec3& state, MapDirection dir) {
    ChartMap m = chart_map(id);
    return dir == MapDirection::ToChart ? m.to_chart(state) : m.from_chart(state);
}

namespace {
std::string hyperbolicity_tag(const std::array<double, 3>& spec, double scale) {
    int zeros = 0;
    for (double l : spec)
        if (std::abs(l) < 1e-9 * std::max(1.0, scale)) ++zeros;
    if (zeros == 0) return "hyperbolic";
    if (zeros == 3) return "non-hyperbolic";
    return "partially hyperbolic";
}

ChartEquilibrium make_equilibrium(ChartId chart, const std::string& label, const Vec3& coords,
                                  const EpsilonParams& e) {
    ChartEquilibrium q;
    q.chart = chart;
    q.label = label;
    q.coords = coords;
    Vec3 f = eval_chart(chart, coords, e);
    q.residual = std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2])});
    if (q.residual > 1e-8)
        throw InconsistencyError("chart equilibrium " + label + " has field residual " +
                                 std::to_string(q.residual) + " (transcription bug)");
    Mat J = jac_chart(chart, coords, e);
    q.spectrum = eigenvalues3_real(J);
    q.hyperbolicity = hyperbolicity_tag(q.spectrum, frobenius_norm(J));
    return q;
}
}  // namespace

std::vector<ChartEquilibrium> chart_equilibria(ChartId id, const EpsilonParams& e) {
    e.validate();
    double ga = e.gamma, s1 = e.sigma1, s2 = e.sigma2, s3 = e.sigma3, s4 = e.sigma4;
    double Z2 = 1.0 / (ga * s1);
    std::vector<ChartEquilibrium> out;
    switch (id) {
        case ChartId::K1: {
            double Z0 = e.alpha / (ga * e.nu);
            double e10 = std::sqrt(e.alpha * (e.nu - e.alpha * s1) / (s3 * e.alpha * e.alpha + s4 * ga * ga * e.nu * e.nu));
            out.push_back(make_equilibrium(id, "p0", {0.0, Z0, e10}, e));
            out.push_back(make_equilibrium(id, "p1", {0.0, Z2, 0.0}, e));
            out.push_back(make_equilibrium(id, "p378", {0.0, 0.0, 0.0}, e));
            break;
        }
        case ChartId::K2: {
            double Z0 = e.alpha / (ga * e.nu);
            double U0 = std::sqrt(e.alpha * (s3 * Z0 * Z0 + s4) / ((e.nu - e.alpha * s1) * Z0 * Z0));
            out.push_back(make_equilibrium(id, "p0", {U0, Z0, 0.0}, e));
            break;
        }
        case ChartId::K3: {
            out.push_back(make_equilibrium(id, "p3", {0.0, 0.0, 0.0}, e));
            double rf = std::sqrt(ga * s4 / (2.0 - ga * s2));
            out.push_back(make_equilibrium(id, "p4", {rf, rf * rf, 0.0}, e));
            out.push_back(make_equilibrium(id, "p7", {0.0, ga * s4, 0.0}, e));
            break;
        }
        case ChartId::K4: {
            out.push_back(make_equilibrium(id, "p8", {0.0, 0.0, 0.0}, e));
            out.push_back(make_equilibrium(id, "p7", {0.0, 0.0, 1.0 / std::sqrt(ga * s4)}, e));
            double rf = std::sqrt(ga * s4 / (2.0 - ga * s2));
            out.push_back(make_equilibrium(id, "p4", {rf, 0.0, std::sqrt((2.0 - ga * s2) / (ga * s4))}, e));
            out.push_back(make_equilibrium(id, "p1", {0.0, 1.0 / std::sqrt(ga * s1), 0.0}, e));
            break;
        }
    }
    return out;
}

namespace {
struct FitResult {
    double power = 0, coeff = 0;
};
FitResult loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0 || y[i] <= 0) continue;
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    FitResult f;
    if (lx.size() < 3) return f;
    double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    f.power = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.coeff = std::exp((sy - f.power * sx) / n);
    return f;
}
}  // namespace

CentreCoefficients centre_coefficients(const std::string& point, const EpsilonParams& e) {
    e.validate();
    double ga = e.gamma, s1 = e.sigma1, s3 = e.sigma3, s4 = e.sigma4;
    double Z2 = 1.0 / (ga * s1);
    CentreCoefficients cc;
    cc.point = point;
    IntegratorOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-16;
    if (point == "p1") {
        cc.graph_power = 2;
        cc.graph_coeff = (s3 + s4 * ga * ga * s1 * s1) / (ga * s1 * s1);
        cc.flow_power = 2;
        cc.flow_coeff = 2.0 * (e.nu - e.alpha * s1) / std::pow(ga * s1, 3.0);
        RhsFn rhs = [e](double, const double* y, double* dy) {
            Vec3 f = eval_chart(ChartId::K1, {0.0, y[0], y[1]}, e);
            dy[0] = f[1];
            dy[1] = f[2];
        };
        Trajectory tr = integrate(rhs, 2, {Z2, 1e-5}, 0.0, 4e4, opt);
        std::vector<double> eg, og, ef, vf;
        for (size_t i = 0; i < tr.size(); ++i) {
            double Z1 = tr.state(i)[0], e1 = tr.state(i)[1];
            if (e1 > 3e-4 && e1 < 3e-3) {
                eg.push_back(e1);
                og.push_back(Z2 - Z1);
            }
            if (e1 > 3e-4 && e1 < 3e-2) {
                double dy[2];
                rhs(0, tr.state(i), dy);
                ef.push_back(e1);
                vf.push_back(dy[1]);
            }
        }
        FitResult g = loglog_fit(eg, og);
        FitResult f = loglog_fit(ef, vf);
        cc.graph_power_fit = g.power;
        cc.graph_coeff_fit = g.coeff;
        cc.flow_power_fit = f.power;
        cc.flow_coeff_fit = f.coeff;
        cc.graph_checked = cc.flow_checked = true;
    } else if (point == "p3") {
        cc.graph_power = 4;
        cc.graph_coeff = 1.0 / (ga * s4);
        std::vector<double> ds, zs;
        RhsFn rhs = [e](double, const double* y, double* dy) {
            Vec3 f = eval_chart(ChartId::K3, {y[0], y[1], 0.0}, e);
            dy[0] = f[0];
            dy[1] = f[1];
        };
        for (double d = 0.02; d < 0.21; d *= 1.35) {
            Trajectory tr = integrate(rhs, 2, {d, 0.0}, 0.0, 2000.0 / ga, opt);
            ds.push_back(d);
            zs.push_back(tr.state(tr.size() - 1)[1]);
        }
        FitResult g = loglog_fit(ds, zs);
        cc.graph_power_fit = g.power;
        cc.graph_coeff_fit = g.coeff;
        cc.graph_checked = true;
    } else if (point == "p7") {
        cc.flow_power = 4;
        cc.flow_coeff = 2.0 * e.alpha * ga * s4 * s4;
        RhsFn back = [e](double, const double* y, double* dy) {
            Vec3 f = eval_chart(ChartId::K3, {0.0, y[0], y[1]}, e);
            dy[0] = -f[1];
            dy[1] = -f[2];
        };
        Trajectory tr = integrate(back, 2, {ga * s4 * 1.0001, 0.03}, 0.0, 9e5, opt);
        std::vector<double> ss, vs;
        for (size_t i = 0; i < tr.size(); ++i) {
            double sc = tr.state(i)[1];
            if (sc > 0.04 && sc < 0.16) {
                Vec3 f = eval_chart(ChartId::K3, {0.0, tr.state(i)[0], sc}, e);
                if (f[2] < 0) {
                    ss.push_back(sc);
                    vs.push_back(-f[2]);
                }
            }
        }
        FitResult f = loglog_fit(ss, vs);
        cc.flow_power_fit = f.power;
        cc.flow_coeff_fit = f.coeff;
        cc.flow_checked = true;
    } else {
        throw std::invalid_argument("centre_coefficients: point must be p1, p3 or p7");
    }
    auto within = [](double a, double b) { return std::abs(a - b) <= 0.10 * std::abs(b); };
    cc.verified = true;
    if (cc.graph_checked) cc.verified = cc.verified && within(cc.graph_coeff_fit, cc.graph_coeff);
    if (cc.flow_checked) cc.verified = cc.verified && within(cc.flow_coeff_fit, cc.flow_coeff);
    return cc;
}

double pushforward_residual(ChartId id, int n_samples, unsigned seed, const EpsilonParams& e) {
    ChartMap cm = chart_map(id);
    std::mt19937 rng(seed);
    auto uni = [&rng](double lo, double hi) {
        return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    };
    double worst = 0;
    for (int k = 0; k < n_samples; ++k) {
        Vec3 c{};
        switch (id) {
            case ChartId::K1: c = {uni(0.1, 0.6), uni(0.1, 2.4), uni(0.05, 0.5)}; break;
            case ChartId::K2: c = {uni(0.1, 3.0), uni(0.05, 2.4), uni(0.02, 0.3)}; break;
            case ChartId::K3: c = {uni(0.1, 0.7), uni(0.05, 1.0), uni(0.05, 0.5)}; break;
            case ChartId::K4: c = {uni(0.1, 0.7), uni(0.1, 1.2), uni(0.05, 1.0)}; break;
        }
        Vec3 o = cm.from_chart(c);
        EpsilonParams ep = e.with_epsilon(o[2]);
        Vec2 f2 = eval_surrogate_xz({o[0], o[1]}, ep);
        Vec3 fo{f2[0], f2[1], 0.0};  // extended field, eps' = 0
        Mat J = cm.to_chart_jacobian(o);
        double fac = cm.time_factor(c);
        Vec3 push{};
        for (int i = 0; i < 3; ++i)
            push[static_cast<size_t>(i)] =
                fac * (J(i, 0) * fo[0] + J(i, 1) * fo[1] + J(i, 2) * fo[2]);
        Vec3 fc = eval_chart(id, c, e);
        double scale = std::max({std::abs(fc[0]), std::abs(fc[1]), std::abs(fc[2]), 1e-30});
        for (int i = 0; i < 3; ++i)
            worst = std::max(worst, std::abs(push[static_cast<size_t>(i)] - fc[static_cast<size_t>(i)]) / scale);
    }
    return worst;
}

ConnectionResult k2_connection_p1_to_gamma5(const EpsilonParams& e, double delta) {
    e.validate();
    double Z2 = 1.0 / (e.gamma * e.sigma1);
    double K = (e.sigma3 + e.sigma4 * e.gamma * e.gamma * e.sigma1 * e.sigma1) / (e.gamma * e.sigma1 * e.sigma1);
    ConnectionResult res;
    RhsFn rhs = [e](double, const double* y, double* dy) {
        Vec2 f = eval_regime2_uz_at({y[0], y[1]}, 0.0, e);  // K2 layer problem (r2 = 0)
        dy[0] = f[0];
        dy[1] = f[1];
    };
    IntegratorOptions opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-14;
    std::vector<EventHit> hits;
    EventSpec ev;
    double d = delta;
    ev.g = [d](double, const double* y) { return y[1] - d; };
    ev.direction = -1;
    ev.terminal = true;
    Trajectory tr = integrate(rhs, 2, {1.0 / delta, Z2 - K * delta * delta}, 0.0, 1e7, opt, {ev}, &hits);
    for (size_t i = 0; i < tr.size(); i += std::max<size_t>(1, tr.size() / 2000))
        res.path.push_back({tr.state(i)[0], tr.state(i)[1]});
    if (!hits.empty()) {
        res.reached = true;
        res.landing_U = hits[0].y[0];
    }
    return res;
}

}  // namespace amo
