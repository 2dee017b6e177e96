#include "amo/models.hpp"

#include <cmath>
#include <stdexcept>

namespace amo {

std::string chart_name(ChartId c) {
    switch (c) {
        case ChartId::K1: return "k1";
        case ChartId::K2: return "k2";
        case ChartId::K3: return "k3";
        case ChartId::K4: return "k4";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// biophysical x-y system
// ---------------------------------------------------------------------------

double rate_r(const Vec2& s, const BiophysicalParams& p) {
    double x = s[0], y = s[1];
    double num = x * x * y / p.kappa5 + x * x / p.kappa6;
    double den = x * x * y / p.kappa1 + x * x / p.kappa2 + y / p.kappa3 + 1.0 / p.kappa4;
    return num / den;
}

Vec2 eval_biophysical_xy(const Vec2& s, const BiophysicalParams& p) {
    if (s[1] < 0.0) throw std::domain_error("biophysical-xy: y < 0");
    double r = rate_r(s, p);
    double root = std::sqrt(s[1] / p.omega);
    return {p.beta * (p.alpha - p.nu * r), p.eta * (p.nu * r - p.gamma * root)};
}

Mat jac_biophysical_xy(const Vec2& s, const BiophysicalParams& p) {
    double x = s[0], y = s[1];
    double N = x * x * y / p.kappa5 + x * x / p.kappa6;
    double D = x * x * y / p.kappa1 + x * x / p.kappa2 + y / p.kappa3 + 1.0 / p.kappa4;
    double Nx = 2.0 * x * y / p.kappa5 + 2.0 * x / p.kappa6;
    double Ny = x * x / p.kappa5;
    double Dx = 2.0 * x * y / p.kappa1 + 2.0 * x / p.kappa2;
    double Dy = x * x / p.kappa1 + 1.0 / p.kappa3;
    double rx = (Nx * D - N * Dx) / (D * D);
    double ry = (Ny * D - N * Dy) / (D * D);
    Mat J(2, 2);
    J(0, 0) = -p.beta * p.nu * rx;
    J(0, 1) = -p.beta * p.nu * ry;
    J(1, 0) = p.eta * p.nu * rx;
    J(1, 1) = p.eta * p.nu * ry - p.eta * p.gamma / (2.0 * std::sqrt(y * p.omega));
    return J;
}

// ---------------------------------------------------------------------------
// full-flux F6P-FBP system (Smolen weights, clamped ATP)
// ---------------------------------------------------------------------------

namespace {
struct WeightSums {
    double den = 0, den_x = 0, den_y = 0;
    double num = 0, num_x = 0, num_y = 0;
};

WeightSums smolen_sums(double x, double y, const SmolenParams& p, double AMP, double ATP) {
    WeightSums w;
    double A = AMP / p.K1;
    double T = ATP * ATP / (p.K4 * p.K4);
    for (int i = 0; i <= 1; ++i)
        for (int j = 0; j <= 1; ++j)
            for (int k = 0; k <= 1; ++k)
                for (int l = 0; l <= 1; ++l) {
                    double coef = 1.0;
                    if (i) coef *= A;
                    if (l) coef *= T;
                    if (j) coef /= p.K2;
                    if (k) coef /= p.K3 * p.K3;
                    if (i && k) coef /= p.f13;
                    if (j && k) coef /= p.f23;
                    if (i && l) coef /= p.f41;
                    if (j && l) coef /= p.f42;
                    if (k && l) coef /= p.f43;
                    double xs = k ? x * x : 1.0;
                    double ys = j ? y : 1.0;
                    double v = coef * xs * ys;
                    double vx = k ? coef * 2.0 * x * ys : 0.0;
                    double vy = j ? coef * xs : 0.0;
                    w.den += v;
                    w.den_x += vx;
                    w.den_y += vy;
                    double nc = 0.0;
                    if (k == 1) nc += p.k_PFK;
                    if (i == 1 && j == 1 && k == 1 && l == 0) nc += 1.0 - p.k_PFK;
                    if (nc != 0.0) {
                        w.num += nc * v;
                        w.num_x += nc * vx;
                        w.num_y += nc * vy;
                    }
                }
    return w;
}
}  // namespace

FullFlux fullflux_rates(const Vec2& s, const SmolenParams& p) {
    if (s[0] <= 0.0) throw std::domain_error("fullflux: F6P must be positive");
    if (s[1] < 0.0) throw std::domain_error("fullflux: FBP < 0");
    double rad = p.ATP_clamp * (4.0 * p.A_tot - 3.0 * p.ATP_clamp);
    if (!(rad > 0.0)) throw std::domain_error("fullflux: ATP_clamp outside the conservation range");
    FullFlux f;
    f.ADP = 0.5 * (std::sqrt(rad) - p.ATP_clamp);
    f.AMP = f.ADP * f.ADP / p.ATP_clamp;
    f.J_GK = p.v_GK / (1.0 + std::pow(p.k_gk / p.g_lce, p.h_gkglc));
    f.J_PDH = p.v_PDH * std::sqrt(s[1]);  // FBP referenced to 1 uM
    WeightSums w = smolen_sums(s[0], s[1], p, f.AMP, p.ATP_clamp);
    f.J_PFK = p.v_PFK * w.num / w.den;
    return f;
}

Vec2 eval_fullflux(const Vec2& s, const SmolenParams& p) {
    FullFlux f = fullflux_rates(s, p);
    return {(f.J_GK - f.J_PFK) / (1.0 + p.K_GPI), (f.J_PFK - 0.5 * f.J_PDH) / (1.0 + p.K_LG)};
}

Mat jac_fullflux(const Vec2& s, const SmolenParams& p) {
    FullFlux f = fullflux_rates(s, p);
    WeightSums w = smolen_sums(s[0], s[1], p, f.AMP, p.ATP_clamp);
    double Jx = p.v_PFK * (w.num_x * w.den - w.num * w.den_x) / (w.den * w.den);
    double Jy = p.v_PFK * (w.num_y * w.den - w.num * w.den_y) / (w.den * w.den);
    double dPDH = 0.5 * p.v_PDH / std::sqrt(s[1]);
    Mat J(2, 2);
    J(0, 0) = -Jx / (1.0 + p.K_GPI);
    J(0, 1) = -Jy / (1.0 + p.K_GPI);
    J(1, 0) = Jx / (1.0 + p.K_LG);
    J(1, 1) = (Jy - 0.5 * dPDH) / (1.0 + p.K_LG);
    return J;
}

BiophysicalParams lump_smolen(const SmolenParams& p) {
    p.validate();
    double rad = p.ATP_clamp * (4.0 * p.A_tot - 3.0 * p.ATP_clamp);
    double ADP = 0.5 * (std::sqrt(rad) - p.ATP_clamp);
    double AMP = ADP * ADP / p.ATP_clamp;
    double A = AMP / p.K1;
    double T = p.ATP_clamp * p.ATP_clamp / (p.K4 * p.K4);
    double K32 = p.K3 * p.K3;
    // (j,k)-grouped sums over (i,l)
    double S11 = 1.0 + A / p.f13 + T / (p.f42 * p.f43) + A * T / (p.f13 * p.f41 * p.f42 * p.f43);
    double S01 = 1.0 + A / p.f13 + T / p.f43 + A * T / (p.f13 * p.f41 * p.f43);
    double S10 = 1.0 + A + T / p.f42 + A * T / (p.f41 * p.f42);
    double S00 = 1.0 + A + T + A * T / p.f41;
    BiophysicalParams b;
    b.kappa1 = p.K2 * K32 * p.f23 / S11;
    b.kappa2 = K32 / S01;
    b.kappa3 = p.K2 / S10;
    b.kappa4 = 1.0 / S00;
    b.kappa5 = p.K2 * K32 * p.f23 / ((1.0 - p.k_PFK) * A / p.f13 + p.k_PFK * S11);
    b.kappa6 = K32 / (p.k_PFK * S01);
    b.alpha = p.v_GK / (1.0 + std::pow(p.k_gk / p.g_lce, p.h_gkglc));
    b.beta = 1.0 / (1.0 + p.K_GPI);
    b.eta = 1.0 / (1.0 + p.K_LG);
    b.nu = p.v_PFK;
    b.gamma = 0.5 * p.v_PDH;
    b.omega = 1.0;
    return b;
}

// ---------------------------------------------------------------------------
// dimensionless X-Y system
// ---------------------------------------------------------------------------

double rate_rhat(const Vec2& s, const DimensionlessParams& d) {
    double X = s[0], Y = s[1];
    double num = X * X * Y + d.hatSigma6 * X * X;
    double den = d.hatSigma1 * X * X * Y + d.hatSigma2 * X * X + d.hatSigma3 * Y + d.hatSigma4;
    return num / den;
}

void rate_rhat_partials(const Vec2& s, const DimensionlessParams& d, double& rX, double& rY) {
    double X = s[0], Y = s[1];
    double D = d.hatSigma1 * X * X * Y + d.hatSigma2 * X * X + d.hatSigma3 * Y + d.hatSigma4;
    rX = 2.0 * X * (Y + d.hatSigma6) * (d.hatSigma3 * Y + d.hatSigma4) / (D * D);
    rY = X * X * ((d.hatSigma2 - d.hatSigma1 * d.hatSigma6) * X * X + d.hatSigma4 - d.hatSigma3 * d.hatSigma6) /
         (D * D);
}

Vec2 eval_dimensionless_xy(const Vec2& s, const DimensionlessParams& d) {
    if (s[1] < 0.0) throw std::domain_error("dimensionless-xy: Y < 0");
    double r = rate_rhat(s, d);
    return {d.hatAlpha - d.hatNu1 * r, d.hatNu2 * r - d.hatGamma * std::sqrt(s[1])};
}

Mat jac_dimensionless_xy(const Vec2& s, const DimensionlessParams& d) {
    double rX, rY;
    rate_rhat_partials(s, d, rX, rY);
    Mat J(2, 2);
    J(0, 0) = -d.hatNu1 * rX;
    J(0, 1) = -d.hatNu1 * rY;
    J(1, 0) = d.hatNu2 * rX;
    J(1, 1) = d.hatNu2 * rY - d.hatGamma / (2.0 * std::sqrt(s[1]));
    return J;
}

// ---------------------------------------------------------------------------
// singularly perturbed X-Y system
// ---------------------------------------------------------------------------

Vec2 eval_perturbed_xy(const Vec2& s, const EpsilonParams& p) {
    if (s[1] < 0.0) throw std::domain_error("perturbed-xy: Y < 0");
    double X = s[0], Y = s[1], e = p.epsilon;
    double e2 = e * e, e4 = e2 * e2;
    double num = X * X * Y + e4 * X * X;
    double den = p.sigma1 * X * X * Y + e2 * (p.sigma2 * X * X + p.sigma3 * Y + p.sigma4);
    double rho = num / den;
    return {e * (p.alpha - p.nu * rho), rho - p.gamma * std::sqrt(Y)};
}

Mat jac_perturbed_xy(const Vec2& s, const EpsilonParams& p) {
    double X = s[0], Y = s[1], e = p.epsilon;
    double e2 = e * e, e4 = e2 * e2;
    double N = X * X * (Y + e4);
    double D = p.sigma1 * X * X * Y + e2 * (p.sigma2 * X * X + p.sigma3 * Y + p.sigma4);
    double NX = 2.0 * X * (Y + e4), NY = X * X;
    double DX = 2.0 * X * (p.sigma1 * Y + e2 * p.sigma2), DY = p.sigma1 * X * X + e2 * p.sigma3;
    double rX = (NX * D - N * DX) / (D * D);
    double rY = (NY * D - N * DY) / (D * D);
    Mat J(2, 2);
    J(0, 0) = -e * p.nu * rX;
    J(0, 1) = -e * p.nu * rY;
    J(1, 0) = rX;
    J(1, 1) = rY - p.gamma / (2.0 * std::sqrt(Y));
    return J;
}

// ---------------------------------------------------------------------------
// polynomial surrogate and the two zoomed systems
// ---------------------------------------------------------------------------

Vec2 eval_surrogate_xz(const Vec2& s, const EpsilonParams& p) {
    double out[2];
    surrogate_xz_rhs(s[0], s[1], p.epsilon, p, out);
    return {out[0], out[1]};
}

Mat jac_surrogate_xz(const Vec2& s, const EpsilonParams& p) {
    double X = s[0], Z = s[1], e = p.epsilon;
    double e2 = e * e, e4 = e2 * e2;
    double nas = p.nu - p.alpha * p.sigma1;
    double Q = p.sigma2 * X * X + p.sigma3 * Z * Z + p.sigma4;
    double B = nas * X * X * Z * Z - e2 * p.alpha * Q + e4 * p.nu * X * X;
    double B_X = 2.0 * nas * X * Z * Z - 2.0 * e2 * p.alpha * p.sigma2 * X + 2.0 * e4 * p.nu * X;
    double B_Z = 2.0 * nas * X * X * Z - 2.0 * e2 * p.alpha * p.sigma3 * Z;
    Mat J(2, 2);
    J(0, 0) = -2.0 * e * Z * B_X;
    J(0, 1) = -2.0 * e * B - 2.0 * e * Z * B_Z;
    J(1, 0) = 2.0 * X * Z * Z * (1.0 - p.gamma * p.sigma1 * Z) - 2.0 * e2 * p.gamma * p.sigma2 * X * Z +
              2.0 * e4 * X;
    J(1, 1) = -p.gamma * p.sigma1 * X * X * Z * Z + 2.0 * (1.0 - p.gamma * p.sigma1 * Z) * X * X * Z -
              e2 * p.gamma * Q - 2.0 * e2 * p.gamma * p.sigma3 * Z * Z;
    return J;
}

Vec2 eval_regime2_uz_at(const Vec2& s, double eps_tilde, const EpsilonParams& p) {
    double out[2];
    regime2_uz_rhs(s[0], s[1], eps_tilde, p, out);
    return {out[0], out[1]};
}

Vec2 eval_regime2_uz(const Vec2& s, const EpsilonParams& p) {
    return eval_regime2_uz_at(s, p.epsilon * p.epsilon, p);
}

Mat jac_regime2_uz(const Vec2& s, double et, const EpsilonParams& p) {
    double U = s[0], Z = s[1];
    double nas = p.nu - p.alpha * p.sigma1;
    double S = p.sigma3 * Z * Z + p.sigma4;
    double B = nas * U * U * Z * Z - p.alpha * S - et * p.alpha * p.sigma2 * U * U + et * et * p.nu * U * U;
    double B_U = 2.0 * nas * U * Z * Z - 2.0 * et * p.alpha * p.sigma2 * U + 2.0 * et * et * p.nu * U;
    double B_Z = 2.0 * nas * U * U * Z - 2.0 * p.alpha * p.sigma3 * Z;
    Mat J(2, 2);
    J(0, 0) = -2.0 * Z * B_U;
    J(0, 1) = -2.0 * B - 2.0 * Z * B_Z;
    J(1, 0) = 2.0 * U * Z * Z * (1.0 - p.gamma * p.sigma1 * Z) - 2.0 * et * p.gamma * p.sigma2 * U * Z +
              2.0 * et * et * U;
    J(1, 1) = -p.gamma * p.sigma1 * U * U * Z * Z + 2.0 * (1.0 - p.gamma * p.sigma1 * Z) * U * U * Z -
              p.gamma * S - 2.0 * p.gamma * p.sigma3 * Z * Z - et * p.gamma * p.sigma2 * U * U;
    return J;
}

Vec2 eval_regime3_xv_at(const Vec2& s, double eps, const EpsilonParams& p) {
    double out[2];
    regime3_xv_rhs(s[0], s[1], eps, p, out);
    return {out[0], out[1]};
}

Vec2 eval_regime3_xv(const Vec2& s, const EpsilonParams& p) {
    return eval_regime3_xv_at(s, p.epsilon, p);
}

Mat jac_regime3_xv(const Vec2& s, double e, const EpsilonParams& p) {
    double X = s[0], V = s[1];
    double e2 = e * e, e3 = e2 * e, e4 = e2 * e2;
    double nas = p.nu - p.alpha * p.sigma1;
    double R = p.sigma2 * X * X + p.sigma4;
    double G = p.alpha * R - e2 * X * X * (nas * V * V + p.nu) + e4 * p.alpha * p.sigma3 * V * V;
    double G_X = 2.0 * p.alpha * p.sigma2 * X - 2.0 * e2 * X * (nas * V * V + p.nu);
    double G_V = -2.0 * e2 * X * X * nas * V + 2.0 * e4 * p.alpha * p.sigma3 * V;
    Mat J(2, 2);
    J(0, 0) = 2.0 * e3 * V * G_X;
    J(0, 1) = 2.0 * e3 * G + 2.0 * e3 * V * G_V;
    J(1, 0) = 2.0 * X * V * V * (1.0 - e2 * p.gamma * p.sigma1 * V) - 2.0 * p.gamma * p.sigma2 * X * V + 2.0 * X;
    J(1, 1) = -e2 * p.gamma * p.sigma1 * X * X * V * V + 2.0 * (1.0 - e2 * p.gamma * p.sigma1 * V) * X * X * V -
              p.gamma * R - 3.0 * e4 * p.gamma * p.sigma3 * V * V;
    return J;
}

// ---------------------------------------------------------------------------
// blow-up chart fields (coded independently of the surrogate; the
// push-forward residual is the cross-check)
// ---------------------------------------------------------------------------

Vec3 eval_chart(ChartId chart, const Vec3& s, const EpsilonParams& p) {
    double nas = p.nu - p.alpha * p.sigma1;
    switch (chart) {
        case ChartId::K1: {
            double r = s[0], Z = s[1], e = s[2];
            double Q = p.sigma2 * r * r + p.sigma3 * Z * Z + p.sigma4;
            double B = nas * Z * Z - e * e * p.alpha * Q + e * e * e * e * p.nu * r * r * r * r;
            return {-2.0 * r * e * Z * B,
                    (1.0 - p.gamma * p.sigma1 * Z) * Z * Z - e * e * p.gamma * Z * Q + e * e * e * e * r * r * r * r,
                    2.0 * e * e * Z * B};
        }
        case ChartId::K2: {
            double X = s[0], Z = s[1], r = s[2];
            double r2 = r * r, r4 = r2 * r2;
            double S = p.sigma3 * Z * Z + p.sigma4;
            return {-2.0 * Z * (nas * X * X * Z * Z - p.alpha * S - r2 * p.alpha * p.sigma2 * X * X +
                                r4 * p.nu * X * X),
                    (1.0 - p.gamma * p.sigma1 * Z) * X * X * Z * Z - p.gamma * Z * S -
                        r2 * p.gamma * p.sigma2 * X * X * Z + r4 * X * X,
                    0.0};
        }
        case ChartId::K3: {
            double r = s[0], Z = s[1], c = s[2];
            double c2 = c * c, c3 = c2 * c, c4 = c2 * c2;
            double r2 = r * r, r4 = r2 * r2;
            double B = c2 * ((p.nu - p.alpha * (p.sigma1 + c2 * p.sigma3)) * Z * Z + p.nu * r4) -
                       p.alpha * (p.sigma2 * r2 + p.sigma4);
            return {-2.0 * Z * r * c3 * B,
                    Z * Z + r4 - p.gamma * (p.sigma2 * r2 + p.sigma4) * Z -
                        c2 * p.gamma * Z * Z * Z * (p.sigma1 + c2 * p.sigma3) - 4.0 * c3 * Z * Z * B,
                    2.0 * Z * c4 * B};
        }
        case ChartId::K4: {
            double r = s[0], sq = s[1], e = s[2];
            double r2 = r * r, r4 = r2 * r2;
            double s2 = sq * sq, s3 = s2 * sq, s4v = s2 * s2;
            double e2 = e * e, e4 = e2 * e2;
            double Q = p.sigma2 * r2 + p.sigma3 * s4v + p.sigma4;
            double C = nas * s2 - e2 * p.alpha * Q + e4 * p.nu * r4 * s2;
            double D = (1.0 - p.gamma * p.sigma1 * s2) - e2 * p.gamma * Q + e4 * r4;
            return {-4.0 * r * s3 * e * C, sq * D, -e * (D - 4.0 * s3 * e * C)};
        }
    }
    throw std::logic_error("eval_chart: bad chart");
}

Mat jac_chart(ChartId chart, const Vec3& s, const EpsilonParams& p) {
    double nas = p.nu - p.alpha * p.sigma1;
    Mat J(3, 3);
    switch (chart) {
        case ChartId::K1: {
            double r = s[0], Z = s[1], e = s[2];
            double e2 = e * e, e3 = e2 * e, e4 = e2 * e2;
            double r3 = r * r * r, r4 = r3 * r;
            double Q = p.sigma2 * r * r + p.sigma3 * Z * Z + p.sigma4;
            double B = nas * Z * Z - e2 * p.alpha * Q + e4 * p.nu * r4;
            double B_r = -2.0 * e2 * p.alpha * p.sigma2 * r + 4.0 * e4 * p.nu * r3;
            double B_Z = 2.0 * nas * Z - 2.0 * e2 * p.alpha * p.sigma3 * Z;
            double B_e = -2.0 * e * p.alpha * Q + 4.0 * e3 * p.nu * r4;
            J(0, 0) = -2.0 * e * Z * B - 2.0 * r * e * Z * B_r;
            J(0, 1) = -2.0 * r * e * B - 2.0 * r * e * Z * B_Z;
            J(0, 2) = -2.0 * r * Z * B - 2.0 * r * e * Z * B_e;
            J(1, 0) = -2.0 * e2 * p.gamma * p.sigma2 * r * Z + 4.0 * e4 * r3;
            J(1, 1) = -p.gamma * p.sigma1 * Z * Z + 2.0 * (1.0 - p.gamma * p.sigma1 * Z) * Z - e2 * p.gamma * Q -
                      2.0 * e2 * p.gamma * p.sigma3 * Z * Z;
            J(1, 2) = -2.0 * e * p.gamma * Z * Q + 4.0 * e3 * r4;
            J(2, 0) = 2.0 * e2 * Z * B_r;
            J(2, 1) = 2.0 * e2 * B + 2.0 * e2 * Z * B_Z;
            J(2, 2) = 4.0 * e * Z * B + 2.0 * e2 * Z * B_e;
            return J;
        }
        case ChartId::K2: {
            double X = s[0], Z = s[1], r = s[2];
            double et = r * r;
            Mat J2 = jac_regime2_uz({X, Z}, et, p);
            J(0, 0) = J2(0, 0);
            J(0, 1) = J2(0, 1);
            J(1, 0) = J2(1, 0);
            J(1, 1) = J2(1, 1);
            J(0, 2) = -2.0 * Z * (-2.0 * r * p.alpha * p.sigma2 * X * X + 4.0 * r * r * r * p.nu * X * X);
            J(1, 2) = -2.0 * r * p.gamma * p.sigma2 * X * X * Z + 4.0 * r * r * r * X * X;
            return J;
        }
        case ChartId::K3: {
            double r = s[0], Z = s[1], c = s[2];
            double c2 = c * c, c3 = c2 * c, c4 = c2 * c2;
            double r2 = r * r, r3 = r2 * r, r4 = r2 * r2;
            double sig = p.sigma1 + c2 * p.sigma3;
            double B = c2 * ((p.nu - p.alpha * sig) * Z * Z + p.nu * r4) - p.alpha * (p.sigma2 * r2 + p.sigma4);
            double B_r = 4.0 * p.nu * c2 * r3 - 2.0 * p.alpha * p.sigma2 * r;
            double B_Z = 2.0 * c2 * (p.nu - p.alpha * sig) * Z;
            double B_c = 2.0 * c * ((p.nu - p.alpha * sig) * Z * Z + p.nu * r4) - c2 * (2.0 * c * p.alpha * p.sigma3) * Z * Z;
            J(0, 0) = -2.0 * Z * c3 * B - 2.0 * Z * r * c3 * B_r;
            J(0, 1) = -2.0 * r * c3 * B - 2.0 * Z * r * c3 * B_Z;
            J(0, 2) = -6.0 * Z * r * c2 * B - 2.0 * Z * r * c3 * B_c;
            J(1, 0) = 4.0 * r3 - 2.0 * p.gamma * p.sigma2 * r * Z - 4.0 * c3 * Z * Z * B_r;
            J(1, 1) = 2.0 * Z - p.gamma * (p.sigma2 * r2 + p.sigma4) - 3.0 * c2 * p.gamma * Z * Z * sig -
                      8.0 * c3 * Z * B - 4.0 * c3 * Z * Z * B_Z;
            J(1, 2) = -2.0 * c * p.gamma * Z * Z * Z * sig - c2 * p.gamma * Z * Z * Z * (2.0 * c * p.sigma3) -
                      12.0 * c2 * Z * Z * B - 4.0 * c3 * Z * Z * B_c;
            J(2, 0) = 2.0 * Z * c4 * B_r;
            J(2, 1) = 2.0 * c4 * B + 2.0 * Z * c4 * B_Z;
            J(2, 2) = 8.0 * Z * c3 * B + 2.0 * Z * c4 * B_c;
            return J;
        }
        case ChartId::K4: {
            double r = s[0], sq = s[1], e = s[2];
            double r2 = r * r, r3 = r2 * r, r4 = r2 * r2;
            double s2 = sq * sq, s3 = s2 * sq, s4v = s2 * s2;
            double e2 = e * e, e3 = e2 * e, e4 = e2 * e2;
            double Q = p.sigma2 * r2 + p.sigma3 * s4v + p.sigma4;
            double C = nas * s2 - e2 * p.alpha * Q + e4 * p.nu * r4 * s2;
            double D = (1.0 - p.gamma * p.sigma1 * s2) - e2 * p.gamma * Q + e4 * r4;
            double C_r = -2.0 * e2 * p.alpha * p.sigma2 * r + 4.0 * e4 * p.nu * r3 * s2;
            double C_s = 2.0 * nas * sq - 4.0 * e2 * p.alpha * p.sigma3 * s3 + 2.0 * e4 * p.nu * r4 * sq;
            double C_e = -2.0 * e * p.alpha * Q + 4.0 * e3 * p.nu * r4 * s2;
            double D_r = -2.0 * e2 * p.gamma * p.sigma2 * r + 4.0 * e4 * r3;
            double D_s = -2.0 * p.gamma * p.sigma1 * sq - 4.0 * e2 * p.gamma * p.sigma3 * s3;
            double D_e = -2.0 * e * p.gamma * Q + 4.0 * e3 * r4;
            J(0, 0) = -4.0 * s3 * e * C - 4.0 * r * s3 * e * C_r;
            J(0, 1) = -12.0 * r * s2 * e * C - 4.0 * r * s3 * e * C_s;
            J(0, 2) = -4.0 * r * s3 * C - 4.0 * r * s3 * e * C_e;
            J(1, 0) = sq * D_r;
            J(1, 1) = D + sq * D_s;
            J(1, 2) = sq * D_e;
            double E = D - 4.0 * s3 * e * C;
            double E_r = D_r - 4.0 * s3 * e * C_r;
            double E_s = D_s - 12.0 * s2 * e * C - 4.0 * s3 * e * C_s;
            double E_e = D_e - 4.0 * s3 * C - 4.0 * s3 * e * C_e;
            J(2, 0) = -e * E_r;
            J(2, 1) = -e * E_s;
            J(2, 2) = -E - e * E_e;
            return J;
        }
    }
    throw std::logic_error("jac_chart: bad chart");
}

// ---------------------------------------------------------------------------
// decompositions
// ---------------------------------------------------------------------------

Vec2 DecomposedField2::recompose(const Vec2& s, double eps) const {
    Vec2 n0 = N0(s);
    double f = f0(s);
    Vec2 out{n0[0] * f, n0[1] * f};
    for (const auto& [pw, Fi] : terms) {
        double w = std::pow(eps, pw);
        Vec2 v = Fi(s);
        out[0] += w * v[0];
        out[1] += w * v[1];
    }
    return out;
}

double DecomposedField2::decomposition_residual(const Vec2& s, double eps) const {
    Vec2 a = recompose(s, eps);
    Vec2 b = full(s, eps);
    double scale = std::max({std::abs(b[0]), std::abs(b[1]), 1e-30});
    return std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1])) / scale;
}

DecomposedField2 decomposed_surrogate_xz(const EpsilonParams& p) {
    DecomposedField2 f;
    f.id = "surrogate-xz";
    f.N0 = [](const Vec2&) -> Vec2 { return {0.0, 1.0}; };
    f.f0 = [p](const Vec2& s) { return (1.0 - p.gamma * p.sigma1 * s[1]) * s[0] * s[0] * s[1] * s[1]; };
    f.Df0 = [p](const Vec2& s) -> Vec2 {
        double X = s[0], Z = s[1];
        return {2.0 * X * Z * Z * (1.0 - p.gamma * p.sigma1 * Z), X * X * Z * (2.0 - 3.0 * p.gamma * p.sigma1 * Z)};
    };
    f.DN0 = [](const Vec2&) { return Mat(2, 2); };
    auto Q = [p](const Vec2& s) { return p.sigma2 * s[0] * s[0] + p.sigma3 * s[1] * s[1] + p.sigma4; };
    double nas = p.nu - p.alpha * p.sigma1;
    f.terms = {
        {1, [nas](const Vec2& s) -> Vec2 { return {-2.0 * nas * s[0] * s[0] * s[1] * s[1] * s[1], 0.0}; }},
        {2, [p, Q](const Vec2& s) -> Vec2 { return {0.0, -p.gamma * s[1] * Q(s)}; }},
        {3, [p, Q](const Vec2& s) -> Vec2 { return {2.0 * p.alpha * s[1] * Q(s), 0.0}; }},
        {4, [](const Vec2& s) -> Vec2 { return {0.0, s[0] * s[0]}; }},
        {5, [p](const Vec2& s) -> Vec2 { return {-2.0 * p.nu * s[0] * s[0] * s[1], 0.0}; }},
    };
    f.full = [p](const Vec2& s, double eps) {
        double out[2];
        surrogate_xz_rhs(s[0], s[1], eps, p, out);
        return Vec2{out[0], out[1]};
    };
    f.full_series = [p](const EpsSeries& X, const EpsSeries& Z, const EpsSeries& e, EpsSeries* out) {
        surrogate_xz_rhs(X, Z, e, p, out);
    };
    return f;
}

DecomposedField2 decomposed_regime2_uz(const EpsilonParams& p) {
    DecomposedField2 f;
    f.id = "regime2-uz";
    double nas = p.nu - p.alpha * p.sigma1;
    auto S = [p](const Vec2& s) { return p.sigma3 * s[1] * s[1] + p.sigma4; };
    f.N0 = [p, nas, S](const Vec2& s) -> Vec2 {
        double U = s[0], Z = s[1];
        return {-2.0 * (nas * U * U * Z * Z - p.alpha * S(s)),
                (1.0 - p.gamma * p.sigma1 * Z) * U * U * Z - p.gamma * S(s)};
    };
    f.f0 = [](const Vec2& s) { return s[1]; };
    f.Df0 = [](const Vec2&) -> Vec2 { return {0.0, 1.0}; };
    f.DN0 = [p, nas](const Vec2& s) {
        double U = s[0], Z = s[1];
        Mat m(2, 2);
        m(0, 0) = -4.0 * nas * U * Z * Z;
        m(0, 1) = -4.0 * nas * U * U * Z + 4.0 * p.alpha * p.sigma3 * Z;
        m(1, 0) = 2.0 * U * Z * (1.0 - p.gamma * p.sigma1 * Z);
        m(1, 1) = U * U * (1.0 - 2.0 * p.gamma * p.sigma1 * Z) - 2.0 * p.gamma * p.sigma3 * Z;
        return m;
    };
    f.terms = {
        {1,
         [p](const Vec2& s) -> Vec2 {
             double U = s[0], Z = s[1];
             return {2.0 * p.alpha * p.sigma2 * U * U * Z, -p.gamma * p.sigma2 * U * U * Z};
         }},
        {2,
         [p](const Vec2& s) -> Vec2 {
             double U = s[0], Z = s[1];
             return {-2.0 * p.nu * U * U * Z, U * U};
         }},
    };
    f.full = [p](const Vec2& s, double et) { return eval_regime2_uz_at(s, et, p); };
    f.full_series = [p](const EpsSeries& U, const EpsSeries& Z, const EpsSeries& e, EpsSeries* out) {
        regime2_uz_rhs(U, Z, e, p, out);
    };
    return f;
}

DecomposedField2 decomposed_regime3_xv(const EpsilonParams& p) {
    DecomposedField2 f;
    f.id = "regime3-xv";
    double nas = p.nu - p.alpha * p.sigma1;
    f.N0 = [](const Vec2&) -> Vec2 { return {0.0, 1.0}; };
    f.f0 = [p](const Vec2& s) {
        double X = s[0], V = s[1];
        return X * X * V * V + X * X - p.gamma * p.sigma2 * X * X * V - p.gamma * p.sigma4 * V;
    };
    f.Df0 = [p](const Vec2& s) -> Vec2 {
        double X = s[0], V = s[1];
        return {2.0 * X * (V * V + 1.0 - p.gamma * p.sigma2 * V),
                X * X * (2.0 * V - p.gamma * p.sigma2) - p.gamma * p.sigma4};
    };
    f.DN0 = [](const Vec2&) { return Mat(2, 2); };
    f.terms = {
        {2,
         [p](const Vec2& s) -> Vec2 {
             return {0.0, -p.gamma * p.sigma1 * s[0] * s[0] * s[1] * s[1] * s[1]};
         }},
        {3,
         [p](const Vec2& s) -> Vec2 {
             return {2.0 * p.alpha * (p.sigma2 * s[0] * s[0] + p.sigma4) * s[1], 0.0};
         }},
        {4,
         [p](const Vec2& s) -> Vec2 {
             return {0.0, -p.gamma * p.sigma3 * s[1] * s[1] * s[1]};
         }},
        {5,
         [p, nas](const Vec2& s) -> Vec2 {
             return {-2.0 * s[0] * s[0] * s[1] * (nas * s[1] * s[1] + p.nu), 0.0};
         }},
        {7,
         [p](const Vec2& s) -> Vec2 {
             return {2.0 * p.alpha * p.sigma3 * s[1] * s[1] * s[1], 0.0};
         }},
    };
    f.full = [p](const Vec2& s, double eps) { return eval_regime3_xv_at(s, eps, p); };
    f.full_series = [p](const EpsSeries& X, const EpsSeries& V, const EpsSeries& e, EpsSeries* out) {
        regime3_xv_rhs(X, V, e, p, out);
    };
    return f;
}

// ---------------------------------------------------------------------------
// registry
// ---------------------------------------------------------------------------

std::vector<std::string> registry_ids() {
    return {"biophysical-xy", "fullflux",   "dimensionless-xy", "perturbed-xy", "surrogate-xz",
            "regime2-uz",     "regime3-xv", "chart-k1",         "chart-k2",     "chart-k3",
            "chart-k4"};
}

std::map<std::string, ModelEntry> make_registry(const ModelSet& ms) {
    std::map<std::string, ModelEntry> reg;
    auto add2 = [&reg](const std::string& id, std::vector<std::string> coords,
                       std::function<Vec2(const Vec2&)> f) {
        ModelEntry e;
        e.id = id;
        e.dim = 2;
        e.coords = std::move(coords);
        e.rhs = [f](double, const double* y, double* dy) {
            Vec2 v = f({y[0], y[1]});
            dy[0] = v[0];
            dy[1] = v[1];
        };
        reg[id] = std::move(e);
    };
    auto add3 = [&reg](const std::string& id, std::vector<std::string> coords,
                       std::function<Vec3(const Vec3&)> f) {
        ModelEntry e;
        e.id = id;
        e.dim = 3;
        e.coords = std::move(coords);
        e.rhs = [f](double, const double* y, double* dy) {
            Vec3 v = f({y[0], y[1], y[2]});
            dy[0] = v[0];
            dy[1] = v[1];
            dy[2] = v[2];
        };
        reg[id] = std::move(e);
    };
    BiophysicalParams bio = ms.bio;
    SmolenParams smo = ms.smo;
    EpsilonParams ep = ms.eps;
    DimensionlessParams dl = nondimensionalise(ms.bio);
    add2("biophysical-xy", {"x", "y"}, [bio](const Vec2& s) { return eval_biophysical_xy(s, bio); });
    add2("fullflux", {"F6P", "FBP"}, [smo](const Vec2& s) { return eval_fullflux(s, smo); });
    add2("dimensionless-xy", {"X", "Y"}, [dl](const Vec2& s) { return eval_dimensionless_xy(s, dl); });
    add2("perturbed-xy", {"X", "Y"}, [ep](const Vec2& s) { return eval_perturbed_xy(s, ep); });
    add2("surrogate-xz", {"X", "Z"}, [ep](const Vec2& s) { return eval_surrogate_xz(s, ep); });
    add2("regime2-uz", {"U", "Z"}, [ep](const Vec2& s) { return eval_regime2_uz(s, ep); });
    add2("regime3-xv", {"X", "V"}, [ep](const Vec2& s) { return eval_regime3_xv(s, ep); });
    add3("chart-k1", {"r1", "Z1", "eps1"}, [ep](const Vec3& s) { return eval_chart(ChartId::K1, s, ep); });
    add3("chart-k2", {"X2", "Z2", "r2"}, [ep](const Vec3& s) { return eval_chart(ChartId::K2, s, ep); });
    add3("chart-k3", {"r3", "Z3", "s3"}, [ep](const Vec3& s) { return eval_chart(ChartId::K3, s, ep); });
    add3("chart-k4", {"r4", "s4", "eps4"}, [ep](const Vec3& s) { return eval_chart(ChartId::K4, s, ep); });
    return reg;
}

double jacobian_fd_error(const std::function<Vec2(const Vec2&)>& f, const std::function<Mat(const Vec2&)>& jac,
                         const Vec2& s) {
    Mat J = jac(s);
    double worst = 0.0;
    double scale = std::max(frobenius_norm(J), 1e-12);
    for (int j = 0; j < 2; ++j) {
        double h = 1e-6 * (1.0 + std::abs(s[static_cast<size_t>(j)]));
        Vec2 sp = s, sm = s;
        sp[static_cast<size_t>(j)] += h;
        sm[static_cast<size_t>(j)] -= h;
        Vec2 fp = f(sp), fm = f(sm);
        for (int i = 0; i < 2; ++i) {
            double fd = (fp[static_cast<size_t>(i)] - fm[static_cast<size_t>(i)]) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - J(i, j)) / scale);
        }
    }
    return worst;
}

}  // namespace amo
