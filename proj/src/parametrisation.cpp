#include "amo/parametrisation.hpp"

#include <cmath>

namespace amo {

GraphManifold gamma5_manifold(const EpsilonParams& e) {
    (void)e;
    GraphManifold g;
    g.id = "gamma5";
    g.base_coord = 0;
    g.phi0 = [](double xi) -> Vec2 { return {xi, 0.0}; };
    g.dphi0 = [](double) -> Vec2 { return {1.0, 0.0}; };
    g.xi_lo = 0.1;
    g.xi_hi = 3.0;
    return g;
}

GraphManifold gamma4_manifold(const EpsilonParams& e) {
    GraphManifold g;
    g.id = "gamma4";
    g.base_coord = 1;
    double ga = e.gamma, s2 = e.sigma2, s4 = e.sigma4;
    g.phi0 = [ga, s2, s4](double xi) -> Vec2 {
        double q = xi * xi - ga * s2 * xi + 1.0;
        return {std::sqrt(ga * s4 * xi / q), xi};
    };
    g.dphi0 = [ga, s2, s4](double xi) -> Vec2 {
        double q = xi * xi - ga * s2 * xi + 1.0;
        double X0 = std::sqrt(ga * s4 * xi / q);
        return {ga * s4 * (1.0 - xi * xi) / (2.0 * X0 * q * q), 1.0};
    };
    g.xi_lo = 0.05;
    g.xi_hi = 5.0;
    return g;
}

namespace {

Vec2 apply_right_inverse(const GraphManifold& g, const Vec2& df0, double restricted, const Vec2& n0,
                         double df0_G) {
    // phi_j = -(Df0)^R (Df0 N0)^{-1} Df0 G_j ; the scalar (Df0 N0)^{-1} Df0 G_j first
    double w = df0_G / restricted;
    switch (g.right_inverse) {
        case RightInverse::FiberAligned: {
            double c = w / restricted;
            return {-n0[0] * c, -n0[1] * c};
        }
        case RightInverse::CoordinateGraph: {
            int c = 1 - g.base_coord;
            double d = df0[static_cast<size_t>(c)];
            Vec2 out{0.0, 0.0};
            out[static_cast<size_t>(c)] = -w / d;
            return out;
        }
        case RightInverse::Orthogonal: {
            double n2 = df0[0] * df0[0] + df0[1] * df0[1];
            return {-df0[0] * w / n2, -df0[1] * w / n2};
        }
    }
    return {0, 0};
}

}  // namespace

PointHierarchy solve_orders_at(const DecomposedField2& m, const GraphManifold& g, int jmax, double xi) {
    PointHierarchy H;
    Vec2 p0 = g.phi0(xi);
    Vec2 dp0 = g.dphi0(xi);
    Vec2 n0 = m.N0(p0);
    Vec2 df0 = m.Df0(p0);
    double restricted = df0[0] * n0[0] + df0[1] * n0[1];
    double scale = std::hypot(df0[0], df0[1]) * std::hypot(n0[0], n0[1]);
    if (std::abs(restricted) < 1e-10 * std::max(scale, 1e-300))
        throw ContactPointError("solve_orders_at: loss of normal hyperbolicity at xi = " + std::to_string(xi));
    // oblique projector rows
    Mat PiS = oblique_projector(Mat::row2(df0), Mat::col2(n0));

    std::vector<std::array<Vec2, 2>> dphi_cache;  // phi_i at xi +/- h for FD, filled lazily

    for (int j = 1; j <= jmax; ++j) {
        int len = j + 1;
        EpsSeries eps = EpsSeries::variable(len);
        // state series from known orders
        EpsSeries Xs(p0[0], len), Zs(p0[1], len);
        for (int i = 1; i < j; ++i) {
            Xs.c[static_cast<size_t>(i)] = H.phi[static_cast<size_t>(i - 1)][0];
            Zs.c[static_cast<size_t>(i)] = H.phi[static_cast<size_t>(i - 1)][1];
        }
        EpsSeries rhs[2];
        m.full_series(Xs, Zs, eps, rhs);
        Vec2 G{rhs[0].coeff(j), rhs[1].coeff(j)};
        // subtract sum_{i>=1} Dphi_i r_{j-i} (Dphi_0 r_j stays on the LHS)
        for (int i = 1; i < j; ++i) {
            double rl = H.r[static_cast<size_t>(j - i - 1)];
            if (std::abs(rl) < 1e-30) continue;
            // central FD of phi_i in xi
            double h = 1e-5 * (1.0 + std::abs(xi));
            PointHierarchy hp = solve_orders_at(m, g, i, xi + h);
            PointHierarchy hm = solve_orders_at(m, g, i, xi - h);
            Vec2 dphi_i{(hp.phi[static_cast<size_t>(i - 1)][0] - hm.phi[static_cast<size_t>(i - 1)][0]) / (2 * h),
                        (hp.phi[static_cast<size_t>(i - 1)][1] - hm.phi[static_cast<size_t>(i - 1)][1]) / (2 * h)};
            G[0] -= dphi_i[0] * rl;
            G[1] -= dphi_i[1] * rl;
        }
        // r_j: graph-preserving left inverse extracts the base coordinate of Pi_S G
        Mat PG = PiS * Mat::col2(G);
        double rj = PG(g.base_coord, 0) / dp0[static_cast<size_t>(g.base_coord)];
        double df0_G = df0[0] * G[0] + df0[1] * G[1];
        Vec2 phij = apply_right_inverse(g, df0, restricted, n0, df0_G);
        // linear equation residual: Dphi0 r_j - N0 Df0 phi_j - G_j
        double df0_phij = df0[0] * phij[0] + df0[1] * phij[1];
        Vec2 res{dp0[0] * rj - n0[0] * df0_phij - G[0], dp0[1] * rj - n0[1] * df0_phij - G[1]};
        H.r.push_back(rj);
        H.phi.push_back(phij);
        H.lin_res.push_back(std::hypot(res[0], res[1]));
    }
    return H;
}

OrderSolution solve_order(const DecomposedField2& m, const GraphManifold& g, int j,
                          const std::vector<double>& grid) {
    OrderSolution sol;
    sol.order = j;
    for (double xi : grid) {
        PointHierarchy H = solve_orders_at(m, g, j, xi);
        OrderPoint p;
        p.xi = xi;
        p.r = H.r[static_cast<size_t>(j - 1)];
        p.phi = H.phi[static_cast<size_t>(j - 1)];
        p.lin_residual = H.lin_res[static_cast<size_t>(j - 1)];
        sol.pts.push_back(p);
    }
    return sol;
}

Vec2 truncated_embedding(const DecomposedField2& m, const GraphManifold& g, int j, double xi, double eps) {
    PointHierarchy H = solve_orders_at(m, g, j, xi);
    Vec2 p = g.phi0(xi);
    double w = eps;
    for (int i = 1; i <= j; ++i) {
        p[0] += w * H.phi[static_cast<size_t>(i - 1)][0];
        p[1] += w * H.phi[static_cast<size_t>(i - 1)][1];
        w *= eps;
    }
    return p;
}

double conjugacy_residual(const DecomposedField2& m, const GraphManifold& g, int j, double xi, double eps) {
    PointHierarchy H = solve_orders_at(m, g, j, xi);
    double r = 0;
    double w = eps;
    for (int i = 1; i <= j; ++i) {
        r += w * H.r[static_cast<size_t>(i - 1)];
        w *= eps;
    }
    double h = 1e-5 * (1.0 + std::abs(xi));
    Vec2 ep = truncated_embedding(m, g, j, xi + h, eps);
    Vec2 em = truncated_embedding(m, g, j, xi - h, eps);
    Vec2 dphi{(ep[0] - em[0]) / (2 * h), (ep[1] - em[1]) / (2 * h)};
    Vec2 phi = truncated_embedding(m, g, j, xi, eps);
    Vec2 F = m.full(phi, eps);
    return std::hypot(dphi[0] * r - F[0], dphi[1] * r - F[1]);
}

double closed_form_reduced(ClosedForm which, double xi, const EpsilonParams& e) {
    double ga = e.gamma, s1 = e.sigma1, s2 = e.sigma2, s4 = e.sigma4;
    switch (which) {
        case ClosedForm::R2Gamma5:
            return 2.0 * e.alpha * xi * xi / ga;
        case ClosedForm::Phi2Gamma4: {
            double q = xi * xi - ga * s2 * xi + 1.0;
            double X0 = std::sqrt(ga * s4 * xi / q);
            return ga * s1 * X0 * xi * xi * xi / (2.0 * q);
        }
        case ClosedForm::R3Gamma4: {
            if (std::abs(xi - 1.0) < 1e-12)
                throw PoleError("r3 blows up at xi = 1 (fold)");
            double q = xi * xi - ga * s2 * xi + 1.0;
            double X0 = std::sqrt(ga * s4 * xi / q);
            return 4.0 * e.alpha * xi * (1.0 + xi * xi) * X0 * q / (ga * (1.0 - xi * xi));
        }
    }
    throw std::logic_error("closed_form_reduced: bad selector");
}

std::vector<double> parametrisation_grid(const GraphManifold& g, int n, double exclude_center,
                                         double exclude_halfwidth) {
    std::vector<double> grid;
    double llo = std::log(g.xi_lo), lhi = std::log(g.xi_hi);
    for (int i = 0; i < n; ++i) {
        double xi = std::exp(llo + (lhi - llo) * i / (n - 1));
        if (exclude_halfwidth > 0 && std::abs(xi - exclude_center) <= exclude_halfwidth) continue;
        grid.push_back(xi);
    }
    return grid;
}

}  // namespace amo
