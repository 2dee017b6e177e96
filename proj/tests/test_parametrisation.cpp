#include <cmath>

#include "amo/parametrisation.hpp"
#include "doctest.h"

using namespace amo;

namespace {
EpsilonParams table_eps() {
    BiophysicalParams p;
    return extract_hierarchy(nondimensionalise(p));
}
}  // namespace

TEST_CASE("eps-series arithmetic") {
    EpsSeries e = EpsSeries::variable(5);
    EpsSeries p = (1.0 - 2.0 * e) * (3.0 + e * e);  // 3 - 6e + e^2 - 2e^3
    CHECK(p.coeff(0) == doctest::Approx(3.0));
    CHECK(p.coeff(1) == doctest::Approx(-6.0));
    CHECK(p.coeff(2) == doctest::Approx(1.0));
    CHECK(p.coeff(3) == doctest::Approx(-2.0));
    CHECK(p.eval(0.1) == doctest::Approx((1.0 - 0.2) * 3.01));
}

TEST_CASE("series composition matches the double path for the surrogate field") {
    EpsilonParams ep = table_eps();
    DecomposedField2 m = decomposed_surrogate_xz(ep);
    EpsSeries X(0.6, 7), Z(1.1, 7), e = EpsSeries::variable(7);
    EpsSeries out[2];
    m.full_series(X, Z, e, out);
    for (double eps : {0.0, 0.1, 0.2241}) {
        Vec2 f = m.full({0.6, 1.1}, eps);
        CHECK(out[0].eval(eps) == doctest::Approx(f[0]).epsilon(1e-13));
        CHECK(out[1].eval(eps) == doctest::Approx(f[1]).epsilon(1e-13));
    }
}

TEST_CASE("Gamma5 hierarchy: trivial first order, printed second order") {
    EpsilonParams ep = table_eps();
    DecomposedField2 m = decomposed_regime2_uz(ep);
    GraphManifold g = gamma5_manifold(ep);
    for (double xi : {0.5, 1.0, 2.0}) {
        PointHierarchy H = solve_orders_at(m, g, 2, xi);
        CHECK(std::abs(H.r[0]) < 1e-14);
        CHECK(std::abs(H.phi[0][0]) < 1e-14);
        CHECK(std::abs(H.phi[0][1]) < 1e-14);
        double want = closed_form_reduced(ClosedForm::R2Gamma5, xi, ep);
        CHECK(H.r[1] == doctest::Approx(want).epsilon(1e-10));
        CHECK(H.lin_res[1] < 1e-10);
    }
    CHECK(closed_form_reduced(ClosedForm::R2Gamma5, 1.0, ep) == doctest::Approx(0.150).epsilon(5e-3));
    CHECK(closed_form_reduced(ClosedForm::R2Gamma5, 0.0, ep) == doctest::Approx(0.0));
    // the second-order embedding correction is the slaving Z = xi^2/gamma (coordinate-graph choice)
    GraphManifold gc = g;
    gc.right_inverse = RightInverse::CoordinateGraph;
    PointHierarchy H = solve_orders_at(m, gc, 2, 1.3);
    CHECK(H.phi[1][0] == doctest::Approx(0.0));
    CHECK(H.phi[1][1] == doctest::Approx(1.3 * 1.3 / ep.gamma).epsilon(1e-10));
}

TEST_CASE("Gamma4 hierarchy reproduces the corrected closed forms") {
    EpsilonParams ep = table_eps();
    DecomposedField2 m = decomposed_regime3_xv(ep);
    GraphManifold g = gamma4_manifold(ep);
    g.right_inverse = RightInverse::CoordinateGraph;
    auto grid = parametrisation_grid(g, 20, 1.0, 0.1);
    OrderSolution s2 = solve_order(m, g, 2, grid);
    OrderSolution s3 = solve_order(m, g, 3, grid);
    for (size_t i = 0; i < grid.size(); ++i) {
        double xi = grid[i];
        CHECK(std::abs(s2.pts[i].r) < 1e-12);  // r2 = 0 (fiber-aligned forcing)
        double phi2 = closed_form_reduced(ClosedForm::Phi2Gamma4, xi, ep);
        CHECK(s2.pts[i].phi[0] == doctest::Approx(phi2).epsilon(1e-8));
        CHECK(std::abs(s2.pts[i].phi[1]) < 1e-14);
        double r3 = closed_form_reduced(ClosedForm::R3Gamma4, xi, ep);
        CHECK(s3.pts[i].r == doctest::Approx(r3).epsilon(1e-8));
        CHECK(s2.pts[i].lin_residual < 1e-10);
        CHECK(s3.pts[i].lin_residual < 1e-10);
    }
}

TEST_CASE("closed-form structure") {
    EpsilonParams ep = table_eps();
    CHECK(closed_form_reduced(ClosedForm::R3Gamma4, 0.5, ep) > 0.0);
    CHECK(closed_form_reduced(ClosedForm::R3Gamma4, 2.0, ep) < 0.0);
    CHECK_THROWS_AS(closed_form_reduced(ClosedForm::R3Gamma4, 1.0, ep), PoleError);
    // phi2 -> 0 as xi -> 0+
    CHECK(std::abs(closed_form_reduced(ClosedForm::Phi2Gamma4, 1e-8, ep)) < 1e-20);
}

TEST_CASE("r_j is independent of the right-inverse choice") {
    EpsilonParams ep = table_eps();
    DecomposedField2 m = decomposed_regime3_xv(ep);
    GraphManifold g = gamma4_manifold(ep);
    for (double xi : {0.4, 0.7, 1.6}) {
        g.right_inverse = RightInverse::FiberAligned;
        double ra = solve_orders_at(m, g, 3, xi).r[2];
        g.right_inverse = RightInverse::CoordinateGraph;
        double rb = solve_orders_at(m, g, 3, xi).r[2];
        g.right_inverse = RightInverse::Orthogonal;
        double rc = solve_orders_at(m, g, 3, xi).r[2];
        CHECK(ra == doctest::Approx(rb).epsilon(1e-11));
        CHECK(ra == doctest::Approx(rc).epsilon(1e-11));
    }
}

TEST_CASE("choice independence of the truncated manifold as a point set") {
    EpsilonParams ep = table_eps();
    DecomposedField2 m = decomposed_regime3_xv(ep);
    GraphManifold ga = gamma4_manifold(ep);
    ga.right_inverse = RightInverse::FiberAligned;
    GraphManifold gb = gamma4_manifold(ep);
    gb.right_inverse = RightInverse::CoordinateGraph;
    int j = 2;
    for (double eps : {0.1, 0.05}) {
        double worst = 0;
        for (double xi = 0.3; xi <= 0.7; xi += 0.05) {
            Vec2 a = truncated_embedding(m, ga, j, xi, eps);
            // nearest distance from a to the other truncated curve (fine sweep)
            double best = 1e300;
            for (double x2 = xi - 0.1; x2 <= xi + 0.1; x2 += 1e-4) {
                Vec2 b = truncated_embedding(m, gb, j, x2, eps);
                best = std::min(best, std::hypot(a[0] - b[0], a[1] - b[1]));
            }
            worst = std::max(worst, best);
        }
        // distance between the two point sets is o(eps^j): C eps^{j+1} with modest C
        CHECK(worst < 10.0 * std::pow(eps, j + 1));
    }
}

TEST_CASE("conjugacy residual scales as eps^{j+1} under halving") {
    EpsilonParams ep = table_eps();
    {
        DecomposedField2 m = decomposed_regime2_uz(ep);
        GraphManifold g = gamma5_manifold(ep);
        int j = 2;
        for (double xi : {0.5, 0.7}) {
            double r1 = conjugacy_residual(m, g, j, xi, 0.04);
            double r2 = conjugacy_residual(m, g, j, xi, 0.02);
            double factor = r1 / r2;
            CHECK(factor > std::pow(2.0, j + 0.5));
            CHECK(factor < std::pow(2.0, j + 1.5));
        }
    }
    {
        DecomposedField2 m = decomposed_regime3_xv(ep);
        GraphManifold g = gamma4_manifold(ep);
        g.right_inverse = RightInverse::CoordinateGraph;
        int j = 3;
        for (double xi : {0.4, 0.6}) {
            double r1 = conjugacy_residual(m, g, j, xi, 0.08);
            double r2 = conjugacy_residual(m, g, j, xi, 0.04);
            double factor = r1 / r2;
            CHECK(factor > std::pow(2.0, j + 0.5));
            CHECK(factor < std::pow(2.0, j + 1.5));
        }
    }
}

TEST_CASE("contact point on the grid raises an error naming xi") {
    EpsilonParams ep = table_eps();
    DecomposedField2 m = decomposed_regime3_xv(ep);
    GraphManifold g = gamma4_manifold(ep);
    CHECK_THROWS_AS(solve_orders_at(m, g, 2, 1.0), ContactPointError);
}
