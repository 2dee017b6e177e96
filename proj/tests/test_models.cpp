#include <cmath>
#include <random>

#include "amo/geometry.hpp"
#include "amo/models.hpp"
#include "doctest.h"

using namespace amo;

namespace {
EpsilonParams table_eps() {
    BiophysicalParams p;
    return extract_hierarchy(nondimensionalise(p));
}
}  // namespace

TEST_CASE("biophysical field vanishes at the scaled-back equilibrium") {
    BiophysicalParams p;
    DimensionlessParams d = nondimensionalise(p);
    ReferenceScales sc = compute_reference_scales(p);
    EquilibriumReport eq = equilibrium_xy(d);
    Vec2 s{sc.kappaX * eq.location[0], sc.kappaY * eq.location[1]};
    Vec2 f = eval_biophysical_xy(s, p);
    double scale = p.beta * p.alpha;
    CHECK(std::abs(f[0]) < 1e-10 * scale);
    CHECK(std::abs(f[1]) < 1e-10 * scale);
}

TEST_CASE("biophysical boundary signs") {
    BiophysicalParams p;
    Vec2 f = eval_biophysical_xy({120.0, 0.0}, p);
    CHECK(f[1] > 0.0);  // dy/dt = eta nu r(x, 0) > 0
    CHECK_THROWS_AS(eval_biophysical_xy({120.0, -1.0}, p), std::domain_error);
}

TEST_CASE("J_GK matches the lumped alpha") {
    SmolenParams s;
    FullFlux f = fullflux_rates({100.0, 1.0}, s);
    CHECK(f.J_GK == doctest::Approx(8.61e-4).epsilon(1e-3));
    CHECK(fullflux_rates({100.0, 0.0}, s).J_PDH == doctest::Approx(0.0));
}

TEST_CASE("exact Smolen lumping makes nu*r identical to J_PFK") {
    SmolenParams s;
    BiophysicalParams lump = lump_smolen(s);
    // lumped constants land on the published 3 s.f. values
    CHECK(lump.kappa1 == doctest::Approx(1.12e1).epsilon(5e-3));
    CHECK(lump.kappa2 == doctest::Approx(8.51).epsilon(5e-3));
    CHECK(lump.kappa3 == doctest::Approx(3.61e-3).epsilon(5e-3));
    CHECK(lump.kappa4 == doctest::Approx(1.89e-4).epsilon(5e-3));
    CHECK(lump.kappa5 == doctest::Approx(1.55e1).epsilon(1e-2));
    CHECK(lump.kappa6 == doctest::Approx(1.42e2).epsilon(5e-3));
    CHECK(lump.alpha == doctest::Approx(8.61e-4).epsilon(5e-3));
    for (double x : {10.0, 55.0, 140.0, 500.0})
        for (double y : {0.1, 1.0, 14.0, 100.0}) {
            FullFlux f = fullflux_rates({x, y}, s);
            double vr = lump.nu * rate_r({x, y}, lump);
            CHECK(vr == doctest::Approx(f.J_PFK).epsilon(1e-12));
        }
}

TEST_CASE("flux equivalence against the published (rounded) kappa table") {
    SmolenParams s;
    BiophysicalParams table;  // Table values, 3 s.f.
    double worst = 0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            double x = 10.0 + (500.0 - 10.0) * i / 19.0;
            double y = 0.1 + (100.0 - 0.1) * j / 19.0;
            FullFlux f = fullflux_rates({x, y}, s);
            double vr = table.nu * rate_r({x, y}, table);
            worst = std::max(worst, std::abs(vr - f.J_PFK) / f.J_PFK);
        }
    CHECK(worst < 0.01);
}

TEST_CASE("ATP clamp outside the conservation range") {
    SmolenParams s;
    s.ATP_clamp = 4.0 * s.A_tot / 3.0 + 1.0;
    CHECK_THROWS_AS(s.validate(), std::domain_error);
}

TEST_CASE("perturbed field equals the dimensionless field after re-expansion") {
    EpsilonParams e = table_eps();
    DimensionlessParams d = e.expand();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.05, 1.5);
    for (int k = 0; k < 40; ++k) {
        Vec2 s{u(rng), u(rng)};
        Vec2 a = eval_perturbed_xy(s, e);
        Vec2 b = eval_dimensionless_xy(s, d);
        CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-12));
        CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-12));
    }
    // boundary signs
    Vec2 f0 = eval_perturbed_xy({0.7, 0.0}, e);
    CHECK(f0[1] > 0.0);
    Vec2 f1 = eval_perturbed_xy({0.0, 0.4}, e);
    CHECK(f1[0] == doctest::Approx(e.epsilon * e.alpha));
}

TEST_CASE("surrogate special points") {
    EpsilonParams e = table_eps();
    Vec2 f = eval_surrogate_xz({0.8, 0.0}, e);
    CHECK(f[0] == doctest::Approx(0.0));
    CHECK(f[1] == doctest::Approx(std::pow(e.epsilon, 4.0) * 0.64).epsilon(1e-12));
    EpsilonParams e0 = e;
    e0.epsilon = 1e-300;  // layer problem
    Vec2 g = eval_surrogate_xz({1.0, 1.0 / (e.gamma * e.sigma1)}, e0);
    CHECK(std::abs(g[0]) < 1e-280);
    CHECK(std::abs(g[1]) < 1e-15);
}

TEST_CASE("decomposition identity for all three decomposed fields") {
    EpsilonParams e = table_eps();
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.02, 2.2);
    for (auto field : {decomposed_surrogate_xz(e), decomposed_regime2_uz(e), decomposed_regime3_xv(e)})
        for (double eps : {0.0, 0.05, 0.2241})
            for (int k = 0; k < 100; ++k) {
                Vec2 s{u(rng), u(rng)};
                CHECK(field.decomposition_residual(s, eps) < 1e-12);
            }
}

TEST_CASE("regime-2 pushforward consistency with the surrogate") {
    EpsilonParams e = table_eps();
    double eps = e.epsilon, et = eps * eps;
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.05, 2.0);
    for (int k = 0; k < 50; ++k) {
        Vec2 uz{u(rng), u(rng)};
        Vec2 xz{eps * uz[0], uz[1]};
        Vec2 fs = eval_surrogate_xz(xz, e);
        // dU/dtau2 = (1/eps) dX/dtaubar * (dtaubar/dtau2), dtaubar = eps^-2 dtau2
        Vec2 mapped{fs[0] / eps / et, fs[1] / et};
        Vec2 fr = eval_regime2_uz_at(uz, et, e);
        CHECK(mapped[0] == doctest::Approx(fr[0]).epsilon(1e-12));
        CHECK(mapped[1] == doctest::Approx(fr[1]).epsilon(1e-12));
    }
    // Z = 0 reduces the full field to (0, et^2 U^2)
    Vec2 fz = eval_regime2_uz_at({1.3, 0.0}, 0.07, e);
    CHECK(fz[0] == doctest::Approx(0.0));
    CHECK(fz[1] == doctest::Approx(0.07 * 0.07 * 1.69).epsilon(1e-12));
}

TEST_CASE("regime-2 layer equilibrium p0 annihilates the field") {
    EpsilonParams e = table_eps();
    double Z0 = e.alpha / (e.gamma * e.nu);
    double U0 = std::sqrt(e.alpha * (e.sigma3 * Z0 * Z0 + e.sigma4) / ((e.nu - e.alpha * e.sigma1) * Z0 * Z0));
    Vec2 f = eval_regime2_uz_at({U0, Z0}, 0.0, e);
    CHECK(std::abs(f[0]) < 1e-10);
    CHECK(std::abs(f[1]) < 1e-10);
}

TEST_CASE("regime-3 pushforward consistency and special points") {
    EpsilonParams e = table_eps();
    double eps = e.epsilon, e2 = eps * eps;
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(0.05, 1.8);
    for (int k = 0; k < 50; ++k) {
        Vec2 xv{u(rng), u(rng)};
        Vec2 xz{xv[0], e2 * xv[1]};
        Vec2 fs = eval_surrogate_xz(xz, e);
        Vec2 mapped{fs[0] / e2, fs[1] / (e2 * e2)};
        Vec2 fr = eval_regime3_xv_at(xv, eps, e);
        CHECK(mapped[0] == doctest::Approx(fr[0]).epsilon(1e-12));
        CHECK(mapped[1] == doctest::Approx(fr[1]).epsilon(1e-12));
    }
    // eps = 0 on Gamma4 gives the zero vector
    Regime3Manifold g4 = regime3_manifold(e);
    Vec2 pt = g4.gamma4a.embedding(0.5);
    Vec2 f = eval_regime3_xv_at(pt, 0.0, e);
    CHECK(std::abs(f[0]) < 1e-15);
    CHECK(std::abs(f[1]) < 1e-14);
    // f0(1, 0) = sigma4 (X^2 term survives)
    Vec2 f10 = eval_regime3_xv_at({1.0, 0.0}, 0.0, e);
    CHECK(f10[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("analytic Jacobians agree with central differences") {
    BiophysicalParams bp;
    SmolenParams sp;
    EpsilonParams e = table_eps();
    DimensionlessParams d = e.expand();
    Vec2 s{0.45, 0.3};
    CHECK(jacobian_fd_error([&](const Vec2& x) { return eval_biophysical_xy(x, bp); },
                            [&](const Vec2& x) { return jac_biophysical_xy(x, bp); }, {90.0, 9.0}) < 1e-6);
    CHECK(jacobian_fd_error([&](const Vec2& x) { return eval_fullflux(x, sp); },
                            [&](const Vec2& x) { return jac_fullflux(x, sp); }, {90.0, 9.0}) < 1e-6);
    CHECK(jacobian_fd_error([&](const Vec2& x) { return eval_dimensionless_xy(x, d); },
                            [&](const Vec2& x) { return jac_dimensionless_xy(x, d); }, s) < 1e-6);
    CHECK(jacobian_fd_error([&](const Vec2& x) { return eval_perturbed_xy(x, e); },
                            [&](const Vec2& x) { return jac_perturbed_xy(x, e); }, s) < 1e-6);
    CHECK(jacobian_fd_error([&](const Vec2& x) { return eval_surrogate_xz(x, e); },
                            [&](const Vec2& x) { return jac_surrogate_xz(x, e); }, {0.5, 1.2}) < 1e-6);
    CHECK(jacobian_fd_error([&](const Vec2& x) { return eval_regime2_uz_at(x, 0.05, e); },
                            [&](const Vec2& x) { return jac_regime2_uz(x, 0.05, e); }, {1.1, 0.8}) < 1e-6);
    CHECK(jacobian_fd_error([&](const Vec2& x) { return eval_regime3_xv_at(x, 0.22, e); },
                            [&](const Vec2& x) { return jac_regime3_xv(x, 0.22, e); }, {0.4, 0.9}) < 1e-6);
}

TEST_CASE("chart Jacobians agree with central differences") {
    EpsilonParams e = table_eps();
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(0.08, 0.9);
    for (ChartId id : {ChartId::K1, ChartId::K2, ChartId::K3, ChartId::K4}) {
        for (int k = 0; k < 12; ++k) {
            Vec3 s{u(rng), u(rng), u(rng)};
            Mat J = jac_chart(id, s, e);
            double scale = std::max(frobenius_norm(J), 1e-12);
            for (int j = 0; j < 3; ++j) {
                double h = 1e-6 * (1.0 + std::abs(s[static_cast<size_t>(j)]));
                Vec3 sp = s, sm = s;
                sp[static_cast<size_t>(j)] += h;
                sm[static_cast<size_t>(j)] -= h;
                Vec3 fp = eval_chart(id, sp, e), fm = eval_chart(id, sm, e);
                for (int i = 0; i < 3; ++i) {
                    double fd = (fp[static_cast<size_t>(i)] - fm[static_cast<size_t>(i)]) / (2 * h);
                    CHECK(std::abs(fd - J(i, j)) / scale < 1e-6);
                }
            }
        }
    }
}

TEST_CASE("chart special structure") {
    EpsilonParams e = table_eps();
    double Z2 = 1.0 / (e.gamma * e.sigma1);
    // K1 on the Gamma2 line of equilibria: Z1 and eps1 components vanish
    for (double r1 : {0.1, 0.5, 1.0}) {
        Vec3 f = eval_chart(ChartId::K1, {r1, Z2, 0.0}, e);
        CHECK(std::abs(f[1]) < 1e-14);
        CHECK(std::abs(f[2]) < 1e-14);
    }
    // K2 at r2 = 0 is the regime-2 layer field
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.05, 2.0);
    for (int k = 0; k < 50; ++k) {
        Vec2 s{u(rng), u(rng)};
        Vec3 f = eval_chart(ChartId::K2, {s[0], s[1], 0.0}, e);
        Vec2 g = eval_regime2_uz_at(s, 0.0, e);
        CHECK(f[0] == doctest::Approx(g[0]).epsilon(1e-12));
        CHECK(f[1] == doctest::Approx(g[1]).epsilon(1e-12));
        CHECK(f[2] == doctest::Approx(0.0));
    }
    // invariant planes: fields vanish in the right components
    CHECK(std::abs(eval_chart(ChartId::K1, {0.0, 0.7, 0.3}, e)[0]) < 1e-15);   // r1 = 0 plane
    CHECK(std::abs(eval_chart(ChartId::K3, {0.4, 0.7, 0.0}, e)[2]) < 1e-15);   // s3 = 0 plane
    CHECK(std::abs(eval_chart(ChartId::K3, {0.0, 0.7, 0.2}, e)[0]) < 1e-15);   // r3 = 0 plane
    Vec3 f4 = eval_chart(ChartId::K4, {0.3, 0.0, 0.4}, e);
    CHECK(std::abs(f4[1]) < 1e-15);  // s4 = 0 plane
    CHECK(std::abs(eval_chart(ChartId::K4, {0.3, 0.5, 0.0}, e)[2]) < 1e-15);   // eps4 = 0 plane
}

TEST_CASE("registry exposes the documented ids") {
    ModelSet ms;
    ms.eps = table_eps();
    auto reg = make_registry(ms);
    for (const auto& id : registry_ids()) {
        INFO(id);
        CHECK(reg.count(id) == 1);
    }
    double y[3] = {0.5, 0.4, 0.1};
    double dy[3];
    reg.at("chart-k1").rhs(0.0, y, dy);
    Vec3 f = eval_chart(ChartId::K1, {0.5, 0.4, 0.1}, ms.eps);
    CHECK(dy[2] == doctest::Approx(f[2]));
}
