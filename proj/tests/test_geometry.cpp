#include <cmath>

#include "amo/geometry.hpp"
#include "doctest.h"

using namespace amo;

namespace {
DimensionlessParams table_dimless() {
    BiophysicalParams p;
    return nondimensionalise(p);
}
EpsilonParams table_eps() { return extract_hierarchy(table_dimless()); }
}  // namespace

TEST_CASE("y-nullcline poles and pole error") {
    DimensionlessParams d = table_dimless();
    auto poles = y_nullcline_poles(d);
    REQUIRE(!poles.empty());
    for (double p : poles) CHECK_THROWS_AS(y_nullcline(p, d), PoleError);
    auto range = y_nullcline_physical_range(d);
    CHECK(range.first < range.second);
    // at the physical parameters the near-zero pole pair of the asymptotic
    // analysis is complex: the denominator stays positive from Y = 0 up
    CHECK(range.first == doctest::Approx(0.0));
    CHECK(y_nullcline(0.5 * range.second, d).X2 > 0.0);
    // singular limit along the border-case hierarchy (a = 1/2,
    // sigma2 < 2/gamma): the near-zero pole pair stays complex -- this is
    // exactly the positivity condition for the lower fold -- and the real
    // pole approaches (1/(hatGamma hatSigma1))^2
    DimensionlessParams dl = d;
    double upper_limit = std::pow(1.0 / (d.hatGamma * d.hatSigma1), 2.0);
    for (double shrink : {1e-2, 1e-4}) {
        dl.hatSigma6 = d.hatSigma6 * shrink;
        dl.hatSigma2 = d.hatSigma2 * std::sqrt(shrink);
        dl.hatSigma3 = d.hatSigma3 * std::sqrt(shrink);
        dl.hatSigma4 = d.hatSigma4 * std::sqrt(shrink);
        auto pl = y_nullcline_poles(dl);
        REQUIRE(!pl.empty());
        CHECK(pl.back() == doctest::Approx(upper_limit).epsilon(0.05));
    }
    // with sigma2 above 2/gamma the pair is real: three poles, the smallest
    // at the dominant-balance value (sigma6/(gamma sigma2))^2, and the
    // physical branch sits between the two largest
    DimensionlessParams dr = d;
    dr.hatSigma2 = 20.0 * d.hatSigma2;
    auto pl = y_nullcline_poles(dr);
    REQUIRE(pl.size() == 3);
    double lower = std::pow(dr.hatSigma6 / (dr.hatGamma * dr.hatSigma2), 2.0);
    CHECK(pl[0] == doctest::Approx(lower).epsilon(0.1));
    auto rng = y_nullcline_physical_range(dr);
    CHECK(rng.first == doctest::Approx(pl[1]).epsilon(1e-10));
    CHECK(rng.second == doctest::Approx(pl[2]).epsilon(1e-10));
}

TEST_CASE("nullcline passes through the equilibrium") {
    DimensionlessParams d = table_dimless();
    EquilibriumReport eq = equilibrium_xy(d);
    NullclineValue v = y_nullcline(eq.location[1], d);
    CHECK(std::sqrt(v.X2) == doctest::Approx(eq.location[0]).epsilon(1e-10));
}

TEST_CASE("fold points and asymptotics") {
    DimensionlessParams d = table_dimless();
    FoldReport f = fold_points(d);
    CHECK(f.Yf1 < f.Yf2);
    CHECK(f.Yf1 / d.hatSigma6 > 0.5);
    CHECK(f.Yf1 / d.hatSigma6 < 2.0);
    // both folds lie on the nullcline
    CHECK(y_nullcline(f.Yf1, d).X2 == doctest::Approx(f.Xf1 * f.Xf1).epsilon(1e-10));
    CHECK(y_nullcline(f.Yf2, d).X2 == doctest::Approx(f.Xf2 * f.Xf2).epsilon(1e-10));
    // sigma3 = sigma4 reduces the upper-fold quadratic to the ratio-one case
    DimensionlessParams deq = d;
    deq.hatSigma4 = deq.hatSigma3;
    FoldReport feq = fold_points(deq);
    double t = deq.hatGamma * deq.hatSigma1;
    double w = std::sqrt(t * t + 1.0) - t;
    CHECK(feq.Yf2_asym == doctest::Approx(w * w).epsilon(1e-12));
    CHECK(feq.Yf2 == doctest::Approx(w * w).epsilon(0.05));
}

TEST_CASE("fold convergence to the singular fold") {
    EpsilonParams e = table_eps();
    double Xf10 = std::sqrt(e.gamma * e.sigma4 / (2.0 - e.gamma * e.sigma2));
    CHECK(Xf10 == doctest::Approx(0.437).epsilon(2e-3));
    double prev_err = 0;
    int k = 0;
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        FoldReport f = fold_points(e.with_epsilon(eps).expand());
        double err = std::abs(f.Xf1 - Xf10);
        if (k > 0) {
            double ratio = err / prev_err;
            CHECK(ratio > 0.15);
            CHECK(ratio < 0.45);
        }
        prev_err = err;
        ++k;
    }
}

TEST_CASE("equilibrium location and classification") {
    DimensionlessParams d = table_dimless();
    EquilibriumReport eq = equilibrium_xy(d);
    CHECK(eq.location[1] == doctest::Approx(std::pow(d.hatAlpha / (d.hatGamma * d.hatNu1), 2.0)).epsilon(1e-10));
    CHECK(eq.location[1] == doctest::Approx(6.29e-2).epsilon(5e-3));
    CHECK(eq.classification == "unstable node");
    CHECK(eq.determinant > 0);
    CHECK(eq.trace > 0);
    CHECK(eq.discriminant > 0);
    // equilibrium lies strictly between the folds
    FoldReport f = fold_points(d);
    CHECK(f.Yf1 < eq.location[1]);
    CHECK(eq.location[1] < f.Yf2);
}

TEST_CASE("equilibrium X component vanishes along the singular hierarchy") {
    EpsilonParams e = table_eps();
    double prev = 1e300;
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        EquilibriumReport eq = equilibrium_xy(e.with_epsilon(eps).expand());
        CHECK(eq.location[0] < prev);
        prev = eq.location[0];
        CHECK(eq.location[0] < 3.0 * eps);  // O(eps) collapse onto the Y-axis
        CHECK(eq.classification == "unstable node");
    }
}

TEST_CASE("regime-1 manifolds") {
    EpsilonParams e = table_eps();
    auto branches = regime1_manifolds(e);
    REQUIRE(branches.size() == 3);
    CHECK(branches[0].eigenvalue(0.7) == doctest::Approx(0.0));
    CHECK(branches[1].eigenvalue(1.4) == doctest::Approx(0.0));
    double Z2 = 1.0 / (e.gamma * e.sigma1);
    CHECK(Z2 == doctest::Approx(2.196).epsilon(2e-3));
    CHECK(branches[2].eigenvalue(1.0) == doctest::Approx(-2.196).epsilon(2e-3));
    // eigenvalue sign consistent with the attracting tag across the grid
    for (double xi : branches[2].sample_grid) CHECK(branches[2].eigenvalue(xi) < 0.0);
    // the branch eigenvalue matches Df0 N0 from the decomposition
    DecomposedField2 f = decomposed_surrogate_xz(e);
    Vec2 pt = branches[2].embedding(0.8);
    Vec2 df0 = f.Df0(pt);
    Vec2 n0 = f.N0(pt);
    CHECK(df0[0] * n0[0] + df0[1] * n0[1] == doctest::Approx(branches[2].eigenvalue(0.8)).epsilon(1e-12));
}

TEST_CASE("regime-2 layer objects") {
    EpsilonParams e = table_eps();
    Regime2Layer r = regime2_layer_objects(e);
    CHECK(r.gamma5.eigenvalue(1.0) == doctest::Approx(-e.gamma).epsilon(1e-12));
    CHECK(r.gamma5.eigenvalue(1.0) == doctest::Approx(-0.330).epsilon(2e-3));
    CHECK(r.eigendirection[0] == doctest::Approx(2.0 * e.alpha));
    CHECK(r.eigendirection[1] == doctest::Approx(-e.gamma));
    CHECK(r.p0.location[1] == doctest::Approx(0.2506).epsilon(2e-3));
    CHECK(r.p0.classification == "unstable node");
    CHECK(r.p0.determinant > 0);
    CHECK(r.p0.trace > 0);
    CHECK(r.p0.trace * r.p0.trace > 4.0 * r.p0.determinant);
}

TEST_CASE("regime-3 folded manifold") {
    EpsilonParams e = table_eps();
    Regime3Manifold m = regime3_manifold(e);
    CHECK(m.gamma4a.eigenvalue(1.0) == doctest::Approx(0.0));
    CHECK(m.gamma4a.eigenvalue(0.0) == doctest::Approx(-e.gamma * e.sigma4).epsilon(1e-12));
    CHECK(m.fold_p4[0] == doctest::Approx(0.437).epsilon(2e-3));
    CHECK(m.fold_p4[1] == doctest::Approx(1.0));
    // sign partition of the eigenvalue
    for (double V = 0.05; V < 1.0; V += 0.05) CHECK(m.gamma4a.eigenvalue(V) < 0.0);
    for (double V = 1.05; V < 10.0; V += 0.5) CHECK(m.gamma4r.eigenvalue(V) > 0.0);
    CHECK(std::abs(m.gamma4a.eigenvalue(1.0)) < 1e-12);
    // embedding satisfies the layer equation
    DecomposedField2 f = decomposed_regime3_xv(e);
    for (double V : {0.2, 0.7, 1.5}) {
        Vec2 pt = m.gamma4a.embedding(V);
        CHECK(std::abs(f.f0(pt)) < 1e-12);
    }
}
