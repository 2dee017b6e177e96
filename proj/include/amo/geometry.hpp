#pragma once

#include <functional>
#include <string>
#include <vector>

#include "amo/linalg.hpp"
#include "amo/models.hpp"
#include "amo/params.hpp"

namespace amo {

struct NullclineValue {
    double X2 = 0;
    bool physical = true;  // false when X2 < 0 (off the physical branch)
};

// Y-nullcline relation: X^2 as a function of Y. Throws PoleError near a
// zero of the denominator.
struct PoleError : std::domain_error {
    explicit PoleError(const std::string& m) : std::domain_error(m) {}
};
struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& m) : std::runtime_error(m) {}
};

NullclineValue y_nullcline(double Y, const DimensionlessParams& d);

// positive roots of the nullcline-denominator cubic in sqrt(Y), ascending (as Y)
std::vector<double> y_nullcline_poles(const DimensionlessParams& d);

// physical branch of the Y-nullcline: [Y_lo, Y_hi] between the two smallest
// positive poles where the denominator is positive
std::pair<double, double> y_nullcline_physical_range(const DimensionlessParams& d);

struct FoldReport {
    double Yf1 = 0, Xf1 = 0;
    double Yf2 = 0, Xf2 = 0;
    double Yf1_asym = 0;  // hatSigma6
    double Yf2_asym = 0;  // O(1) root of the reduced quadratic
    double Xf1_asym = 0;  // leading-order lower-fold X
    double res_Yf1 = 0, res_Yf2 = 0, res_Xf1 = 0;  // |numeric - asymptotic|
};

FoldReport fold_points(const DimensionlessParams& d);

struct EquilibriumReport {
    Vec2 location{};
    Mat jacobian;
    double trace = 0, determinant = 0, discriminant = 0;
    std::string classification;
    double nullcline_residual = 0;
};

EquilibriumReport equilibrium_xy(const DimensionlessParams& d);

std::string classify_planar(double det, double tr, double disc);

enum class Stability { Attracting, Repelling, Degenerate, FoldBoundary };
std::string stability_name(Stability s);

struct ManifoldBranch {
    std::string label;
    double param_lo = 0, param_hi = 0;
    std::function<Vec2(double)> embedding;   // xi -> state
    std::function<double(double)> eigenvalue;  // nontrivial eigenvalue along the branch
    Stability stability = Stability::Degenerate;
    std::vector<double> sample_grid;  // geometric grid used for the stability audit
};

std::vector<ManifoldBranch> regime1_manifolds(const EpsilonParams& e);

struct Regime2Layer {
    ManifoldBranch gamma5;
    Vec2 eigendirection{};  // fast eigendirection along Gamma5
    EquilibriumReport p0;
};
Regime2Layer regime2_layer_objects(const EpsilonParams& e);

struct Regime3Manifold {
    ManifoldBranch gamma4a;
    ManifoldBranch gamma4r;
    Vec2 fold_p4{};
};
Regime3Manifold regime3_manifold(const EpsilonParams& e);

// generic bracketed root scan + Newton polish on [lo, hi] with n samples
std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi, int n);

}  // namespace amo
