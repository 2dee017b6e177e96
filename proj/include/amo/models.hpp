#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "amo/linalg.hpp"
#include "amo/params.hpp"
#include "amo/series.hpp"

namespace amo {

enum class ChartId { K1, K2, K3, K4 };
std::string chart_name(ChartId c);

// ---------------------------------------------------------------------------
// Scalar-templated right-hand sides of the polynomial fields. The template
// lets the same closed forms run on doubles and on EpsSeries (exact
// eps-polynomial composition for the parametrisation hierarchy).
// sigma4 occupies the constant slot of the perturbation polynomial; it equals
// 1 identically under the reference scales.
// ---------------------------------------------------------------------------

template <class T>
void surrogate_xz_rhs(const T& X, const T& Z, const T& eps, const EpsilonParams& p, T out[2]) {
    T X2 = X * X, Z2 = Z * Z;
    T Q = p.sigma2 * X2 + p.sigma3 * Z2 + make_like(p.sigma4, X);
    T e2 = eps * eps, e4 = e2 * e2;
    out[0] = -2.0 * (eps * Z) * ((p.nu - p.alpha * p.sigma1) * (X2 * Z2) - p.alpha * (e2 * Q) + p.nu * (e4 * X2));
    out[1] = (1.0 - p.gamma * p.sigma1 * Z) * (X2 * Z2) - p.gamma * (e2 * (Z * Q)) + e4 * X2;
}

// Regime 2: X = eps*U, small parameter is eps_tilde = eps^2.
template <class T>
void regime2_uz_rhs(const T& U, const T& Z, const T& et, const EpsilonParams& p, T out[2]) {
    T U2 = U * U, Z2 = Z * Z;
    T S = p.sigma3 * Z2 + make_like(p.sigma4, U);
    out[0] = -2.0 * Z * ((p.nu - p.alpha * p.sigma1) * (U2 * Z2) - p.alpha * S - p.alpha * p.sigma2 * (et * U2) +
                         p.nu * (et * et * U2));
    out[1] = (1.0 - p.gamma * p.sigma1 * Z) * (U2 * Z2) - p.gamma * (Z * S) - p.gamma * p.sigma2 * (et * (U2 * Z)) +
             et * et * U2;
}

// Regime 3: Z = eps^2*V.
template <class T>
void regime3_xv_rhs(const T& X, const T& V, const T& eps, const EpsilonParams& p, T out[2]) {
    T X2 = X * X, V2 = V * V;
    T R = p.sigma2 * X2 + make_like(p.sigma4, X);
    T e2 = eps * eps, e3 = e2 * eps, e4 = e2 * e2;
    out[0] = 2.0 * (e3 * V) * (p.alpha * R - e2 * (X2 * ((p.nu - p.alpha * p.sigma1) * V2 + make_like(p.nu, X))) +
                               p.alpha * p.sigma3 * (e4 * V2));
    out[1] = (1.0 - p.gamma * p.sigma1 * (e2 * V)) * (X2 * V2) - p.gamma * (V * R) + X2 -
             p.gamma * p.sigma3 * (e4 * (V2 * V));
}

// ---------------------------------------------------------------------------
// Plain-double evaluators with analytic Jacobians.
// ---------------------------------------------------------------------------

Vec2 eval_biophysical_xy(const Vec2& s, const BiophysicalParams& p);
Mat jac_biophysical_xy(const Vec2& s, const BiophysicalParams& p);
double rate_r(const Vec2& s, const BiophysicalParams& p);  // lumped PFK rate r(x, y; K)

struct FullFlux {
    double J_GK = 0, J_PFK = 0, J_PDH = 0;
    double ADP = 0, AMP = 0;
};
FullFlux fullflux_rates(const Vec2& s, const SmolenParams& p);
Vec2 eval_fullflux(const Vec2& s, const SmolenParams& p);
Mat jac_fullflux(const Vec2& s, const SmolenParams& p);

// Exact lumping of the Smolen weights at clamped ATP into the kappa constants.
BiophysicalParams lump_smolen(const SmolenParams& p);

Vec2 eval_dimensionless_xy(const Vec2& s, const DimensionlessParams& d);
Mat jac_dimensionless_xy(const Vec2& s, const DimensionlessParams& d);
double rate_rhat(const Vec2& s, const DimensionlessParams& d);
// partials of rhat, needed for the stability classification
void rate_rhat_partials(const Vec2& s, const DimensionlessParams& d, double& rX, double& rY);

Vec2 eval_perturbed_xy(const Vec2& s, const EpsilonParams& p);
Mat jac_perturbed_xy(const Vec2& s, const EpsilonParams& p);

Vec2 eval_surrogate_xz(const Vec2& s, const EpsilonParams& p);
Mat jac_surrogate_xz(const Vec2& s, const EpsilonParams& p);

Vec2 eval_regime2_uz(const Vec2& s, const EpsilonParams& p);  // at eps_tilde = p.epsilon^2
Vec2 eval_regime2_uz_at(const Vec2& s, double eps_tilde, const EpsilonParams& p);
Mat jac_regime2_uz(const Vec2& s, double eps_tilde, const EpsilonParams& p);

Vec2 eval_regime3_xv(const Vec2& s, const EpsilonParams& p);
Vec2 eval_regime3_xv_at(const Vec2& s, double eps, const EpsilonParams& p);
Mat jac_regime3_xv(const Vec2& s, double eps, const EpsilonParams& p);

Vec3 eval_chart(ChartId chart, const Vec3& s, const EpsilonParams& p);
Mat jac_chart(ChartId chart, const Vec3& s, const EpsilonParams& p);

// ---------------------------------------------------------------------------
// Eps-power decomposition N0*f0 + sum eps^i F_i of a planar field (k = 1).
// ---------------------------------------------------------------------------

struct DecomposedField2 {
    std::string id;
    std::function<Vec2(const Vec2&)> N0;
    std::function<double(const Vec2&)> f0;
    std::function<Vec2(const Vec2&)> Df0;   // gradient of f0
    std::function<Mat(const Vec2&)> DN0;    // Jacobian of N0
    std::vector<std::pair<int, std::function<Vec2(const Vec2&)>>> terms;
    std::function<Vec2(const Vec2&, double)> full;  // full evaluator at given small parameter
    std::function<void(const EpsSeries&, const EpsSeries&, const EpsSeries&, EpsSeries*)> full_series;

    Vec2 recompose(const Vec2& s, double eps) const;
    double decomposition_residual(const Vec2& s, double eps) const;  // relative
};

DecomposedField2 decomposed_surrogate_xz(const EpsilonParams& p);
DecomposedField2 decomposed_regime2_uz(const EpsilonParams& p);
DecomposedField2 decomposed_regime3_xv(const EpsilonParams& p);

// ---------------------------------------------------------------------------
// String-addressable registry used by the CLI and the dynamics module.
// ---------------------------------------------------------------------------

struct ModelEntry {
    std::string id;
    int dim = 2;
    std::vector<std::string> coords;
    std::function<void(double t, const double* y, double* dy)> rhs;
};

struct ModelSet {
    BiophysicalParams bio;
    SmolenParams smo;
    EpsilonParams eps;
};

std::map<std::string, ModelEntry> make_registry(const ModelSet& ms);
std::vector<std::string> registry_ids();

// central-difference audit helper: max relative deviation between jac and FD
double jacobian_fd_error(const std::function<Vec2(const Vec2&)>& f, const std::function<Mat(const Vec2&)>& jac,
                         const Vec2& s);

}  // namespace amo
