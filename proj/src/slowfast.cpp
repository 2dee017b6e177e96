#include "amo/slowfast.hpp"

#include <cmath>

namespace amo {

Mat oblique_projector(const Mat& Df0, const Mat& N0) {
    if (Df0.rows != N0.cols || Df0.cols != N0.rows)
        throw std::invalid_argument("oblique_projector: shape mismatch");
    Mat R = Df0 * N0;  // (n-k) x (n-k)
    double scale = frobenius_norm(Df0) * frobenius_norm(N0);
    if (std::abs(det(R)) < 1e-10 * std::max(scale, 1e-300))
        throw ContactPointError("oblique_projector: restricted Jacobian singular (contact point)");
    Mat Rinv = (1.0 / det(R)) * adjugate(R);
    return Mat::identity(Df0.cols) - N0 * Rinv * Df0;
}

BundleSplit bundle_split(const DecomposedField2& m, const Vec2& x) {
    BundleSplit b;
    b.base_point = x;
    b.N0 = Mat::col2(m.N0(x));
    b.Df0 = Mat::row2(m.Df0(x));
    b.restricted = b.Df0 * b.N0;
    double scale = frobenius_norm(b.Df0) * frobenius_norm(b.N0);
    b.condition = scale / std::max(std::abs(det(b.restricted)), 1e-300);
    b.proj_S = oblique_projector(b.Df0, b.N0);
    b.proj_N = Mat::identity(2) - b.proj_S;
    return b;
}

bool is_contact_point(const DecomposedField2& m, const Vec2& x) {
    Mat N0 = Mat::col2(m.N0(x));
    Mat Df0 = Mat::row2(m.Df0(x));
    Mat R = Df0 * N0;
    double scale = frobenius_norm(Df0) * frobenius_norm(N0);
    return std::abs(det(R)) < 1e-10 * std::max(scale, 1e-300);
}

Vec2 forcing_term(const DecomposedField2& m, const Vec2& x, int power) {
    for (const auto& [pw, F] : m.terms)
        if (pw == power) return F(x);
    return {0.0, 0.0};
}

ReducedFieldResult reduced_field(const DecomposedField2& m, const Vec2& x, int forcing_power) {
    double f0v = m.f0(x);
    Vec2 df0 = m.Df0(x);
    double f0scale = std::hypot(df0[0], df0[1]);
    if (std::abs(f0v) > 1e-10 * std::max(1.0, f0scale))
        throw std::domain_error("reduced_field: point is not on the critical manifold");
    Vec2 F1 = forcing_term(m, x, forcing_power);
    double fnorm = std::hypot(F1[0], F1[1]);
    ReducedFieldResult out;
    if (fnorm < 1e-14) {  // vanishing forcing projects to zero for any projector
        out.value = {0.0, 0.0};
        out.higher_order = true;
        return out;
    }
    if (is_contact_point(m, x))
        throw ContactPointError("reduced_field: contact point; use regular_jump_test");
    BundleSplit b = bundle_split(m, x);
    Mat v = b.proj_S * Mat::col2(F1);
    out.value = {v(0, 0), v(1, 0)};
    out.higher_order = false;
    return out;
}

JumpTestResult regular_jump_test(const DecomposedField2& m, const Vec2& x, int forcing_power) {
    Mat N0 = Mat::col2(m.N0(x));
    Mat Df0 = Mat::row2(m.Df0(x));
    Mat R = Df0 * N0;  // 1x1 here
    double scale = frobenius_norm(Df0) * frobenius_norm(N0);
    if (!(std::abs(det(R)) < 1e-10 * std::max(scale, 1e-300)))
        throw std::domain_error("regular_jump_test: not a contact point");
    // for m > 1 a rank deficiency of two or more nullifies the adjugate;
    // the planar fields here have 1x1 restricted Jacobians (deficiency one)
    Mat adj = adjugate(R);
    Vec2 F = forcing_term(m, x, forcing_power);
    Mat prod = N0 * adj * Df0 * Mat::col2(F);
    JumpTestResult out;
    out.direction = {prod(0, 0), prod(1, 0)};
    double fscale = std::max(1e-300, scale * std::hypot(F[0], F[1]));
    out.regular = std::hypot(out.direction[0], out.direction[1]) > 1e-10 * fscale;
    return out;
}

}  // namespace amo
