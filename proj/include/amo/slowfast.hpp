#pragma once

#include <stdexcept>
#include <string>

#include "amo/linalg.hpp"
#include "amo/models.hpp"

namespace amo {

struct ContactPointError : std::runtime_error {
    explicit ContactPointError(const std::string& m) : std::runtime_error(m) {}
};
struct DegenerateContactError : std::runtime_error {
    explicit DegenerateContactError(const std::string& m) : std::runtime_error(m) {}
};

// tangent/fiber splitting data at a point of the critical manifold
struct BundleSplit {
    Vec2 base_point{};
    Mat N0;          // n x (n-k)
    Mat Df0;         // (n-k) x n
    Mat restricted;  // Df0 * N0
    Mat proj_S;      // oblique projector onto T_x S along the fibers
    Mat proj_N;      // complementary projector
    double condition = 0;  // |Df0||N0| / |Df0 N0|, scale-aware singularity measure
};

// Pi_S = I - N0 (Df0 N0)^{-1} Df0. Throws ContactPointError when the
// restricted Jacobian is singular (relative to the factor norms).
Mat oblique_projector(const Mat& Df0, const Mat& N0);

BundleSplit bundle_split(const DecomposedField2& m, const Vec2& x);

// detection threshold: |det(Df0 N0)| < 1e-10 |Df0||N0|
bool is_contact_point(const DecomposedField2& m, const Vec2& x);

struct ReducedFieldResult {
    Vec2 value{};
    bool higher_order = false;  // F1 vanished identically at x; defer to the parametrisation method
};

// Pi_S(x) F1(x) on f0(x) = 0. The forcing defaults to the first perturbation
// term; pass a different power when the leading terms vanish on the manifold.
ReducedFieldResult reduced_field(const DecomposedField2& m, const Vec2& x, int forcing_power = 1);

struct JumpTestResult {
    bool regular = false;
    Vec2 direction{};
};

// regular jump point test: N0 adj(Df0 N0) Df0 F != 0 at an order-one contact
JumpTestResult regular_jump_test(const DecomposedField2& m, const Vec2& x, int forcing_power = 1);

// fetch the forcing term F_i by eps-power; zero vector when absent
Vec2 forcing_term(const DecomposedField2& m, const Vec2& x, int power);

}  // namespace amo
