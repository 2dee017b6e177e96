#pragma once

#include <string>
#include <vector>

#include "amo/geometry.hpp"
#include "amo/models.hpp"
#include "amo/slowfast.hpp"

namespace amo {

enum class RightInverse { FiberAligned, CoordinateGraph, Orthogonal };

// critical manifold as a graph over one state coordinate
struct GraphManifold {
    std::string id;
    int base_coord = 0;  // which state coordinate is xi
    std::function<Vec2(double)> phi0;
    std::function<Vec2(double)> dphi0;
    double xi_lo = 0, xi_hi = 1;
    RightInverse right_inverse = RightInverse::FiberAligned;
};

GraphManifold gamma5_manifold(const EpsilonParams& e);  // regime-2 field, xi = U
GraphManifold gamma4_manifold(const EpsilonParams& e);  // regime-3 field, xi = V

struct OrderPoint {
    double xi = 0;
    double r = 0;
    Vec2 phi{};
    double lin_residual = 0;  // residual of the order-j infinitesimal conjugacy equation
};

struct OrderSolution {
    int order = 0;
    std::vector<OrderPoint> pts;
};

struct PointHierarchy {
    std::vector<double> r;      // r_1 .. r_j
    std::vector<Vec2> phi;      // phi_1 .. phi_j
    std::vector<double> lin_res;
};

// solve the infinitesimal conjugacy hierarchy up to order jmax at a single xi
PointHierarchy solve_orders_at(const DecomposedField2& m, const GraphManifold& g, int jmax, double xi);

// orders 1..j-1 are solved internally; post condition: lin_residual < 1e-10 per point
OrderSolution solve_order(const DecomposedField2& m, const GraphManifold& g, int j,
                          const std::vector<double>& grid);

// residual of the truncated conjugacy equation Dphi r - F(phi) at numeric eps
double conjugacy_residual(const DecomposedField2& m, const GraphManifold& g, int j, double xi, double eps);

// truncated embedding at numeric eps (point set, for the choice-independence check)
Vec2 truncated_embedding(const DecomposedField2& m, const GraphManifold& g, int j, double xi, double eps);

enum class ClosedForm { R2Gamma5, Phi2Gamma4, R3Gamma4 };

double closed_form_reduced(ClosedForm which, double xi, const EpsilonParams& e);

std::vector<double> parametrisation_grid(const GraphManifold& g, int n = 41, double exclude_center = -1,
                                         double exclude_halfwidth = 0);

}  // namespace amo
