#pragma once

#include <array>
#include <string>
#include <vector>

#include "amo/dynamics.hpp"
#include "amo/models.hpp"

namespace amo {

struct LocusError : std::domain_error {
    explicit LocusError(const std::string& m) : std::domain_error(m) {}
};
struct InconsistencyError : std::logic_error {
    explicit InconsistencyError(const std::string& m) : std::logic_error(m) {}
};

// coordinate change between the extended original space (X, Z, eps) and a chart
struct ChartMap {
    ChartId id;
    Vec3 to_chart(const Vec3& orig) const;  // throws LocusError on the blown-up locus
    Vec3 from_chart(const Vec3& chart) const;
    Mat to_chart_jacobian(const Vec3& orig) const;
    double time_factor(const Vec3& chart) const;  // dtaubar / dtau_chart
    std::string printed_factor() const;           // conventional form (K3/K4 relative to tau1)
};

ChartMap chart_map(ChartId id);

enum class MapDirection { ToChart, FromChart };
Vec3 chart_transform(ChartId id, const Vec3& state, MapDirection dir);

struct ChartEquilibrium {
    ChartId chart;
    std::string label;
    Vec3 coords{};
    std::array<double, 3> spectrum{};
    std::string hyperbolicity;  // hyperbolic | partially hyperbolic | non-hyperbolic
    double residual = 0;
};

std::vector<ChartEquilibrium> chart_equilibria(ChartId id, const EpsilonParams& e);

struct CentreCoefficients {
    std::string point;  // p1 | p3 | p7
    // closed forms
    double graph_power = 0, graph_coeff = 0;
    double flow_power = 0, flow_coeff = 0;
    // log-log fits from chart-field integrations
    double graph_power_fit = 0, graph_coeff_fit = 0;
    double flow_power_fit = 0, flow_coeff_fit = 0;
    bool graph_checked = false, flow_checked = false;
    bool verified = false;  // all available fits within 10 %
};

CentreCoefficients centre_coefficients(const std::string& point, const EpsilonParams& e);

// max relative residual of the chart field against the pushed-forward extended
// original field over random samples in the chart validity box
double pushforward_residual(ChartId id, int n_samples, unsigned seed, const EpsilonParams& e);

// the p1 -> p2 connection: K2 layer orbit from a delta-perturbation of the p1
// centre direction; reached = entered a delta-neighborhood of Gamma5
struct ConnectionResult {
    bool reached = false;
    double landing_U = 0;
    std::vector<Vec2> path;  // (U, Z) samples
};
ConnectionResult k2_connection_p1_to_gamma5(const EpsilonParams& e, double delta);

}  // namespace amo
