#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "amo/linalg.hpp"
#include "amo/params.hpp"

namespace amo {

using RhsFn = std::function<void(double t, const double* y, double* dy)>;

struct StiffnessError : std::runtime_error {
    explicit StiffnessError(const std::string& m) : std::runtime_error(m) {}
};
struct NoCycleError : std::runtime_error {
    explicit NoCycleError(const std::string& m) : std::runtime_error(m) {}
};

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_init = 0.0;  // 0 = automatic
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 400000000L;
    bool store = true;
    std::string method = "rk54";       // "rk54" | "trapezoidal"
    std::vector<int> clamp_coords{};   // concentration-like coordinates clamped at 0
};

struct IntegratorStats {
    long steps = 0, rejects = 0, evals = 0;
    double rel_tol = 0, abs_tol = 0;
};

struct Trajectory {
    std::string model_id;
    double eps = 0;
    int dim = 0;
    std::vector<double> t;
    std::vector<double> y;  // row-major, dim columns
    IntegratorStats stats;
    std::vector<std::string> events;

    size_t size() const { return t.size(); }
    const double* state(size_t i) const { return &y[i * static_cast<size_t>(dim)]; }
};

struct EventSpec {
    std::function<double(double, const double*)> g;
    int direction = 0;  // +1 up-crossings, -1 down, 0 both
    bool terminal = false;
};

struct EventHit {
    double t = 0;
    std::vector<double> y;
    size_t which = 0;
};

Trajectory integrate(const RhsFn& rhs, int dim, const std::vector<double>& y0, double t0, double duration,
                     const IntegratorOptions& opt, const std::vector<EventSpec>& events = {},
                     std::vector<EventHit>* hits = nullptr);

// fixed-step RK5 runner (order audits and manufactured-solution tests)
std::vector<double> integrate_fixed(const RhsFn& rhs, int dim, const std::vector<double>& y0, double t0,
                                    double t1, int n_steps);

struct SectionSpec {
    int coord = 0;
    double value = 0;
    int direction = -1;
    bool auto_midline = false;  // value from a scout integration midrange
};

struct LimitCycle {
    int dim = 2;
    std::vector<double> t;  // one period, t[0] at the section
    std::vector<double> y;
    double period = 0;
    SectionSpec section;
    double convergence = 0;  // state-norm gap between the last two returns
    int returns_used = 0;
    IntegratorStats stats;

    size_t size() const { return t.size(); }
    const double* state(size_t i) const { return &y[i * static_cast<size_t>(dim)]; }
};

LimitCycle find_limit_cycle(const RhsFn& rhs, int dim, const std::vector<double>& y0, double scout_duration,
                            double max_duration, const IntegratorOptions& opt, SectionSpec section,
                            double conv_tol = 1e-8, int max_returns = 64);

// planar polyline of a cycle with chords capped at `cap` (refined by re-stepping)
std::vector<Vec2> cycle_polyline(const RhsFn& rhs, const LimitCycle& c, double cap, int xi = 0, int yi = 1);

// symmetric max-min point-to-segment distance
double hausdorff_distance(const std::vector<Vec2>& A, const std::vector<Vec2>& B);

std::vector<Vec2> rectangle_polyline(double x_lo, double x_hi, double y_lo, double y_hi, int per_side = 64);

struct SegmentConfig {
    double top_band = 0.1;     // |Z - 1/(gamma sigma1)| band
    double gamma1_exp = 1.5;   // X < gamma1_coef * eps^gamma1_exp
    double gamma1_coef = 1.0;
    double bottom_exp = 1.5;   // Z < eps^bottom_exp
    double split_exp = 0.5;    // Gamma5 / Gamma4a split at X = eps^split_exp
    bool practical_top = false;  // top = upper half of the cycle's Z-range, excluding the jump
    double ratio_threshold = 10.0;
    double tail_z_lo = 0.1, tail_z_hi = 0.6;
    int resample_n = 40000;
};

struct SegmentStats {
    std::string name;
    double vmin = 0, vmed = 0, vmax = 0;
    double vmed_projected = 0;  // |X'| scaled by (Z2/Z)^3, the reduced-flow speed at the Gamma2 height
    long count = 0;
    bool empty = true;
};

std::vector<SegmentStats> segment_speeds(const LimitCycle& c, const EpsilonParams& e, const SegmentConfig& cfg);

// Y = Z^2 with the state-dependent time map back to the pre-rescaling clock
Trajectory map_xz_to_xy(const Trajectory& t, const EpsilonParams& e);
// same for a cycle; also returns the remapped period
std::pair<std::vector<Vec2>, double> map_cycle_xz_to_xy(const LimitCycle& c, const EpsilonParams& e);

// convenience wrapper: surrogate limit cycle with the scouted midline section
LimitCycle find_surrogate_cycle(const EpsilonParams& base, double eps, double rel_tol = 1e-10);

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);  // least squares

}  // namespace amo
